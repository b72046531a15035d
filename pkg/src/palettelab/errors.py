"""Exceptions raised by palettelab.

Algorithmic failures (an uncolorable vertex, a failed Process, an
inconclusive search) are reported as data and never raised; the classes
below cover invalid input and refused work only.
"""


class PaletteLabError(Exception):
    """Base class of all palettelab exceptions."""

    header = "PaletteLabError"

    def __init__(self, message: str):
        super().__init__(f"{self.header}: {message}")


class ParameterError(PaletteLabError, ValueError):
    """Invalid parameter value or precondition violation."""

    header = "ParameterError"


class ParityError(ParameterError):
    """Degree sum is odd, no regular graph exists."""

    header = "ParityError"


class DomainError(ParameterError):
    """Argument outside the domain of a bound."""

    header = "DomainError"


class InfeasibleError(ParameterError):
    """Requested distribution or configuration does not exist."""

    header = "InfeasibleError"


class StructuralError(PaletteLabError, ValueError):
    """Malformed structure: non-partition, bad file, broken invariant."""

    header = "StructuralError"


class GenerationError(PaletteLabError, RuntimeError):
    """A randomized generator gave up after a bounded number of attempts."""

    header = "GenerationError"

    def __init__(self, message: str, attempts: int = 0):
        super().__init__(f"{message} (after {attempts} attempts)")
        self.attempts = attempts


class InstanceTooLarge(PaletteLabError):
    """The exact oracle refuses instances beyond its search bound."""

    header = "InstanceTooLarge"
