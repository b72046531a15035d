"""Pipeline constants and their finite-scale instantiation."""

from dataclasses import dataclass, replace
from math import exp, floor, sqrt
from typing import Optional, Tuple

from qibo.config import log, raise_error

from palettelab.errors import ParameterError


@dataclass(frozen=True)
class Params:
    """Parameters of both coloring phases.

    Only ``delta``, ``eps``, ``b0`` and the optional overrides are stored;
    everything else is derived on access.
    """

    delta: float = 1.0
    """List-size excess, ``k = (1+δ) log n``."""
    eps: float = 0.1
    """Decomposition parameter."""
    b0: float = 7.0
    """Constant in the Process success probability ``q``."""
    theta_override: Optional[float] = None
    """Replaces ``θ = e^{-9/δ}`` in regime thresholds when set."""
    zeta0_override: Optional[float] = None
    """Replaces the default ``ζ₀ = √ε / D`` when set."""
    eta_override: Optional[float] = None
    bigK_override: Optional[float] = None
    friend_slack: int = 3
    """Codegree slack of the decomposition friendship relation."""
    target_tol: float = 0.2
    """Relative tolerance of the retained-neighborhood target."""
    spread_tol: float = 0.15
    """Largest standard deviation of ``|T ∩ N_v|``, in units of ``D``, still
    counted as concentrated."""

    def __post_init__(self):
        if self.delta <= 0:
            raise_error(ParameterError, f"delta must be positive, got {self.delta}.")
        if not 0 < self.eps < 1:
            raise_error(ParameterError, f"eps must lie in (0, 1), got {self.eps}.")
        if self.b0 <= 0:
            raise_error(ParameterError, f"b0 must be positive, got {self.b0}.")

    def fill(self, **options) -> "Params":
        """Copy with the non-``None`` options replaced."""
        return replace(self, **{k: v for k, v in options.items() if v is not None})

    @property
    def theta(self) -> float:
        if self.theta_override is not None:
            return self.theta_override
        return exp(-9 / self.delta)

    @property
    def rho(self) -> float:
        return self.delta / 10

    @property
    def nu0(self) -> float:
        return self.rho / 2

    @property
    def vartheta(self) -> float:
        return self.eps**2 / 2

    @property
    def vartheta_prime(self) -> float:
        return exp(-3) * self.vartheta / 4

    def b(self, D: int) -> float:
        """Degree threshold separating popular colors."""
        return D / (1 + self.rho)

    def zeta0(self, D: int) -> float:
        if self.zeta0_override is not None:
            return self.zeta0_override
        return sqrt(self.eps) / D

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "eps": self.eps,
            "b0": self.b0,
            "theta": self.theta,
            "rho": self.rho,
            "nu0": self.nu0,
            "vartheta": self.vartheta,
            "vartheta_prime": self.vartheta_prime,
        }


@dataclass(frozen=True)
class ProcessParameters:
    """Resolved Process parameters for one cluster."""

    eta: float
    q: float
    bigK: float
    m_raw: float
    """``KηD/q`` before clamping."""
    m: int
    """Number of Process steps after clamping."""
    clamped: Tuple[str, ...] = ()
    """Names of the parameters moved into their bracket."""


def _clamp(value: float, low: float, high: float) -> float:
    return min(max(value, low), high)


def resolve_process(
    params: Params, zeta: float, D: int, k: int, popular: int, cluster_size: int
) -> ProcessParameters:
    """Instantiate ``η, q, K, m`` for a cluster.

    ``η`` and ``K`` default to geometric means of their brackets and are
    clamped into them; when a bracket is empty the lower end is used.
    ``m`` is capped by the number of popular colors and by half the
    cluster.

    Args:
        params: pipeline parameters.
        zeta: non-edge density of the cluster.
        D: degree.
        k: list size.
        popular: number of popular colors ``|P|``.
        cluster_size: ``|C|``.
    """
    eps = params.eps
    clamped = []
    low, high = max(zeta, 1 / D), zeta / eps
    if params.eta_override is not None:
        eta = params.eta_override
    else:
        eta = sqrt(low * high) if high > low else low
    if high < low:
        clamped.append("eta")
        eta = low
    elif not low <= eta <= high:
        clamped.append("eta")
        eta = _clamp(eta, low, high)

    q = 1 - exp(-params.theta * zeta * k / (18 * params.b0 * eps))

    if params.bigK_override is not None:
        bigK = params.bigK_override
    elif zeta > 0 and q > 0:
        bigK = sqrt(q / eta) * max(1.0, sqrt(eps * q / (zeta * D * eta)))
    else:
        bigK = 1.0
    upper = q / eta if eta > 0 else 1.0
    if upper < 1:
        clamped.append("bigK")
        bigK = 1.0
    elif not 1 <= bigK <= upper:
        clamped.append("bigK")
        bigK = _clamp(bigK, 1.0, upper)

    m_raw = bigK * eta * D / q if q > 0 else 0.0
    m = min(floor(m_raw), popular, cluster_size // 2)
    if m != floor(m_raw):
        clamped.append("m")
    resolved = ProcessParameters(eta, q, bigK, m_raw, m, tuple(clamped))
    log.debug("Process parameters %s", resolved)
    return resolved
