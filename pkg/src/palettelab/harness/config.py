"""Experiment configuration: dataclass, ``key=value`` files and overrides."""

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional

from qibo.config import raise_error

from palettelab.errors import ParameterError, StructuralError
from palettelab.graphcore import Family, GeneratorSpec
from palettelab.harness.records import Mode
from palettelab.harness.sweep import Sweeper, SweepType
from palettelab.palette import Params, PaletteMode
from palettelab.search import Strategy

DEFAULT_RETRIES = 3
DEFAULT_BUDGET = 10**6
DEFAULT_RESTARTS = 20


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run of trials depends on."""

    graph: GeneratorSpec
    grid: Sweeper = field(default_factory=lambda: Sweeper((2.0,)))
    palette_mode: PaletteMode = PaletteMode.IDENTICAL
    gamma_size: Optional[int] = None
    """Color universe bound, defaults to ``2(D+1)`` for non-identical modes."""
    params: Params = field(default_factory=Params)
    trials: int = 1
    """Trials per grid value."""
    seed: int = 0
    """Master seed of lists and internal randomness."""
    mode: Mode = Mode.PIPELINE
    jobs: int = 1
    out: Optional[Path] = None
    sparse_strategy: Strategy = Strategy.BACKTRACK
    budget: int = DEFAULT_BUDGET
    """Backtracking node budget."""
    restarts: int = DEFAULT_RESTARTS
    retries: int = DEFAULT_RETRIES
    """Redraws of the tentative colors after a sparse failure."""
    use_xi: bool = True
    timing: bool = False
    """Add the wall-time column to the CSV."""

    def __post_init__(self):
        if self.trials < 1:
            raise_error(ParameterError, f"trials must be at least 1, got {self.trials}.")
        if self.jobs < 1:
            raise_error(ParameterError, f"jobs must be at least 1, got {self.jobs}.")
        if self.retries < 0 or self.budget < 1 or self.restarts < 1:
            raise_error(ParameterError, "retries, budget and restarts must be positive.")

    def universe(self, D: int) -> int:
        if self.gamma_size is not None:
            return self.gamma_size
        if self.palette_mode is PaletteMode.IDENTICAL:
            return D + 1
        return 2 * (D + 1)

    def fill(self, options: Mapping[str, Any]) -> "ExperimentConfig":
        """Copy with the non-``None`` options replaced."""
        return replace(self, **{k: v for k, v in options.items() if v is not None})

    @classmethod
    def from_options(cls, options: Mapping[str, Any]) -> "ExperimentConfig":
        """Build from flat options named after the command-line flags."""
        opts = {normalize_key(k): v for k, v in options.items() if v is not None}
        unknown = set(opts) - set(CONVERTERS)
        if unknown:
            raise_error(ParameterError, f"Unknown configuration keys {sorted(unknown)}.")
        try:
            opts = {k: CONVERTERS[k](v) for k, v in opts.items()}
        except ValueError as error:
            raise_error(ParameterError, f"Invalid configuration value: {error}")

        graph = GeneratorSpec(
            family=opts.pop("graph", Family.RANDOM_REGULAR),
            n=opts.pop("n", 0),
            D=opts.pop("d_degree", 0),
            m=opts.pop("m_cliques", 0),
            seed=opts.pop("graph_seed", opts.get("seed", 0)),
            hybrid_mix=opts.pop("hybrid_mix", 0.0),
            path=opts.pop("graph_file", None),
        )
        ell = opts.pop("ell", None)
        factors = opts.pop("ell_factor", None)
        if ell is not None and factors is not None:
            raise_error(ParameterError, "Give either ell or ell-factor, not both.")
        if ell is not None:
            grid = Sweeper(tuple(float(v) for v in ell), SweepType.ABSOLUTE)
        else:
            grid = Sweeper(factors if factors is not None else (2.0,))
        params = Params().fill(
            **{k: opts.pop(k) for k in PARAM_KEYS if k in opts}
        )
        return cls(graph=graph, grid=grid, params=params, **opts)


def normalize_key(key: str) -> str:
    return key.strip().lstrip("-").replace("-", "_")


def _grid(value) -> tuple:
    if isinstance(value, str):
        return tuple(float(v) for v in value.replace(",", " ").split())
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    return (float(value),)


def _flag(value) -> bool:
    if isinstance(value, str):
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {value!r}")
    return bool(value)


CONVERTERS: Dict[str, Callable[[Any], Any]] = {
    "graph": Family,
    "n": int,
    "d_degree": int,
    "m_cliques": int,
    "graph_seed": int,
    "hybrid_mix": float,
    "graph_file": str,
    "ell": _grid,
    "ell_factor": _grid,
    "palette_mode": PaletteMode,
    "gamma_size": int,
    "delta": float,
    "eps": float,
    "b0": float,
    "friend_slack": int,
    "target_tol": float,
    "spread_tol": float,
    "trials": int,
    "seed": int,
    "mode": Mode,
    "jobs": int,
    "out": Path,
    "sparse_strategy": Strategy,
    "budget": int,
    "restarts": int,
    "retries": int,
    "use_xi": _flag,
    "timing": _flag,
}
PARAM_KEYS = ("delta", "eps", "b0", "friend_slack", "target_tol", "spread_tol")


def parse_config(text: str) -> Dict[str, str]:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are skipped."""
    options = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise_error(StructuralError, f"Line {number} is not 'key=value': {line!r}.")
        options[normalize_key(key)] = value.strip()
    return options


def load_config(path: Path) -> Dict[str, str]:
    return parse_config(Path(path).read_text())
