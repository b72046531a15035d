"""Trial records and the frozen CSV schema."""

from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Dict, Optional, Tuple


class Mode(Enum):
    """Evaluation mode of a trial."""

    PIPELINE = "pipeline"
    """The two-phase coloring pipeline."""
    SOLVER = "solver"
    """Direct list-coloring search, ignoring the pipeline."""


class Outcome(Enum):
    SUCCESS = "success"
    STAGE_FAILURE = "stage-failure"
    INCONCLUSIVE = "inconclusive"
    """Search budget exhausted without a verdict."""


class Stage(Enum):
    """Pipeline stage named by a failure."""

    NONE = ""
    SPARSE = "sparse"
    DENSE = "dense"
    SOLVER = "solver"


@dataclass(frozen=True)
class TrialRecord:
    """Result of one trial.

    Fields flagged with ``metadata["csv"]`` form the CSV columns, in
    declaration order; ``wall_time`` is added only on request.
    """

    trial: int = field(metadata={"csv": True})
    master_seed: int = field(metadata={"csv": True})
    seed: int = field(metadata={"csv": True})
    """Seed derived from the master seed, trial and point."""
    graph: str = field(metadata={"csv": True})
    palette_mode: str = field(metadata={"csv": True})
    ell: int = field(metadata={"csv": True})
    mode: Mode = field(metadata={"csv": True})
    outcome: Outcome = field(metadata={"csv": True})
    c: Optional[float] = field(default=None, metadata={"csv": True})
    """Grid value with ``ℓ = c log n``, empty for absolute ``ℓ``."""
    stage: Stage = field(default=Stage.NONE, metadata={"csv": True})
    detail: str = field(default="", metadata={"csv": True})
    retries: int = field(default=0, metadata={"csv": True})
    retained_mean: Optional[float] = field(default=None, metadata={"csv": True})
    """Mean ``|T ∩ N_v|`` over the sparse part."""
    routes: Tuple[str, ...] = field(default=(), metadata={"csv": True})
    """Route of every cluster, in cluster order."""
    fallbacks: int = field(default=0, metadata={"csv": True})
    nodes: int = field(default=0, metadata={"csv": True})
    wall_time: float = field(default=0.0, compare=False, metadata={"timing": True})
    coloring: Dict[int, int] = field(default_factory=dict, compare=False, repr=False)
    diagnostics: dict = field(default_factory=dict, compare=False, repr=False)
    """JSON-only details: audit, regime reports, resolved parameters."""

    @property
    def success(self) -> bool:
        return self.outcome is Outcome.SUCCESS

    def row(self, timing: bool = False) -> dict:
        """CSV row as an ordered mapping."""
        data = {}
        for fld in fields(self):
            if fld.metadata.get("csv") or (timing and fld.metadata.get("timing")):
                data[fld.name] = _cell(getattr(self, fld.name))
        return data

    def to_dict(self) -> dict:
        """JSON mirror, including wall time and diagnostics."""
        data = {
            fld.name: _json(getattr(self, fld.name))
            for fld in fields(self)
            if fld.name != "coloring"
        }
        data["coloring"] = {str(v): c for v, c in sorted(self.coloring.items())}
        return data


def _cell(value):
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, tuple):
        return "|".join(value)
    if value is None:
        return ""
    return value


def _json(value):
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, tuple):
        return list(value)
    return value


CSV_COLUMNS = tuple(f.name for f in fields(TrialRecord) if f.metadata.get("csv"))
TIMING_COLUMN = "wall_time"


def columns(timing: bool = False) -> Tuple[str, ...]:
    return CSV_COLUMNS + ((TIMING_COLUMN,) if timing else ())
