"""The pairing Process: give common colors to non-adjacent pairs of a cluster."""

import json
from dataclasses import dataclass, field
from enum import Enum
from math import log
from typing import Dict, Iterator, Mapping, Optional, Sequence, Set, Tuple

from qibo.config import log as logger
from qibo.config import raise_error

from palettelab.densephase.cluster import ClusterBigraph, RegimeReport, classify_regime
from palettelab.errors import ParameterError
from palettelab.graphcore import Edge
from palettelab.palette.params import Params, ProcessParameters, resolve_process


class Action(Enum):
    PAIR = "I"
    """A non-edge inside ``J_i`` gets color ``γ_i``."""
    SINGLE = "II"
    """The vertex of ``J_i`` with least non-degree gets ``γ_i``."""
    IDLE = "III"
    """``J_i`` is empty."""


@dataclass(frozen=True)
class StepRecord:
    i: int
    gamma: int
    J_size: int
    action: Action
    removed: Tuple[int, ...]
    h_gamma: int
    """``|H_γ|`` of the step color."""

    def to_dict(self) -> dict:
        return {
            "i": self.i,
            "gamma": self.gamma,
            "J_size": self.J_size,
            "action": self.action.value,
            "removed": list(self.removed),
            "h_gamma": self.h_gamma,
        }


@dataclass(frozen=True)
class ProcessState:
    """Outcome of the Process on one cluster."""

    parameters: ProcessParameters
    colors: Tuple[int, ...]
    """``γ_1, ..., γ_m``."""
    steps: Tuple[StepRecord, ...]
    remaining: Tuple[int, ...]
    """``C_m``."""
    pairs: Tuple[Edge, ...]
    """``N_m``."""
    coloring: Dict[int, int] = field(hash=False)
    S1: bool
    S2: bool
    S3: bool
    seed: int = 0

    @property
    def success(self) -> bool:
        return self.S1 and self.S2 and self.S3

    def trace(self) -> Iterator[str]:
        """JSON lines, one per step."""
        for step in self.steps:
            yield json.dumps(step.to_dict(), sort_keys=True)


def process_parameters(
    ctx: ClusterBigraph, report: RegimeReport, params: Params, k: int
) -> ProcessParameters:
    return resolve_process(params, ctx.zeta, ctx.D, k, len(report.popular), len(ctx.C))


def step_colors(ctx: ClusterBigraph, popular: Sequence[int], m: int) -> Tuple[int, ...]:
    """The ``m`` popular colors with most non-edges ``|H_γ|``, ties by id."""
    sizes = {gamma: len(ctx.h_gamma(gamma)) for gamma in popular}
    return tuple(sorted(sizes, key=lambda g: (-sizes[g], g))[:m])


def run_process(
    ctx: ClusterBigraph,
    lists: Mapping[int, Sequence[int]],
    params: Params,
    seed: int = 0,
    k: Optional[int] = None,
    report: Optional[RegimeReport] = None,
) -> ProcessState:
    """Run the ``m`` steps of the Process over trimmed lists.

    The Process is deterministic given the lists: step (I) takes the
    lexicographically smallest non-edge of ``H[J_i]``, step (II) the vertex
    of least non-degree with the smallest id.

    Args:
        ctx: cluster context.
        lists: trimmed lists of the cluster vertices.
        params: pipeline parameters.
        seed: recorded with the state.
        k: list size, defaults to the longest list.
        report: regime report, computed when missing.
    """
    report = classify_regime(ctx, params) if report is None else report
    if not report.R1:
        raise_error(ParameterError, "The Process needs a cluster in regime R1.")
    k = max((len(lists[v]) for v in ctx.C), default=0) if k is None else k
    resolved = process_parameters(ctx, report, params, k)
    if resolved.m <= 0:
        raise_error(
            ParameterError, f"Process length resolved to m={resolved.m} steps."
        )
    colors = step_colors(ctx, sorted(report.popular), resolved.m)
    nonadjacent: Dict[int, Set[int]] = {v: set() for v in ctx.C}
    for u, w in ctx.H:
        nonadjacent[u].add(w)
        nonadjacent[w].add(u)

    current = set(ctx.C)
    pairs, singles, steps = [], [], []
    coloring: Dict[int, int] = {}
    idle = False
    for i, gamma in enumerate(colors, start=1):
        J = sorted(v for v in current if gamma in lists[v])
        members = set(J)
        pair = next(
            ((x, y) for x in J for y in sorted(nonadjacent[x] & members) if y > x),
            None,
        )
        if pair is not None:
            action, removed = Action.PAIR, pair
            pairs.append(pair)
        elif J:
            z = min(J, key=lambda v: (ctx.h_degree[v], v))
            action, removed = Action.SINGLE, (z,)
            singles.append(z)
        else:
            action, removed = Action.IDLE, ()
            idle = True
        for v in removed:
            coloring[v] = gamma
        current -= set(removed)
        assert len(current) + 2 * len(pairs) + len(singles) == len(ctx.C)
        steps.append(
            StepRecord(i, gamma, len(J), action, removed, len(ctx.h_gamma(gamma)))
        )

    remaining = tuple(sorted(current))
    assert sum(1 for u, w in ctx.H if u in current and w in current) == sum(
        len(nonadjacent[v] & current) for v in remaining
    ) // 2

    cap = 0.1 * params.delta * log(ctx.n) if ctx.n > 1 else 0.0
    chosen = set(colors)
    S1 = all(len(chosen.intersection(lists[v])) <= cap for v in ctx.C)
    single_cap = 6 * ctx.zeta * ctx.D / params.delta
    S2 = not idle and all(ctx.h_degree[z] < single_cap for z in singles)
    S3 = len(pairs) >= resolved.eta * ctx.D

    floor_h = 2 * params.theta * ctx.zeta * ctx.D**2 / 3
    sizes = [step.h_gamma for step in steps]
    assert all(a >= b for a, b in zip(sizes, sizes[1:]))
    short = sum(1 for h in sizes if h < floor_h)
    if short:
        logger.warning(
            "%d Process colors have |H_γ| below 2θζD²/3=%.2f", short, floor_h
        )
    state = ProcessState(
        parameters=resolved,
        colors=colors,
        steps=tuple(steps),
        remaining=remaining,
        pairs=tuple(pairs),
        coloring=coloring,
        S1=S1,
        S2=S2,
        S3=S3,
        seed=seed,
    )
    logger.debug(
        "Process: %d steps, %d pairs, S1=%s S2=%s S3=%s",
        len(steps),
        len(pairs),
        S1,
        S2,
        S3,
    )
    return state
