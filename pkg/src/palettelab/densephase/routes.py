"""Coloring one cluster along its regime route, with a direct fallback."""

from dataclasses import dataclass, field
from math import floor, log
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple

from qibo.config import log as logger

from palettelab.densephase.bigraph import Bigraph, HallReport, hall_check, max_matching
from palettelab.densephase.cluster import (
    ClusterBigraph,
    RegimeReport,
    Route,
    TrimResult,
    classify_regime,
    trim_lists,
)
from palettelab.densephase.process import ProcessState, process_parameters, run_process
from palettelab.palette.params import Params


@dataclass(frozen=True)
class MatchAttempt:
    coloring: Dict[int, int] = field(hash=False)
    hall: Optional[HallReport] = None
    """Deficiency with witness in vertex ids, only on failure."""

    @property
    def success(self) -> bool:
        return self.hall is None


def match_into(
    vertices: Sequence[int],
    allowed: Mapping[int, Iterable[int]],
    gamma_size: int,
    initial: Optional[Mapping[int, int]] = None,
) -> MatchAttempt:
    """Give every vertex a distinct color of ``allowed[v]``.

    Colors assigned by ``initial`` stay in use by the result.
    """
    vertices = list(vertices)
    if not vertices:
        return MatchAttempt({})
    position = {v: i for i, v in enumerate(vertices)}
    B = Bigraph.from_lists(len(vertices), gamma_size, (allowed[v] for v in vertices))
    start = None if initial is None else {position[v]: c for v, c in initial.items()}
    matching = max_matching(B, start)
    coloring = {vertices[u]: z for u, z in matching.pairs.items()}
    if matching.is_u_perfect:
        return MatchAttempt(coloring)
    report = hall_check(B, "matching")
    witness = frozenset(vertices[u] for u in report.witness)
    return MatchAttempt(coloring, HallReport(report.deficiency, witness, report.mode))


@dataclass(frozen=True)
class ClusterOutcome:
    """Coloring of a cluster or the diagnostic of its failure."""

    route: Route
    report: RegimeReport = field(repr=False)
    trim: TrimResult = field(repr=False)
    coloring: Dict[int, int] = field(default_factory=dict, hash=False)
    success: bool = False
    failed_route: Optional[Route] = None
    """Route that failed before the fallback matching."""
    fallback_used: bool = False
    hall: Optional[HallReport] = None
    process: Optional[ProcessState] = field(default=None, repr=False)
    events: Dict[str, bool] = field(default_factory=dict, hash=False)
    """Runtime checks of the staged route."""


def _direct(ctx: ClusterBigraph, lists: Mapping[int, Sequence[int]]) -> MatchAttempt:
    return match_into(ctx.C, lists, ctx.gamma_size)


def _process_route(
    ctx: ClusterBigraph,
    lists: Mapping[int, Sequence[int]],
    params: Params,
    report: RegimeReport,
    seed: int,
    k: int,
) -> Tuple[MatchAttempt, ProcessState]:
    state = run_process(ctx, lists, params, seed, k, report)
    if not state.success:
        return MatchAttempt({}, HallReport(0, frozenset(), "process")), state
    spent = set(state.colors)
    rest = {v: [c for c in lists[v] if c not in spent] for v in state.remaining}
    attempt = match_into(state.remaining, rest, ctx.gamma_size)
    if attempt.success:
        return MatchAttempt({**state.coloring, **attempt.coloring}), state
    return attempt, state


def _staged_route(
    ctx: ClusterBigraph,
    lists: Mapping[int, Sequence[int]],
    params: Params,
    report: RegimeReport,
    k: int,
) -> Tuple[MatchAttempt, Dict[str, bool]]:
    D, theta = ctx.D, params.theta
    popular, unpopular = report.popular, report.unpopular
    small = params.delta * log(ctx.n) / 3 if ctx.n > 1 else 0.0
    I = [v for v in ctx.C if len(ctx.T[v] & unpopular) > D / 3]
    I0 = [v for v in I if len(unpopular.intersection(lists[v])) < k / 4]
    I1 = [v for v in I if v not in set(I0)]
    events = {
        "outside_s_few_unpopular": all(
            len(unpopular.intersection(lists[v])) < small
            for v in ctx.C
            if v not in report.S
        ),
        "i0_rich_in_popular": all(len(ctx.T[v] & popular) >= theta * D for v in I0),
        "i0_small": len(I0) <= max(1.0, len(I) / log(ctx.n)) if ctx.n > 1 else True,
    }

    first = match_into(
        I0, {v: popular.intersection(lists[v]) for v in I0}, ctx.gamma_size
    )
    if not first.success:
        return first, events
    P0 = frozenset(first.coloring.values())
    events["few_p0_colors"] = all(
        len(P0.intersection(lists[v])) <= small for v in ctx.C
    )

    rest = [v for v in ctx.C if v not in set(I)]
    A = [v for v in rest if v not in report.S]
    A = A[: max(0, len(ctx.C) - floor(theta * D))]
    seed_matching = match_into(
        A, {v: (popular - P0).intersection(lists[v]) for v in A}, ctx.gamma_size
    )
    initial = seed_matching.coloring
    second = match_into(
        rest,
        {v: [c for c in lists[v] if c not in P0] for v in rest},
        ctx.gamma_size,
        initial,
    )
    if not second.success:
        return second, events
    U0 = frozenset(second.coloring.values()) & unpopular

    free: FrozenSet[int] = unpopular - U0
    third = match_into(I1, {v: free.intersection(lists[v]) for v in I1}, ctx.gamma_size)
    if not third.success:
        return third, events
    logger.debug("Staged route events %s", events)
    return MatchAttempt({**first.coloring, **second.coloring, **third.coloring}), events


def _check(ctx: ClusterBigraph, lists: Mapping[int, Sequence[int]], coloring: Dict[int, int]):
    nonadjacent = set(ctx.H)
    assert set(coloring) == set(ctx.C)
    assert all(coloring[v] in lists[v] for v in ctx.C)
    by_color: Dict[int, list] = {}
    for v in ctx.C:
        by_color.setdefault(coloring[v], []).append(v)
    for group in by_color.values():
        for i, u in enumerate(group):
            for w in group[i + 1 :]:
                assert (min(u, w), max(u, w)) in nonadjacent


def color_cluster(
    ctx: ClusterBigraph,
    lists: Mapping[int, Sequence[int]],
    params: Params,
    seed: int = 0,
    k: Optional[int] = None,
) -> ClusterOutcome:
    """Extend the coloring to the cluster from its trimmed lists.

    The route follows the regime report; when it fails, a maximum matching
    of the whole cluster into its trimmed lists is tried before giving up.

    Args:
        ctx: cluster context, fixed by the coloring outside the cluster.
        lists: sampled lists of the cluster vertices.
        params: pipeline parameters.
        seed: recorded with the Process state.
        k: list size, defaults to the longest list.
    """
    k = max((len(lists[v]) for v in ctx.C), default=0) if k is None else k
    trim = trim_lists(ctx, lists, params.delta)
    trimmed = trim.lists
    report = classify_regime(ctx, params)
    route = report.route
    if route is Route.PROCESS and process_parameters(ctx, report, params, k).m < 1:
        logger.debug("Process length below one step, matching directly")
        route = Route.DIRECT

    state, events = None, {}
    if route is Route.PROCESS:
        attempt, state = _process_route(ctx, trimmed, params, report, seed, k)
    elif route is Route.STAGED:
        attempt, events = _staged_route(ctx, trimmed, params, report, k)
    else:
        attempt = _direct(ctx, trimmed)

    failed_route, fallback = None, False
    if not attempt.success and route in (Route.PROCESS, Route.STAGED):
        logger.debug("Route %s failed, trying a direct matching", route.value)
        failed_route, fallback = route, True
        attempt = _direct(ctx, trimmed)
    elif not attempt.success:
        failed_route = route

    if attempt.success:
        _check(ctx, trimmed, attempt.coloring)
    return ClusterOutcome(
        route=route,
        report=report,
        trim=trim,
        coloring=attempt.coloring if attempt.success else {},
        success=attempt.success,
        failed_route=failed_route,
        fallback_used=fallback,
        hall=attempt.hall,
        process=state,
        events=events,
    )
