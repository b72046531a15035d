"""Completing the retained partial coloring on the sparse part ``V*``."""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional, Tuple

from qibo.config import log

from palettelab.decomposition import Decomposition
from palettelab.graphcore import Graph
from palettelab.palette import ListSample, PaletteSystem
from palettelab.search import SearchResult, SearchStatus, Strategy, solve_components
from palettelab.sparsephase.tentative import RetainedColoring, TentativeAssignment

DEFAULT_BUDGET = 10**6
DEFAULT_RESTARTS = 20


def residual_lists(
    G: Graph,
    sparse: FrozenSet[int],
    rc: RetainedColoring,
    lists: ListSample,
    ta: Optional[TentativeAssignment] = None,
) -> Dict[int, Tuple[int, ...]]:
    """``L_v`` minus the tentative color and the colors kept next to ``v``.

    Only uncolored sparse vertices get a residual list; the tentative color
    is dropped only when ``ta`` is given.
    """
    residual = {}
    for v in sorted(sparse - rc.T):
        spent = {rc.sigma[w] for w in G.adjacency[v] if w in rc.T}
        if ta is not None:
            spent.add(ta.tau[v])
        residual[v] = tuple(c for c in lists.L[v] if c not in spent)
    return residual


@dataclass(frozen=True)
class SparseCompletion:
    """Coloring of ``V*`` or the diagnostic of the failing vertex."""

    coloring: Dict[int, int] = field(hash=False)
    """Retained colors plus the search result, on ``V*``."""
    search: SearchResult
    residual: Dict[int, Tuple[int, ...]] = field(hash=False, repr=False)

    @property
    def success(self) -> bool:
        return self.search.success

    @property
    def failed_vertex(self) -> Optional[int]:
        return self.search.failed_vertex

    @property
    def residual_size(self) -> int:
        return self.search.residual_size


def complete_sparse(
    G: Graph,
    P: PaletteSystem,
    dec: Decomposition,
    rc: RetainedColoring,
    lists: ListSample,
    strategy: Strategy = Strategy.BACKTRACK,
    ta: Optional[TentativeAssignment] = None,
    budget: Optional[int] = DEFAULT_BUDGET,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> SparseCompletion:
    """Color the uncolored sparse vertices from their residual lists.

    Args:
        G: graph.
        P: base palettes.
        dec: decomposition, only ``dec.sparse`` is colored.
        rc: retained coloring, restricted to ``V*`` or not.
        lists: sampled lists.
        strategy: search strategy for each component of ``G[V* \\ T]``.
        ta: tentative assignment whose colors are spent by the first step.
        budget: node budget of the backtracking strategy.
        restarts: random orders of the restart strategy.
        seed: seed of the restart strategy.
    """
    lists.check(P)
    sparse = dec.sparse
    kept = {v: rc.sigma[v] for v in sorted(rc.T & sparse)}
    retained = RetainedColoring(frozenset(kept), kept)
    residual = residual_lists(G, sparse, retained, lists, ta)
    if not residual:
        return SparseCompletion(kept, SearchResult(SearchStatus.SOLVED), residual)
    neighbors = {v: G.adjacency[v] for v in residual}
    result = solve_components(
        neighbors, residual, Strategy(strategy), budget, restarts, seed
    )
    if result.success:
        log.debug(
            "Sparse completion colored %d vertices in %d nodes",
            len(residual),
            result.nodes,
        )
        return SparseCompletion({**kept, **result.coloring}, result, residual)
    log.debug(
        "Sparse completion failed at vertex %s with %d residual colors",
        result.failed_vertex,
        result.residual_size,
    )
    return SparseCompletion(kept, result, residual)
