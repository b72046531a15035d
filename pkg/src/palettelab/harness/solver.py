"""Direct list-coloring search, the exact oracle and coloring validation."""

from math import prod
from typing import Mapping, Optional, Sequence

from qibo.config import log, raise_error

from palettelab.errors import InstanceTooLarge
from palettelab.graphcore import Graph
from palettelab.search import (
    SearchResult,
    SearchStatus,
    Strategy,
    backtrack_color,
    solve_components,
)

ORACLE_SPACE = 10**8
"""Largest product of list sizes the oracle accepts for graphs above ``ORACLE_ORDER``."""
ORACLE_ORDER = 40


def validate_coloring(
    G: Graph, lists: Sequence[Sequence[int]], coloring: Mapping[int, int]
) -> bool:
    """Whether ``coloring`` is total, proper and inside the lists."""
    if any(v not in coloring for v in range(G.n)):
        return False
    if any(coloring[v] not in lists[v] for v in range(G.n)):
        return False
    return all(coloring[u] != coloring[w] for u, w in G.edges())


def _instance(G: Graph, lists: Sequence[Sequence[int]]):
    return {v: G.adjacency[v] for v in range(G.n)}, {
        v: tuple(lists[v]) for v in range(G.n)
    }


def solve_direct(
    G: Graph,
    lists: Sequence[Sequence[int]],
    budget: Optional[int] = 10**6,
    restarts: int = 20,
    seed: int = 0,
) -> SearchResult:
    """Budgeted backtracking per component, then randomized restarts.

    A component whose backtracking runs out of budget is retried with
    random greedy orders; the result is inconclusive when both give up.
    """
    neighbors, table = _instance(G, lists)
    result = solve_components(neighbors, table, Strategy.BACKTRACK, budget, restarts, seed)
    if result.status is SearchStatus.INCONCLUSIVE:
        log.debug("Backtracking inconclusive, trying %d restarts", restarts)
        retry = solve_components(
            neighbors, table, Strategy.RESTART, budget, restarts, seed
        )
        if retry.success:
            result = SearchResult(
                SearchStatus.SOLVED, retry.coloring, result.nodes + retry.nodes
            )
        else:
            result = SearchResult(
                SearchStatus.INCONCLUSIVE,
                {},
                result.nodes + retry.nodes,
                result.failed_vertex,
                result.residual_size,
            )
    if result.success:
        assert validate_coloring(G, lists, result.coloring)
    return result


def exact_list_colorable(G: Graph, lists: Sequence[Sequence[int]]) -> bool:
    """Exact list-colorability by unbudgeted backtracking.

    Raises:
        InstanceTooLarge: when the product of list sizes exceeds ``10⁸``
            on a graph with more than 40 vertices.
    """
    space = prod(len(lists[v]) for v in range(G.n))
    if space > ORACLE_SPACE and G.n > ORACLE_ORDER:
        raise_error(
            InstanceTooLarge,
            f"Search space {space} on {G.n} vertices is beyond the oracle.",
        )
    neighbors, table = _instance(G, lists)
    result = backtrack_color(neighbors, table, budget=None)
    if result.success:
        assert validate_coloring(G, lists, result.coloring)
    return result.success
