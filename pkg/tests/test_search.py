"""Tests for ``search.py``."""

import pytest

from palettelab.graphcore import build_graph, gen_disjoint_cliques, gen_random_regular
from palettelab.search import (
    SEARCHER,
    Searcher,
    SearchResult,
    SearchStatus,
    Strategy,
    backtrack_color,
    greedy_color,
    restart_color,
    solve_components,
)


def _uniform(G, colors):
    return {v: tuple(colors) for v in range(G.n)}


def _proper(G, coloring, lists):
    assert all(coloring[v] in lists[v] for v in lists)
    assert all(coloring[u] != coloring[v] for u, v in G.edges() if u in lists and v in lists)


@pytest.mark.parametrize("search", [greedy_color, backtrack_color, restart_color])
def test_triangle(triangle, search):
    lists = _uniform(triangle, range(3))
    result = search(triangle.adjacency, lists)
    assert result.success
    _proper(triangle, result.coloring, lists)


def test_odd_cycle_two_colors(cycle5):
    result = backtrack_color(cycle5.adjacency, _uniform(cycle5, (0, 1)))
    assert result.status is SearchStatus.UNSATISFIABLE
    assert result.coloring == {}
    assert result.nodes > 0


def test_backtrack_budget(cycle5):
    result = backtrack_color(cycle5.adjacency, _uniform(cycle5, (0, 1)), budget=1)
    assert result.status is SearchStatus.INCONCLUSIVE
    assert result.nodes == 1


def test_backtrack_empty_instance(triangle):
    assert backtrack_color(triangle.adjacency, {}).success


def test_empty_list(triangle):
    lists = {0: (0, 1), 1: (), 2: (2,)}
    for search in (greedy_color, backtrack_color, restart_color):
        result = search(triangle.adjacency, lists)
        assert result.status is SearchStatus.UNSATISFIABLE
        assert result.failed_vertex == 1


def test_greedy_fixed_order():
    path = build_graph(3, [(0, 1), (1, 2)])
    lists = {0: (0,), 1: (0, 1), 2: (1,)}
    stuck = greedy_color(path.adjacency, lists, order=[0, 2, 1])
    assert stuck.status is SearchStatus.INCONCLUSIVE
    assert stuck.failed_vertex == 1
    assert stuck.residual_size == 2
    # the most constrained vertices have the same problem
    assert not greedy_color(path.adjacency, lists).success
    assert backtrack_color(path.adjacency, lists).status is SearchStatus.UNSATISFIABLE


def test_outside_neighbors_ignored():
    path = build_graph(3, [(0, 1), (1, 2)])
    result = greedy_color(path.adjacency, {0: (0,), 2: (0,)})
    assert result.success
    assert result.coloring == {0: 0, 2: 0}


def test_restart_deterministic():
    G = gen_random_regular(30, 4, seed=2)
    lists = _uniform(G, range(5))
    first = restart_color(G.adjacency, lists, restarts=5, seed=3)
    assert first == restart_color(G.adjacency, lists, restarts=5, seed=3)


@pytest.mark.parametrize("strategy", list(Strategy))
def test_searcher_rules(strategy, cycle5):
    lists = _uniform(cycle5, range(3))
    result = SEARCHER[strategy](cycle5.adjacency, lists, None, 5, 0)
    assert result.success
    _proper(cycle5, result.coloring, lists)
    assert SEARCHER[strategy.value] is SEARCHER[strategy]


def test_searcher_missing():
    with pytest.raises(KeyError):
        SEARCHER["bogus"]
    with pytest.raises(KeyError):
        Searcher()[Strategy.GREEDY]


def test_searcher_register(cycle5):
    searcher = Searcher()

    @searcher.register(Strategy.GREEDY)
    def refuse(neighbors, lists, budget, restarts, seed):
        return SearchResult(SearchStatus.INCONCLUSIVE)

    result = solve_components(
        cycle5.adjacency, _uniform(cycle5, range(3)), Strategy.GREEDY, searcher=searcher
    )
    assert result.status is SearchStatus.INCONCLUSIVE


def test_components_cliques_by_matching():
    G = gen_disjoint_cliques(2, 2)
    lists = {v: (0, 1, 2) for v in range(6)}
    lists[0] = (5,)
    searcher = Searcher()

    @searcher.register(Strategy.BACKTRACK)
    def refuse(neighbors, lists, budget, restarts, seed):
        return SearchResult(SearchStatus.INCONCLUSIVE)

    result = solve_components(G.adjacency, lists, searcher=searcher)
    assert result.success
    assert result.coloring[0] == 5
    _proper(G, result.coloring, lists)


def test_components_unsatisfiable_clique():
    G = gen_disjoint_cliques(2, 2)
    lists = {v: (0, 1, 2) for v in range(6)}
    lists.update({3: (0, 1), 4: (0, 1), 5: (0, 1)})
    result = solve_components(G.adjacency, lists)
    assert result.status is SearchStatus.UNSATISFIABLE
    assert result.failed_vertex in (3, 4, 5)
    assert result.residual_size == 2
    assert set(result.coloring) == {0, 1, 2}


def test_components_mixed(cycle5):
    lists = _uniform(cycle5, range(3))
    lists.update({10: (0,), 11: (0, 1)})
    neighbors = dict(enumerate(cycle5.adjacency))
    neighbors.update({10: (11,), 11: (10,)})
    result = solve_components(neighbors, lists, Strategy.BACKTRACK)
    assert result.success
    assert result.coloring[10] == 0
    assert result.coloring[11] == 1
