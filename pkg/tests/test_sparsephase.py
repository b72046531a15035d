"""Tests for the ``sparsephase`` package."""

from fractions import Fraction
from math import exp

import numpy as np
import pytest
from scipy import stats

from palettelab.decomposition import Decomposition
from palettelab.errors import ParameterError
from palettelab.graphcore import build_graph, gen_disjoint_cliques, gen_random_regular
from palettelab.palette import (
    ListSample,
    Params,
    PaletteMode,
    PaletteSystem,
    make_palette,
    sample_lists,
)
from palettelab.search import SearchStatus, Strategy
from palettelab.sparsephase import (
    Branch,
    RetainedColoring,
    SparseDiagnostics,
    TargetStatus,
    TentativeAssignment,
    VertexDiagnostics,
    alien_pairs,
    alien_size,
    check_targets,
    color_degree_L,
    color_degree_S,
    complete_sparse,
    diagnose_sparse,
    exact_retention_probability,
    expected_fraternal_events,
    fraternal_pairs,
    fraternal_size,
    realized_events,
    residual_lists,
    retained_mask,
    retained_neighbors,
    retained_set,
    retention_statistics,
    slack,
    sparse_dichotomy,
    tentative_assign,
    two_step_assign,
    two_step_ell,
    zeta_hat,
)


@pytest.fixture
def edge():
    return build_graph(2, [(0, 1)])


@pytest.fixture
def star():
    """Center 0 joined to 1, 2, 3; leaves pairwise non-adjacent."""
    return build_graph(4, [(0, 1), (0, 2), (0, 3)])


def _palette(G, rows, gamma_size=None):
    used = sorted({c for row in rows for c in row})
    return PaletteSystem(gamma_size or len(used), tuple(tuple(r) for r in rows), G.D)


def test_color_degrees(cycle5):
    P = make_palette(cycle5, PaletteMode.IDENTICAL, 3)
    assert all(color_degree_S(cycle5, P, v, g) == 2 for v in range(5) for g in range(3))
    lists = ListSample(((0,), (1,), (0,), (2,), (0,)), 1, 0)
    assert color_degree_L(cycle5, lists, 0, 0) == 1
    assert color_degree_L(cycle5, lists, 2, 0) == 0


def test_color_degree_random_wide():
    G = gen_random_regular(30, 4, seed=0)
    P = make_palette(G, PaletteMode.RANDOM_WIDE, 15, seed=2)
    for v in range(5):
        for gamma in range(P.gamma_size):
            expected = sum(1 for w in G.adjacency[v] if gamma in P.S[w])
            assert color_degree_S(G, P, v, gamma) == expected


def test_tentative_identical_keeps_everything(cliques, cliques_palette):
    ta = tentative_assign(cliques, cliques_palette, seed=3)
    assert all(ta.xi)
    ta.check(cliques_palette)


def test_tentative_deterministic(cliques, cliques_palette):
    assert tentative_assign(cliques, cliques_palette, 1) == tentative_assign(
        cliques, cliques_palette, 1
    )


def test_tentative_from_lists(cliques, cliques_palette):
    lists = sample_lists(cliques_palette, 2, seed=4)
    ta = tentative_assign(cliques, cliques_palette, 5, lists=lists)
    assert all(t in lists.members[v] for v, t in enumerate(ta.tau))


def test_tentative_without_xi():
    G = gen_random_regular(40, 4, seed=1)
    P = make_palette(G, PaletteMode.RANDOM_WIDE, 20, seed=1)
    assert all(tentative_assign(G, P, 7, use_xi=False).xi)


def test_retained_edge(edge):
    same = TentativeAssignment((0, 0), (True, True), 0)
    assert retained_set(edge, same).T == frozenset()
    different = TentativeAssignment((0, 1), (True, True), 0)
    rc = retained_set(edge, different)
    assert rc.T == frozenset({0, 1})
    assert rc.sigma == {0: 0, 1: 1}
    assert rc.is_proper(edge)
    inactive = TentativeAssignment((0, 1), (False, True), 0)
    assert retained_set(edge, inactive).T == frozenset({1})


def test_retained_neighbors(star):
    ta = TentativeAssignment((0, 1, 1, 2), (True, True, True, True), 0)
    mask = retained_mask(star, ta)
    assert mask.tolist() == [True, True, True, True]
    assert retained_neighbors(star, mask).tolist() == [3, 1, 1, 1]


@pytest.mark.parametrize(
    "G",
    [
        build_graph(1, [], 2),
        build_graph(2, [(0, 1)], 2),
        build_graph(3, [(0, 1), (1, 2)], 2),
        gen_disjoint_cliques(1, 2),
    ],
)
def test_exact_retention_identical(G):
    P = PaletteSystem(G.D + 1, tuple(tuple(range(G.D + 1)) for _ in range(G.n)), G.D)
    for v in range(G.n):
        expected = zeta_hat(G.D) ** G.D
        assert exact_retention_probability(G, P, v) == expected


def test_exact_retention_mixed_palettes():
    G = build_graph(3, [(0, 1), (1, 2)], 2)
    P = _palette(G, [(0, 1, 2), (1, 2, 3), (2, 3, 4)])
    for v in range(3):
        assert exact_retention_probability(G, P, v) == zeta_hat(2) ** 2


def test_exact_retention_two_step():
    G = build_graph(2, [(0, 1)], 2)
    P = _palette(G, [(0, 1, 2), (0, 1, 2)])
    assert exact_retention_probability(G, P, 0, ell0=3) == exact_retention_probability(G, P, 0)
    assert exact_retention_probability(G, P, 0, ell0=1) == zeta_hat(2) ** 2


def test_retention_statistics():
    G = gen_random_regular(200, 10, seed=3)
    P = make_palette(G, PaletteMode.IDENTICAL, 11)
    retention = retention_statistics(G, P, trials=40, seed=0)
    assert retention.expected == pytest.approx(10 * (10 / 11) ** 10)
    assert abs(retention.mean - retention.expected) < 5 * retention.stderr + 0.05
    assert retention.D == 10
    assert retention.spread == pytest.approx(retention.std / 10)
    assert retention.relative_std > retention.spread
    assert retention.concentrated(1.0)
    assert not retention.concentrated(0.0)


def _two_step_retention(G, P, ell0, trials):
    """Per-trial retained fraction and retention counts per vertex."""
    fractions = np.empty(trials)
    counts = np.zeros(G.n)
    for trial in range(trials):
        ta, _ = two_step_assign(G, P, 1.0, seed=trial, ell0=ell0)
        mask = retained_mask(G, ta)
        fractions[trial] = mask.mean()
        counts += mask
    return fractions, counts


def test_two_step_retention_law():
    G = gen_random_regular(200, 6, seed=4)
    P = make_palette(G, PaletteMode.IDENTICAL, 7)
    fractions, _ = _two_step_retention(G, P, 3, 200)
    stderr = fractions.std(ddof=1) / np.sqrt(len(fractions))
    assert abs(fractions.mean() - float(zeta_hat(6) ** 6)) < 4 * stderr


def test_two_step_matches_exact_retention():
    G = build_graph(3, [(0, 1), (1, 2)], 2)
    P = _palette(G, [(0, 1, 2), (1, 2, 3), (2, 3, 4)])
    trials = 4000
    _, counts = _two_step_retention(G, P, 2, trials)
    for v in range(3):
        exact = float(exact_retention_probability(G, P, v, ell0=2))
        tolerance = 4 * np.sqrt(exact * (1 - exact) / trials)
        assert abs(counts[v] / trials - exact) < tolerance


def test_two_step_tau_uniform():
    G = gen_random_regular(200, 6, seed=5)
    P = make_palette(G, PaletteMode.IDENTICAL, 7)
    counts = np.zeros(7)
    for trial in range(50):
        ta, _ = two_step_assign(G, P, 1.0, seed=trial, ell0=2)
        counts += np.bincount(ta.tau, minlength=7)
    assert counts.sum() == 200 * 50
    assert stats.chisquare(counts).pvalue > 1e-3


def test_two_step():
    G = gen_random_regular(40, 4, seed=2)
    P = make_palette(G, PaletteMode.IDENTICAL, 5)
    ta, first = two_step_assign(G, P, 1.0, seed=1, ell0=2)
    assert first.ell == 2
    assert all(t in first.members[v] for v, t in enumerate(ta.tau))
    with pytest.raises(ParameterError):
        two_step_assign(G, P, 1.0, seed=1)
    assert two_step_ell(10**6, 1.0) == 1


def test_fraternal_and_alien(star, cliques, cliques_palette):
    P = _palette(star, [(0, 1, 2, 3), (0, 1, 2, 4), (1, 2, 3, 4), (0, 1, 2, 3)])
    pairs = fraternal_pairs(star, P, 0)
    assert (1, 2, 1) in pairs and (1, 3, 0) in pairs
    assert len(pairs) == fraternal_size(star, P, 0)
    expected = sum(
        len(set(P.S[u]) & set(P.S[w])) for u, w in [(1, 2), (1, 3), (2, 3)]
    )
    assert fraternal_size(star, P, 0) == expected
    assert alien_pairs(star, P, 0) == {(1, 4), (2, 4)}
    assert alien_size(star, P, 0) == 2
    assert fraternal_pairs(cliques, cliques_palette, 0) == set()
    assert alien_pairs(cliques, cliques_palette, 0) == set()


def test_dichotomy(cliques, cliques_palette):
    assert sparse_dichotomy(cliques, cliques_palette, 0, 0.005) is Branch.NEITHER
    G = gen_random_regular(100, 10, seed=1)
    P = make_palette(G, PaletteMode.IDENTICAL, 11)
    assert sparse_dichotomy(G, P, 0, 0.005) is Branch.FRATERNAL
    wide = make_palette(G, PaletteMode.RANDOM_WIDE, 44, seed=1)
    branch = sparse_dichotomy(G, wide, 0, 0.005)
    fraternal = fraternal_size(G, wide, 0) >= 0.005 * 10**3 / 2
    alien = alien_size(G, wide, 0) >= 0.005 * 10**2 / 2
    assert (branch in (Branch.FRATERNAL, Branch.BOTH)) is fraternal
    assert (branch in (Branch.ALIEN, Branch.BOTH)) is alien


def test_realized_fraternal_event(star):
    P = _palette(star, [(0, 1, 2, 3)] * 4)
    ta = TentativeAssignment((3, 1, 1, 2), (True, True, True, True), 0)
    rc = retained_set(star, ta)
    fraternal, alien = realized_events(star, P, rc, ta, 0)
    assert fraternal == 1
    assert alien == 0
    assert slack(star, P, rc, 0) >= 1


def test_realized_alien_event(star):
    P = _palette(star, [(0, 1, 2, 3), (0, 1, 2, 4), (0, 1, 2, 3), (0, 1, 2, 3)])
    ta = TentativeAssignment((0, 4, 1, 2), (True, True, True, True), 0)
    rc = retained_set(star, ta)
    assert realized_events(star, P, rc, ta, 0) == (0, 1)
    assert slack(star, P, rc, 0) == 1


def test_expected_fraternal_events():
    G = gen_random_regular(20, 3, seed=0)
    P = make_palette(G, PaletteMode.IDENTICAL, 4)
    value = expected_fraternal_events(G, P, 0)
    assert isinstance(value, Fraction)
    assert value > 0
    K4 = gen_disjoint_cliques(1, 3)
    assert expected_fraternal_events(K4, make_palette(K4, PaletteMode.IDENTICAL, 4), 0) == 0


def test_fraternal_events_mean():
    G = gen_random_regular(40, 4, seed=6)
    P = make_palette(G, PaletteMode.IDENTICAL, 5)
    expected = float(sum(expected_fraternal_events(G, P, v) for v in range(G.n)))
    trials = 400
    totals = np.empty(trials)
    for trial in range(trials):
        ta = tentative_assign(G, P, trial)
        rc = retained_set(G, ta)
        totals[trial] = sum(realized_events(G, P, rc, ta, v)[0] for v in range(G.n))
    stderr = totals.std(ddof=1) / np.sqrt(trials)
    assert expected > 0
    assert abs(totals.mean() - expected) < 4 * stderr


def test_diagnose_sparse():
    G = gen_random_regular(60, 6, seed=1)
    P = make_palette(G, PaletteMode.IDENTICAL, 7)
    ta = tentative_assign(G, P, 2)
    rc = retained_set(G, ta)
    diag = diagnose_sparse(G, P, range(10), ta, rc, Params())
    assert sorted(diag.vertices) == list(range(10))
    record = diag.to_dict()["0"]
    assert record["branch"] in {b.value for b in Branch}
    assert record["retained_neighbors"] == sum(1 for w in G.adjacency[0] if w in rc.T)


def test_check_targets():
    D = 30
    params = Params()
    floor_slack = params.vartheta_prime * D
    diag = SparseDiagnostics(
        3,
        D,
        {
            0: VertexDiagnostics(retained_neighbors=exp(-1) * D, slack=floor_slack),
            1: VertexDiagnostics(retained_neighbors=exp(-1) * D, slack=D),
        },
    )
    status = check_targets(diag, params)
    assert status == {0: TargetStatus.FAIL, 1: TargetStatus.PASS, 2: TargetStatus.EXEMPT}


def test_residual_lists(star):
    rc = RetainedColoring(frozenset({1, 2}), {1: 0, 2: 1})
    lists = ListSample(((0, 1, 2), (0,), (1,), (0, 3)), 0, 0)
    residual = residual_lists(star, frozenset(range(4)), rc, lists)
    assert residual == {0: (2,), 3: (0, 3)}
    ta = TentativeAssignment((2, 0, 1, 3), (True,) * 4, 0)
    assert residual_lists(star, frozenset(range(4)), rc, lists, ta) == {0: (), 3: (0,)}


def test_complete_sparse_nothing_to_do(cliques, cliques_palette):
    lists = sample_lists(cliques_palette, 5, 0)
    dec = Decomposition(frozenset(), tuple(tuple(range(5 * i, 5 * i + 5)) for i in range(4)), 0.1, 4)
    rc = RetainedColoring(frozenset(), {})
    completion = complete_sparse(cliques, cliques_palette, dec, rc, lists)
    assert completion.success
    assert completion.coloring == {}


def test_complete_sparse_star(star):
    P = _palette(star, [(0, 1, 2, 3)] * 4)
    lists = sample_lists(P, 4, 0)
    dec = Decomposition(frozenset(range(4)), (), 0.1, 3)
    rc = RetainedColoring(frozenset({1, 2, 3}), {1: 0, 2: 0, 3: 1})
    completion = complete_sparse(star, P, dec, rc, lists)
    assert completion.success
    assert completion.coloring[0] in (2, 3)


def test_complete_sparse_failure(star):
    P = _palette(star, [(0, 1, 2, 3)] * 4)
    lists = sample_lists(P, 4, 0)
    dec = Decomposition(frozenset(range(4)), (), 0.1, 3)
    rc = RetainedColoring(frozenset({1, 2, 3}), {1: 0, 2: 1, 3: 2})
    ta = TentativeAssignment((3, 0, 1, 2), (True,) * 4, 0)
    completion = complete_sparse(star, P, dec, rc, lists, Strategy.GREEDY, ta)
    assert not completion.success
    assert completion.search.status is SearchStatus.UNSATISFIABLE
    assert completion.failed_vertex == 0
    assert completion.residual_size == 0


@pytest.mark.parametrize("strategy", list(Strategy))
def test_complete_sparse_random_regular(strategy):
    G = gen_random_regular(200, 8, seed=6)
    P = make_palette(G, PaletteMode.IDENTICAL, 9)
    lists = sample_lists(P, 9, 1)
    dec = Decomposition(frozenset(range(G.n)), (), 0.1, 8)
    ta = tentative_assign(G, P, 2, lists=lists)
    rc = retained_set(G, ta)
    completion = complete_sparse(G, P, dec, rc, lists, strategy)
    assert completion.success
    coloring = completion.coloring
    assert set(coloring) == set(range(G.n))
    assert all(coloring[u] != coloring[w] for u, w in G.edges())
    assert np.all([coloring[v] in lists.members[v] for v in range(G.n)])
