"""Tests for the ``densephase`` package."""

from math import exp, log

import pytest

from palettelab.densephase import process
from palettelab.densephase import (
    Action,
    Route,
    classify_regime,
    cluster_context,
    color_cluster,
    match_into,
    pairing_janson_bound,
    run_process,
    step_colors,
    trim_flag_probability,
    trim_lists,
)
from palettelab.errors import ParameterError
from palettelab.graphcore import build_graph, gen_disjoint_cliques
from palettelab.harness.sweep import ell_from_factor
from palettelab.palette import Params, PaletteMode, PaletteSystem, make_palette, sample_lists


@pytest.fixture
def cocktail():
    """``K_8`` minus the perfect matching ``{01, 23, 45, 67}``."""
    edges = [(u, w) for u in range(8) for w in range(u + 1, 8) if w != u + 1 or u % 2]
    return build_graph(8, edges)


def _context(G, mode=PaletteMode.IDENTICAL, gamma_size=None, sigma=None, C=None):
    P = make_palette(G, mode, gamma_size or G.D + 1)
    return cluster_context(G, P, sigma or {}, range(G.n) if C is None else C)


def _full(ctx):
    return {v: tuple(sorted(ctx.T[v])) for v in ctx.C}


def test_clique_context(cliques):
    ctx = _context(cliques, C=range(5))
    assert ctx.H == ()
    assert ctx.zeta == 0
    assert ctx.x == 0
    assert set(ctx.nabla.values()) == {0}
    assert ctx.color_degrees.tolist() == [5] * 5
    assert ctx.bigraph().degrees == (5,) * 5


def test_cocktail_context(cocktail):
    assert cocktail.is_regular(6)
    ctx = _context(cocktail)
    assert ctx.H == ((0, 1), (2, 3), (4, 5), (6, 7))
    assert ctx.zeta == pytest.approx(4 / 36)
    assert ctx.x == 1
    assert set(ctx.h_degree.values()) == {1}
    assert ctx.h_gamma(3) == ctx.H


def test_context_outside_coloring():
    G = build_graph(5, [(u, w) for u in range(4) for w in range(u + 1, 4)] + [(0, 4)])
    P = make_palette(G, PaletteMode.IDENTICAL, G.D + 1)
    ctx = cluster_context(G, P, {4: 2}, range(4))
    assert ctx.T[0] == frozenset({0, 1, 3, 4})
    assert ctx.T[1] == frozenset(range(5))
    assert ctx.nabla[0] == 1
    assert ctx.x == -1
    with pytest.raises(ParameterError):
        cluster_context(G, P, {0: 1}, range(4))

    trim = trim_lists(ctx, {0: (2, 3), 1: (0, 1), 2: (0, 1), 3: (0, 1)})
    assert trim.lists[0] == (3,)
    assert trim.flagged == (0,)
    assert trim.violated
    assert trim.threshold == pytest.approx(0.5 * log(5))


def test_trim_empty_list_flagged():
    path = build_graph(3, [(0, 1), (1, 2)])
    P = make_palette(path, PaletteMode.IDENTICAL, 3)
    ctx = cluster_context(path, P, {2: 0}, [0, 1])
    trim = trim_lists(ctx, {0: (0, 1), 1: (0,)}, delta=1e-6)
    assert trim.lists[1] == ()
    assert trim.flagged == (1,)


def test_trim_flag_probability():
    assert trim_flag_probability(4, 2, 1, 1.0, 5) == pytest.approx(1 - 6 / 10)
    assert trim_flag_probability(4, 2, 0, 1.0, 5) == 0
    assert trim_flag_probability(4, 2, 1, 1.0, 1) == 1.0


def test_clique_direct(cliques):
    ctx = _context(cliques, C=range(5))
    report = classify_regime(ctx, Params())
    assert not report.zeta_large
    assert report.route is Route.DIRECT
    outcome = color_cluster(ctx, _full(ctx), Params())
    assert outcome.success
    assert sorted(outcome.coloring.values()) == list(range(5))


def test_process_route(cocktail):
    params = Params(delta=20, theta_override=0.5)
    ctx = _context(cocktail)
    report = classify_regime(ctx, params)
    assert len(report.popular) == 7
    assert report.r1_lhs == 28
    assert report.R1
    assert report.route is Route.PROCESS

    state = run_process(ctx, _full(ctx), params, seed=4)
    assert state.parameters.m == 4
    assert state.colors == (0, 1, 2, 3)
    assert [step.action for step in state.steps] == [Action.PAIR] * 4
    assert state.pairs == ctx.H
    assert state.remaining == ()
    assert state.success
    assert len(list(state.trace())) == 4

    outcome = color_cluster(ctx, _full(ctx), params)
    assert outcome.route is Route.PROCESS
    assert outcome.success
    assert not outcome.fallback_used
    assert outcome.coloring == {0: 0, 1: 0, 2: 1, 3: 1, 4: 2, 5: 2, 6: 3, 7: 3}


def test_process_failure_falls_back(cocktail):
    params = Params(theta_override=0.5)
    ctx = _context(cocktail)
    state = run_process(ctx, _full(ctx), params)
    assert not state.S1
    assert state.S2 and state.S3
    outcome = color_cluster(ctx, _full(ctx), params)
    assert not outcome.success
    assert outcome.failed_route is Route.PROCESS
    assert outcome.fallback_used
    assert outcome.hall.deficiency == -1
    assert outcome.coloring == {}


def test_staged_route(cocktail):
    params = Params(theta_override=2.0)
    ctx = _context(cocktail, PaletteMode.WINDOWS, 14)
    report = classify_regime(ctx, params)
    assert report.popular == frozenset({5, 6, 7, 8})
    assert not report.R1
    assert report.S == frozenset()
    assert report.route is Route.STAGED
    with pytest.raises(ParameterError):
        run_process(ctx, _full(ctx), params, report=report)

    outcome = color_cluster(ctx, _full(ctx), params)
    assert outcome.route is Route.STAGED
    assert outcome.success
    assert not outcome.fallback_used
    assert {"outside_s_few_unpopular", "i0_rich_in_popular", "i0_small"} <= set(
        outcome.events
    )
    assert len(set(outcome.coloring.values())) == 8


def test_hall_route(cocktail):
    params = Params(theta_override=0.6)
    ctx = _context(cocktail, PaletteMode.WINDOWS, 14)
    report = classify_regime(ctx, params)
    assert report.s == 8
    assert report.route is Route.HALL
    outcome = color_cluster(ctx, _full(ctx), params)
    assert outcome.success
    assert all(outcome.coloring[v] in ctx.T[v] for v in ctx.C)


def test_step_colors(cocktail):
    ctx = _context(cocktail, PaletteMode.WINDOWS, 14)
    popular = [5, 6, 7, 8]
    assert [len(ctx.h_gamma(g)) for g in popular] == [3, 3, 3, 3]
    assert step_colors(ctx, popular, 3) == (5, 6, 7)


def test_report_to_dict(cocktail):
    record = classify_regime(_context(cocktail), Params()).to_dict()
    assert record["route"] == "process"
    assert record["popular"] == list(range(7))
    assert set(record["margins"]) == {"R1", "R2", "Ssize", "zeta"}


def test_pairing_janson_bound(cliques, cocktail):
    assert pairing_janson_bound(_context(cliques, C=range(5)), 0, 0.5) == 1.0
    assert pairing_janson_bound(_context(cocktail), 0, 0.5) == pytest.approx(exp(-1))


def test_match_into():
    attempt = match_into([10, 20], {10: [0, 1], 20: [0]}, 2, initial={10: 0})
    assert attempt.success
    assert attempt.coloring == {10: 1, 20: 0}
    failed = match_into([10, 20, 30], {10: [0], 20: [0], 30: [0]}, 1)
    assert not failed.success
    assert failed.hall.deficiency == -2
    assert failed.hall.witness <= {10, 20, 30}
    assert match_into([], {}, 0).coloring == {}


def test_process_idle_step_fails(cocktail):
    params = Params(delta=20, theta_override=0.5)
    ctx = _context(cocktail)
    lists = {v: tuple(c for c in range(7) if c != 3) for v in ctx.C}
    state = run_process(ctx, lists, params, k=7)
    assert state.colors == (0, 1, 2, 3)
    assert [step.action for step in state.steps] == [Action.PAIR] * 3 + [Action.IDLE]
    assert state.steps[-1].J_size == 0
    assert state.steps[-1].removed == ()
    assert state.remaining == (6, 7)
    assert not state.S2
    assert not state.success

    outcome = color_cluster(ctx, lists, params, k=7)
    assert outcome.failed_route is Route.PROCESS
    assert outcome.fallback_used
    assert not outcome.success
    assert outcome.hall.deficiency == -2


def test_ordering_audit_warns(cocktail, mocker):
    """Three colors shared by every vertex, four each shared by one non-edge only."""
    rows = []
    for j in range(4):
        private = range(7 + 3 * j, 10 + 3 * j)
        rows += [tuple(range(7)), (0, 1, 2, 3 + j, *private)]
    P = PaletteSystem(19, tuple(rows), cocktail.D)
    ctx = cluster_context(cocktail, P, {}, range(8))
    params = Params(delta=20, theta_override=0.5)
    report = classify_regime(ctx, params)
    assert report.popular == frozenset(range(7))
    assert report.route is Route.PROCESS

    warning = mocker.spy(process.logger, "warning")
    state = run_process(ctx, _full(ctx), params)
    assert [step.h_gamma for step in state.steps] == [4, 4, 4, 1]
    assert any("below 2θζD²/3" in call.args[0] for call in warning.call_args_list)


def test_clique_matching_probability():
    G = gen_disjoint_cliques(1, 30)
    P = make_palette(G, PaletteMode.IDENTICAL, 31)
    ctx = cluster_context(G, P, {}, range(31))
    ell = ell_from_factor(2.0, G.n, G.D)
    trials = 200
    successes = 0
    for seed in range(trials):
        lists = sample_lists(P, ell, seed)
        outcome = color_cluster(ctx, {v: lists.L[v] for v in ctx.C}, Params(), seed)
        assert outcome.route is Route.DIRECT
        chosen = set().union(*(lists.members[v] for v in ctx.C))
        if len(chosen) < 31:
            assert not outcome.success
        successes += outcome.success
    isolated = 31 * (1 - ell / 31) ** 31
    tolerance = 4 * (isolated * (1 - isolated) / trials) ** 0.5
    assert successes / trials >= 1 - isolated - tolerance


@pytest.fixture
def split_cluster():
    """``K_32`` minus a perfect matching; the two ends of every non-edge
    draw from disjoint halves of the colors."""
    edges = [(u, w) for u in range(32) for w in range(u + 1, 32) if w != u + 1 or u % 2]
    G = build_graph(32, edges)
    rows = [tuple(range(31)) if v % 2 == 0 else tuple(range(31, 62)) for v in range(32)]
    return G, PaletteSystem(62, tuple(rows), G.D)


def test_hall_route_split_palettes(split_cluster):
    G, P = split_cluster
    params = Params()
    ctx = cluster_context(G, P, {}, range(G.n))
    report = classify_regime(ctx, params)
    assert report.popular == frozenset()
    assert not report.R1
    assert report.Ssize
    assert report.route is Route.HALL

    ell = ell_from_factor(2.0, G.n, G.D)
    trials = 50
    successes = 0
    for seed in range(trials):
        lists = sample_lists(P, ell, seed)
        outcome = color_cluster(ctx, {v: lists.L[v] for v in ctx.C}, params, seed)
        assert outcome.route is Route.HALL
        successes += outcome.success
    assert successes >= 0.9 * trials
