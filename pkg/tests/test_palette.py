"""Tests for ``palette/lists.py`` and ``palette/params.py``."""

from math import exp, sqrt

import numpy as np
import pytest

from palettelab.errors import ParameterError, StructuralError
from palettelab.graphcore import build_graph, gen_disjoint_cliques, gen_random_regular
from palettelab.palette import (
    ListSample,
    Params,
    PaletteMode,
    PaletteSystem,
    make_palette,
    resolve_process,
    sample_lists,
)


def test_identical_palette(cliques):
    P = make_palette(cliques, PaletteMode.IDENTICAL, cliques.D + 1)
    assert P.gamma_size == 5
    assert all(colors == (0, 1, 2, 3, 4) for colors in P.S)
    assert P.membership.all()


def test_windows_palette(cliques):
    P = make_palette(cliques, PaletteMode.WINDOWS, 2 * (cliques.D + 1))
    assert P.S[0] == tuple(range(5))
    assert P.S[1] == tuple(range(1, 6))
    assert all(len(colors) == 5 for colors in P.S)


def test_random_wide_palette():
    G = gen_random_regular(200, 4, seed=1)
    gamma = 10 * (G.D + 1)
    P = make_palette(G, PaletteMode.RANDOM_WIDE, gamma, seed=3)
    assert P == make_palette(G, PaletteMode.RANDOM_WIDE, gamma, seed=3)
    expected = (G.D + 1) / P.gamma_size
    stderr = sqrt(expected * (1 - expected) / G.n)
    for gamma in range(5):
        assert abs(P.membership[:, gamma].mean() - expected) < 4 * stderr


def test_degree_plus_one_palette():
    path = build_graph(3, [(0, 1), (1, 2)])
    P = make_palette(path, PaletteMode.DEGREE_PLUS_ONE, path.D + 1)
    assert P.S == ((0, 1), (0, 1, 2), (0, 1))


def test_make_palette_small_universe(cliques):
    with pytest.raises(ParameterError):
        make_palette(cliques, PaletteMode.IDENTICAL, cliques.D)


def test_palette_system_validation():
    with pytest.raises(StructuralError):
        PaletteSystem(3, ((0, 1), (0, 1, 2)), 2)
    with pytest.raises(StructuralError):
        PaletteSystem(4, ((0, 1, 2),), 2)
    with pytest.raises(StructuralError):
        PaletteSystem(3, ((2, 1, 0),), 2)


def test_palette_extend(cliques_palette):
    P = cliques_palette.extend(22)
    assert P.n == 22
    assert P.S[21] == tuple(range(5))


def test_holders(cliques_palette):
    assert cliques_palette.holders[3] == frozenset(range(20))


def test_sample_full_lists(cliques_palette):
    lists = sample_lists(cliques_palette, 5, seed=0)
    assert lists.L == cliques_palette.S
    lists.check(cliques_palette)


def test_sample_singletons():
    G = gen_disjoint_cliques(400, 4)
    P = make_palette(G, PaletteMode.IDENTICAL, 5)
    lists = sample_lists(P, 1, seed=7)
    counts = np.bincount([colors[0] for colors in lists.L], minlength=5)
    stderr = sqrt(G.n * 0.2 * 0.8)
    assert np.all(np.abs(counts - G.n / 5) < 4 * stderr)


def test_sample_deterministic(cliques_palette):
    assert sample_lists(cliques_palette, 2, 5) == sample_lists(cliques_palette, 2, 5)


def test_sample_restriction(cliques_palette):
    restriction = {0: (1, 3)}
    lists = sample_lists(cliques_palette, 2, 0, restriction)
    assert lists.L[0] == (1, 3)
    with pytest.raises(ParameterError, match="vertex 0"):
        sample_lists(cliques_palette, 3, 0, restriction)


def test_sample_too_large(cliques_palette):
    with pytest.raises(ParameterError):
        sample_lists(cliques_palette, 6, 0)


def test_list_check(cliques_palette):
    bad = ListSample(((0, 9),) + cliques_palette.S[1:], 2, 0)
    with pytest.raises(StructuralError):
        bad.check(cliques_palette)


def test_params_derived():
    params = Params()
    assert params.theta == pytest.approx(exp(-9))
    assert params.rho == pytest.approx(0.1)
    assert params.nu0 == pytest.approx(0.05)
    assert params.vartheta == pytest.approx(0.005)
    assert params.vartheta_prime == pytest.approx(exp(-3) * 0.005 / 4)
    assert params.b(30) == pytest.approx(30 / 1.1)
    assert params.zeta0(30) == pytest.approx(sqrt(0.1) / 30)
    assert Params(theta_override=0.5).theta == 0.5
    assert Params(zeta0_override=0.0).zeta0(30) == 0.0


def test_params_fill():
    params = Params().fill(delta=2.0, eps=None)
    assert params.delta == 2.0
    assert params.eps == 0.1
    assert params.to_dict()["rho"] == pytest.approx(0.2)


@pytest.mark.parametrize("options", [{"delta": 0}, {"eps": 1.0}, {"b0": -1}])
def test_params_errors(options):
    with pytest.raises(ParameterError):
        Params(**options)


def test_resolve_process():
    params = Params(theta_override=0.5)
    resolved = resolve_process(params, zeta=1 / 60, D=30, k=8, popular=31, cluster_size=31)
    assert 1 / 30 <= resolved.eta <= (1 / 60) / 0.1
    assert 0 < resolved.q < 1
    assert 1 <= resolved.bigK
    assert resolved.m <= min(31, 31 // 2)
    assert resolved.m_raw == pytest.approx(resolved.bigK * resolved.eta * 30 / resolved.q)


def test_resolve_process_clamps_m():
    resolved = resolve_process(Params(), zeta=0.5, D=30, k=8, popular=2, cluster_size=31)
    assert resolved.m == 2
    assert "m" in resolved.clamped
