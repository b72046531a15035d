"""Tentative colors, activation bits and the retained set."""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb, floor, log, prod, sqrt
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
from qibo.config import log as logger
from qibo.config import raise_error

from palettelab.errors import ParameterError
from palettelab.graphcore import Graph
from palettelab.palette import ListSample, PaletteSystem, sample_lists
from palettelab.rng import derive_seed, generator


def zeta_hat(D: int) -> Fraction:
    """``1 - 1/(D+1)``."""
    return Fraction(D, D + 1)


def color_degree_S(G: Graph, P: PaletteSystem, v: int, gamma: int) -> int:
    """Neighbors of ``v`` whose base list contains ``gamma``."""
    return len(G.neighbors[v] & P.holders.get(gamma, frozenset()))


def color_degree_L(G: Graph, lists: ListSample, v: int, gamma: int) -> int:
    """Neighbors of ``v`` whose sampled list contains ``gamma``."""
    return sum(1 for w in G.adjacency[v] if gamma in lists.members[w])


def _own_color_degrees(G: Graph, P: PaletteSystem, tau: np.ndarray) -> np.ndarray:
    """``d_{τ_v}(v)`` for every vertex at once."""
    u, w = G.edge_array
    member = P.membership
    counts = np.bincount(u, weights=member[w, tau[u]].astype(float), minlength=G.n)
    counts += np.bincount(w, weights=member[u, tau[w]].astype(float), minlength=G.n)
    return counts.astype(np.int64)


@dataclass(frozen=True)
class TentativeAssignment:
    """Tentative color ``τ_v`` and activation bit ``ξ_v`` of every vertex."""

    tau: Tuple[int, ...] = field(repr=False)
    xi: Tuple[bool, ...] = field(repr=False)
    seed: int

    def check(self, P: PaletteSystem):
        assert all(t in P.members[v] for v, t in enumerate(self.tau))


def _uniform_pick(rng: np.random.Generator, rows: Sequence[Sequence[int]]) -> np.ndarray:
    sizes = np.fromiter((len(r) for r in rows), np.int64, len(rows))
    index = np.floor(rng.random(len(rows)) * sizes).astype(np.int64)
    return np.fromiter((r[i] for r, i in zip(rows, index)), np.int64, len(rows))


def tentative_assign(
    G: Graph,
    P: PaletteSystem,
    seed: int,
    use_xi: bool = True,
    lists: Optional[ListSample] = None,
) -> TentativeAssignment:
    """Draw ``τ_v`` uniformly and ``ξ_v`` with ``P(ξ_v=1 | τ_v=γ) = ζ̂^{D-d_γ(v)}``.

    Args:
        G: graph.
        P: base palettes, ``d_γ`` counts base-list holders.
        seed: stream seed.
        use_xi: when ``False`` every ``ξ_v`` is 1.
        lists: draw ``τ_v`` from ``L_v`` instead of ``S_v``; marginally still
            uniform on ``S_v`` when ``L_v`` is a uniform subset.
    """
    rng = generator(seed)
    rows = P.S if lists is None else lists.L
    tau = _uniform_pick(rng, rows)
    exponent = G.D - _own_color_degrees(G, P, tau)
    accept = (G.D / (G.D + 1)) ** exponent if G.D > 0 else np.ones(G.n)
    draws = rng.random(G.n)
    xi = draws < accept if use_xi else np.ones(G.n, dtype=bool)
    return TentativeAssignment(
        tuple(int(t) for t in tau), tuple(bool(x) for x in xi), seed
    )


def two_step_ell(n: int, delta: float) -> int:
    """``⌊0.1 δ log n⌋``."""
    return floor(0.1 * delta * log(n)) if n > 1 else 0


def two_step_assign(
    G: Graph, P: PaletteSystem, delta: float, seed: int, ell0: Optional[int] = None
) -> Tuple[TentativeAssignment, ListSample]:
    """Two-step sampler: ``L⁰_v`` first, then ``τ_v`` uniform on ``L⁰_v``.

    Returns:
        The assignment and the intermediate sample ``L⁰``.
    """
    ell0 = two_step_ell(G.n, delta) if ell0 is None else ell0
    if ell0 < 1:
        raise_error(
            ParameterError, f"Two-step list size {ell0} < 1, n={G.n} too small."
        )
    first = sample_lists(P, ell0, derive_seed(seed, 0))
    ta = tentative_assign(G, P, derive_seed(seed, 1), lists=first)
    return TentativeAssignment(ta.tau, ta.xi, seed), first


@dataclass(frozen=True)
class RetainedColoring:
    """Retained set ``T`` and the partial coloring ``σ = τ|_T``."""

    T: frozenset
    sigma: Dict[int, int] = field(hash=False)

    def is_proper(self, G: Graph) -> bool:
        return all(
            self.sigma[u] != self.sigma[w]
            for u in self.T
            for w in G.adjacency[u]
            if w in self.T
        )


def retained_mask(G: Graph, ta: TentativeAssignment) -> np.ndarray:
    tau = np.asarray(ta.tau)
    u, w = G.edge_array
    clash = tau[u] == tau[w]
    conflicted = np.zeros(G.n, dtype=bool)
    conflicted[u[clash]] = True
    conflicted[w[clash]] = True
    return np.asarray(ta.xi, dtype=bool) & ~conflicted


def retained_set(G: Graph, ta: TentativeAssignment) -> RetainedColoring:
    """``T = {v : ξ_v = 1, τ_w ≠ τ_v ∀ w ∼ v}``."""
    T = frozenset(int(v) for v in np.flatnonzero(retained_mask(G, ta)))
    return RetainedColoring(T, {v: ta.tau[v] for v in sorted(T)})


def retained_neighbors(G: Graph, mask: np.ndarray) -> np.ndarray:
    """``|T ∩ N_v|`` for every vertex."""
    u, w = G.edge_array
    counts = np.bincount(u, weights=mask[w].astype(float), minlength=G.n)
    counts += np.bincount(w, weights=mask[u].astype(float), minlength=G.n)
    return counts.astype(np.int64)


def _retention_given(
    G: Graph, P: PaletteSystem, v: int, choices: Dict[int, Iterable[int]]
) -> Fraction:
    """Exact ``P(v ∈ T)`` with ``τ_w`` uniform on ``choices[w]`` for ``w ∈ N[v]``."""
    zh = zeta_hat(G.D)
    closed = [v, *G.adjacency[v]]
    options = [tuple(choices[w]) for w in closed]
    weight = Fraction(1, prod(len(o) for o in options))
    total = Fraction(0)
    for outcome in product(*options):
        own = outcome[0]
        if own in outcome[1:]:
            continue
        total += weight * zh ** (G.D - color_degree_S(G, P, v, own))
    return total


def exact_retention_probability(
    G: Graph, P: PaletteSystem, v: int, ell0: Optional[int] = None
) -> Fraction:
    """Exact ``P(v ∈ T)`` by enumeration over the closed neighborhood of ``v``.

    With ``ell0`` the two-step sampler is enumerated as well: every choice of
    ``L⁰_w`` for ``w ∈ N[v]``, then every ``τ`` outcome inside it.
    """
    closed = [v, *G.adjacency[v]]
    if ell0 is None:
        return _retention_given(G, P, v, {w: P.S[w] for w in closed})
    subsets = [tuple(combinations(P.S[w], ell0)) for w in closed]
    weight = Fraction(1, prod(comb(len(P.S[w]), ell0) for w in closed))
    return sum(
        weight * _retention_given(G, P, v, dict(zip(closed, pick)))
        for pick in product(*subsets)
    )


@dataclass(frozen=True)
class RetentionStatistics:
    """Empirical distribution of ``|T ∩ N_v|`` over repeated assignments."""

    trials: int
    mean: float
    std: float
    stderr: float
    """Standard error of ``mean``, from per-trial averages."""
    expected: float
    """Exact ``E|T ∩ N_v| = D·ζ̂^D`` on regular graphs."""
    D: int = 0

    @property
    def relative_std(self) -> float:
        return self.std / self.mean if self.mean > 0 else float("inf")

    @property
    def spread(self) -> float:
        """Standard deviation of ``|T ∩ N_v|`` in units of ``D``."""
        return self.std / self.D if self.D > 0 else float("inf")

    def concentrated(self, tol: float) -> bool:
        return self.spread < tol


def retention_statistics(
    G: Graph,
    P: PaletteSystem,
    trials: int,
    seed: int,
    vertices: Optional[Sequence[int]] = None,
) -> RetentionStatistics:
    """Sample ``|T ∩ N_v|`` over ``trials`` independent assignments."""
    vertices = np.arange(G.n) if vertices is None else np.asarray(vertices)
    samples = np.empty((trials, len(vertices)))
    for trial in range(trials):
        ta = tentative_assign(G, P, derive_seed(seed, trial))
        samples[trial] = retained_neighbors(G, retained_mask(G, ta))[vertices]
    per_trial = samples.mean(axis=1)
    stderr = per_trial.std(ddof=1) / sqrt(trials) if trials > 1 else float("inf")
    expected = G.D * float(zeta_hat(G.D)) ** G.D
    stats = RetentionStatistics(
        trials,
        float(samples.mean()),
        float(samples.std()),
        float(stderr),
        expected,
        G.D,
    )
    logger.info(
        "Retention: mean %.4f vs exact %.4f (stderr %.4f, spread %.3f D)",
        stats.mean,
        stats.expected,
        stats.stderr,
        stats.spread,
    )
    return stats
