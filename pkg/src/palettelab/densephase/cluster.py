"""Cluster context, list trimming and regime classification."""

from dataclasses import asdict, dataclass, field
from enum import Enum
from functools import cached_property
from math import ceil, log, sqrt
from typing import Dict, FrozenSet, Mapping, Sequence, Tuple

import numpy as np
from qibo.config import log as logger
from qibo.config import raise_error

from palettelab.densephase.bigraph import Bigraph
from palettelab.errors import ParameterError
from palettelab.graphcore import Edge, Graph
from palettelab.palette import PaletteSystem, hypergeometric_tail, janson_bound
from palettelab.palette.params import Params


@dataclass(frozen=True)
class ClusterBigraph:
    """A cluster ``C`` with its still-allowed colors ``T_v``.

    ``H`` lists the non-edges inside ``C``; ``F`` (see :meth:`bigraph`) joins
    every ``v ∈ C`` to the colors of ``T_v``.
    """

    C: Tuple[int, ...]
    T: Dict[int, FrozenSet[int]] = field(hash=False, repr=False)
    H: Tuple[Edge, ...] = field(repr=False)
    zeta: float
    """``|H| / D²``."""
    x: int
    """``|C| - (D+1)``."""
    nabla: Dict[int, int] = field(hash=False, repr=False)
    """External degree of every cluster vertex."""
    D: int
    n: int
    """Order of the whole graph."""
    gamma_size: int

    @cached_property
    def h_degree(self) -> Dict[int, int]:
        degree = {v: 0 for v in self.C}
        for u, w in self.H:
            degree[u] += 1
            degree[w] += 1
        return degree

    @cached_property
    def color_degrees(self) -> np.ndarray:
        """``d_γ``: cluster vertices with ``γ ∈ T_v``."""
        counts = np.zeros(self.gamma_size, dtype=np.int64)
        for v in self.C:
            counts[list(self.T[v])] += 1
        return counts

    def h_gamma(self, gamma: int) -> Tuple[Edge, ...]:
        """Non-edges ``uw`` with ``γ ∈ T_u ∩ T_w``."""
        return tuple((u, w) for u, w in self.H if gamma in self.T[u] and gamma in self.T[w])

    def bigraph(self) -> Bigraph:
        return Bigraph.from_lists(
            len(self.C), self.gamma_size, (self.T[v] for v in self.C)
        )


def cluster_context(
    G: Graph, P: PaletteSystem, sigma: Mapping[int, int], C: Sequence[int]
) -> ClusterBigraph:
    """Allowed colors, non-edges and size measures of cluster ``C``.

    Args:
        G: graph.
        P: base palettes.
        sigma: partial coloring of vertices outside ``C``.
        C: cluster vertices.
    """
    C = tuple(sorted(C))
    members = set(C)
    overlap = members & set(sigma)
    if overlap:
        raise_error(
            ParameterError, f"Cluster vertices {sorted(overlap)} are already colored."
        )
    D = G.D
    T = {}
    nabla = {}
    for v in C:
        taken = {sigma[w] for w in G.adjacency[v] if w in sigma}
        T[v] = P.members[v] - taken
        nabla[v] = len(G.neighbors[v] - members)
        assert len(P.members[v] - T[v]) <= nabla[v]
    H = tuple(G.nonedges(C))
    ctx = ClusterBigraph(
        C=C,
        T=T,
        H=H,
        zeta=len(H) / D**2 if D > 0 else 0.0,
        x=len(C) - (D + 1),
        nabla=nabla,
        D=D,
        n=G.n,
        gamma_size=P.gamma_size,
    )
    if G.is_regular():
        assert all(ctx.h_degree[v] == nabla[v] + ctx.x for v in C)
        assert ctx.x <= 2 * ctx.zeta * D + 1e-9
    return ctx


def trim_threshold(delta: float, n: int) -> float:
    """``0.5 δ log n``."""
    return 0.5 * delta * log(n) if n > 1 else 0.0


@dataclass(frozen=True)
class TrimResult:
    """Lists restricted to the allowed colors."""

    lists: Dict[int, Tuple[int, ...]] = field(hash=False)
    flagged: Tuple[int, ...] = ()
    """Vertices that lost at least ``0.5 δ log n`` colors, or all of them."""
    threshold: float = 0.0

    @property
    def violated(self) -> bool:
        return bool(self.flagged)


def trim_lists(
    ctx: ClusterBigraph, lists: Mapping[int, Sequence[int]], delta: float = 1.0
) -> TrimResult:
    """``L_v ∩ T_v`` for every cluster vertex."""
    threshold = trim_threshold(delta, ctx.n)
    trimmed, flagged = {}, []
    for v in ctx.C:
        kept = tuple(c for c in lists[v] if c in ctx.T[v])
        trimmed[v] = kept
        removed = len(lists[v]) - len(kept)
        if not kept or (removed > 0 and removed >= threshold):
            flagged.append(v)
    if flagged:
        logger.debug("Trimming flagged %d cluster vertices", len(flagged))
    return TrimResult(trimmed, tuple(flagged), threshold)


def trim_flag_probability(D: int, ell: int, removed: int, delta: float, n: int) -> float:
    """Exact ``P(|L_v \\ T_v| ≥ 0.5 δ log n)`` when ``removed`` colors of ``S_v`` are gone.

    ``L_v`` is a uniform ``ell``-subset of the ``D+1`` colors of ``S_v``.
    """
    k = ceil(trim_threshold(delta, n) - 1e-12)
    if k <= 0:
        return 1.0
    return hypergeometric_tail(D + 1, removed, ell, k)


class Route(Enum):
    """How a cluster is colored."""

    DIRECT = "direct"
    """Small ``ζ``: one matching of ``C`` into the colors."""
    PROCESS = "process"
    """Pairing Process, then a matching of the rest."""
    HALL = "hall"
    """Many vertices rich in unpopular colors: one matching."""
    STAGED = "staged"
    """Matchings into popular colors first, then the rest."""


@dataclass(frozen=True)
class RegimeReport:
    """Regime statistics of one cluster."""

    b: float
    popular: FrozenSet[int] = field(repr=False)
    """``P = {γ : d_γ > b}``."""
    unpopular: FrozenSet[int] = field(repr=False)
    S: FrozenSet[int] = field(repr=False)
    """Vertices with more than ``θD/2`` unpopular allowed colors."""
    r1_lhs: int
    """``Σ_{vw ∈ H} |T_v ∩ T_w ∩ P|``."""
    r2_lhs: int
    """``Σ_{vw ∈ H} |T_v ∩ T_w ∩ U|``."""
    r_rhs: float
    """``θζD³``."""
    s_rhs: float
    """``√(θζ) D``."""
    zeta: float
    zeta0: float
    popular_bound: float
    """``(1+2ρ)D``."""

    @property
    def s(self) -> int:
        return len(self.S)

    @property
    def R1(self) -> bool:
        return self.r1_lhs > self.r_rhs

    @property
    def R2(self) -> bool:
        return self.r2_lhs > self.r_rhs

    @property
    def Ssize(self) -> bool:
        return self.s > self.s_rhs

    @property
    def zeta_large(self) -> bool:
        return self.zeta >= self.zeta0

    @property
    def popular_small(self) -> bool:
        return len(self.popular) < self.popular_bound

    @property
    def margins(self) -> Dict[str, float]:
        return {
            "R1": self.r1_lhs - self.r_rhs,
            "R2": self.r2_lhs - self.r_rhs,
            "Ssize": self.s - self.s_rhs,
            "zeta": self.zeta - self.zeta0,
        }

    @property
    def route(self) -> Route:
        if not self.zeta_large:
            return Route.DIRECT
        if self.R1:
            return Route.PROCESS
        if self.Ssize:
            return Route.HALL
        return Route.STAGED

    def to_dict(self) -> dict:
        record = asdict(self)
        for key in ("popular", "unpopular", "S"):
            record[key] = sorted(record[key])
        record.update(
            s=self.s,
            R1=self.R1,
            R2=self.R2,
            Ssize=self.Ssize,
            zeta_large=self.zeta_large,
            popular_small=self.popular_small,
            route=self.route.value,
            margins=self.margins,
        )
        return record


def classify_regime(ctx: ClusterBigraph, params: Params) -> RegimeReport:
    """Popular colors, regime sums and the resulting route."""
    D = ctx.D
    theta = params.theta
    b = params.b(D)
    degrees = ctx.color_degrees
    popular = frozenset(int(g) for g in np.flatnonzero(degrees > b))
    unpopular = frozenset(range(ctx.gamma_size)) - popular
    S = frozenset(v for v in ctx.C if len(ctx.T[v] & unpopular) > theta * D / 2)
    r1 = r2 = 0
    for u, w in ctx.H:
        common = ctx.T[u] & ctx.T[w]
        r1 += len(common & popular)
        r2 += len(common & unpopular)
    report = RegimeReport(
        b=b,
        popular=popular,
        unpopular=unpopular,
        S=S,
        r1_lhs=r1,
        r2_lhs=r2,
        r_rhs=theta * ctx.zeta * D**3,
        s_rhs=sqrt(theta * ctx.zeta) * D,
        zeta=ctx.zeta,
        zeta0=params.zeta0(D),
        popular_bound=(1 + 2 * params.rho) * D,
    )
    if not report.popular_small:
        logger.warning(
            "Cluster has %d popular colors, above (1+2ρ)D=%.1f",
            len(popular),
            report.popular_bound,
        )
    if report.R2 and not report.Ssize:
        logger.warning("Unpopular sum exceeds θζD³ while s=%d is small", report.s)
    logger.debug(
        "Cluster of %d vertices: route %s, margins %s",
        len(ctx.C),
        report.route.value,
        report.margins,
    )
    return report


def pairing_janson_bound(ctx: ClusterBigraph, gamma: int, p: float) -> float:
    """Janson bound on ``P(no non-edge of H_γ has γ in both lists)``.

    Every cluster vertex keeps ``γ`` independently with probability ``p``.
    """
    events = [{u, w} for u, w in ctx.h_gamma(gamma)]
    if not events:
        return 1.0
    return janson_bound(events, p)
