"""Slack of sparse vertices: fraternal and alien pairs, targets.

A sparse vertex ``v`` saves colors when two non-adjacent neighbors keep the
same color (a fraternal event) or a neighbor keeps a color outside ``S_v``
(an alien event). Slack is ``|T ∩ N_v| - |σ(T ∩ N_v) ∩ S_v|``.
"""

from collections import Counter
from dataclasses import asdict, dataclass, field
from enum import Enum
from fractions import Fraction
from math import exp
from typing import Dict, Iterable, Optional, Set, Tuple

from qibo.config import log

from palettelab.decomposition import sparsity_witness
from palettelab.graphcore import Graph
from palettelab.palette import Params, PaletteMode, PaletteSystem
from palettelab.sparsephase.tentative import (
    RetainedColoring,
    TentativeAssignment,
    color_degree_S,
    zeta_hat,
)


def fraternal_pairs(G: Graph, P: PaletteSystem, v: int) -> Set[Tuple[int, int, int]]:
    """``{(u, w, γ) : uw non-edge in N_v, γ ∈ S_u ∩ S_w}``, ``u < w``."""
    return {
        (u, w, gamma)
        for u, w in G.nonedges(G.adjacency[v])
        for gamma in P.members[u] & P.members[w]
    }


def alien_pairs(G: Graph, P: PaletteSystem, v: int) -> Set[Tuple[int, int]]:
    """``{(w, γ) : w ∈ N_v, γ ∈ S_w \\ S_v}``."""
    return {
        (w, gamma) for w in G.adjacency[v] for gamma in P.members[w] - P.members[v]
    }


def fraternal_size(G: Graph, P: PaletteSystem, v: int) -> int:
    """``|F_v|`` without building the set."""
    return sum(
        len(P.members[u] & P.members[w]) for u, w in G.nonedges(G.adjacency[v])
    )


def alien_size(G: Graph, P: PaletteSystem, v: int) -> int:
    """``|A_v|`` without building the set."""
    return sum(len(P.members[w] - P.members[v]) for w in G.adjacency[v])


class Branch(Enum):
    """Which slack source is large at a sparse vertex."""

    FRATERNAL = "fraternal"
    ALIEN = "alien"
    BOTH = "both"
    NEITHER = "neither"


def _branch(fraternal: bool, alien: bool) -> Branch:
    if fraternal and alien:
        return Branch.BOTH
    if fraternal:
        return Branch.FRATERNAL
    if alien:
        return Branch.ALIEN
    return Branch.NEITHER


def sparse_dichotomy(G: Graph, P: PaletteSystem, v: int, vartheta: float) -> Branch:
    """Compare ``|F_v|`` with ``ϑD³/2`` and ``|A_v|`` with ``ϑD²/2``.

    For full-size palettes, a vertex with at least ``ϑD²`` non-edges in its
    neighborhood always lands on one of the two sides.
    """
    D = G.D
    branch = _branch(
        fraternal_size(G, P, v) >= vartheta * D**3 / 2,
        alien_size(G, P, v) >= vartheta * D**2 / 2,
    )
    if branch is Branch.NEITHER and P.mode is not PaletteMode.DEGREE_PLUS_ONE:
        assert sparsity_witness(G, v) < vartheta * D**2
    return branch


def _neighborhood_colors(
    G: Graph, rc: RetainedColoring, v: int
) -> Tuple[int, Counter]:
    kept = [w for w in G.adjacency[v] if w in rc.T]
    return len(kept), Counter(rc.sigma[w] for w in kept)


def slack(G: Graph, P: PaletteSystem, rc: RetainedColoring, v: int) -> int:
    """``|T ∩ N_v| - |σ(T ∩ N_v) ∩ S_v|``."""
    kept, colors = _neighborhood_colors(G, rc, v)
    return kept - len(set(colors) & P.members[v])


def realized_events(
    G: Graph,
    P: PaletteSystem,
    rc: RetainedColoring,
    ta: TentativeAssignment,
    v: int,
) -> Tuple[int, int]:
    """Counts of fraternal and alien events realized around ``v``.

    A fraternal event is a color held by exactly two neighbors, both
    retained; an alien event is a retained neighbor whose color is outside
    ``S_v``. Each count is a lower bound on the slack of ``v``.
    """
    tentative = Counter(ta.tau[w] for w in G.adjacency[v])
    holders: Dict[int, list] = {}
    for w in G.adjacency[v]:
        holders.setdefault(ta.tau[w], []).append(w)
    fraternal = sum(
        1
        for gamma, ws in holders.items()
        if tentative[gamma] == 2 and all(w in rc.T for w in ws)
    )
    alien = sum(
        1 for w in G.adjacency[v] if w in rc.T and rc.sigma[w] not in P.members[v]
    )
    current = slack(G, P, rc, v)
    assert current >= fraternal
    assert current >= alien
    return fraternal, alien


def expected_fraternal_events(G: Graph, P: PaletteSystem, v: int) -> Fraction:
    """Exact expected number of fraternal events around ``v``.

    Each ``(uw, γ) ∈ F_v`` contributes
    ``(D+1)^{-2} ζ̂^{|J|+2D-d_γ(u)-d_γ(w)}`` where ``J`` is the set of
    vertices other than ``u, w`` holding ``γ`` next to ``v``, ``u`` or ``w``.
    """
    D = G.D
    zh = zeta_hat(D)
    total = Fraction(0)
    for u, w, gamma in fraternal_pairs(G, P, v):
        holders = P.holders[gamma]
        J = (G.neighbors[v] | G.neighbors[u] | G.neighbors[w]) & holders
        J = J - {u, w}
        exponent = len(J) + 2 * D - color_degree_S(G, P, u, gamma)
        exponent -= color_degree_S(G, P, w, gamma)
        total += zh**exponent / (D + 1) ** 2
    return total


@dataclass(frozen=True)
class VertexDiagnostics:
    """Slack bookkeeping of one sparse vertex."""

    retained_neighbors: float
    slack: float
    fraternal_size: int = 0
    alien_size: int = 0
    branch: Branch = Branch.NEITHER
    fraternal_events: int = 0
    alien_events: int = 0
    witness: int = 0

    def to_dict(self) -> dict:
        record = asdict(self)
        record["branch"] = self.branch.value
        return record


@dataclass(frozen=True)
class SparseDiagnostics:
    """Per sparse vertex diagnostics, keyed by vertex."""

    n: int
    D: int
    vertices: Dict[int, VertexDiagnostics] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {str(v): d.to_dict() for v, d in sorted(self.vertices.items())}


def diagnose_sparse(
    G: Graph,
    P: PaletteSystem,
    sparse: Iterable[int],
    ta: TentativeAssignment,
    rc: RetainedColoring,
    params: Params,
) -> SparseDiagnostics:
    """Diagnostics of every vertex in ``sparse``."""
    vertices = {}
    for v in sorted(sparse):
        kept, _ = _neighborhood_colors(G, rc, v)
        fraternal_events, alien_events = realized_events(G, P, rc, ta, v)
        vertices[v] = VertexDiagnostics(
            retained_neighbors=kept,
            slack=slack(G, P, rc, v),
            fraternal_size=fraternal_size(G, P, v),
            alien_size=alien_size(G, P, v),
            branch=sparse_dichotomy(G, P, v, params.vartheta),
            fraternal_events=fraternal_events,
            alien_events=alien_events,
            witness=sparsity_witness(G, v),
        )
    return SparseDiagnostics(G.n, G.D, vertices)


class TargetStatus(Enum):
    PASS = "pass"
    FAIL = "fail"
    EXEMPT = "exempt"
    """Vertex outside the sparse part."""


def check_targets(
    diag: SparseDiagnostics, params: Params, tol: Optional[float] = None
) -> Dict[int, TargetStatus]:
    """Retained-neighborhood and slack targets of every vertex.

    A sparse vertex passes when ``|T ∩ N_v|`` is within ``(1 ± tol)D/e`` and
    its slack exceeds ``ϑ'D``; vertices without diagnostics are exempt.
    """
    tol = params.target_tol if tol is None else tol
    center = exp(-1) * diag.D
    floor_slack = params.vartheta_prime * diag.D
    status = {}
    for v in range(diag.n):
        record = diag.vertices.get(v)
        if record is None:
            status[v] = TargetStatus.EXEMPT
            continue
        near = (1 - tol) * center <= record.retained_neighbors <= (1 + tol) * center
        status[v] = (
            TargetStatus.PASS if near and record.slack > floor_slack else TargetStatus.FAIL
        )
    failed = sum(1 for s in status.values() if s is TargetStatus.FAIL)
    if failed:
        log.debug("Targets missed at %d sparse vertices", failed)
    return status
