"""Sparse/dense partition of a regular graph and its audit.

Clusters are components of a friendship relation between adjacent vertices
with large codegree. Every partition returned by :func:`decompose` carries
an exact audit of the partition inequalities, recomputable from its margins.
"""

from dataclasses import dataclass, field
from functools import cached_property
from math import floor
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx
from qibo.config import log, raise_error

from palettelab.errors import ParameterError, StructuralError
from palettelab.graphcore import Graph, nonedge_count

FRIEND_SLACK = 3
"""Minimum codegree slack of the friendship relation."""


def codegree(G: Graph, u: int, v: int) -> int:
    """Number of common neighbors of ``u`` and ``v``."""
    return len(G.neighbors[u] & G.neighbors[v])


def sparsity_witness(G: Graph, v: int) -> int:
    """Non-edges inside the neighborhood of ``v``."""
    return nonedge_count(G, G.neighbors[v])


@dataclass(frozen=True)
class DecompositionAudit:
    """Margins of every partition inequality.

    A margin is positive (or non-negative for the size window) exactly when
    the corresponding inequality holds; the pass flags are derived from
    them.
    """

    eps: float
    D: int
    sparse_margin: Dict[int, float] = field(default_factory=dict)
    """Per sparse vertex: non-friend neighbor count minus ``εD``."""
    witness: Dict[int, int] = field(default_factory=dict)
    """Per sparse vertex: non-edges inside its neighborhood."""
    size_margin: Tuple[float, ...] = ()
    """Per cluster: distance of its size inside ``[(1-ε)D, (1+6ε)D]``."""
    worst_external: Tuple[int, ...] = ()
    """Per cluster: largest number of neighbors outside the cluster."""
    worst_internal: Tuple[int, ...] = ()
    """Per cluster: largest ``|C \\ N[v]|`` over ``v ∈ C``; ``v`` lies in its own
    closed neighborhood ``N[v]``, so a clique cluster scores 0."""

    @property
    def witness_threshold(self) -> float:
        return self.eps**2 / 2 * self.D**2

    @property
    def external_margin(self) -> Tuple[float, ...]:
        return tuple(7 * self.eps * self.D - e for e in self.worst_external)

    @property
    def internal_margin(self) -> Tuple[float, ...]:
        return tuple(6 * self.eps * self.D - e for e in self.worst_internal)

    @property
    def sparse_pass(self) -> bool:
        return all(margin > 0 for margin in self.sparse_margin.values())

    @property
    def size_pass(self) -> bool:
        return all(margin >= 0 for margin in self.size_margin)

    @property
    def cluster_pass(self) -> bool:
        return all(m > 0 for m in self.external_margin + self.internal_margin)

    @property
    def witness_pass(self) -> bool:
        return all(w > self.witness_threshold for w in self.witness.values())

    @property
    def passed(self) -> bool:
        return (
            self.sparse_pass and self.size_pass and self.cluster_pass and self.witness_pass
        )

    def failing_clusters(self) -> List[int]:
        """Indices of clusters violating the size window or the degree bounds."""
        return [
            i
            for i, (size, ext, inner) in enumerate(
                zip(self.size_margin, self.external_margin, self.internal_margin)
            )
            if size < 0 or ext <= 0 or inner <= 0
        ]

    def summary(self) -> dict:
        return {
            "sparse": self.sparse_pass,
            "size": self.size_pass,
            "cluster": self.cluster_pass,
            "witness": self.witness_pass,
        }


@dataclass(frozen=True)
class Decomposition:
    """Partition ``V = V* ∪ C_1 ∪ ... ∪ C_m``."""

    sparse: FrozenSet[int]
    clusters: Tuple[Tuple[int, ...], ...]
    eps: float
    D: int
    audit: Optional[DecompositionAudit] = field(default=None, compare=False)

    @cached_property
    def cluster_of(self) -> Dict[int, int]:
        return {v: i for i, cluster in enumerate(self.clusters) for v in cluster}

    def check_partition(self, n: int):
        """Raise :class:`StructuralError` unless this partitions ``range(n)``."""
        seen: Dict[int, int] = {}
        for v in list(self.sparse) + [v for c in self.clusters for v in c]:
            seen[v] = seen.get(v, 0) + 1
        duplicated = sorted(v for v, k in seen.items() if k > 1)
        missing = sorted(set(range(n)) - set(seen))
        foreign = sorted(v for v in seen if not 0 <= v < n)
        if duplicated or missing or foreign:
            raise_error(
                StructuralError,
                f"Not a partition: duplicated {duplicated}, missing {missing}, "
                f"out of range {foreign}.",
            )


def verify_decomposition(
    G: Graph, dec: Decomposition, eps: Optional[float] = None
) -> DecompositionAudit:
    """Exact audit of ``dec`` against ``G``; ``dec`` is left untouched."""
    dec.check_partition(G.n)
    eps = dec.eps if eps is None else eps
    D = G.D
    threshold = (1 - eps) * D

    sparse_margin = {}
    witness = {}
    for v in sorted(dec.sparse):
        strangers = sum(1 for w in G.adjacency[v] if codegree(G, v, w) < threshold)
        sparse_margin[v] = strangers - eps * D
        witness[v] = sparsity_witness(G, v)

    size_margin = []
    worst_external = []
    worst_internal = []
    for cluster in dec.clusters:
        members = set(cluster)
        size = len(members)
        size_margin.append(min(size - (1 - eps) * D, (1 + 6 * eps) * D - size))
        worst_external.append(
            max((len(G.neighbors[v] - members) for v in members), default=0)
        )
        worst_internal.append(
            max((len(members - G.neighbors[v]) - 1 for v in members), default=0)
        )

    return DecompositionAudit(
        eps=eps,
        D=D,
        sparse_margin=sparse_margin,
        witness=witness,
        size_margin=tuple(size_margin),
        worst_external=tuple(worst_external),
        worst_internal=tuple(worst_internal),
    )


def friendship_components(
    G: Graph, eps: float, friend_slack: int = FRIEND_SLACK
) -> List[Tuple[int, ...]]:
    """Components of the friendship relation among dense vertices.

    ``u`` and ``v`` are friends when adjacent with codegree at least
    ``D - t``, ``t = max(⌊εD⌋, friend_slack)``; a vertex is dense when it
    has at least ``D - t`` friends.
    """
    D = G.D
    bar = D - max(floor(eps * D + 1e-9), friend_slack)
    friends: Dict[int, List[int]] = {v: [] for v in range(G.n)}
    for u, v in G.edges():
        if codegree(G, u, v) >= bar:
            friends[u].append(v)
            friends[v].append(u)
    dense = {v for v, f in friends.items() if f and len(f) >= bar}
    relation = nx.Graph()
    relation.add_nodes_from(dense)
    relation.add_edges_from((u, w) for u in dense for w in friends[u] if w in dense)
    components = (tuple(sorted(c)) for c in nx.connected_components(relation))
    return sorted(components)


def _assemble(
    n: int, clusters: Iterable[Tuple[int, ...]], eps: float, D: int
) -> Decomposition:
    clusters = tuple(clusters)
    clustered = {v for c in clusters for v in c}
    return Decomposition(frozenset(set(range(n)) - clustered), clusters, eps, D)


def decompose(
    G: Graph, eps: float = 0.1, friend_slack: int = FRIEND_SLACK
) -> Decomposition:
    """Sparse/dense partition of a ``D``-regular graph, audited.

    Components outside the size window are dissolved into the sparse part;
    clusters failing the degree bounds are dissolved after the first audit
    and the result is audited again.

    Args:
        G: ``D``-regular graph.
        eps: partition parameter in ``(0, 1)``.
        friend_slack: lower bound on the codegree slack of the friendship
            relation, ``0`` reproduces the plain ``(1-ε)D`` rule.
    """
    if not 0 < eps < 1:
        raise_error(ParameterError, f"eps must lie in (0, 1), got {eps}.")
    if not G.is_regular():
        raise_error(ParameterError, "Decomposition needs a D-regular graph, regularize first.")
    D = G.D
    low, high = (1 - eps) * D, (1 + 6 * eps) * D
    candidates = [
        c for c in friendship_components(G, eps, friend_slack) if low <= len(c) <= high
    ]
    dec = _assemble(G.n, candidates, eps, D)
    audit = verify_decomposition(G, dec)
    failing = set(audit.failing_clusters())
    if failing:
        log.warning("Dissolving %d clusters failing the audit", len(failing))
        dec = _assemble(
            G.n, (c for i, c in enumerate(dec.clusters) if i not in failing), eps, D
        )
        audit = verify_decomposition(G, dec)
    if not audit.passed:
        log.warning("Decomposition audit failed: %s", audit.summary())
    log.info(
        "Decomposition: |V*|=%d, %d clusters", len(dec.sparse), len(dec.clusters)
    )
    return Decomposition(dec.sparse, dec.clusters, eps, D, audit)
