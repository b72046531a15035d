"""Graphs, generators and regularization.

Vertices are dense integers ``0..n-1``. A :class:`Graph` is immutable; all
generators are deterministic functions of their arguments and seed.
"""

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Callable, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np
from qibo.config import log, raise_error

from palettelab.errors import GenerationError, ParameterError, ParityError
from palettelab.rng import generator

Edge = Tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with declared maximum degree ``D``."""

    n: int
    """Number of vertices."""
    adjacency: Tuple[Tuple[int, ...], ...] = field(repr=False)
    """Sorted neighbor indices of every vertex."""
    D: int
    """Declared maximum degree, at least the observed one."""

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise_error(
                ParameterError,
                f"Adjacency has {len(self.adjacency)} rows for {self.n} vertices.",
            )
        for v, row in enumerate(self.adjacency):
            if len(row) > self.D:
                raise_error(
                    ParameterError,
                    f"Vertex {v} has degree {len(row)} above declared D={self.D}.",
                )
            for w in row:
                if w == v:
                    raise_error(ParameterError, f"Self-loop at vertex {v}.")
                if v not in self.neighbors[w]:
                    raise_error(ParameterError, f"Asymmetric adjacency at {v}-{w}.")

    @cached_property
    def neighbors(self) -> Tuple[frozenset, ...]:
        """Neighborhoods as frozensets, for membership tests."""
        return tuple(frozenset(row) for row in self.adjacency)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.fromiter((len(row) for row in self.adjacency), int, self.n)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n > 0 else 0

    @property
    def m(self) -> int:
        """Number of edges."""
        return int(self.degrees.sum()) // 2

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def is_regular(self, D: Optional[int] = None) -> bool:
        D = self.D if D is None else D
        return bool(np.all(self.degrees == D))

    def adjacent(self, u: int, v: int) -> bool:
        return v in self.neighbors[u]

    def edges(self) -> Iterator[Edge]:
        """Edges ``(u, v)`` with ``u < v`` in ascending order."""
        for u, row in enumerate(self.adjacency):
            for v in row:
                if u < v:
                    yield u, v

    @cached_property
    def edge_array(self) -> Tuple[np.ndarray, np.ndarray]:
        """Endpoint arrays of all edges, for vectorized conflict checks."""
        pairs = np.array(list(self.edges()), dtype=np.int64).reshape(-1, 2)
        return pairs[:, 0], pairs[:, 1]

    def nonedges(self, vertices: Iterable[int]) -> Iterator[Edge]:
        """Non-adjacent pairs ``(u, w)``, ``u < w``, inside ``vertices``."""
        for u, w in combinations(sorted(vertices), 2):
            if w not in self.neighbors[u]:
                yield u, w

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges())
        return graph

    def induced(self, vertices: Iterable[int]) -> nx.Graph:
        """Induced subgraph on ``vertices`` as a networkx graph."""
        vertices = set(vertices)
        graph = nx.Graph()
        graph.add_nodes_from(sorted(vertices))
        for u in vertices:
            graph.add_edges_from((u, w) for w in self.adjacency[u] if w in vertices)
        return graph


def build_graph(n: int, edges: Iterable[Edge], D: Optional[int] = None) -> Graph:
    """Build a :class:`Graph` from an edge list.

    Duplicate edges are merged silently.

    Args:
        n: number of vertices.
        edges: vertex pairs.
        D: declared maximum degree; the observed maximum when ``None``.
    """
    rows: List[Set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise_error(ParameterError, f"Edge ({u}, {v}) out of range for n={n}.")
        if u == v:
            raise_error(ParameterError, f"Edge ({u}, {v}) is a self-loop.")
        rows[u].add(v)
        rows[v].add(u)
    observed = max((len(row) for row in rows), default=0)
    if D is None:
        D = observed
    elif D < observed:
        raise_error(
            ParameterError, f"Declared degree {D} below observed maximum {observed}."
        )
    return Graph(n, tuple(tuple(sorted(row)) for row in rows), D)


def nonedge_count(G: Graph, X: Iterable[int]) -> int:
    """Number of unordered non-adjacent pairs inside ``X``."""
    X = set(X)
    inside = sum(len(G.neighbors[v] & X) for v in X) // 2
    return comb(len(X), 2) - inside


def _deficient(adj: Sequence[Set[int]], D: int) -> List[int]:
    """Deficient vertices, most deficient first."""
    return sorted(
        (v for v, row in enumerate(adj) if len(row) < D), key=lambda v: (len(adj[v]), v)
    )


def _spread(deficits: Sequence[int], z: int) -> List[List[int]]:
    """Assign each deficit to distinct slots among ``z``, least loaded first."""
    load = [0] * z
    targets = []
    for d in deficits:
        chosen = sorted(range(z), key=lambda i: (load[i], i))[:d]
        for i in chosen:
            load[i] += 1
        targets.append(chosen)
    return targets


def regularize(G: Graph, D: int) -> Graph:
    """Embed ``G`` into a ``D``-regular simple graph on at most ``n+D+2`` vertices.

    Original vertex indices are preserved and new vertices are appended.
    Deficient non-adjacent pairs are joined first; once the deficient
    vertices form a clique, a batch of new vertices absorbs the remaining
    deficits and is completed internally by a Havel-Hakimi realization.
    """
    if G.max_degree > D:
        raise_error(
            ParameterError, f"Maximum degree {G.max_degree} exceeds target D={D}."
        )
    if G.is_regular(D):
        return G if G.D == D else Graph(G.n, G.adjacency, D)

    adj = [set(row) for row in G.adjacency]
    while True:
        deficient = _deficient(adj, D)
        pair = next(
            (
                (u, w)
                for i, u in enumerate(deficient)
                for w in deficient[i + 1 :]
                if w not in adj[u]
            ),
            None,
        )
        if pair is None:
            break
        u, w = pair
        adj[u].add(w)
        adj[w].add(u)

    deficient = _deficient(adj, D)
    if deficient:
        deficits = [D - len(adj[v]) for v in deficient]
        total = sum(deficits)
        for z in range(max(1, max(deficits)), D + 3):
            if (z * D - total) % 2 != 0 or z * D < total:
                continue
            targets = _spread(deficits, z)
            load = Counter(i for chosen in targets for i in chosen)
            internal = [D - load[i] for i in range(z)]
            if min(internal) < 0 or not nx.is_graphical(internal):
                continue
            base = len(adj)
            adj.extend(set() for _ in range(z))
            for v, chosen in zip(deficient, targets):
                for i in chosen:
                    adj[v].add(base + i)
                    adj[base + i].add(v)
            for a, b in nx.havel_hakimi_graph(internal).edges():
                adj[base + a].add(base + b)
                adj[base + b].add(base + a)
            log.debug("regularize: added %d vertices for deficit %d", z, total)
            break
        else:
            raise_error(GenerationError, f"No completion batch for deficit {total}.")

    result = Graph(len(adj), tuple(tuple(sorted(row)) for row in adj), D)
    assert result.is_regular(D)
    assert result.n <= G.n + D + 2
    return result


def gen_disjoint_cliques(m: int, D: int) -> Graph:
    """``m`` disjoint copies of ``K_{D+1}``."""
    if m < 1 or D < 1:
        raise_error(ParameterError, f"Need m >= 1 and D >= 1, got m={m}, D={D}.")
    size = D + 1
    edges = (
        (block * size + a, block * size + b)
        for block in range(m)
        for a, b in combinations(range(size), 2)
    )
    return build_graph(m * size, edges, D)


def _pair_stubs(
    stubs: np.ndarray,
    rng: np.random.Generator,
    limit: int,
    forbidden: Callable[[int, int], bool],
) -> List[Edge]:
    """Random perfect pairing of ``stubs`` repaired by edge swaps.

    A pair is bad when it is forbidden or duplicated; each bad pair is
    swapped against a random other pair until both new pairs are fresh.
    """
    order = rng.permutation(stubs)
    edges: List[Edge] = [
        (int(min(a, b)), int(max(a, b))) for a, b in order.reshape(-1, 2)
    ]
    count = Counter(edges)

    def bad(edge: Edge) -> bool:
        return forbidden(*edge) or count[edge] > 1

    attempts = 0
    pending = [i for i, edge in enumerate(edges) if bad(edge)]
    while pending:
        i = pending.pop()
        if not bad(edges[i]):
            continue
        while True:
            attempts += 1
            if attempts > limit:
                raise GenerationError("Stub pairing repair failed", attempts)
            j = int(rng.integers(len(edges)))
            if j == i:
                continue
            (a, b), (c, d) = edges[i], edges[j]
            if rng.random() < 0.5:
                c, d = d, c
            first = (min(a, c), max(a, c))
            second = (min(b, d), max(b, d))
            if first == second or forbidden(*first) or forbidden(*second):
                continue
            if count[first] > 0 or count[second] > 0:
                continue
            count[edges[i]] -= 1
            count[edges[j]] -= 1
            count[first] += 1
            count[second] += 1
            edges[i], edges[j] = first, second
            break
    return edges


def _loop(a: int, b: int) -> bool:
    return a == b


def gen_random_regular(n: int, D: int, seed: int) -> Graph:
    """Random simple ``D``-regular graph by configuration-model pairing.

    Loops and multi-edges are removed by local edge swaps, bounded at
    ``100·n·D`` attempts.
    """
    if (n * D) % 2 != 0:
        raise_error(ParityError, f"n·D = {n}·{D} is odd.")
    if D >= n or D < 0:
        raise_error(ParameterError, f"Need 0 <= D < n, got D={D}, n={n}.")
    if D == 0:
        return build_graph(n, [], 0)
    rng = generator(seed)
    stubs = np.repeat(np.arange(n), D)
    edges = _pair_stubs(stubs, rng, 100 * n * D, _loop)
    return build_graph(n, edges, D)


def planted_cluster_edges(offset: int, D: int) -> Tuple[List[Edge], List[int]]:
    """Edges of ``K_{D+1}`` minus a perfect matching, starting at ``offset``.

    Returns:
        The internal edges and the vertices left one short of degree ``D``.
    """
    size = D + 1
    matched = 2 * (size // 2)
    removed = {(offset + a, offset + a + 1) for a in range(0, matched, 2)}
    edges = [
        (offset + a, offset + b)
        for a, b in combinations(range(size), 2)
        if (offset + a, offset + b) not in removed
    ]
    return edges, list(range(offset, offset + matched))


def gen_hybrid(m: int, s: int, D: int, seed: int) -> Graph:
    """Planted near-cliques joined to a sparse quasi-random part.

    Each planted cluster is ``K_{D+1}`` minus a perfect matching; every
    vertex that lost a matching edge gets one external edge, into the sparse
    part when ``s > 0`` and into another cluster otherwise. The sparse part
    is completed to degree ``D`` by configuration-model pairing.
    """
    if m == 0:
        return gen_random_regular(s, D, seed)
    if m < 0 or D < 1 or s < 0:
        raise_error(ParameterError, f"Invalid hybrid sizes m={m}, s={s}, D={D}.")
    if 0 < s <= D:
        raise_error(ParameterError, f"Sparse part needs s=0 or s > D, got s={s}.")
    rng = generator(seed)
    size = D + 1
    edges: List[Edge] = []
    short: List[int] = []
    for block in range(m):
        internal, deficient = planted_cluster_edges(block * size, D)
        edges.extend(internal)
        short.extend(deficient)
    base = m * size

    if s == 0:

        def same_cluster(a: int, b: int) -> bool:
            return a // size == b // size

        if short:
            if len(short) % 2 != 0 or m < 2:
                raise GenerationError("Infeasible cross-cluster padding", 0)
            edges.extend(
                _pair_stubs(np.array(short), rng, 100 * len(short) * D, same_cluster)
            )
        return build_graph(base, edges, D)

    external = [0] * s
    for k, v in enumerate(rng.permutation(short)):
        w = base + k % s
        edges.append((int(v), w))
        external[k % s] += 1
    residual = [D - e for e in external]
    if min(residual) < 0 or not nx.is_graphical(residual):
        raise GenerationError(f"Infeasible sparse degree sequence for s={s}", 0)
    stubs = np.repeat(np.arange(base, base + s), residual)
    edges.extend(_pair_stubs(stubs, rng, 100 * s * D + 100, _loop))
    return build_graph(base + s, edges, D)


class Family(Enum):
    """Graph families available to experiments."""

    DISJOINT_CLIQUES = "disjoint-cliques"
    RANDOM_REGULAR = "random-regular"
    HYBRID = "hybrid"
    EXPLICIT_FILE = "explicit-file"


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for a graph, hashable so instances can be cached per process."""

    family: Family
    n: int = 0
    """Vertex count (random-regular, or total for hybrid)."""
    D: int = 0
    m: int = 0
    """Clique count (disjoint-cliques, hybrid)."""
    seed: int = 0
    hybrid_mix: float = 0.0
    """Fraction of vertices in planted clusters, used when ``m`` is 0."""
    path: Optional[str] = None
    """Source file of the explicit-file family."""

    def __post_init__(self):
        if self.family is Family.RANDOM_REGULAR and (self.n * self.D) % 2 != 0:
            raise_error(ParityError, f"n·D = {self.n}·{self.D} is odd.")
        if self.family is Family.DISJOINT_CLIQUES and (self.m < 1 or self.D < 1):
            raise_error(ParameterError, "Cliques need m >= 1 and D >= 1.")
        if self.family is Family.EXPLICIT_FILE and self.path is None:
            raise_error(ParameterError, "Explicit-file graphs need a path.")
        if not 0 <= self.hybrid_mix <= 1:
            raise_error(ParameterError, f"hybrid_mix {self.hybrid_mix} not in [0, 1].")

    @property
    def clusters(self) -> int:
        """Planted cluster count of the hybrid family."""
        if self.m > 0:
            return self.m
        return int(round(self.hybrid_mix * self.n / (self.D + 1)))

    @property
    def sparse_count(self) -> int:
        return max(0, self.n - self.clusters * (self.D + 1))

    def build(self) -> Graph:
        log.info("Generating %s", self.label)
        if self.family is Family.DISJOINT_CLIQUES:
            return gen_disjoint_cliques(self.m, self.D)
        if self.family is Family.RANDOM_REGULAR:
            return gen_random_regular(self.n, self.D, self.seed)
        if self.family is Family.HYBRID:
            return gen_hybrid(self.clusters, self.sparse_count, self.D, self.seed)
        from palettelab.serialize import load_graph

        return load_graph(self.path)

    @property
    def label(self) -> str:
        if self.family is Family.DISJOINT_CLIQUES:
            return f"{self.family.value}(m={self.m},D={self.D})"
        if self.family is Family.EXPLICIT_FILE:
            return f"{self.family.value}({self.path})"
        if self.family is Family.HYBRID:
            return (
                f"{self.family.value}(m={self.clusters},s={self.sparse_count},"
                f"D={self.D},seed={self.seed})"
            )
        return f"{self.family.value}(n={self.n},D={self.D},seed={self.seed})"
