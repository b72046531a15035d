"""Bipartite graphs ``U ∪ Z``, maximum matchings and Hall deficiency.

``U`` vertices are ``0..u_size-1`` and ``Z`` vertices ``0..z_size-1``; the
adjacency is stored from the ``U`` side.
"""

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from math import comb, prod
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from qibo.config import raise_error

from palettelab.errors import ParameterError

EXHAUSTIVE_LIMIT = 22
"""Largest ``|U|`` accepted by the exhaustive Hall check."""
AUTO_EXHAUSTIVE = 16
"""Largest ``|U|`` checked exhaustively in automatic mode."""

_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


@dataclass(frozen=True)
class Bigraph:
    """Bipartite graph with optional per-``U`` sample sizes ``t``."""

    u_size: int
    z_size: int
    adjacency: Tuple[FrozenSet[int], ...]
    t: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if len(self.adjacency) != self.u_size:
            raise_error(ParameterError, "Adjacency length differs from |U|.")
        for u, row in enumerate(self.adjacency):
            if any(not 0 <= z < self.z_size for z in row):
                raise_error(ParameterError, f"U-vertex {u} has a neighbor outside Z.")
        if self.t is not None:
            if len(self.t) != self.u_size:
                raise_error(ParameterError, "Sample sizes do not cover U.")
            for u, (t, row) in enumerate(zip(self.t, self.adjacency)):
                if not 0 <= t <= len(row):
                    raise_error(
                        ParameterError, f"Sample size {t} exceeds degree of {u}."
                    )

    @classmethod
    def from_lists(
        cls,
        u_size: int,
        z_size: int,
        rows: Iterable[Iterable[int]],
        t: Optional[Sequence[int]] = None,
    ) -> "Bigraph":
        return cls(
            u_size,
            z_size,
            tuple(frozenset(int(z) for z in row) for row in rows),
            None if t is None else tuple(t),
        )

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(len(row) for row in self.adjacency)

    @property
    def edge_count(self) -> int:
        return sum(self.degrees)

    def z_neighbors(self, z: int) -> FrozenSet[int]:
        return frozenset(u for u, row in enumerate(self.adjacency) if z in row)

    def z_degrees(self) -> Tuple[int, ...]:
        return tuple(len(self.z_neighbors(z)) for z in range(self.z_size))

    @cached_property
    def masks(self) -> Tuple[int, ...]:
        """Neighborhoods as integer bitmasks over ``Z``."""
        return tuple(sum(1 << z for z in row) for row in self.adjacency)


def switch(B: Bigraph, beta: int, gamma: int) -> Bigraph:
    """Give ``β`` the union and ``γ`` the intersection of their neighborhoods."""
    if beta == gamma:
        raise_error(ParameterError, f"Switching needs distinct Z-vertices, got {beta}.")
    rows = []
    for row in B.adjacency:
        if gamma in row and beta not in row:
            row = (row - {gamma}) | {beta}
        rows.append(row)
    return Bigraph(B.u_size, B.z_size, tuple(rows), B.t)


def canonicalize_nested(B: Bigraph, degrees: Optional[Sequence[int]] = None) -> Bigraph:
    """Nested bigraph where every ``U``-vertex sees the first ``d_v`` of ``Z``."""
    degrees = B.degrees if degrees is None else tuple(degrees)
    if len(degrees) != B.u_size:
        raise_error(ParameterError, "Degree sequence does not cover U.")
    for u, d in enumerate(degrees):
        if not 0 <= d <= B.z_size:
            raise_error(
                ParameterError, f"Degree {d} of {u} infeasible with |Z|={B.z_size}."
            )
    return Bigraph(
        B.u_size, B.z_size, tuple(frozenset(range(d)) for d in degrees), B.t
    )


@dataclass(frozen=True)
class Matching:
    """A matching from ``U`` into ``Z``."""

    pairs: Dict[int, int] = field(hash=False)
    """``U``-vertex to ``Z``-vertex."""
    u_size: int

    @property
    def size(self) -> int:
        return len(self.pairs)

    @property
    def deficiency(self) -> int:
        """Unmatched ``U``-vertices."""
        return self.u_size - self.size

    @property
    def is_u_perfect(self) -> bool:
        return self.size == self.u_size


def _hopcroft_karp(
    adj: Sequence[Sequence[int]],
    z_size: int,
    initial: Optional[Mapping[int, int]] = None,
) -> Tuple[List[int], List[int]]:
    u_size = len(adj)
    match_u = [-1] * u_size
    match_z = [-1] * z_size
    for u, z in (initial or {}).items():
        match_u[u], match_z[z] = z, u
    inf = u_size + z_size + 1
    dist = [0] * u_size

    def bfs() -> bool:
        queue = deque()
        for u in range(u_size):
            if match_u[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = inf
        found = False
        while queue:
            u = queue.popleft()
            for z in adj[u]:
                w = match_z[z]
                if w == -1:
                    found = True
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def augment(root: int, position: List[int]) -> bool:
        stack, via = [root], []
        while stack:
            u = stack[-1]
            if position[u] < len(adj[u]):
                z = adj[u][position[u]]
                position[u] += 1
                w = match_z[z]
                if w == -1:
                    via.append(z)
                    for x, y in zip(stack, via):
                        match_u[x], match_z[y] = y, x
                    return True
                if dist[w] == dist[u] + 1:
                    via.append(z)
                    stack.append(w)
            else:
                dist[u] = inf
                stack.pop()
                if via:
                    via.pop()
        return False

    while bfs():
        position = [0] * u_size
        for u in range(u_size):
            if match_u[u] == -1:
                augment(u, position)
    return match_u, match_z


def max_matching(B: Bigraph, initial: Optional[Mapping[int, int]] = None) -> Matching:
    """Maximum matching by layered augmenting paths (Hopcroft-Karp).

    Z-vertices matched by ``initial`` stay matched in the result.
    """
    adj = [sorted(row) for row in B.adjacency]
    match_u, _ = _hopcroft_karp(adj, B.z_size, initial)
    return Matching({u: z for u, z in enumerate(match_u) if z != -1}, B.u_size)


@dataclass(frozen=True)
class HallReport:
    """Worst Hall deficiency ``min_Q |N(Q)| - |Q|`` and a witnessing ``Q``."""

    deficiency: int
    witness: FrozenSet[int]
    mode: str

    @property
    def satisfied(self) -> bool:
        return self.deficiency >= 0


def _konig_witness(B: Bigraph, matching: Matching) -> FrozenSet[int]:
    """``U``-vertices reachable by alternating paths from unmatched ones."""
    match_z = {z: u for u, z in matching.pairs.items()}
    reached = {u for u in range(B.u_size) if u not in matching.pairs}
    queue = deque(reached)
    while queue:
        u = queue.popleft()
        for z in B.adjacency[u]:
            w = match_z.get(z)
            if w is not None and w not in reached:
                reached.add(w)
                queue.append(w)
    return frozenset(reached)


def _exhaustive(B: Bigraph) -> HallReport:
    words = max(1, (B.z_size + 63) // 64)
    rows = np.zeros((B.u_size, words), dtype=np.uint64)
    for u, row in enumerate(B.adjacency):
        for z in row:
            rows[u, z // 64] |= np.uint64(1) << np.uint64(z % 64)
    unions = np.zeros((1 << B.u_size, words), dtype=np.uint64)
    for u in range(B.u_size):
        half = 1 << u
        unions[half : 2 * half] = unions[:half] | rows[u]
    neighborhood = _POPCOUNT[unions.view(np.uint8)].reshape(len(unions), -1).sum(axis=1)
    index = np.arange(len(unions), dtype=np.uint64)
    sizes = _POPCOUNT[index.view(np.uint8)].reshape(len(index), -1).sum(axis=1)
    values = neighborhood - sizes
    best = int(np.argmin(values))
    witness = frozenset(u for u in range(B.u_size) if best >> u & 1)
    return HallReport(int(values[best]), witness, "exhaustive")


def hall_check(B: Bigraph, mode: str = "auto") -> HallReport:
    """Hall deficiency of ``B`` with a witness set.

    Args:
        B: bigraph.
        mode: ``"exhaustive"`` enumerates all subsets of ``U`` (at most
            22 vertices), ``"matching"`` uses König's theorem on a maximum
            matching, ``"auto"`` picks by size.
    """
    if mode == "auto":
        mode = "exhaustive" if B.u_size <= AUTO_EXHAUSTIVE else "matching"
    if mode == "exhaustive":
        if B.u_size > EXHAUSTIVE_LIMIT:
            raise_error(
                ParameterError, f"|U|={B.u_size} too large for exhaustive Hall check."
            )
        return _exhaustive(B)
    if mode != "matching":
        raise_error(ParameterError, f"Unknown Hall check mode {mode}.")
    matching = max_matching(B)
    if matching.is_u_perfect:
        return HallReport(0, frozenset(), "matching")
    return HallReport(-matching.deficiency, _konig_witness(B, matching), "matching")


def _has_system(lists: Sequence[Sequence[int]], index: int = 0, used: int = 0) -> bool:
    """Whether ``lists[index:]`` has distinct representatives avoiding ``used``."""
    if index == len(lists):
        return True
    return any(
        not used >> z & 1 and _has_system(lists, index + 1, used | 1 << z)
        for z in lists[index]
    )


def matching_probability(B: Bigraph, t: Optional[Sequence[int]] = None) -> Fraction:
    """Exact probability of a ``U``-perfect matching in the random sub-bigraph.

    Every ``U``-vertex keeps a uniform ``t_v``-subset of its neighborhood,
    independently; all outcomes are enumerated.
    """
    t = B.t if t is None else tuple(t)
    if t is None:
        raise_error(ParameterError, "Sample sizes are required.")
    choices = [
        tuple(combinations(sorted(row), k)) for row, k in zip(B.adjacency, t)
    ]
    outcomes = prod(comb(len(row), k) for row, k in zip(B.adjacency, t))
    hits = sum(1 for lists in product(*choices) if _has_system(lists))
    return Fraction(hits, outcomes)
