"""Base palettes ``S_v`` and sampled lists ``L_v``."""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from qibo.config import log, raise_error

from palettelab.errors import ParameterError, StructuralError
from palettelab.graphcore import Graph
from palettelab.rng import generator

ColorList = Tuple[int, ...]


class PaletteMode(Enum):
    """How base lists are laid out over the color universe."""

    IDENTICAL = "identical"
    """Every vertex gets ``[0, D]``."""
    WINDOWS = "windows"
    """Contiguous windows of width ``D+1`` sliding with the vertex index."""
    RANDOM_WIDE = "random-wide"
    """Independent uniform ``(D+1)``-subsets of the universe."""
    DEGREE_PLUS_ONE = "degree-plus-one"
    """Experimental: ``[0, d_v]``, lists one longer than the degree."""


@dataclass(frozen=True)
class PaletteSystem:
    """Color universe ``Γ = [0, gamma_size)`` and base lists."""

    gamma_size: int
    S: Tuple[ColorList, ...] = field(repr=False)
    D: int
    mode: PaletteMode = PaletteMode.IDENTICAL

    def __post_init__(self):
        used = set()
        for v, colors in enumerate(self.S):
            if self.mode is PaletteMode.DEGREE_PLUS_ONE:
                if not 1 <= len(colors) <= self.D + 1:
                    raise_error(StructuralError, f"List of {v} has size {len(colors)}.")
            elif len(colors) != self.D + 1:
                raise_error(
                    StructuralError,
                    f"List of {v} has size {len(colors)}, expected {self.D + 1}.",
                )
            if list(colors) != sorted(set(colors)):
                raise_error(StructuralError, f"List of {v} is not sorted and distinct.")
            used.update(colors)
        if used != set(range(self.gamma_size)):
            raise_error(StructuralError, "Palette universe has unused or foreign colors.")

    @property
    def n(self) -> int:
        return len(self.S)

    @cached_property
    def members(self) -> Tuple[frozenset, ...]:
        return tuple(frozenset(colors) for colors in self.S)

    @cached_property
    def membership(self) -> np.ndarray:
        """Boolean matrix ``[v, γ]``, true when ``γ ∈ S_v``."""
        table = np.zeros((self.n, self.gamma_size), dtype=bool)
        for v, colors in enumerate(self.S):
            table[v, list(colors)] = True
        return table

    @cached_property
    def holders(self) -> Dict[int, frozenset]:
        """Vertices whose base list contains each color."""
        holders: Dict[int, set] = {}
        for v, colors in enumerate(self.S):
            for gamma in colors:
                holders.setdefault(gamma, set()).add(v)
        return {gamma: frozenset(vs) for gamma, vs in holders.items()}

    def extend(self, n: int) -> "PaletteSystem":
        """Pad to ``n`` vertices with the list ``[0, D]``."""
        extra = tuple(tuple(range(self.D + 1)) for _ in range(n - self.n))
        return PaletteSystem(self.gamma_size, self.S + extra, self.D, self.mode)


def _compact(lists: Sequence[Sequence[int]]) -> Tuple[int, Tuple[ColorList, ...]]:
    """Relabel used colors to ``0..k-1`` preserving their order."""
    used = sorted({int(c) for colors in lists for c in colors})
    relabel = {c: i for i, c in enumerate(used)}
    return len(used), tuple(
        tuple(sorted(relabel[int(c)] for c in colors)) for colors in lists
    )


def make_palette(
    G: Graph, mode: PaletteMode, gamma_size: int, seed: int = 0
) -> PaletteSystem:
    """Base lists of size ``D+1`` for every vertex of ``G``.

    Unused colors are dropped from the universe, so ``gamma_size`` is an
    upper bound on the resulting ``|Γ|``.
    """
    mode = PaletteMode(mode)
    D = G.D
    if gamma_size < D + 1:
        raise_error(ParameterError, f"gamma_size {gamma_size} below D+1={D + 1}.")
    if mode is PaletteMode.IDENTICAL:
        lists = [range(D + 1)] * G.n
    elif mode is PaletteMode.WINDOWS:
        positions = gamma_size - D
        lists = [range(v % positions, v % positions + D + 1) for v in range(G.n)]
    elif mode is PaletteMode.RANDOM_WIDE:
        rng = generator(seed)
        table = np.tile(np.arange(gamma_size), (G.n, 1))
        lists = rng.permuted(table, axis=1)[:, : D + 1]
    else:
        lists = [range(G.degree(v) + 1) for v in range(G.n)]
    gamma, S = _compact(lists)
    if gamma < gamma_size:
        log.debug("Palette universe compacted from %d to %d colors", gamma_size, gamma)
    return PaletteSystem(gamma, S, D, mode)


@dataclass(frozen=True)
class ListSample:
    """Sampled lists ``L_v``, each a uniform ``ell``-subset of its base."""

    L: Tuple[ColorList, ...] = field(repr=False)
    ell: int
    seed: int

    @cached_property
    def members(self) -> Tuple[frozenset, ...]:
        return tuple(frozenset(colors) for colors in self.L)

    @property
    def n(self) -> int:
        return len(self.L)

    def check(self, P: PaletteSystem):
        """Raise unless every ``L_v`` is an ``ell``-subset of ``S_v``."""
        for v, colors in enumerate(self.L):
            if len(colors) != self.ell or not self.members[v] <= P.members[v]:
                raise_error(StructuralError, f"List of vertex {v} is not inside S_v.")


def sample_lists(
    P: PaletteSystem,
    ell: int,
    seed: int,
    restriction: Optional[Mapping[int, Sequence[int]]] = None,
) -> ListSample:
    """Independent uniform ``ell``-subsets of every base list.

    Args:
        P: base palettes.
        ell: list size.
        seed: stream seed.
        restriction: optional allowed colors ``T_v`` replacing ``S_v`` for the
            vertices it maps.
    """
    bases = [
        tuple(restriction[v]) if restriction is not None and v in restriction else P.S[v]
        for v in range(P.n)
    ]
    for v, base in enumerate(bases):
        if ell > len(base):
            raise_error(
                ParameterError,
                f"List size {ell} exceeds the {len(base)} colors available at vertex {v}.",
            )
    if ell < 0:
        raise_error(ParameterError, f"Negative list size {ell}.")
    rng = generator(seed)
    sizes = {len(base) for base in bases}
    if len(sizes) == 1 and bases:
        table = np.array(bases, dtype=np.int64)
        picks = rng.permuted(table, axis=1)[:, :ell]
        L = tuple(tuple(sorted(int(c) for c in row)) for row in picks)
    else:
        L = tuple(
            tuple(sorted(int(c) for c in rng.choice(base, ell, replace=False)))
            for base in bases
        )
    return ListSample(L, ell, seed)
