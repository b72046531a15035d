"""Loading and saving graphs, decompositions, palettes and lists.

All formats are plain text with 0-based indices. Graph files accept
comments starting with ``#``; the other formats are written and read
exactly as described in each function.
"""

import json
from pathlib import Path
from typing import Iterator, List, Tuple

from qibo.config import raise_error

from palettelab.decomposition import Decomposition
from palettelab.errors import StructuralError
from palettelab.graphcore import Graph, build_graph
from palettelab.palette import ListSample, PaletteMode, PaletteSystem


def _lines(text: str, comments: bool = False) -> Iterator[Tuple[int, str]]:
    for number, line in enumerate(text.splitlines(), start=1):
        if comments:
            line = line.split("#", 1)[0]
        line = line.strip()
        if line:
            yield number, line


def _integers(line: str, number: int) -> List[int]:
    try:
        return [int(token) for token in line.split()]
    except ValueError:
        raise_error(StructuralError, f"Line {number} is not a list of integers: {line!r}.")


def dumps_graph(G: Graph) -> str:
    """``n m D`` followed by one ``u v`` line per edge, ``u < v`` ascending."""
    lines = [f"{G.n} {G.m} {G.D}"]
    lines.extend(f"{u} {v}" for u, v in G.edges())
    return "\n".join(lines) + "\n"


def loads_graph(text: str) -> Graph:
    lines = list(_lines(text, comments=True))
    if not lines:
        raise_error(StructuralError, "Empty graph file.")
    number, header = lines[0]
    values = _integers(header, number)
    if len(values) != 3:
        raise_error(StructuralError, f"Graph header must be 'n m D', got {header!r}.")
    n, m, D = values
    edges = []
    for number, line in lines[1:]:
        pair = _integers(line, number)
        if len(pair) != 2:
            raise_error(StructuralError, f"Line {number} is not an edge: {line!r}.")
        edges.append(tuple(pair))
    if len(edges) != m:
        raise_error(StructuralError, f"Header announces {m} edges, found {len(edges)}.")
    return build_graph(n, edges, D)


def dump_graph(G: Graph, path: Path):
    Path(path).write_text(dumps_graph(G))


def load_graph(path: Path) -> Graph:
    return loads_graph(Path(path).read_text())


def dumps_decomposition(dec: Decomposition) -> str:
    """``V* k``, the ``k`` sparse vertices on one line, then one line per cluster."""
    sparse = sorted(dec.sparse)
    lines = [f"V* {len(sparse)}", " ".join(str(v) for v in sparse)]
    lines.extend(" ".join(str(v) for v in cluster) for cluster in dec.clusters)
    return "\n".join(lines) + "\n"


def loads_decomposition(text: str, n: int, eps: float, D: int) -> Decomposition:
    """Parse and check that the result partitions ``range(n)``."""
    rows = text.splitlines()
    if not rows or not rows[0].startswith("V*"):
        raise_error(StructuralError, "Decomposition must start with 'V* k'.")
    size = _integers(rows[0][2:], 1)
    sparse = _integers(rows[1], 2) if len(rows) > 1 else []
    if size != [len(sparse)]:
        raise_error(StructuralError, f"Header announces {size} sparse vertices.")
    clusters = tuple(
        tuple(_integers(line, number)) for number, line in _lines("\n".join(rows[2:]))
    )
    dec = Decomposition(frozenset(sparse), clusters, eps, D)
    dec.check_partition(n)
    return dec


def dumps_palette(P: PaletteSystem) -> str:
    """``n gamma_size D`` then ``v: γ ...`` per vertex."""
    lines = [f"{P.n} {P.gamma_size} {P.D}"]
    lines.extend(f"{v}: " + " ".join(map(str, colors)) for v, colors in enumerate(P.S))
    return "\n".join(lines) + "\n"


def _rows(lines: List[Tuple[int, str]], n: int) -> Tuple[Tuple[int, ...], ...]:
    if len(lines) != n:
        raise_error(StructuralError, f"Expected {n} vertex lines, found {len(lines)}.")
    rows = []
    for v, (number, line) in enumerate(lines):
        head, _, tail = line.partition(":")
        if _integers(head, number) != [v]:
            raise_error(StructuralError, f"Line {number} should describe vertex {v}.")
        rows.append(tuple(_integers(tail, number)))
    return tuple(rows)


def loads_palette(text: str, mode: PaletteMode = PaletteMode.IDENTICAL) -> PaletteSystem:
    """Lists shorter than ``D+1`` switch the mode to degree-plus-one."""
    lines = list(_lines(text))
    if not lines:
        raise_error(StructuralError, "Empty palette file.")
    n, gamma_size, D = _integers(lines[0][1], lines[0][0])
    S = _rows(lines[1:], n)
    if any(len(colors) != D + 1 for colors in S):
        mode = PaletteMode.DEGREE_PLUS_ONE
    return PaletteSystem(gamma_size, S, D, PaletteMode(mode))


def dumps_lists(lists: ListSample) -> str:
    """``ell seed`` then ``v: γ ...`` per vertex."""
    lines = [f"{lists.ell} {lists.seed}"]
    lines.extend(f"{v}: " + " ".join(map(str, colors)) for v, colors in enumerate(lists.L))
    return "\n".join(lines) + "\n"


def loads_lists(text: str) -> ListSample:
    lines = list(_lines(text))
    if not lines:
        raise_error(StructuralError, "Empty list file.")
    ell, seed = _integers(lines[0][1], lines[0][0])
    return ListSample(_rows(lines[1:], len(lines) - 1), ell, seed)


def dump_palette(P: PaletteSystem, path: Path):
    Path(path).write_text(dumps_palette(P))


def load_palette(path: Path) -> PaletteSystem:
    return loads_palette(Path(path).read_text())


def dump_lists(lists: ListSample, path: Path):
    Path(path).write_text(dumps_lists(lists))


def load_lists(path: Path) -> ListSample:
    return loads_lists(Path(path).read_text())


def dump_json(record: dict, path: Path):
    """Write ``record`` as sorted, indented JSON."""
    Path(path).write_text(json.dumps(record, indent=4, sort_keys=True) + "\n")
