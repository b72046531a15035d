"""List-coloring search shared by sparse completion and the direct solver.

An instance is a mapping ``vertex -> allowed colors`` together with the
neighborhoods of its vertices; neighbors outside the instance are ignored.
"""

import heapq
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence

import networkx as nx
from qibo.config import log, raise_error

from palettelab.densephase.bigraph import Bigraph, max_matching
from palettelab.rng import generator

Neighbors = Mapping[int, Iterable[int]]
Lists = Mapping[int, Sequence[int]]


class SearchStatus(Enum):
    SOLVED = "solved"
    UNSATISFIABLE = "unsatisfiable"
    """Proven to have no coloring."""
    INCONCLUSIVE = "inconclusive"
    """Budget or heuristic exhausted without a verdict."""


@dataclass(frozen=True)
class SearchResult:
    status: SearchStatus
    coloring: Dict[int, int] = field(default_factory=dict, hash=False)
    nodes: int = 0
    """Color assignments tried."""
    failed_vertex: Optional[int] = None
    residual_size: int = 0
    """List size of ``failed_vertex``."""

    @property
    def success(self) -> bool:
        return self.status is SearchStatus.SOLVED


def _restricted(neighbors: Neighbors, lists: Lists) -> Dict[int, List[int]]:
    return {v: [w for w in neighbors[v] if w in lists and w != v] for v in lists}


def _empty_list(lists: Lists) -> Optional[SearchResult]:
    for v in sorted(lists):
        if not lists[v]:
            return SearchResult(SearchStatus.UNSATISFIABLE, failed_vertex=v)
    return None


def greedy_color(
    neighbors: Neighbors, lists: Lists, order: Optional[Sequence[int]] = None
) -> SearchResult:
    """Smallest available color, most constrained vertex first.

    With ``order`` the vertices are colored in that fixed order instead.
    """
    empty = _empty_list(lists)
    if empty is not None:
        return empty
    adj = _restricted(neighbors, lists)
    available = {v: set(lists[v]) for v in lists}
    coloring: Dict[int, int] = {}

    def place(v: int) -> bool:
        if not available[v]:
            return False
        color = min(available[v])
        coloring[v] = color
        for w in adj[v]:
            if w not in coloring:
                available[w].discard(color)
        return True

    if order is not None:
        for v in order:
            if not place(v):
                return SearchResult(
                    SearchStatus.INCONCLUSIVE, coloring, len(coloring), v, len(lists[v])
                )
        return SearchResult(SearchStatus.SOLVED, coloring, len(coloring))

    heap = [(len(available[v]), v) for v in lists]
    heapq.heapify(heap)
    while heap:
        size, v = heapq.heappop(heap)
        if v in coloring:
            continue
        if size != len(available[v]):
            heapq.heappush(heap, (len(available[v]), v))
            continue
        if not place(v):
            return SearchResult(
                SearchStatus.INCONCLUSIVE, coloring, len(coloring), v, len(lists[v])
            )
        for w in adj[v]:
            if w not in coloring:
                heapq.heappush(heap, (len(available[w]), w))
    return SearchResult(SearchStatus.SOLVED, coloring, len(coloring))


def backtrack_color(
    neighbors: Neighbors, lists: Lists, budget: Optional[int] = None
) -> SearchResult:
    """Exhaustive search with forward checking and dynamic MRV ordering.

    Args:
        neighbors: neighborhoods.
        lists: allowed colors.
        budget: maximum number of color assignments; exceeding it gives an
            inconclusive result.
    """
    empty = _empty_list(lists)
    if empty is not None:
        return empty
    if not lists:
        return SearchResult(SearchStatus.SOLVED)
    adj = _restricted(neighbors, lists)
    domains = {v: set(lists[v]) for v in lists}
    coloring: Dict[int, int] = {}
    nodes = 0

    def select() -> int:
        return min(
            (v for v in domains if v not in coloring), key=lambda v: (len(domains[v]), v)
        )

    first = select()
    # frame: vertex, colors left to try, removals made by the current try
    frames = [[first, sorted(domains[first]), None]]
    while frames:
        frame = frames[-1]
        v, options, removed = frame
        if removed is not None:
            for w, color in removed:
                domains[w].add(color)
            del coloring[v]
            frame[2] = None
        if not options:
            frames.pop()
            continue
        if budget is not None and nodes >= budget:
            log.debug("Backtracking budget of %d nodes exhausted", budget)
            return SearchResult(
                SearchStatus.INCONCLUSIVE, {}, nodes, first, len(lists[first])
            )
        color = options.pop(0)
        nodes += 1
        coloring[v] = color
        removed, wiped = [], False
        for w in adj[v]:
            if w not in coloring and color in domains[w]:
                domains[w].discard(color)
                removed.append((w, color))
                wiped = wiped or not domains[w]
        frame[2] = removed
        if wiped:
            continue
        if len(coloring) == len(domains):
            return SearchResult(SearchStatus.SOLVED, dict(coloring), nodes)
        following = select()
        frames.append([following, sorted(domains[following]), None])
    return SearchResult(SearchStatus.UNSATISFIABLE, {}, nodes, first, len(lists[first]))


def restart_color(
    neighbors: Neighbors, lists: Lists, restarts: int = 20, seed: int = 0
) -> SearchResult:
    """Greedy coloring along ``restarts`` random vertex orders."""
    empty = _empty_list(lists)
    if empty is not None:
        return empty
    rng = generator(seed)
    vertices = sorted(lists)
    nodes, result = 0, SearchResult(SearchStatus.INCONCLUSIVE)
    for _ in range(max(restarts, 1)):
        order = [vertices[i] for i in rng.permutation(len(vertices))]
        result = greedy_color(neighbors, lists, order)
        nodes += result.nodes
        if result.success:
            break
    return SearchResult(
        result.status, result.coloring, nodes, result.failed_vertex, result.residual_size
    )


class Strategy(Enum):
    GREEDY = "greedy"
    BACKTRACK = "backtrack"
    RESTART = "restart"


Rule = Callable[..., SearchResult]


@dataclass
class Searcher:
    """Map from search strategies to the functions implementing them.

    A rule takes ``(neighbors, lists, budget, restarts, seed)`` and returns
    a :class:`SearchResult`.
    """

    rules: Dict[Strategy, Rule] = field(default_factory=dict)

    @classmethod
    def default(cls) -> "Searcher":
        return cls(
            {
                Strategy.GREEDY: lambda nb, ls, budget, restarts, seed: greedy_color(
                    nb, ls
                ),
                Strategy.BACKTRACK: lambda nb, ls, budget, restarts, seed: backtrack_color(
                    nb, ls, budget
                ),
                Strategy.RESTART: lambda nb, ls, budget, restarts, seed: restart_color(
                    nb, ls, restarts, seed
                ),
            }
        )

    def __setitem__(self, key: Strategy, rule: Rule):
        self.rules[Strategy(key)] = rule

    def __getitem__(self, item) -> Rule:
        try:
            return self.rules[Strategy(item)]
        except (KeyError, ValueError):
            raise_error(KeyError, f"Search strategy not available for {item}.")

    def register(self, strategy):
        """Decorator registering a function as the rule of ``strategy``."""

        def inner(func):
            self[strategy] = func
            return func

        return inner


SEARCHER = Searcher.default()


def _is_clique(adj: Mapping[int, Sequence[int]], members: Sequence[int]) -> bool:
    return all(len(adj[v]) == len(members) - 1 for v in members)


def _clique_by_matching(members: Sequence[int], lists: Lists) -> SearchResult:
    """A clique is list-colorable iff its vertices match into distinct colors."""
    colors = sorted({c for v in members for c in lists[v]})
    index = {c: i for i, c in enumerate(colors)}
    B = Bigraph.from_lists(
        len(members), len(colors), ([index[c] for c in lists[v]] for v in members)
    )
    matching = max_matching(B)
    if matching.is_u_perfect:
        coloring = {members[u]: colors[z] for u, z in matching.pairs.items()}
        return SearchResult(SearchStatus.SOLVED, coloring, len(members))
    missing = min(members[u] for u in range(len(members)) if u not in matching.pairs)
    return SearchResult(
        SearchStatus.UNSATISFIABLE, {}, len(members), missing, len(lists[missing])
    )


def solve_components(
    neighbors: Neighbors,
    lists: Lists,
    strategy: Strategy = Strategy.BACKTRACK,
    budget: Optional[int] = None,
    restarts: int = 20,
    seed: int = 0,
    searcher: Searcher = SEARCHER,
) -> SearchResult:
    """Color every connected component separately.

    Clique components are decided exactly by bipartite matching; the others
    go to ``strategy``. Stops at the first component without a coloring.
    """
    adj = _restricted(neighbors, lists)
    graph = nx.Graph()
    graph.add_nodes_from(lists)
    graph.add_edges_from((v, w) for v in adj for w in adj[v])
    rule = searcher[strategy]
    coloring: Dict[int, int] = {}
    nodes = 0
    for component in sorted(nx.connected_components(graph), key=min):
        members = sorted(component)
        sub = {v: lists[v] for v in members}
        if _is_clique(adj, members):
            result = _clique_by_matching(members, sub)
        else:
            result = rule(adj, sub, budget, restarts, seed)
        nodes += result.nodes
        if not result.success:
            return SearchResult(
                result.status, coloring, nodes, result.failed_vertex, result.residual_size
            )
        coloring.update(result.coloring)
    return SearchResult(SearchStatus.SOLVED, coloring, nodes)
