"""Generators for the instance families used throughout the package."""
from __future__ import annotations

import math
from collections import deque

import networkx as nx

from ._rng import make_rng
from .graph import ColoredGraph, GraphError

DEFAULT_GIRTH_RETRIES = 10_000


class RetryExhausted(RuntimeError):
    def __init__(self, attempts: int, params: dict):
        self.attempts = attempts
        self.params = params
        super().__init__(
            f"no acceptable graph after {attempts} attempts for {params}; "
            "the parameters may be infeasible at this size"
        )


def hypercube(m: int) -> ColoredGraph:
    """Q_m on ``{0,1}^m`` (vertex = bit vector as int), edges coloured by coordinate."""
    if not 1 <= m <= 20:
        raise GraphError("hypercube dimension must satisfy 1 <= m <= 20")
    edges = [(v, v | (1 << i), i) for v in range(1 << m) for i in range(m) if not v >> i & 1]
    return ColoredGraph.from_edges(1 << m, edges)


def complete_one_factorization(n: int) -> ColoredGraph:
    """K_n coloured by the circle method; colour ``r`` is the matching of round ``r``."""
    if n % 2 or not 4 <= n <= 2048:
        raise GraphError("complete_one_factorization needs even n with 4 <= n <= 2048")
    k = n - 1
    edges = []
    for r in range(k):
        edges.append((r, k, r))
        for i in range(1, n // 2):
            edges.append(((r + i) % k, (r - i) % k, r))
    return ColoredGraph.from_edges(n, edges)


def random_sub_factorization(n: int, degree: int, seed) -> ColoredGraph:
    """Randomly relabelled K_n 1-factorization keeping ``degree`` random colour classes.

    The result is ``degree``-regular and properly coloured with ``degree`` colours.
    """
    if not 0 <= degree <= n - 1:
        raise GraphError("degree must lie in 0..n-1")
    rng = make_rng(seed)
    base = complete_one_factorization(n)
    perm = rng.permutation(n)
    classes = set(rng.choice(n - 1, size=degree, replace=False).tolist())
    edges = [(int(perm[u]), int(perm[v]), c) for u, v, c in base.edges if c in classes]
    return ColoredGraph.from_edges(n, edges)


def girth(graph, limit: int | None = None) -> float:
    """Length of a shortest cycle, or ``inf`` for forests.

    With ``limit`` set the search only looks for cycles shorter than ``limit``
    and returns ``inf`` when there are none (breadth-first search per vertex,
    cut at depth ``ceil(limit / 2)``).
    """
    adj = _adjacency(graph)
    best = math.inf if limit is None else limit
    for root in range(len(adj)):
        dist = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            if 2 * dist[x] + 1 >= best:
                break
            for y in adj[x]:
                if y == parent[x]:
                    continue
                if y in dist:
                    best = min(best, dist[x] + dist[y] + 1)
                else:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    queue.append(y)
    if limit is not None and best >= limit:
        return math.inf
    return best


def _adjacency(graph) -> list[list[int]]:
    if isinstance(graph, ColoredGraph):
        return [graph.neighbours(v) for v in range(graph.n)]
    if isinstance(graph, nx.Graph):
        nodes = sorted(graph.nodes)
        if nodes != list(range(len(nodes))):
            raise GraphError("networkx input must use nodes 0..n-1")
        return [sorted(graph.neighbors(v)) for v in nodes]
    return [list(a) for a in graph]


def random_regular_girth(
    n: int, d: int, g: int, seed=None, max_retries: int = DEFAULT_GIRTH_RETRIES
) -> nx.Graph:
    """Configuration-model d-regular graph on ``n`` vertices with girth >= ``g``.

    Each attempt pairs a fresh shuffle of the ``n*d`` stubs; attempts with a
    loop, a repeated edge or a short cycle are discarded whole.
    """
    if (n * d) % 2 or d < 2 or d >= n:
        raise GraphError("need d >= 2, d < n and n*d even")
    rng = make_rng(seed)
    stubs = [v for v in range(n) for _ in range(d)]
    for attempt in range(1, max_retries + 1):
        order = rng.permutation(len(stubs))
        pairs = set()
        ok = True
        for i in range(0, len(order), 2):
            u, v = stubs[order[i]], stubs[order[i + 1]]
            key = (u, v) if u < v else (v, u)
            if u == v or key in pairs:
                ok = False
                break
            pairs.add(key)
        if not ok:
            continue
        G = nx.Graph()
        G.add_nodes_from(range(n))
        G.add_edges_from(pairs)
        if g <= 3 or girth(G, limit=g) == math.inf:
            G.graph["attempts"] = attempt
            G.graph["params"] = {"n": n, "d": d, "g": g, "seed": seed}
            return G
    raise RetryExhausted(max_retries, {"n": n, "d": d, "g": g, "seed": seed})


def vizing_color(graph) -> ColoredGraph:
    """Proper edge colouring with at most max-degree + 1 colours.

    An edge takes the smallest colour free at both ends when one exists;
    otherwise Misra-Gries fan rotation with alternating-path inversion. Edges are
    processed in sorted order, so the output is deterministic. Accepts a
    networkx graph on nodes ``0..n-1``, a :class:`ColoredGraph` (colours are
    ignored) or ``(n, edges)``.
    """
    if isinstance(graph, tuple):
        n, raw = graph
        edges = sorted({(min(u, v), max(u, v)) for u, v in raw})
    elif isinstance(graph, ColoredGraph):
        n, edges = graph.n, [(u, v) for u, v, _ in graph.edges]
    else:
        adj = _adjacency(graph)
        n = len(adj)
        edges = sorted({(min(u, v), max(u, v)) for u in range(n) for v in adj[u]})
    for u, v in edges:
        if u == v:
            raise GraphError(f"self-loop at vertex {u}")

    degree = [0] * n
    for u, v in edges:
        degree[u] += 1
        degree[v] += 1
    palette = max(degree, default=0) + 1
    at: list[dict[int, int]] = [dict() for _ in range(n)]  # colour -> neighbour

    def free(x: int) -> int:
        cols = at[x]
        for c in range(palette):
            if c not in cols:
                return c
        raise AssertionError("no free colour; degree bound violated")

    def colour_of(x: int, y: int):
        for c, w in at[x].items():
            if w == y:
                return c
        return None

    for u, v in edges:
        shared = next((c for c in range(palette) if c not in at[u] and c not in at[v]), None)
        if shared is not None:
            at[u][shared] = v
            at[v][shared] = u
            continue
        fan = [v]
        in_fan = {v}
        extended = True
        while extended:
            extended = False
            last = at[fan[-1]]
            for c, w in at[u].items():
                if w not in in_fan and c not in last:
                    fan.append(w)
                    in_fan.add(w)
                    extended = True
                    break
        c = free(u)
        d = free(fan[-1])

        # invert the c/d alternating path that starts at u with colour d
        path = []
        x, col = u, d
        while col in at[x]:
            y = at[x][col]
            path.append((x, y, col))
            x = y
            col = c if col == d else d
        for x, y, col in path:
            del at[x][col]
            del at[y][col]
        for x, y, col in path:
            new = c if col == d else d
            at[x][new] = y
            at[y][new] = x

        # shortest fan prefix ending at a vertex where d is free
        stop = None
        for i, w in enumerate(fan):
            if i > 0:
                cw = colour_of(u, w)
                if cw is None or cw in at[fan[i - 1]]:
                    break
            if d not in at[w]:
                stop = i
                break
        if stop is None:
            raise AssertionError("fan rotation failed")

        shifted = [colour_of(u, fan[i + 1]) for i in range(stop)]
        for i in range(1, stop + 1):
            cw = colour_of(u, fan[i])
            del at[u][cw]
            del at[fan[i]][cw]
        for i in range(stop):
            at[u][shifted[i]] = fan[i]
            at[fan[i]][shifted[i]] = u
        w = fan[stop]
        at[u][d] = w
        at[w][d] = u

    coloured = sorted({(min(x, y), max(x, y), c) for x in range(n) for c, y in at[x].items()})
    return ColoredGraph.from_edges(n, coloured)
