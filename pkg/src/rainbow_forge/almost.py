"""Cycles with few repeats per colour, and graphs that avoid them.

The finder walks non-backtracking colour sequences from a fixed root, using
each colour at most ``r // 2`` times, until two sequences end at the same
vertex. The edges of the two walks then contain a cycle with every colour
at most ``r`` times. The matching construction takes a high-girth regular
graph with a Vizing colouring, so every cycle is too long to avoid
``r + 1`` repeats of some colour.
"""
from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction

from .constructions import girth, random_regular_girth, vizing_color
from .graph import ColoredGraph, GraphError, empty_graph, induced_subgraph

DEFAULT_MAX_SEQUENCES = 10**7


def peel_to_min_degree(G: ColoredGraph, d: int) -> ColoredGraph:
    """Repeatedly delete vertices of degree at most ``d``.

    The survivors form the largest induced subgraph with minimum degree
    ``>= d + 1`` (its ``vertex_labels`` point back into ``G``); an empty
    graph is returned when nothing survives.
    """
    if d < 0:
        raise ValueError("d must be non-negative")
    deg = [G.degree(v) for v in range(G.n)]
    alive = [True] * G.n
    queue = deque(v for v in range(G.n) if deg[v] <= d)
    for v in queue:
        alive[v] = False
    while queue:
        v = queue.popleft()
        for w, _ in G.adjacency[v]:
            if alive[w]:
                deg[w] -= 1
                if deg[w] <= d:
                    alive[w] = False
                    queue.append(w)
    keep = [v for v in range(G.n) if alive[v]]
    if not keep:
        return empty_graph(0)
    return induced_subgraph(G, keep)


def proof_degree(n: int, r: int) -> int | None:
    """``16 * ceil(t / log t)`` with ``t = log(n) / r``, or ``None`` when ``t <= e``."""
    if n < 2:
        return None
    t = math.log(n) / r
    if t <= math.e:
        return None
    return 16 * math.ceil(t / math.log(t))


def proof_length(d: int, r: int) -> Fraction:
    """Length bound ``(d/2) * floor(r/2)`` up to which sequences are counted."""
    return Fraction(d, 2) * (r // 2)


@dataclass(frozen=True)
class AdmissibleSequence:
    colours: tuple[int, ...]
    walk: tuple[int, ...]

    @property
    def end(self) -> int:
        return self.walk[-1]

    def is_valid(self, G: ColoredGraph, r: int) -> bool:
        if len(self.walk) != len(self.colours) + 1:
            return False
        counts = Counter(self.colours)
        if counts and max(counts.values()) > r // 2:
            return False
        if any(a == b for a, b in zip(self.colours, self.colours[1:])):
            return False
        for (a, b), c in zip(zip(self.walk, self.walk[1:]), self.colours):
            if not G.has_edge(a, b) or G.colour(a, b) != c:
                return False
        return True


@dataclass(frozen=True)
class AlmostRainbowCycle:
    cycle: tuple[int, ...]
    multiplicity: dict[int, int]
    r: int

    def is_valid(self, G: ColoredGraph) -> bool:
        return is_almost_rainbow_cycle(G, self.cycle, self.r)


def is_almost_rainbow_cycle(G: ColoredGraph, cycle, r: int) -> bool:
    """Simple cycle of length >= 3 on which no colour occurs more than ``r`` times."""
    cyc = list(cycle)
    if len(cyc) < 3 or len(set(cyc)) != len(cyc):
        return False
    counts: Counter = Counter()
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        if not G.has_edge(a, b):
            return False
        counts[G.colour(a, b)] += 1
    return max(counts.values()) <= r


@dataclass
class AlmostRainbowSearch:
    """Everything the finder learned, including why it stopped."""

    r: int
    d: int
    length_bound: Fraction
    root: int | None
    peeled_size: int
    sequences: int = 0
    collision: tuple[AdmissibleSequence, AdmissibleSequence] | None = None
    cycle: AlmostRainbowCycle | None = None
    reason: str = ""
    peeled: ColoredGraph | None = field(default=None, repr=False)

    def to_record(self) -> dict:
        return {
            "r": self.r,
            "d": self.d,
            "length_bound": str(self.length_bound),
            "root": self.root,
            "peeled_size": self.peeled_size,
            "sequences": self.sequences,
            "cycle": None if self.cycle is None else list(self.cycle.cycle),
            "multiplicity": None
            if self.cycle is None
            else {str(k): v for k, v in sorted(self.cycle.multiplicity.items())},
            "reason": self.reason,
        }


def _fallback_degree(G: ColoredGraph) -> int:
    # largest d with average degree > 2d
    return max(0, math.ceil(Fraction(G.m, G.n)) - 1) if G.n else 0


def _cycle_in_union(edges: set[tuple[int, int]]) -> list[int] | None:
    """Any simple cycle in an edge set: strip leaves, then walk without backtracking."""
    adj: dict[int, set[int]] = {}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    leaves = deque(v for v, nb in adj.items() if len(nb) <= 1)
    while leaves:
        v = leaves.popleft()
        for w in adj.pop(v, ()):
            nb = adj.get(w)
            if nb is None:
                continue
            nb.discard(v)
            if len(nb) == 1:
                leaves.append(w)
    if not adj:
        return None
    # every survivor has degree >= 2, so a non-backtracking walk must repeat a vertex
    start = min(adj)
    path, pos = [start], {start: 0}
    prev = None
    cur = start
    while True:
        nxt = min(w for w in adj[cur] if w != prev)
        if nxt in pos:
            return path[pos[nxt]:]
        pos[nxt] = len(path)
        path.append(nxt)
        prev, cur = cur, nxt


def search_almost_rainbow_cycle(
    G: ColoredGraph,
    r: int,
    d: int | None = None,
    root: int | None = None,
    max_sequences: int = DEFAULT_MAX_SEQUENCES,
    max_length: int | None = None,
) -> AlmostRainbowSearch:
    """Run the collision search and report the cycle together with diagnostics.

    ``d`` defaults to the degree formula when it applies and otherwise to the
    largest ``d`` with average degree above ``2d``. Sequences are explored
    breadth-first from ``root`` (default: smallest surviving vertex, in the
    peeled graph's ids), starting with the empty sequence. ``max_length``
    optionally caps sequence length; the natural bound ``C * (r // 2)``
    always applies.
    """
    if r < 2:
        raise ValueError("r must be at least 2")
    if d is None:
        d = proof_degree(G.n, r)
        if d is None:
            d = _fallback_degree(G)
    H = peel_to_min_degree(G, d)
    out = AlmostRainbowSearch(r, d, proof_length(d, r), None, H.n, peeled=H)
    if H.n == 0:
        out.reason = "peeling removed every vertex"
        return out
    v0 = 0 if root is None else root
    if not 0 <= v0 < H.n:
        raise IndexError(f"root {v0} outside the peeled graph")
    out.root = v0
    cap = r // 2

    # node = (parent index, colour, endpoint); index 0 is the empty sequence
    nodes: list[tuple[int, int, int]] = [(-1, -1, v0)]
    first_at = {v0: 0}
    depth = [0]
    frontier = deque([0])

    def counts_of(i: int) -> Counter:
        cnt: Counter = Counter()
        while i > 0:
            parent, c, _ = nodes[i]
            cnt[c] += 1
            i = parent
        return cnt

    def unwind(i: int) -> AdmissibleSequence:
        cols, walk = [], []
        while i >= 0:
            parent, c, v = nodes[i]
            walk.append(v)
            if parent >= 0:
                cols.append(c)
            i = parent
        return AdmissibleSequence(tuple(reversed(cols)), tuple(reversed(walk)))

    while frontier:
        i = frontier.popleft()
        if max_length is not None and depth[i] >= max_length:
            continue
        _, last, v = nodes[i]
        used = counts_of(i)
        for w, c in H.adjacency[v]:
            if c == last or used[c] >= cap:
                continue
            if len(nodes) >= max_sequences:
                out.sequences = len(nodes)
                out.reason = "sequence budget exhausted; absence not concluded"
                return out
            nodes.append((i, c, w))
            depth.append(depth[i] + 1)
            j = len(nodes) - 1
            if w in first_at:
                a, b = unwind(first_at[w]), unwind(j)
                union = set()
                for seq in (a, b):
                    for x, y in zip(seq.walk, seq.walk[1:]):
                        union.add((x, y) if x < y else (y, x))
                cyc = _cycle_in_union(union)
                if cyc is None:
                    raise AssertionError("colliding walks formed a tree")
                mult = Counter(H.colour(x, y) for x, y in zip(cyc, cyc[1:] + cyc[:1]))
                labels = [H.vertex_labels[x] for x in cyc]
                out.sequences = len(nodes)
                out.collision = (a, b)
                out.cycle = AlmostRainbowCycle(
                    tuple(labels), {H.colour_labels[c]: k for c, k in mult.items()}, r
                )
                out.reason = "endpoint collision"
                if not is_almost_rainbow_cycle(H, cyc, r):
                    raise AssertionError("extracted cycle breaks the colour bound")
                return out
            first_at[w] = j
            frontier.append(j)
    out.sequences = len(nodes)
    out.reason = "all admissible sequences explored without collision"
    return out


def find_almost_rainbow_cycle(G: ColoredGraph, r: int, d: int | None = None, **kwargs):
    """Cycle of ``G`` using every colour at most ``r`` times, or ``None``.

    Vertex ids in the returned cycle refer to ``G`` whenever ``G``'s own
    vertex labels are ``0..n-1`` (the default).
    """
    return search_almost_rainbow_cycle(G, r, d, **kwargs).cycle


def count_admissible_sequences(G: ColoredGraph, root: int, r: int, length: int) -> list[int]:
    """Exact number of admissible sequences of each length ``0..length`` from ``root``."""
    cap = r // 2
    counts = [0] * (length + 1)
    used: Counter = Counter()

    def rec(v: int, last: int, ell: int):
        counts[ell] += 1
        if ell == length:
            return
        for w, c in G.adjacency[v]:
            if c != last and used[c] < cap:
                used[c] += 1
                rec(w, c, ell + 1)
                used[c] -= 1

    rec(root, -1, 0)
    return counts


def lower_bound_girth(d: int, r: int) -> int:
    return (d + 1) * r + 1


def construct_almost_rainbow_lower_bound(
    d: int, r: int, n: int, seed=None, max_retries: int = 10_000
) -> ColoredGraph:
    """d-regular graph of girth >= (d+1)r+1, properly coloured with <= d+1 colours.

    Any cycle is longer than ``(d+1) * r`` and sees at most ``d + 1`` colours,
    so some colour repeats more than ``r`` times on it.
    """
    if d < 2 or r < 2:
        raise ValueError("need d >= 2 and r >= 2")
    if n % 2:
        raise ValueError("n must be even")
    g = lower_bound_girth(d, r)
    base = random_regular_girth(n, d, g, seed=seed, max_retries=max_retries)
    G = vizing_color(base)
    degrees = {G.degree(v) for v in range(G.n)}
    if degrees != {d} or G.colour_count > d + 1 or girth(G, limit=g) != math.inf:
        raise AssertionError("lower-bound construction failed its postconditions")
    return G


def lower_bound_comments(d: int, r: int, n: int, seed) -> list[str]:
    return [
        "almost-rainbow lower bound: random regular graph with Vizing colouring",
        f"d={d} r={r} n={n} girth>={lower_bound_girth(d, r)} seed={seed}",
    ]
