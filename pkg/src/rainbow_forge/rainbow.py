"""Rainbow walks and cycles in properly edge-coloured graphs.

Covers reachability by rainbow walks under a restricted palette, exact
rainbow-cycle search, the random palette-splitting detector, and the red/blue
boundary machinery used by the expansion argument.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Literal

from ._rng import make_rng
from .graph import ColoredGraph, ColorSet, average_degree

DEFAULT_STATE_BUDGET = 1_000_000


@dataclass(frozen=True)
class RainbowWalk:
    vertices: tuple[int, ...]
    colours: tuple[int, ...]

    def __post_init__(self):
        if len(self.vertices) != len(self.colours) + 1:
            raise ValueError("a walk has one more vertex than colours")

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    def __len__(self) -> int:
        return len(self.colours)

    def is_valid(self, G: ColoredGraph) -> bool:
        """Replay the walk against ``G``: edges exist, colours match, no colour repeats."""
        if len(set(self.colours)) != len(self.colours):
            return False
        for (a, b), c in zip(zip(self.vertices, self.vertices[1:]), self.colours):
            if not G.has_edge(a, b) or G.colour(a, b) != c:
                return False
        return True

    def serialize(self) -> str:
        tokens = [str(self.vertices[0])]
        for c, v in zip(self.colours, self.vertices[1:]):
            tokens += [str(c), str(v)]
        return " ".join(tokens)

    @classmethod
    def parse(cls, text: str) -> "RainbowWalk":
        tokens = [int(t) for t in text.split()]
        if len(tokens) % 2 == 0:
            raise ValueError("walk serialization must have odd length")
        return cls(tuple(tokens[0::2]), tuple(tokens[1::2]))


@dataclass(frozen=True)
class ReachableSet:
    """Vertices reachable from ``source`` by rainbow walks inside ``palette``.

    ``exact`` is False when the state budget ran out; ``members`` is then a
    subset of the true set, never a superset.
    """

    source: int
    palette: ColorSet
    members: frozenset[int]
    witnesses: dict = field(repr=False)
    exact: bool = True
    states: int = 0

    def __contains__(self, v: int) -> bool:
        return v in self.members

    def __len__(self) -> int:
        return len(self.members)

    def witness(self, v: int) -> RainbowWalk:
        return self.witnesses[v]


def _as_colorset(G: ColoredGraph, palette) -> ColorSet:
    if isinstance(palette, ColorSet):
        return palette
    if palette is None:
        return ColorSet.full(G.colour_count)
    return ColorSet.of(G.colour_count, palette)


def rainbow_reachable_set(
    G: ColoredGraph, x: int, palette=None, budget: int = DEFAULT_STATE_BUDGET
) -> ReachableSet:
    """Compute U(palette): every vertex reachable from ``x`` by a rainbow walk.

    Breadth-first over states (vertex, used colours). A state is dropped when
    an earlier kept state at the same vertex used a subset of its colours;
    because states arrive in order of walk length, the kept sets at each
    vertex form an antichain of minimal used-sets.
    """
    if not 0 <= x < G.n:
        raise IndexError(f"source vertex {x} outside 0..{G.n - 1}")
    pal = _as_colorset(G, palette)
    allowed = pal.mask
    adj = [[(w, c) for w, c in G.adjacency[v] if allowed >> c & 1] for v in range(G.n)]

    # state k: (vertex, used mask, parent state, colour taken)
    states: list[tuple[int, int, int, int]] = [(x, 0, -1, -1)]
    kept: dict[int, list[int]] = defaultdict(list)
    kept[x].append(0)
    first_state = {x: 0}
    frontier = [0]
    exact = True
    while frontier and exact:
        nxt = []
        for s in frontier:
            v, used, _, _ = states[s]
            for w, c in adj[v]:
                bit = 1 << c
                if used & bit:
                    continue
                new = used | bit
                if any(k & ~new == 0 for k in kept[w]):
                    continue
                if len(states) >= budget:
                    exact = False
                    break
                kept[w].append(new)
                states.append((w, new, s, c))
                first_state.setdefault(w, len(states) - 1)
                nxt.append(len(states) - 1)
            if not exact:
                break
        frontier = nxt

    witnesses = {}
    for v, s in first_state.items():
        vs, cs = [], []
        while s != -1:
            w, _, parent, c = states[s]
            vs.append(w)
            if c != -1:
                cs.append(c)
            s = parent
        witnesses[v] = RainbowWalk(tuple(reversed(vs)), tuple(reversed(cs)))
    return ReachableSet(
        source=x,
        palette=pal,
        members=frozenset(first_state),
        witnesses=witnesses,
        exact=exact,
        states=len(states),
    )


def is_rainbow_cycle(G: ColoredGraph, cycle: Iterable[int]) -> bool:
    """True for a simple cycle (no repeated closing vertex) with distinct edge colours."""
    cyc = list(cycle)
    if len(cyc) < 3 or len(set(cyc)) != len(cyc):
        return False
    colours = []
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        if not G.has_edge(a, b):
            return False
        colours.append(G.colour(a, b))
    return len(set(colours)) == len(colours)


def rainbow_cycle_exact(G: ColoredGraph, max_len: int | None = None) -> list[int] | None:
    """Find a rainbow cycle of length at most ``min(max_len, C)`` or prove none exists.

    Depth-first search over simple paths rooted at the cycle's smallest
    vertex; a cycle is reported only when its second vertex is smaller than
    its last, so each cycle is met once. ``max_len=None`` means C.
    """
    limit = G.colour_count if max_len is None else min(max_len, G.colour_count)
    if max_len is not None and max_len < 3:
        raise ValueError("max_len must be at least 3")
    if limit < 3:
        return None
    adj = G.adjacency
    for root in range(G.n):
        path = [root]
        on_path = {root}
        # iterator stack of (neighbour list, index) pairs; used colours as a mask
        stack = [(adj[root], 0, 0)]
        while stack:
            nbrs, i, used = stack[-1]
            if i >= len(nbrs):
                stack.pop()
                on_path.discard(path.pop())
                continue
            stack[-1] = (nbrs, i + 1, used)
            w, c = nbrs[i]
            if used >> c & 1:
                continue
            if w == root:
                if len(path) >= 3 and path[1] < path[-1]:
                    return list(path)
                continue
            if w < root or w in on_path:
                continue
            # a path with k vertices closes into a cycle of length k
            if len(path) + 1 > limit:
                continue
            path.append(w)
            on_path.add(w)
            stack.append((adj[w], 0, used | (1 << c)))
    return None


def extract_cycle_from_closed_walk(vertices: list[int]) -> list[int]:
    """First simple cycle inside a closed trail ``v0 .. vk = v0`` with distinct edges."""
    if vertices[0] != vertices[-1]:
        raise ValueError("walk is not closed")
    seen: dict[int, int] = {}
    trail: list[int] = []
    for v in vertices:
        if v in seen:
            cycle = trail[seen[v]:]
            if len(cycle) >= 3:
                return cycle
            # a two-vertex bounce cannot occur in a trail of a simple graph
            raise ValueError("closed walk repeats an edge")
        seen[v] = len(trail)
        trail.append(v)
    raise ValueError("closed walk has no repeated vertex")


@dataclass(frozen=True)
class SplitOutcome:
    palette: ColorSet
    reach_in: ReachableSet
    reach_out: ReachableSet
    meeting: int | None
    cycle: list[int] | None

    @property
    def exact(self) -> bool:
        return self.reach_in.exact and self.reach_out.exact


def split_palette_search(
    G: ColoredGraph, x: int, palette: ColorSet, budget: int = DEFAULT_STATE_BUDGET
) -> SplitOutcome:
    """Reach from ``x`` inside ``palette`` and inside its complement; join the walks."""
    reach_in = rainbow_reachable_set(G, x, palette, budget)
    reach_out = rainbow_reachable_set(G, x, palette.complement(), budget)
    common = sorted((reach_in.members & reach_out.members) - {x})
    if not common:
        return SplitOutcome(palette, reach_in, reach_out, None, None)
    y = common[0]
    there = reach_in.witness(y)
    back = reach_out.witness(y)
    closed = list(there.vertices) + list(reversed(back.vertices))[1:]
    cycle = extract_cycle_from_closed_walk(closed)
    if not is_rainbow_cycle(G, cycle):
        raise AssertionError("joined walks did not yield a rainbow cycle")
    return SplitOutcome(palette, reach_in, reach_out, y, cycle)


def sample_half_palette(G: ColoredGraph, seed) -> ColorSet:
    rng = make_rng(seed)
    keep = rng.random(G.colour_count) < 0.5
    return ColorSet.of(G.colour_count, (c for c in range(G.colour_count) if keep[c]))


def rainbow_cycle_via_split(
    G: ColoredGraph, x: int, seed, budget: int = DEFAULT_STATE_BUDGET
) -> list[int] | None:
    """One trial of the palette-splitting detector; ``None`` if the halves do not meet."""
    return split_palette_search(G, x, sample_half_palette(G, seed), budget).cycle


Tag = Literal["red", "blue"]


@dataclass(frozen=True)
class BoundaryClassification:
    """Red/blue tag for every edge ``(v, v')`` with ``v`` in ``U`` and ``v'`` outside."""

    U: frozenset[int]
    tags: dict[tuple[int, int], Tag]

    def edges(self, tag: Tag) -> list[tuple[int, int]]:
        return [e for e, t in self.tags.items() if t == tag]


class TruncatedReachError(ValueError):
    pass


def boundary_edges(G: ColoredGraph, U: Iterable[int]) -> list[tuple[int, int]]:
    U = frozenset(U)
    return sorted((v, w) for v in U for w, _ in G.adjacency[v] if w not in U)


def classify_boundary_edges(
    G: ColoredGraph,
    x: int,
    palette,
    reach: ReachableSet,
    budget: int = DEFAULT_STATE_BUDGET,
) -> BoundaryClassification:
    """Tag ``(v, v')`` blue iff ``v`` is still reachable without the edge's colour.

    One reachability query per distinct boundary colour (queries for the same
    colour coincide).
    """
    if not reach.exact:
        raise TruncatedReachError("boundary classification needs an exact reachable set")
    pal = _as_colorset(G, palette)
    cache: dict[int, ReachableSet] = {}
    tags: dict[tuple[int, int], Tag] = {}
    for v, w in boundary_edges(G, reach.members):
        c = G.colour(v, w)
        if c not in cache:
            cache[c] = rainbow_reachable_set(G, x, pal.discard(c), budget)
            if not cache[c].exact:
                raise TruncatedReachError(f"query without colour {c} exceeded the budget")
        tags[(v, w)] = "blue" if v in cache[c] else "red"
    return BoundaryClassification(reach.members, tags)


class ExpansionViolation(Exception):
    """No admissible red or blue edge set exists: the host graph does not expand around U."""

    def __init__(self, summary: dict):
        self.summary = summary
        super().__init__(f"expansion violated: {summary}")


@dataclass(frozen=True)
class Selection:
    side: Tag
    edges: tuple[tuple[int, int], ...]
    stage: int


def red_blue_select(
    G: ColoredGraph,
    U: Iterable[int],
    tags,
    eps,
) -> Selection:
    """Pick a large, non-clustered monochromatic set of boundary edges.

    Four stages, returning at the first that succeeds:

    1. red edges whose ``U``-endpoint has red degree at most d(G);
    2. blue edges whose outside endpoint has blue degree at most d(G);
    3. ``ceil(d(G))`` red edges at every ``U``-vertex of red degree >= d(G);
    4. ``ceil(d(G))`` blue edges at every outside vertex of blue degree >= d(G).

    Stages 1-2 need ``eps/7 * d(G) * |U|`` edges, stages 3-4 need
    ``eps/7 * |U|`` heavy vertices. Raises :class:`ExpansionViolation` when all
    four fail. ``tags`` is a :class:`BoundaryClassification` or a mapping from
    boundary edges ``(v in U, v' outside)`` to ``"red"``/``"blue"``.
    """
    U = frozenset(U)
    tag_map = tags.tags if isinstance(tags, BoundaryClassification) else dict(tags)
    eps = Fraction(eps)
    if not 0 <= eps <= 1:
        raise ValueError("eps must lie in [0, 1]")
    boundary = boundary_edges(G, U)
    if set(tag_map) != set(boundary):
        raise ValueError("tags must cover exactly the boundary edges of U")
    d = average_degree(G)
    cap = math.ceil(d)
    edge_target = eps / 7 * d * len(U)
    vertex_target = eps / 7 * len(U)

    red = [e for e in boundary if tag_map[e] == "red"]
    blue = [e for e in boundary if tag_map[e] == "blue"]
    red_at: dict[int, list] = defaultdict(list)
    for e in red:
        red_at[e[0]].append(e)
    blue_at: dict[int, list] = defaultdict(list)
    for e in blue:
        blue_at[e[1]].append(e)

    def done(side, chosen, stage):
        sel = Selection(side, tuple(sorted(chosen)), stage)
        _check_selection(sel, U, d, edge_target)
        return sel

    light_red = [e for e in red if len(red_at[e[0]]) <= d]
    if len(light_red) >= edge_target:
        return done("red", light_red, 1)
    light_blue = [e for e in blue if len(blue_at[e[1]]) <= d]
    if len(light_blue) >= edge_target:
        return done("blue", light_blue, 2)
    heavy_u = sorted(v for v, es in red_at.items() if len(es) >= d)
    if len(heavy_u) >= vertex_target:
        return done("red", [e for v in heavy_u for e in red_at[v][:cap]], 3)
    heavy_out = sorted(w for w, es in blue_at.items() if len(es) >= d)
    if len(heavy_out) >= vertex_target:
        return done("blue", [e for w in heavy_out for e in blue_at[w][:cap]], 4)
    raise ExpansionViolation(
        {
            "light_red": len(light_red),
            "light_blue": len(light_blue),
            "heavy_red_vertices": len(heavy_u),
            "heavy_blue_vertices": len(heavy_out),
            "edge_target": str(edge_target),
            "vertex_target": str(vertex_target),
        }
    )


def _check_selection(sel: Selection, U, d: Fraction, edge_target: Fraction) -> None:
    cap = math.ceil(d)
    if len(sel.edges) < edge_target:
        raise AssertionError(f"selection of {len(sel.edges)} edges is below {edge_target}")
    ends = defaultdict(int)
    for v, w in sel.edges:
        ends[v if sel.side == "red" else w] += 1
    if any(k > cap for k in ends.values()):
        raise AssertionError("selection exceeds the ceil(d(G)) degree cap")
