"""Properly edge-coloured simple graphs: representation, validation and I/O.

Graphs are immutable. Vertices are dense ids ``0..n-1`` and colours are dense
ids ``0..C-1``; the original labels live in the ``vertex_labels`` and
``colour_labels`` side tables.
"""
from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Iterator, Sequence


class GraphError(ValueError):
    """Base class for invalid graph input."""


class GraphFormatError(GraphError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class SelfLoopError(GraphError):
    def __init__(self, vertex: int, line: int | None = None):
        self.vertex = vertex
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}self-loop at vertex {vertex}")


class DuplicateEdgeError(GraphError):
    def __init__(self, u: int, v: int, line: int | None = None):
        self.edge = (u, v)
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}duplicate edge ({u}, {v})")


class ImproperColouringError(GraphError):
    def __init__(self, vertex: int, colour: Hashable, line: int | None = None):
        self.vertex = vertex
        self.colour = colour
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(
            f"{where}improper at vertex {vertex} sharing two colour-{colour} edges"
        )


@dataclass(frozen=True)
class ColorSet:
    """Immutable set of colour ids in ``0..capacity-1`` backed by a bitmask."""

    capacity: int
    mask: int = 0

    @classmethod
    def of(cls, capacity: int, colours: Iterable[int] = ()) -> "ColorSet":
        mask = 0
        for c in colours:
            if not 0 <= c < capacity:
                raise ValueError(f"colour {c} outside 0..{capacity - 1}")
            mask |= 1 << c
        return cls(capacity, mask)

    @classmethod
    def full(cls, capacity: int) -> "ColorSet":
        return cls(capacity, (1 << capacity) - 1)

    def __contains__(self, c: int) -> bool:
        return 0 <= c < self.capacity and (self.mask >> c) & 1 == 1

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __iter__(self) -> Iterator[int]:
        m = self.mask
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def add(self, c: int) -> "ColorSet":
        if not 0 <= c < self.capacity:
            raise ValueError(f"colour {c} outside 0..{self.capacity - 1}")
        return ColorSet(self.capacity, self.mask | (1 << c))

    def discard(self, c: int) -> "ColorSet":
        return ColorSet(self.capacity, self.mask & ~(1 << c))

    def issubset(self, other: "ColorSet") -> bool:
        return self.mask & ~other.mask == 0

    def complement(self) -> "ColorSet":
        return ColorSet(self.capacity, ((1 << self.capacity) - 1) & ~self.mask)

    def __repr__(self) -> str:
        return f"ColorSet({self.capacity}, {sorted(self)})"


@dataclass(frozen=True, eq=False)
class ColoredGraph:
    """Simple undirected graph with a proper edge colouring.

    Build instances with :meth:`from_edges`, which validates every invariant;
    the raw constructor trusts its arguments.
    """

    n: int
    edges: tuple[tuple[int, int, int], ...]
    adjacency: tuple[tuple[tuple[int, int], ...], ...]
    colour_count: int
    colour_labels: tuple = ()
    vertex_labels: tuple = ()
    _edge_colour: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int, Hashable]],
        vertex_labels: Sequence | None = None,
    ) -> "ColoredGraph":
        """Validate and build a graph from ``(u, v, colour_label)`` triples.

        Colour labels that are exactly the integers ``0..C-1`` are kept as
        ids; any other labelling is densified in first-appearance order.
        """
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        triples = []
        seen_pairs: set[tuple[int, int]] = set()
        for u, v, c in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) has a vertex outside 0..{n - 1}")
            if u == v:
                raise SelfLoopError(u)
            key = (u, v) if u < v else (v, u)
            if key in seen_pairs:
                raise DuplicateEdgeError(*key)
            seen_pairs.add(key)
            triples.append((key[0], key[1], c))

        labels = list(dict.fromkeys(c for _, _, c in triples))
        if all(isinstance(c, int) for c in labels) and set(labels) == set(range(len(labels))):
            labels = list(range(len(labels)))
        colour_id = {c: i for i, c in enumerate(labels)}

        at_vertex: list[dict[int, int]] = [dict() for _ in range(n)]
        dense = []
        for u, v, c in triples:
            cid = colour_id[c]
            for w in (u, v):
                if cid in at_vertex[w]:
                    raise ImproperColouringError(w, c)
            at_vertex[u][cid] = v
            at_vertex[v][cid] = u
            dense.append((u, v, cid))
        return cls._assemble(n, dense, tuple(labels), vertex_labels)

    @classmethod
    def _assemble(cls, n, dense_edges, colour_labels, vertex_labels=None) -> "ColoredGraph":
        dense_edges = sorted(dense_edges)
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        edge_colour = {}
        for u, v, c in dense_edges:
            adj[u].append((v, c))
            adj[v].append((u, c))
            edge_colour[(u, v)] = c
        adjacency = tuple(tuple(sorted(a)) for a in adj)
        if vertex_labels is None:
            vertex_labels = tuple(range(n))
        return cls(
            n=n,
            edges=tuple(dense_edges),
            adjacency=adjacency,
            colour_count=len(colour_labels),
            colour_labels=tuple(colour_labels),
            vertex_labels=tuple(vertex_labels),
            _edge_colour=edge_colour,
        )

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def colour(self, u: int, v: int) -> int:
        """Colour id of edge ``uv``; ``KeyError`` if it is not an edge."""
        return self._edge_colour[(u, v) if u < v else (v, u)]

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._edge_colour

    def neighbours(self, v: int) -> list[int]:
        return [w for w, _ in self.adjacency[v]]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ColoredGraph):
            return NotImplemented
        return (self.n, self.edges, self.colour_count) == (
            other.n,
            other.edges,
            other.colour_count,
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"ColoredGraph(n={self.n}, m={self.m}, C={self.colour_count})"


def is_proper(n: int, edges: Iterable[tuple[int, int, Hashable]]) -> bool:
    """Pairwise check that no two edges sharing an endpoint share a colour."""
    incident: list[list[Hashable]] = [[] for _ in range(n)]
    for u, v, c in edges:
        incident[u].append(c)
        incident[v].append(c)
    for cols in incident:
        for i in range(len(cols)):
            for j in range(i + 1, len(cols)):
                if cols[i] == cols[j]:
                    return False
    return True


def average_degree(G: ColoredGraph) -> Fraction:
    """Exact average degree ``2|E|/n`` (zero for the empty graph)."""
    if G.n == 0:
        return Fraction(0)
    return Fraction(2 * G.m, G.n)


def neighborhood_minus(
    G: ColoredGraph, U: Iterable[int], F: Iterable[tuple[int, int]] = ()
) -> frozenset[int]:
    """Vertices outside ``U`` adjacent to ``U`` through an edge not in ``F``."""
    U = frozenset(U)
    removed = set()
    for u, v in F:
        if not G.has_edge(u, v):
            raise GraphError(f"({u}, {v}) is not an edge")
        removed.add((u, v) if u < v else (v, u))
    out = set()
    for u in U:
        for w, _ in G.adjacency[u]:
            if w not in U and ((u, w) if u < w else (w, u)) not in removed:
                out.add(w)
    return frozenset(out)


def induced_subgraph(G: ColoredGraph, S: Iterable[int]) -> ColoredGraph:
    """Subgraph induced by ``S``, relabelled to dense ids.

    Vertex ``i`` of the result is the ``i``-th smallest member of ``S``.
    Surviving colours are renumbered in increasing order of their old id, so
    ``S = V(G)`` keeps every id. Both side tables chain back to ``G``'s labels.
    """
    order = sorted(set(S))
    if not order:
        raise GraphError("induced subgraph of an empty vertex set")
    pos = {v: i for i, v in enumerate(order)}
    kept = [(pos[u], pos[v], c) for u, v, c in G.edges if u in pos and v in pos]
    old_colours = sorted({c for _, _, c in kept})
    remap = {c: i for i, c in enumerate(old_colours)}
    dense = [(u, v, remap[c]) for u, v, c in kept]
    colour_labels = tuple(G.colour_labels[c] for c in old_colours)
    vertex_labels = tuple(G.vertex_labels[v] for v in order)
    return ColoredGraph._assemble(len(order), dense, colour_labels, vertex_labels)


def empty_graph(n: int = 0) -> ColoredGraph:
    return ColoredGraph._assemble(n, [], ())


def _parse_ints(line: str, lineno: int, count: int) -> list[int]:
    parts = line.split()
    if len(parts) != count:
        raise GraphFormatError(f"expected {count} integers, got {line!r}", lineno)
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise GraphFormatError(f"non-integer token in {line!r}", lineno) from None


def loads_graph(text: str) -> ColoredGraph:
    """Parse the coloured edge-list format (``n m C`` header then ``u v c`` lines)."""
    header = None
    edges: list[tuple[int, int, int]] = []
    lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = _parse_ints(line, lineno, 3)
            continue
        u, v, c = _parse_ints(line, lineno, 3)
        edges.append((u, v, c))
        lines.append(lineno)
    if header is None:
        raise GraphFormatError("missing 'n m C' header")
    n, m, C = header
    if n < 0 or m < 0 or C < 0:
        raise GraphFormatError("negative value in header")
    if len(edges) != m:
        raise GraphFormatError(f"header announces {m} edges, found {len(edges)}")
    # re-run the checks edge by edge so errors carry a line number
    seen: dict[tuple[int, int], int] = {}
    at_vertex: list[dict[int, int]] = [dict() for _ in range(n)]
    for (u, v, c), lineno in zip(edges, lines):
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"vertex out of range in edge ({u}, {v})", lineno)
        if not 0 <= c < C:
            raise GraphFormatError(f"colour {c} outside 0..{C - 1}", lineno)
        if u == v:
            raise SelfLoopError(u, lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdgeError(*key, line=lineno)
        seen[key] = lineno
        for w in (u, v):
            if c in at_vertex[w]:
                raise ImproperColouringError(w, c, lineno)
            at_vertex[w][c] = 1
    used = {c for _, _, c in edges}
    if used != set(range(C)):
        missing = sorted(set(range(C)) - used)
        raise GraphFormatError(f"colours {missing} declared but unused")
    return ColoredGraph.from_edges(n, edges)


def load_graph(source) -> ColoredGraph:
    """Load a graph from a path or an open text stream."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return loads_graph(fh.read())
    return loads_graph(source.read())


def dumps_graph(G: ColoredGraph, comments: Iterable[str] = ()) -> str:
    buf = io.StringIO()
    for comment in comments:
        for line in str(comment).splitlines():
            buf.write(f"# {line}\n")
    buf.write(f"{G.n} {G.m} {G.colour_count}\n")
    for u, v, c in G.edges:
        buf.write(f"{u} {v} {c}\n")
    return buf.getvalue()


def save_graph(G: ColoredGraph, target, comments: Iterable[str] = ()) -> None:
    """Write ``G`` with edges sorted by ``(u, v)``; comments become ``#`` lines."""
    text = dumps_graph(G, comments)
    if isinstance(target, (str, os.PathLike)):
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        target.write(text)
