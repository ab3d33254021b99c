"""Small finite groups, dissociated sets and the graphs built from them.

Elements are plain hashable values owned by their group: permutations are
image tuples, residues are ints and direct-product elements are tuples of
factor elements. Products compose left factor first, ``(s*t)(i) = t(s(i))``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Sequence

import networkx as nx

from .graph import ColoredGraph, GraphError

FiniteGroupElement = Hashable

DISSOCIATION_CAP = 12
DIMENSION_CAP = 14
GRAPH_ORDER_CAP = 10_000
TRANSPOSITION_CAP = 5


class GroupError(ValueError):
    pass


class Group:
    """Common interface; subclasses supply the arithmetic and element syntax."""

    def identity(self):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def elements(self) -> list:
        raise NotImplementedError

    def contains(self, a) -> bool:
        raise NotImplementedError

    def format(self, a) -> str:
        raise NotImplementedError

    def parse_element(self, text: str):
        raise NotImplementedError

    @property
    def order(self) -> int:
        return len(self.elements())

    @cached_property
    def index(self) -> dict:
        return {g: i for i, g in enumerate(self.elements())}

    def power(self, a, sign: int):
        return a if sign == 1 else self.inv(a)

    def element_order(self, a) -> int:
        e, x, k = self.identity(), a, 1
        while x != e:
            x = self.mul(x, a)
            k += 1
        return k

    def check(self, a):
        if not self.contains(a):
            raise GroupError(f"{a!r} is not an element of {self}")
        return a

    def canonical(self, S: Iterable) -> list:
        """Distinct elements of ``S`` in enumeration order; duplicates are an error."""
        items = [self.check(g) for g in S]
        if len(set(items)) != len(items):
            raise GroupError("element set contains duplicates")
        return sorted(items, key=self.index.__getitem__)

    def parse_set(self, text: str) -> list:
        text = text.strip()
        if text in ("", "{}"):
            return []
        if text.startswith("{") and text.endswith("}"):
            text = text[1:-1]
        return [self.parse_element(p) for p in _split_top(text)]

    def __pow__(self, k: int) -> "Product":
        return Product((self,) * k)


@dataclass(frozen=True, eq=True)
class Symmetric(Group):
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise GroupError("S(k) needs k >= 1")

    def __str__(self) -> str:
        return f"S{self.k}"

    def identity(self):
        return tuple(range(self.k))

    def mul(self, a, b):
        return tuple(b[x] for x in a)

    def inv(self, a):
        out = [0] * self.k
        for i, x in enumerate(a):
            out[x] = i
        return tuple(out)

    @cached_property
    def _elements(self) -> list:
        return list(itertools.permutations(range(self.k)))

    def elements(self) -> list:
        return self._elements

    @property
    def order(self) -> int:
        return len(self._elements)

    def contains(self, a) -> bool:
        return isinstance(a, tuple) and sorted(a) == list(range(self.k))

    def transposition(self, i: int, j: int):
        p = list(range(self.k))
        p[i], p[j] = j, i
        return tuple(p)

    def transpositions(self) -> list:
        return [self.transposition(i, j) for i, j in itertools.combinations(range(self.k), 2)]

    def format(self, a) -> str:
        seen, parts = set(), []
        for start in range(self.k):
            if start in seen or a[start] == start:
                continue
            cyc, x = [], start
            while x not in seen:
                seen.add(x)
                cyc.append(x)
                x = a[x]
            sep = "" if self.k <= 10 else " "
            parts.append("(" + sep.join(map(str, cyc)) + ")")
        return "".join(parts) or "()"

    def parse_element(self, text: str):
        text = text.strip()
        if text in ("e", "()", ""):
            return self.identity()
        cycles = re.findall(r"\(([^()]*)\)", text)
        if "".join(f"({c})" for c in cycles) != re.sub(r"\s+(?=\()|(?<=\))\s+", "", text):
            raise GroupError(f"bad permutation literal {text!r}")
        result = self.identity()
        for body in cycles:
            tokens = body.replace(",", " ").split()
            if len(tokens) == 1 and self.k <= 10:
                tokens = list(tokens[0])
            pts = [int(t) for t in tokens]
            if len(set(pts)) != len(pts) or any(not 0 <= p < self.k for p in pts):
                raise GroupError(f"bad cycle ({body}) for {self}")
            img = list(range(self.k))
            for a, b in zip(pts, pts[1:] + pts[:1]):
                img[a] = b
            result = self.mul(result, tuple(img))
        return result


@dataclass(frozen=True, eq=True)
class Cyclic(Group):
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise GroupError("Z(m) needs m >= 1")

    def __str__(self) -> str:
        return f"Z{self.m}"

    def identity(self):
        return 0

    def mul(self, a, b):
        return (a + b) % self.m

    def inv(self, a):
        return (-a) % self.m

    def elements(self) -> list:
        return list(range(self.m))

    @property
    def order(self) -> int:
        return self.m

    def contains(self, a) -> bool:
        return isinstance(a, int) and not isinstance(a, bool) and 0 <= a < self.m

    def format(self, a) -> str:
        return str(a)

    def parse_element(self, text: str):
        text = text.strip()
        if text == "e":
            return 0
        try:
            return int(text) % self.m
        except ValueError:
            raise GroupError(f"bad residue literal {text!r}") from None


@dataclass(frozen=True, eq=True)
class Product(Group):
    factors: tuple[Group, ...]

    def __post_init__(self):
        if not self.factors:
            raise GroupError("a direct product needs at least one factor")

    def __str__(self) -> str:
        parts, i = [], 0
        while i < len(self.factors):
            j = i
            while j < len(self.factors) and self.factors[j] == self.factors[i]:
                j += 1
            parts.append(str(self.factors[i]) + (f"^{j - i}" if j - i > 1 else ""))
            i = j
        return "x".join(parts)

    def identity(self):
        return tuple(f.identity() for f in self.factors)

    def mul(self, a, b):
        return tuple(f.mul(x, y) for f, x, y in zip(self.factors, a, b))

    def inv(self, a):
        return tuple(f.inv(x) for f, x in zip(self.factors, a))

    @cached_property
    def _elements(self) -> list:
        return list(itertools.product(*(f.elements() for f in self.factors)))

    def elements(self) -> list:
        return self._elements

    @property
    def order(self) -> int:
        out = 1
        for f in self.factors:
            out *= f.order
        return out

    def contains(self, a) -> bool:
        return (
            isinstance(a, tuple)
            and len(a) == len(self.factors)
            and all(f.contains(x) for f, x in zip(self.factors, a))
        )

    def format(self, a) -> str:
        return "(" + ",".join(f.format(x) for f, x in zip(self.factors, a)) + ")"

    def parse_element(self, text: str):
        text = text.strip()
        if text == "e":
            return self.identity()
        if not (text.startswith("(") and text.endswith(")")):
            raise GroupError(f"product elements are parenthesized tuples, got {text!r}")
        parts = _split_top(text[1:-1])
        if len(parts) != len(self.factors):
            raise GroupError(f"expected {len(self.factors)} components in {text!r}")
        return tuple(f.parse_element(p) for f, p in zip(self.factors, parts))


def _split_top(text: str) -> list[str]:
    """Split on commas that are not inside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise GroupError(f"unbalanced parentheses in {text!r}")
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise GroupError(f"unbalanced parentheses in {text!r}")
    parts.append("".join(cur).strip())
    return parts


_FACTOR = re.compile(r"^([SZ])\(?(\d+)\)?(?:\^(\d+))?$")


def parse_group(spec: str) -> Group:
    """Parse ``S3``, ``Z2^4``, ``S3^2``, ``Z6xS3`` (also ``S(3)`` style)."""
    factors: list[Group] = []
    for token in spec.replace(" ", "").split("x"):
        match = _FACTOR.match(token)
        if not match:
            raise GroupError(f"cannot parse group factor {token!r} in {spec!r}")
        kind, size, power = match.group(1), int(match.group(2)), int(match.group(3) or 1)
        base = Symmetric(size) if kind == "S" else Cyclic(size)
        factors += [base] * power
    return factors[0] if len(factors) == 1 else Product(tuple(factors))


def group_eval(G: Group, elements: Sequence, signs: Sequence[int] | None = None):
    """Left-to-right product of ``g_i ** sign_i``."""
    if signs is None:
        signs = [1] * len(elements)
    if len(signs) != len(elements):
        raise GroupError("need one sign per element")
    result = G.identity()
    for g, s in zip(elements, signs):
        if s not in (1, -1):
            raise GroupError("signs must be +1 or -1")
        result = G.mul(result, G.power(G.check(g), s))
    return result


@dataclass(frozen=True)
class RelationWitness:
    elements: tuple
    signs: tuple[int, ...]

    def verify(self, G: Group) -> bool:
        return (
            len(self.elements) >= 1
            and len(set(self.elements)) == len(self.elements)
            and group_eval(G, self.elements, self.signs) == G.identity()
        )

    def to_record(self, G: Group) -> dict:
        return {"elements": [G.format(g) for g in self.elements], "signs": list(self.signs)}


@dataclass(frozen=True)
class DissociationVerdict:
    """``bool(verdict)`` is True only for a complete search that found no relation."""

    dissociated: bool
    witness: RelationWitness | None
    complete: bool
    max_m: int

    def __bool__(self) -> bool:
        return self.dissociated and self.complete

    def to_record(self, G: Group) -> dict:
        if self.witness is not None:
            verdict = "relation found"
        elif self.complete:
            verdict = "dissociated"
        else:
            verdict = f"no relation up to length {self.max_m}"
        return {
            "verdict": verdict,
            "dissociated": bool(self),
            "complete": self.complete,
            "max_m": self.max_m,
            "witness": None if self.witness is None else self.witness.to_record(G),
        }


def is_dissociated(
    G: Group, S: Iterable, max_m: int | None = None, cap: int = DISSOCIATION_CAP
) -> DissociationVerdict:
    """Search states (used elements, running product) for a signed product equal to e."""
    items = G.canonical(S)
    if len(items) > cap:
        raise GroupError(f"set of size {len(items)} exceeds the cap {cap}")
    m = len(items) if max_m is None else min(max_m, len(items))
    e = G.identity()
    steps = []
    for i, g in enumerate(items):
        ginv = G.inv(g)
        steps.append((i, g, 1))
        if ginv != g:
            steps.append((i, ginv, -1))
    seen = {(0, e)}
    # each frame: (mask, product, depth, next step index)
    stack = [(0, e, 0)]
    path: list[tuple[int, int]] = []
    iters = [0]
    while stack:
        mask, prod, depth = stack[-1]
        k = iters[-1]
        if k >= len(steps) or depth >= m:
            stack.pop()
            iters.pop()
            if path:
                path.pop()
            continue
        iters[-1] = k + 1
        i, h, sign = steps[k]
        if mask >> i & 1:
            continue
        nxt = G.mul(prod, h)
        if nxt == e:
            chosen = path + [(i, sign)]
            witness = RelationWitness(
                tuple(items[j] for j, _ in chosen), tuple(s for _, s in chosen)
            )
            if not witness.verify(G):
                raise AssertionError("relation witness failed verification")
            return DissociationVerdict(False, witness, True, m)
        state = (mask | 1 << i, nxt)
        if state in seen:
            continue
        seen.add(state)
        stack.append((state[0], nxt, depth + 1))
        iters.append(0)
        path.append((i, sign))
    return DissociationVerdict(True, None, m == len(items), m)


def additive_dimension(G: Group, A: Iterable, cap: int = DIMENSION_CAP) -> tuple[int, list]:
    """Largest dissociated subset of ``A`` by branch and bound; returns (size, subset)."""
    items = G.canonical(A)
    if len(items) > cap:
        raise GroupError(f"set of size {len(items)} exceeds the cap {cap}")
    best: list = []

    def rec(i: int, chosen: list):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if i == len(items) or len(chosen) + len(items) - i <= len(best):
            return
        candidate = chosen + [items[i]]
        # subsets of dissociated sets are dissociated, so a failed extension is final
        if is_dissociated(G, candidate, cap=cap):
            rec(i + 1, candidate)
        rec(i + 1, chosen)

    rec(0, [])
    return len(best), best


def dim_transpositions(k: int, cap: int = TRANSPOSITION_CAP) -> int:
    """Additive dimension of the set of all transpositions of ``S(k)``.

    Every ``(mask, product)`` reachable from ``(0, e)`` is generated once;
    a mask is bad when some subset of it reaches ``e``, and the answer is
    the largest mask that is not bad.
    """
    if k < 1:
        raise GroupError("k must be at least 1")
    if k > cap:
        raise GroupError(f"k = {k} exceeds the cap {cap}")
    group = Symmetric(k)
    T = group.transpositions()
    if not T:
        return 0
    e = group.identity()
    levels = {0: {e}}
    closes = [False] * (1 << len(T))
    frontier = {(0, e)}
    while frontier:
        nxt = set()
        for mask, prod in frontier:
            for i, t in enumerate(T):
                if mask >> i & 1:
                    continue
                state = (mask | 1 << i, group.mul(prod, t))
                if state[1] == e:
                    closes[state[0]] = True
                if state[0] not in levels:
                    levels[state[0]] = set()
                if state[1] not in levels[state[0]]:
                    levels[state[0]].add(state[1])
                    nxt.add(state)
        frontier = nxt
    bad = closes
    for i in range(len(T)):
        bit = 1 << i
        for mask in range(1 << len(T)):
            if mask & bit and bad[mask ^ bit]:
                bad[mask] = True
    return max(bin(mask).count("1") for mask in range(1 << len(T)) if not bad[mask])


def translation_bipartite_graph(G: Group, S: Iterable, cap: int = GRAPH_ORDER_CAP) -> ColoredGraph:
    """Left copy ``g`` joined to right copy ``g*s`` with colour = position of ``s``."""
    if G.order > cap:
        raise GroupError(f"group order {G.order} exceeds the cap {cap}")
    gens = G.canonical(S)
    elems = G.elements()
    idx = G.index
    size = len(elems)
    edges = [
        (idx[g], size + idx[G.mul(g, s)], c) for c, s in enumerate(gens) for g in elems
    ]
    return ColoredGraph.from_edges(2 * size, edges)


def cayley_even_order_graph(
    G: Group, S: Iterable, cap: int = GRAPH_ORDER_CAP, check: bool = True
) -> ColoredGraph:
    """Cayley graph with every other edge of each ``s``-cycle removed.

    Generators of order 2 keep every edge. For longer ``s`` the cycle
    ``g, gs, gs^2, ...`` starting from its first element in enumeration order
    keeps the edges ``(g s^{2t}, g s^{2t+1})``. With ``check`` set (and ``S``
    within the search cap) a non-dissociated ``S`` is rejected up front,
    since the colouring alone does not always expose it.
    """
    if G.order > cap:
        raise GroupError(f"group order {G.order} exceeds the cap {cap}")
    gens = G.canonical(S)
    if check and len(gens) <= DISSOCIATION_CAP:
        verdict = is_dissociated(G, gens)
        if verdict.witness is not None:
            rel = verdict.witness.to_record(G)
            raise GroupError(f"generator set is not dissociated: relation {rel}")
    idx = G.index
    edges = []
    for c, s in enumerate(gens):
        order = G.element_order(s)
        if order % 2:
            raise GroupError(f"generator {G.format(s)} has odd order {order}")
        visited = set()
        for g in G.elements():
            if g in visited:
                continue
            orbit = [g]
            while len(orbit) < order:
                orbit.append(G.mul(orbit[-1], s))
            visited.update(orbit)
            for t in range(0, order, 2):
                edges.append((idx[orbit[t]], idx[orbit[t + 1]], c))
    try:
        return ColoredGraph.from_edges(G.order, edges)
    except GraphError as exc:
        raise GroupError(
            f"colours are not well defined ({exc}); the generator set is not dissociated"
        ) from exc


def lift_dissociated_product(G: Group, Y: Iterable, k: int) -> tuple[Product, list]:
    """Copies of ``Y`` placed in each coordinate of ``G^k``, identity elsewhere."""
    if k < 1:
        raise GroupError("k must be at least 1")
    Y = G.canonical(Y)
    power = Product((G,) * k)
    e = G.identity()
    lifted = []
    for slot in range(k):
        for g in Y:
            coords = [e] * k
            coords[slot] = g
            lifted.append(tuple(coords))
    return power, lifted


def transposition_points(a: Sequence[int]) -> tuple[int, int]:
    moved = [i for i, x in enumerate(a) if x != i]
    if len(moved) != 2:
        raise GroupError(f"{a!r} is not a transposition")
    return moved[0], moved[1]


def schreier_transposition_graph(k: int, S: Iterable) -> nx.Graph:
    """Graph on ``0..k-1`` with an edge ``{i, j}`` for each transposition ``(i j)`` in ``S``."""
    group = Symmetric(k)
    H = nx.Graph()
    H.add_nodes_from(range(k))
    for t in S:
        H.add_edge(*transposition_points(group.check(t)))
    return H
