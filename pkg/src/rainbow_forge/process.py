"""The randomized colour-splitting process.

A chain ``A_0 ⊇ A_1 ⊇ ... ⊇ A_T`` starts from a uniform half of the palette
and keeps each surviving colour with probability ``1 - 1/T`` per level.
Tracking ``|U(A_{kL})|`` at the spaced checkpoints ``k = 0..K`` shows how
rainbow reachability grows as colours are added back.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ._rng import make_rng
from .graph import ColoredGraph, ColorSet
from .rainbow import DEFAULT_STATE_BUDGET, rainbow_reachable_set, split_palette_search


@dataclass(frozen=True)
class NestedColorChain:
    """Realized chain, stored as the deepest level each colour survives to.

    ``depth[c] == -1`` means ``c`` is not in ``A_0``; otherwise ``c`` is in
    ``A_i`` exactly for ``i <= depth[c]``.
    """

    T: int
    p: Fraction
    depth: tuple[int, ...]
    seed: object = None

    @property
    def colour_count(self) -> int:
        return len(self.depth)

    def level(self, i: int) -> ColorSet:
        if not 0 <= i <= self.T:
            raise IndexError(f"level {i} outside 0..{self.T}")
        return ColorSet.of(self.colour_count, (c for c, dc in enumerate(self.depth) if dc >= i))

    def levels(self) -> list[ColorSet]:
        return [self.level(i) for i in range(self.T + 1)]


def sample_depths(rng: np.random.Generator, size, T: int, p: float | None = None) -> np.ndarray:
    """Vectorized survival depths for independent colours (-1 = not in A_0)."""
    if T < 1:
        raise ValueError("T must be at least 1")
    keep = 1.0 - 1.0 / T if p is None else float(p)
    in_first = rng.random(size) < 0.5
    if keep <= 0.0:
        extra = np.zeros(size, dtype=np.int64)
    else:
        # failures before the first drop, capped at T
        extra = np.minimum(rng.geometric(1.0 - keep, size) - 1, T)
    return np.where(in_first, extra, -1)


def sample_chain(C: int, T: int, seed=None) -> NestedColorChain:
    """Sample the nested chain on ``C`` colours with keep probability ``1 - 1/T``."""
    if T < 1:
        raise ValueError("T must be at least 1")
    rng = make_rng(seed)
    depth = sample_depths(rng, C, T)
    return NestedColorChain(T, 1 - Fraction(1, T), tuple(int(x) for x in depth), seed)


def chain_probability_exact(i: int, j: int, T: int, kind: str, p=None) -> Fraction:
    """Exact conditional probabilities of a single colour in the chain.

    kind ``"a"``: ``Pr[x in A_i | x not in A_j]`` for ``0 <= i <= j <= T``.
    kind ``"b"``: ``Pr[x in A_{j-1} | x in A_i minus A_j]`` for
    ``0 <= i < j <= T`` with ``j - i + 1 <= T/2``.
    ``p`` defaults to ``1 - 1/T`` and must lie in ``[1 - 1/T, 1)``.
    """
    if T < 1:
        raise ValueError("T must be at least 1")
    p = 1 - Fraction(1, T) if p is None else Fraction(p)
    if not (1 - Fraction(1, T) <= p < 1):
        raise ValueError("p must lie in [1 - 1/T, 1)")
    half = Fraction(1, 2)
    if kind == "a":
        if not 0 <= i <= j <= T:
            raise ValueError("kind a needs 0 <= i <= j <= T")
        return half * p**i * (1 - p ** (j - i)) / (1 - half * p**j)
    if kind == "b":
        if not (0 <= i < j <= T and 2 * (j - i + 1) <= T):
            raise ValueError("kind b needs 0 <= i < j <= T and j - i + 1 <= T/2")
        return p ** (j - 1 - i) * (1 - p) / (1 - p ** (j - i))
    raise ValueError(f"unknown kind {kind!r}")


def lemma_bound(i: int, j: int, T: int, kind: str, p=None) -> Fraction:
    """Lower bounds the chain probabilities must meet: (j-i)(1-p)/6 and (T/(j-i))(1-p)/2."""
    p = 1 - Fraction(1, T) if p is None else Fraction(p)
    if kind == "a":
        return (j - i) * (1 - p) / 6
    return Fraction(T, j - i) * (1 - p) / 2


@dataclass
class GridReport:
    T_max: int
    checked: int = 0
    failures: list[tuple] = field(default_factory=list)
    monotone_failures: list[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and not self.monotone_failures

    def to_record(self) -> dict:
        return {
            "T_max": self.T_max,
            "checked": self.checked,
            "failures": [list(map(str, f)) for f in self.failures],
            "monotone_failures": [list(map(str, f)) for f in self.monotone_failures],
            "verdict": "all inequalities hold" if self.ok else "violations found",
        }


def lemma_grid(T_max: int = 50) -> GridReport:
    """Evaluate both bounds on every valid ``(i, j, T)`` with ``T <= T_max``."""
    report = GridReport(T_max)
    for T in range(1, T_max + 1):
        for j in range(T + 1):
            previous = None
            for i in range(j + 1):
                value = chain_probability_exact(i, j, T, "a")
                report.checked += 1
                if not 0 <= value <= 1 or value < lemma_bound(i, j, T, "a"):
                    report.failures.append(("a", T, i, j, value))
                if previous is not None and value > previous:
                    report.monotone_failures.append(("a", T, i, j))
                previous = value
        for i in range(T + 1):
            for j in range(i + 1, T + 1):
                if 2 * (j - i + 1) > T:
                    break
                value = chain_probability_exact(i, j, T, "b")
                report.checked += 1
                if not 0 <= value <= 1 or value < lemma_bound(i, j, T, "b"):
                    report.failures.append(("b", T, i, j, value))
    return report


@dataclass(frozen=True)
class ProcessConfig:
    """Chain parameters ``K``, ``L`` and ``T = K*L`` for an ``n``-vertex graph.

    ``L = ceil(L_scale * ceil(log n))`` rounded up to a multiple of 4.
    """

    n: int
    K: int
    L: int
    L_scale: Fraction = Fraction(1)

    @classmethod
    def for_graph(cls, n: int, L_scale=1) -> "ProcessConfig":
        if n < 2:
            raise ValueError("need n >= 2")
        L_scale = Fraction(L_scale)
        if L_scale <= 0:
            raise ValueError("L_scale must be positive")
        loglog = math.log(math.log(n)) if n > 2 else 0.0
        K = max(1, math.ceil(loglog))
        L = math.ceil(L_scale * math.ceil(math.log(n)))
        L = max(4, 4 * math.ceil(L / 4))
        return cls(n, K, L, L_scale)

    def __post_init__(self):
        if self.K < 1 or self.L % 4:
            raise ValueError("need K >= 1 and L divisible by 4")

    @property
    def T(self) -> int:
        return self.K * self.L

    def s(self, k: int) -> float:
        """Checkpoint target ``n * exp(-10**k / 2)``."""
        return self.n * math.exp(-0.5 * 10**k)

    def to_record(self) -> dict:
        return {"n": self.n, "K": self.K, "L": self.L, "T": self.T, "L_scale": str(self.L_scale)}


@dataclass
class TrialRecord:
    seed: int
    x: int
    checkpoints: list[int]
    complement_size: int | None = None
    size_event: bool = False
    complement_size_event: bool = False
    cycle_event: bool = False
    cycle: list[int] | None = None
    aborted: bool = False

    def to_record(self) -> dict:
        return {
            "seed": self.seed,
            "x": self.x,
            "checkpoints": list(self.checkpoints),
            "complement_size": self.complement_size,
            "size_event": self.size_event,
            "complement_size_event": self.complement_size_event,
            "cycle_event": self.cycle_event,
            "cycle": self.cycle,
            "aborted": self.aborted,
        }


def run_splitting_trial(
    G: ColoredGraph,
    x: int,
    cfg: ProcessConfig,
    seed,
    budget: int = DEFAULT_STATE_BUDGET,
) -> TrialRecord:
    """One realization of the chain with reachability measured at every checkpoint.

    Size events compare ``|U(A_0)|`` and ``|U(C minus A_0)|`` with
    ``n / sqrt(e)``. Whenever both reachable sets share a vertex besides
    ``x`` the joined walks are turned into a validated rainbow cycle.
    """
    chain = sample_chain(G.colour_count, cfg.T, seed)
    record = TrialRecord(seed=seed, x=x, checkpoints=[])
    for k in range(cfg.K + 1):
        reach = rainbow_reachable_set(G, x, chain.level(k * cfg.L), budget)
        if not reach.exact:
            record.aborted = True
            return record
        record.checkpoints.append(len(reach))
    split = split_palette_search(G, x, chain.level(0), budget)
    if not split.exact:
        record.aborted = True
        return record
    threshold = G.n / math.sqrt(math.e)
    record.complement_size = len(split.reach_out)
    record.size_event = record.checkpoints[0] >= threshold
    record.complement_size_event = record.complement_size >= threshold
    record.cycle_event = split.meeting is not None
    record.cycle = split.cycle
    return record


def summarize_trials(records: list[TrialRecord], cfg: ProcessConfig | None = None) -> dict:
    done = [r for r in records if not r.aborted]
    count = len(done)

    def freq(attr):
        return sum(getattr(r, attr) for r in done) / count if count else None

    return {
        "trials": len(records),
        "aborted": len(records) - count,
        "size_event_frequency": freq("size_event"),
        "complement_size_event_frequency": freq("complement_size_event"),
        "cycle_event_frequency": freq("cycle_event"),
        "config": None if cfg is None else cfg.to_record(),
    }


def color_split_components(G: ColoredGraph, seed=None, keep_probability: float = 0.5) -> list[int]:
    """Component sizes (descending) after keeping each colour with ``keep_probability``."""
    rng = make_rng(seed)
    keep = rng.random(G.colour_count) < keep_probability
    if G.n == 0:
        return []
    kept = [(u, v) for u, v, c in G.edges if keep[c]]
    rows = [u for u, _ in kept]
    cols = [v for _, v in kept]
    adj = coo_matrix((np.ones(len(kept)), (rows, cols)), shape=(G.n, G.n))
    _, labels = connected_components(adj, directed=False)
    return sorted(np.bincount(labels).tolist(), reverse=True)
