from __future__ import annotations

import io
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rainbow_forge.constructions import complete_one_factorization, hypercube
from rainbow_forge.graph import (
    ColoredGraph,
    ColorSet,
    DuplicateEdgeError,
    GraphError,
    GraphFormatError,
    ImproperColouringError,
    SelfLoopError,
    average_degree,
    dumps_graph,
    empty_graph,
    induced_subgraph,
    is_proper,
    load_graph,
    loads_graph,
    neighborhood_minus,
    save_graph,
)

from oracles import random_proper_graph


def cycle(n):
    return ColoredGraph.from_edges(n, [(i, (i + 1) % n, i % 2 if n % 2 == 0 else i % 3) for i in range(n)])


C5 = ColoredGraph.from_edges(5, [(0, 1, 0), (1, 2, 1), (2, 3, 0), (3, 4, 1), (4, 0, 2)])


def test_load_alternating_four_cycle():
    G = loads_graph("4 4 2\n0 1 0\n1 2 1\n2 3 0\n3 0 1\n")
    assert (G.n, G.m, G.colour_count) == (4, 4, 2)


def test_improper_triangle_reports_vertex_and_colour():
    with pytest.raises(ImproperColouringError) as info:
        loads_graph("3 3 2\n0 1 0\n1 2 0\n0 2 1\n")
    assert info.value.colour == 0
    assert info.value.vertex == 1
    assert "improper at vertex 1 sharing two colour-0 edges" in str(info.value)
    assert info.value.line == 3


def test_self_loop_rejected():
    with pytest.raises(SelfLoopError, match="self-loop"):
        loads_graph("3 1 1\n2 2 0\n")


def test_duplicate_edge_rejected():
    with pytest.raises(DuplicateEdgeError):
        loads_graph("3 2 2\n0 1 0\n1 0 1\n")


@pytest.mark.parametrize(
    "text",
    ["", "3 1\n", "3 1 1\n0 1\n", "3 2 1\n0 1 0\n", "3 1 1\n0 x 0\n", "3 1 2\n0 1 0\n", "2 1 1\n0 5 0\n"],
)
def test_malformed_text(text):
    with pytest.raises(GraphFormatError):
        loads_graph(text)


def test_comments_ignored():
    G = loads_graph("# hello\n2 1 1\n# mid\n0 1 0\n")
    assert G.m == 1


def test_round_trip_file(tmp_path):
    G = complete_one_factorization(8)
    path = tmp_path / "k8.txt"
    save_graph(G, path, ["provenance line"])
    H = load_graph(path)
    assert H == G and H.edges == G.edges
    assert path.read_text().startswith("# provenance line\n8 28 7\n")
    buf = io.StringIO()
    save_graph(G, buf)
    assert loads_graph(buf.getvalue()) == G


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 12))
def test_round_trip_random(seed, n):
    G = random_proper_graph(random.Random(seed), n)
    H = loads_graph(dumps_graph(G))
    assert H == G
    # writer emits edges sorted by (u, v)
    lines = [tuple(map(int, l.split())) for l in dumps_graph(G).splitlines()[1:]]
    assert lines == sorted(lines)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_properness_validation_matches_pairwise_scan(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 12)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.4]
    edges = [(u, v, rng.randrange(4)) for u, v in pairs]
    expected = is_proper(n, edges)
    # independent O(sum deg^2) scan
    ok = True
    for i, (a, b, c) in enumerate(edges):
        for a2, b2, c2 in edges[i + 1:]:
            if c == c2 and {a, b} & {a2, b2}:
                ok = False
    assert expected == ok
    if ok:
        ColoredGraph.from_edges(n, edges)
    else:
        with pytest.raises(ImproperColouringError):
            ColoredGraph.from_edges(n, edges)


def test_colour_labels_densified_in_first_appearance_order():
    G = ColoredGraph.from_edges(3, [(0, 1, "red"), (1, 2, "blue")])
    assert G.colour_labels == ("red", "blue")
    assert G.colour(0, 1) == 0 and G.colour(1, 2) == 1
    H = ColoredGraph.from_edges(3, [(0, 1, 5), (1, 2, 9)])
    assert H.colour_count == 2 and H.colour_labels == (5, 9)


def test_average_degree():
    for m in range(1, 6):
        assert average_degree(hypercube(m)) == m
    for n in (4, 6, 10):
        assert average_degree(complete_one_factorization(n)) == n - 1
    assert average_degree(empty_graph(5)) == 0
    assert isinstance(average_degree(C5), Fraction)


def test_neighborhood_minus():
    assert neighborhood_minus(C5, {0}, set()) == {1, 4}
    assert neighborhood_minus(C5, {0}, {(0, 1)}) == {4}
    assert neighborhood_minus(C5, {0}, {(1, 0)}) == {4}
    assert neighborhood_minus(C5, set(range(5)), set()) == set()
    with pytest.raises(GraphError):
        neighborhood_minus(C5, {0}, {(0, 2)})


def test_induced_subgraph():
    K4 = complete_one_factorization(4)
    T = induced_subgraph(K4, {0, 1, 2})
    assert (T.n, T.m) == (3, 3)
    assert induced_subgraph(K4, range(4)) == K4
    assert induced_subgraph(K4, range(4)).colour_labels == K4.colour_labels
    E = induced_subgraph(C5, {0, 2})
    assert E.m == 0 and E.colour_count == 0
    with pytest.raises(GraphError):
        induced_subgraph(K4, [])


def test_induced_subgraph_colour_map_chains():
    G = ColoredGraph.from_edges(4, [(0, 1, "a"), (1, 2, "b"), (2, 3, "c")])
    H = induced_subgraph(G, {1, 2, 3})
    assert H.colour_labels == ("b", "c")
    assert H.vertex_labels == (1, 2, 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_induced_average_degree_matches_direct_count(seed):
    rng = random.Random(seed)
    G = random_proper_graph(rng, rng.randint(1, 10))
    S = {v for v in range(G.n) if rng.random() < 0.6} or {0}
    H = induced_subgraph(G, S)
    inside = sum(1 for u, v, _ in G.edges if u in S and v in S)
    assert average_degree(H) == Fraction(2 * inside, len(S))


def test_colorset_operations():
    A = ColorSet.of(10, [1, 3, 5])
    assert 3 in A and 4 not in A and len(A) == 3
    B = A.add(4).discard(1)
    assert sorted(B) == [3, 4, 5] and sorted(A) == [1, 3, 5]
    assert ColorSet.of(10, [3]).issubset(A)
    assert not B.issubset(A)
    assert len(A.complement()) == 7
    assert len(ColorSet.full(6)) == 6
