from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rainbow_forge.constructions import complete_one_factorization
from rainbow_forge.expander import (
    check_expansion,
    degree_inequality_holds,
    epsilon_grid,
    expansion_ratio,
    extract_expander,
    size_allowed,
    tight_epsilon,
    verify_expansion_at,
    verify_robust_expander,
    weak_degree_inequality_holds,
    worst_case_neighborhood,
)
from rainbow_forge.graph import ColoredGraph, GraphError, induced_subgraph

from oracles import best_ratio_subset, brute_expander_verdict, brute_worst_case, random_proper_graph

C5 = ColoredGraph.from_edges(5, [(0, 1, 0), (1, 2, 1), (2, 3, 0), (3, 4, 1), (4, 0, 2)])
K2 = ColoredGraph.from_edges(2, [(0, 1, 0)])
K3 = ColoredGraph.from_edges(3, [(0, 1, 0), (1, 2, 1), (0, 2, 2)])


def star(leaves):
    return ColoredGraph.from_edges(leaves + 1, [(0, i, i - 1) for i in range(1, leaves + 1)])


def test_worst_case_examples():
    assert worst_case_neighborhood(C5, {0}, 0) == 2
    assert worst_case_neighborhood(C5, {0}, 1) == 1
    K4 = complete_one_factorization(4)
    assert worst_case_neighborhood(K4, {0}, 2) == 1
    assert worst_case_neighborhood(K4, {0}, Fraction(5, 2)) == 1
    with pytest.raises(GraphError):
        worst_case_neighborhood(K4, set(), 1)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_worst_case_matches_deletion_brute_force(seed):
    rng = random.Random(seed)
    G = random_proper_graph(rng, rng.randint(2, 8), max_edges=18)
    U = {v for v in range(G.n) if rng.random() < 0.5} or {0}
    prev = None
    for twice in range(0, 2 * G.m + 3):
        budget = Fraction(twice, 2)
        got = worst_case_neighborhood(G, U, budget)
        assert got == brute_worst_case(G, U, budget)
        if prev is not None:
            assert got <= prev
        prev = got


def test_tight_epsilon_never_exceeds_true_value():
    for n in range(2, 60):
        for size in range(1, n + 1):
            eps = tight_epsilon(size, n)
            assert 0 <= eps <= 1
            assert float(eps) <= 1 - math.log(size) / math.log(n) + 1e-15
            assert size_allowed(size, n, eps)


def test_size_allowed_exact():
    assert size_allowed(8, 64, Fraction(1, 2))
    assert not size_allowed(9, 64, Fraction(1, 2))
    assert size_allowed(1, 5, Fraction(1))


def test_k2_passes():
    cert = verify_robust_expander(K2)
    assert cert.passed and cert.mode == "exhaustive"


def test_star_counterexample_arithmetic():
    S = star(100)
    U = set(range(1, 9))
    eps = tight_epsilon(8, 101)
    chk = check_expansion(S, U, eps)
    assert chk.achieved == 1
    assert not chk.passed
    assert chk.demand == eps / 3 * 8
    # exact arithmetic at the true eps: 8/3 * (1 - log 8 / log 101) > 1
    assert 8 / 3 * (1 - math.log(8) / math.log(101)) > 1
    cert = verify_robust_expander(S, "sampled", samples=400, seed=1)
    assert not cert.passed


def test_c5_matches_brute_force():
    cert = verify_robust_expander(C5)
    passed, first = brute_expander_verdict(C5, lambda s: epsilon_grid(tight_epsilon(s, 5)))
    assert cert.passed == passed
    if not passed:
        assert cert.counterexample.U == first


def test_exhaustive_cap():
    with pytest.raises(GraphError):
        verify_robust_expander(star(20))


def test_certificate_record_lists_grid():
    rec = verify_robust_expander(C5).to_record()
    assert rec["grid"]["steps"] == 20 and rec["mode"] == "exhaustive"


def test_k3_extracts_edge():
    H, cert = extract_expander(K3)
    assert (H.n, H.m) == (2, 1)
    assert cert.vertices == (0, 1)
    assert cert.ratio == pytest.approx(1 / (math.log(2) - 1 / 3), abs=1e-12)
    assert expansion_ratio(K3) == pytest.approx(2 / (math.log(3) - 1 / 3))
    assert cert.passed and cert.mode == "exhaustive"


def test_single_edge_returns_itself():
    H, _ = extract_expander(K2)
    assert H == K2


def test_edgeless_and_oversize_rejected():
    with pytest.raises(GraphError):
        extract_expander(ColoredGraph.from_edges(3, []))
    with pytest.raises(GraphError):
        extract_expander(star(21))


def test_clique_plus_path():
    K10 = complete_one_factorization(10)
    edges = list(K10.edges) + [(10 + i, 11 + i, i % 2) for i in range(19)]
    G = ColoredGraph.from_edges(30, edges)
    H, cert = extract_expander(G, "heuristic", seed=0)
    assert set(cert.vertices) <= set(range(10))
    for climb in cert.ratio_ledger:
        assert all(a < b for a, b in zip(climb, climb[1:]))
    # exact mode on the component level: the clique beats any part of the path
    small = ColoredGraph.from_edges(16, list(complete_one_factorization(6).edges)
                                    + [(6 + i, 7 + i, i % 2) for i in range(9)])
    H2, cert2 = extract_expander(small)
    assert set(cert2.vertices) <= set(range(6))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_exact_extraction_matches_subset_listing(seed):
    rng = random.Random(seed)
    G = random_proper_graph(rng, rng.randint(2, 8))
    if G.m == 0:
        return
    H, cert = extract_expander(G)
    S, ratio = best_ratio_subset(G)
    assert cert.vertices == S
    assert cert.ratio == pytest.approx(ratio, abs=1e-12)
    assert degree_inequality_holds(G, H) and weak_degree_inequality_holds(G, H)


def test_verify_expansion_at_fixed_eps():
    assert verify_expansion_at(complete_one_factorization(6), Fraction(1, 2)) is None
    bad = verify_expansion_at(star(9), Fraction(1, 10))
    assert bad is None or not bad.passed
