from collections import Counter

import numpy as np
from hypothesis import given, settings, strategies as st

from helpers import GPI_WEIGHTS, feedback_cover, mp_eigvals, numeric_multiset, random_graph
from isonet import corpus
from isonet.graph import enumerate_branches, is_structural_set
from isonet.reduce import graph_isomorphic, reduce_once
from isonet.transform import (
    branch_sets_isomorphic,
    interior_counts,
    isospectral_expansion,
    verify_expansion_determinant,
)

seeds = st.integers(0, 2**31 - 1)


def _instance(seed, n, weights=None):
    rng = np.random.default_rng(seed)
    G = random_graph(rng, n, density=0.35) if weights is None else random_graph(
        rng, n, density=0.35, weights=weights)
    return G, feedback_cover(G, [G.vertices[0]])


def test_fig6_expansion_is_fig2():
    H, G = corpus.load("fig6_H.json"), corpus.load("fig2.json")
    X = isospectral_expansion(H, ["v1", "v3"])
    assert graph_isomorphic(X, G)
    assert interior_counts(H, ["v1", "v3"]) == {"w2": 2, "w4": 2}
    rep = verify_expansion_determinant(H, ["v1", "v3"])
    assert rep.determinant_identity and rep.passed


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), seeds)
def test_expansion_keeps_branches_and_weights(n, seed):
    G, S = _instance(seed, n, GPI_WEIGHTS)
    X = isospectral_expansion(G, S)
    assert is_structural_set(X, S)
    assert branch_sets_isomorphic(G, X, S)
    assert X.edge_weight_set() <= G.edge_weight_set()
    # each interior vertex of X lies on exactly one branch
    seen = Counter(u for bs in enumerate_branches(X, S).values() for b in bs for u in b[1:-1])
    assert all(c == 1 for c in seen.values())
    assert reduce_once(X, S) == reduce_once(G, S)


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 5), seeds)
def test_determinant_identity_exact(n, seed):
    G, S = _instance(seed, n, GPI_WEIGHTS)
    assert verify_expansion_determinant(G, S).determinant_identity


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), seeds)
def test_expansion_spectrum_against_mpmath(n, seed):
    G, S = _instance(seed, n)
    X = isospectral_expansion(G, S)
    base = numeric_multiset(mp_eigvals(G.numeric_adjacency()))
    extra, missing = [], []
    for v, k in interior_counts(G, S).items():
        w = complex(G.loop_weight(v).constant_value()) if G.loop_weight(v) else 0j
        (extra if k > 1 else missing).extend([w] * abs(k - 1))
    want = (base | numeric_multiset(extra)) - numeric_multiset(missing)
    got = numeric_multiset(mp_eigvals(X.numeric_adjacency()))
    assert got.distance(want) <= 1e-6


def test_branch_sets_detect_a_changed_weight():
    H = corpus.load("fig6_H.json")
    edges = dict(H.edges)
    edges[("v1", "w2")] = edges[("v1", "w2")] * 2
    K = type(H)(H.vertices, edges)
    assert not branch_sets_isomorphic(H, K, ["v1", "v3"])
    assert branch_sets_isomorphic(H, isospectral_expansion(H, ["v1", "v3"]), ["v1", "v3"])


def test_fresh_names_are_deterministic():
    H = corpus.load("fig6_H.json")
    a = isospectral_expansion(H, ["v1", "v3"])
    assert a == isospectral_expansion(H, ["v3", "v1"])
    assert [v for v in a.vertices if v.startswith("w_")] == sorted(
        (v for v in a.vertices if v.startswith("w_")), key=a.vertices.index)
