"""Random instance generators and independent oracles shared by the tests."""

from __future__ import annotations

import itertools
from fractions import Fraction

import mpmath
import networkx as nx
import numpy as np

from isonet.graph import WeightedDigraph
from isonet.ratfunc import SpectrumMultiset, parse

SMALL_WEIGHTS = [-2, -1, 1, 2, 3, Fraction(1, 2)]
GPI_WEIGHTS = ["1", "-1", "2", "1/l", "1/(l-1)", "l/(l+1)", "(l-2)/(l^2+1)"]


def labels(n):
    return [f"v{k + 1}" for k in range(n)]


def random_graph(rng, n, density=0.4, weights=SMALL_WEIGHTS, loops=True) -> WeightedDigraph:
    V = labels(n)
    edges = {}
    for u, v in itertools.product(V, V):
        if u == v and not loops:
            continue
        if rng.random() < density:
            w = weights[rng.integers(len(weights))]
            edges[(u, v)] = parse(w) if isinstance(w, str) else w
    return WeightedDigraph(V, edges)


def feedback_cover(G: WeightedDigraph, S) -> list[str]:
    """Grow ``S`` until every non-loop cycle meets it."""
    S = set(S)
    while True:
        rest = G.to_networkx().subgraph([v for v in G.vertices if v not in S])
        cyc = next((c for c in nx.simple_cycles(rest) if len(c) > 1), None)
        if cyc is None:
            return [v for v in G.vertices if v in S]
        S.add(min(cyc, key=G.index.get))


def mp_eigvals(A, dps=60) -> list[complex]:
    """Eigenvalues by mpmath at high precision, immune to defective-block smearing."""
    with mpmath.workdps(dps):
        M = mpmath.matrix([[mpmath.mpc(complex(x)) for x in row] for row in np.asarray(A)])
        if M.rows == 0:
            return []
        E = mpmath.eig(M, left=False, right=False)
        E = E[0] if isinstance(E, tuple) else E
        return [complex(e) for e in E]


def numeric_multiset(values, tol=1e-6) -> SpectrumMultiset:
    return SpectrumMultiset.from_values(values, pairing_tol=tol)


def cofactor_det(M):
    """Laplace expansion along the first row; exponential but obviously correct."""
    n = len(M)
    if n == 0:
        return parse("1")
    if n == 1:
        return M[0][0]
    total = parse("0")
    for j in range(n):
        if not M[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * cofactor_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def brute_cycle_counts(G: WeightedDigraph) -> dict[str, int]:
    """Count simple cycles through each vertex by DFS from each minimal start."""
    counts = dict.fromkeys(G.vertices, 0)
    idx = {v: k for k, v in enumerate(G.vertices)}

    def walk(start, v, path):
        for w in G.successors(v):
            if w == start:
                for u in path:
                    counts[u] += 1
            elif idx[w] > idx[start] and w not in path:
                walk(start, w, path + [w])

    for s in G.vertices:
        walk(s, s, [s])
    return counts


def st0_matrix(rng, n, complex_weights=True):
    """Random matrix whose graph has a complete structural set; returns (A, S)."""
    V = labels(n)
    k = int(rng.integers(1, n)) if n > 1 else 1
    perm = list(rng.permutation(n))
    S_idx, T_idx = sorted(perm[:k]), perm[k:]
    A = np.zeros((n, n), dtype=complex)

    def draw():
        re, im = rng.normal(size=2)
        return complex(re, im) if complex_weights else complex(re, 0)

    for i in S_idx:
        for j in S_idx:
            if rng.random() < 0.4:
                A[i, j] = draw()
    # off-S vertices: acyclic among themselves along T_idx order, zero diagonal
    for a, i in enumerate(T_idx):
        for j in T_idx[a + 1:]:
            if rng.random() < 0.3:
                A[i, j] = draw()
        A[S_idx[rng.integers(k)], i] = draw()
        A[i, S_idx[rng.integers(k)]] = draw()
    for i in S_idx:
        if not (A[i].any() and A[:, i].any()):
            A[i, i] = draw()
    return A, [V[i] for i in S_idx]
