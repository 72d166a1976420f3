"""Isospectral reduction, spectra of W[lambda] matrices and spectral equivalence."""

from __future__ import annotations

import os
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from functools import reduce as _fold

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher

from .graph import (
    WeightedDigraph,
    branch_product,
    enumerate_branches,
    require_structural,
    restrict,
)
from .ratfunc import (
    DEFAULT_PAIRING_TOL,
    DEFAULT_TOL,
    LAMBDA,
    ONE,
    ZERO,
    Polynomial,
    RationalFunction,
    SpectrumMultiset,
    poly_roots,
)

__all__ = [
    "determinant",
    "characteristic_function",
    "spectrum",
    "reduce_once",
    "verify_reduction_spectrum",
    "reduce_to",
    "graph_isomorphic",
    "cycle_counts",
    "cycle_count_rule_tau",
    "spectrally_equivalent",
    "NotInGPiError",
]

DEFAULT_ISO_CAP = 10
DEFAULT_CYCLE_CAP = 200_000


class NotInGPiError(ValueError):
    pass


# determinants


def _poly_lcm(a: Polynomial, b: Polynomial) -> Polynomial:
    return (a * b).exact_div(a.gcd(b)).monic()


def _bareiss(M: list[list[Polynomial]]) -> Polynomial:
    """Fraction-free Gaussian elimination over the polynomial ring."""
    n = len(M)
    if n == 0:
        return Polynomial.constant(1)
    M = [row[:] for row in M]
    sign = 1
    prev = Polynomial.constant(1)
    for k in range(n - 1):
        if not M[k][k]:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return Polynomial()
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        pivot = M[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * pivot - M[i][k] * M[k][j]).exact_div(prev)
            M[i][k] = Polynomial()
        prev = pivot
    det = M[n - 1][n - 1]
    return -det if sign < 0 else det


def determinant(M: list[list[RationalFunction]]) -> RationalFunction:
    """Exact determinant of a square matrix over W[lambda].

    Each row is scaled by the lcm of its denominators so elimination runs
    on polynomials; the scale factors divide out at the end.
    """
    n = len(M)
    rows, scale = [], Polynomial.constant(1)
    for row in M:
        if len(row) != n:
            raise ValueError("matrix must be square")
        d = _fold(_poly_lcm, (w.den for w in row), Polynomial.constant(1))
        rows.append([w.num * d.exact_div(w.den) for w in row])
        scale = scale * d
    return RationalFunction(_bareiss(rows), scale)


def characteristic_function(G: WeightedDigraph) -> RationalFunction:
    """``det(M(G) - lambda I)`` as a canonical rational function."""
    M = G.adjacency()
    for k in range(len(M)):
        M[k][k] = M[k][k] - LAMBDA
    return determinant(M)


def spectrum(G: WeightedDigraph, tol: float = DEFAULT_TOL,
             pairing_tol: float = DEFAULT_PAIRING_TOL) -> tuple[SpectrumMultiset, SpectrumMultiset]:
    """Spectrum and inverse spectrum of ``G``."""
    det = characteristic_function(G)
    P = poly_roots(det.num, tol, pairing_tol)
    Q = poly_roots(det.den, tol, pairing_tol)
    return P - Q, Q - P


# reduction


def reduce_once(G: WeightedDigraph, S) -> WeightedDigraph:
    """Isospectral reduction of ``G`` over the structural set ``S``."""
    Sl = require_structural(G, S)
    edges = {}
    for key, branches in enumerate_branches(G, Sl).items():
        mu = sum((branch_product(G, b) for b in branches), ZERO)
        if mu:
            edges[key] = mu
    return WeightedDigraph(Sl, edges)


@dataclass
class ReductionSpectrumReport:
    reduced: SpectrumMultiset
    predicted: SpectrumMultiset
    distance: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.distance <= self.tol

    def to_dict(self) -> dict:
        return {"reduced": str(self.reduced), "predicted": str(self.predicted),
                "distance": self.distance, "passed": self.passed}


def verify_reduction_spectrum(G: WeightedDigraph, S, tol: float = DEFAULT_PAIRING_TOL) -> ReductionSpectrumReport:
    """Compare ``sigma(R_S(G))`` with the spectrum predicted from ``G`` and ``G|S-bar``."""
    R = reduce_once(G, S)
    sg, sg_inv = spectrum(G, pairing_tol=tol)
    sr, sr_inv = spectrum(restrict(G, S), pairing_tol=tol)
    predicted = (sg | sr_inv) - (sr | sg_inv)
    reduced = spectrum(R, pairing_tol=tol)[0]
    return ReductionSpectrumReport(reduced, predicted, reduced.distance(predicted), tol)


def reduce_to(G: WeightedDigraph, keep, order: Iterable | None = None) -> WeightedDigraph:
    """Sequential reduction of a graph in G_pi onto ``keep``.

    Vertices outside ``keep`` are removed one at a time, by default in
    ascending vertex index; ``order`` overrides that.
    """
    if not G.in_g_pi():
        raise NotInGPiError("not in G_pi; sequential reduction not guaranteed")
    keep = set(G.subset(keep))
    if not keep:
        raise ValueError("cannot reduce onto an empty vertex set")
    drop = [v for v in G.vertices if v not in keep] if order is None else [str(v) for v in order]
    if set(drop) != set(G.vertices) - keep or len(drop) != len(set(drop)):
        raise ValueError("removal order must list each vertex outside the target exactly once")
    H = G
    for v in drop:
        H = reduce_once(H, [u for u in H.vertices if u != v])
    return H


# isomorphism and equivalence


@dataclass
class IsomorphismResult:
    isomorphic: bool
    mapping: dict | None = None

    def __bool__(self):
        return self.isomorphic


def _iso_cap() -> int:
    raw = os.environ.get("ISONET_MAX_ISO_VERTICES")
    return int(raw) if raw else DEFAULT_ISO_CAP


def graph_isomorphic(G1: WeightedDigraph, G2: WeightedDigraph,
                     max_vertices: int | None = None) -> IsomorphismResult:
    """Exact weight-preserving isomorphism, loops included."""
    cap = _iso_cap() if max_vertices is None else max_vertices
    if max(len(G1), len(G2)) > cap:
        raise ValueError(f"isomorphism search is capped at {cap} vertices")
    if len(G1) != len(G2) or sorted(map(str, G1.edges.values())) != sorted(map(str, G2.edges.values())):
        return IsomorphismResult(False)
    gm = DiGraphMatcher(G1.to_networkx(), G2.to_networkx(),
                        edge_match=lambda a, b: a["weight"] == b["weight"])
    for mapping in gm.isomorphisms_iter():
        return IsomorphismResult(True, dict(mapping))
    return IsomorphismResult(False)


def cycle_counts(G: WeightedDigraph, max_cycles: int = DEFAULT_CYCLE_CAP) -> dict[str, int]:
    """Number of simple cycles, loops included, through each vertex."""
    counts = dict.fromkeys(G.vertices, 0)
    for k, cyc in enumerate(nx.simple_cycles(G.to_networkx())):
        if k >= max_cycles:
            raise ValueError(f"more than {max_cycles} simple cycles; raise the cap")
        for v in cyc:
            counts[v] += 1
    return counts


def cycle_count_rule_tau(G: WeightedDigraph, max_cycles: int = DEFAULT_CYCLE_CAP) -> list[str]:
    """Vertices lying on at least half as many cycles as the busiest vertex."""
    if not len(G):
        raise ValueError("the cycle-count rule needs a nonempty graph")
    c = cycle_counts(G, max_cycles)
    cmax = max(c.values())
    return [v for v in G.vertices if 2 * c[v] >= cmax]


RULES: dict[str, Callable[[WeightedDigraph], list[str]]] = {"cycle-count": cycle_count_rule_tau}


def _resolve_rule(rule):
    if callable(rule):
        return rule
    try:
        return RULES[rule]
    except KeyError:
        raise ValueError(f"unknown rule {rule!r}; known: {sorted(RULES)}") from None


def spectrally_equivalent(G: WeightedDigraph, H: WeightedDigraph, rule="cycle-count") -> bool:
    """True if the rule-selected reductions of ``G`` and ``H`` are isomorphic."""
    rule = _resolve_rule(rule)
    RG = reduce_to(G, rule(G))
    RH = reduce_to(H, rule(H))
    return graph_isomorphic(RG, RH).isomorphic
