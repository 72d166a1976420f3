"""Weight-preserving isospectral transformations: branch-set comparison and expansion."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .graph import WeightedDigraph, enumerate_branches, require_structural, weight_sequence
from .ratfunc import DEFAULT_PAIRING_TOL, LAMBDA, RationalFunction, SpectrumMultiset
from .reduce import characteristic_function, spectrum

__all__ = [
    "branch_sets_isomorphic",
    "isospectral_expansion",
    "interior_counts",
    "verify_expansion_determinant",
    "ExpansionReport",
]


def _sequence_key(seq) -> tuple:
    return tuple(str(w) for w in seq)


def branch_sets_isomorphic(G: WeightedDigraph, H: WeightedDigraph, S) -> bool:
    """Compare the weight sequences of the branches of ``G`` and ``H`` over ``S``, per endpoint pair."""
    Sg = require_structural(G, S)
    Sh = require_structural(H, S)
    if set(Sg) != set(Sh):
        return False
    bg, bh = enumerate_branches(G, Sg), enumerate_branches(H, Sh)
    if set(bg) != set(bh):
        return False
    for key, branches in bg.items():
        left = Counter(_sequence_key(weight_sequence(G, b)) for b in branches)
        right = Counter(_sequence_key(weight_sequence(H, b)) for b in bh[key])
        if left != right:
            return False
    return True


def isospectral_expansion(G: WeightedDigraph, S) -> WeightedDigraph:
    """Expand ``G`` so each branch over ``S`` becomes its own path with fresh interior vertices.

    Fresh vertices are named ``w_<i>_<j>_<k>``: ``i`` and ``j`` are the
    1-based positions of the branch endpoints in ``G.vertices`` and ``k``
    counts interior vertices consecutively over the branches from i to j.
    """
    Sl = require_structural(G, S)
    pos = {v: k + 1 for k, v in enumerate(G.vertices)}
    vertices = list(Sl)
    edges: dict[tuple[str, str], RationalFunction] = {}
    for (s, t), branches in enumerate_branches(G, Sl).items():
        k = 0
        for b in branches:
            if len(b) == 2:
                edges[(s, t)] = G.weight(s, t)
                continue
            fresh = []
            for u in b[1:-1]:
                k += 1
                w = f"w_{pos[s]}_{pos[t]}_{k}"
                fresh.append(w)
                vertices.append(w)
                loop = G.loop_weight(u)
                if loop:
                    edges[(w, w)] = loop
            chain = [s, *fresh, t]
            for (a, b2), (x, y) in zip(zip(chain, chain[1:]), zip(b, b[1:])):
                edges[(a, b2)] = G.weight(x, y)
    return WeightedDigraph(vertices, edges)


def interior_counts(G: WeightedDigraph, S) -> dict[str, int]:
    """Number of branches over ``S`` passing through each vertex outside ``S``."""
    Sl = require_structural(G, S)
    counts = {v: 0 for v in G.vertices if v not in set(Sl)}
    for branches in enumerate_branches(G, Sl).values():
        for b in branches:
            for u in b[1:-1]:
                counts[u] += 1
    return counts


@dataclass
class ExpansionReport:
    expanded: RationalFunction
    predicted: RationalFunction
    spectrum_expanded: SpectrumMultiset
    spectrum_predicted: SpectrumMultiset
    spectrum_distance: float
    tol: float

    @property
    def determinant_identity(self) -> bool:
        return self.expanded == self.predicted

    @property
    def passed(self) -> bool:
        return self.determinant_identity and self.spectrum_distance <= self.tol

    def to_dict(self) -> dict:
        return {
            "det_expanded": str(self.expanded),
            "det_predicted": str(self.predicted),
            "determinant_identity": self.determinant_identity,
            "spectrum_expanded": str(self.spectrum_expanded),
            "spectrum_predicted": str(self.spectrum_predicted),
            "spectrum_distance": self.spectrum_distance,
            "passed": self.passed,
        }


def verify_expansion_determinant(G: WeightedDigraph, S, tol: float = DEFAULT_PAIRING_TOL
                                 ) -> ExpansionReport:
    """Check the expansion determinant identity and the induced spectrum relation.

    ``det(M(X) - lambda I)`` should equal ``det(M(G) - lambda I)`` times
    ``(w_ii - lambda) ** (n_i - 1)`` over the vertices outside ``S``, where
    ``n_i`` counts the branches through ``v_i``.
    """
    X = isospectral_expansion(G, S)
    counts = interior_counts(G, S)
    predicted = characteristic_function(G)
    extra, missing = [], []
    for v, n in counts.items():
        loop = G.loop_weight(v)
        predicted = predicted * (loop - LAMBDA) ** (n - 1)
        if loop.is_constant():
            target = extra if n > 1 else missing
            target.extend([complex(loop.constant_value())] * abs(n - 1))
    expanded = characteristic_function(X)
    sx = spectrum(X, pairing_tol=tol)[0]
    sg = spectrum(G, pairing_tol=tol)[0]
    sp = (sg | SpectrumMultiset.from_values(extra, tol)) - SpectrumMultiset.from_values(missing, tol)
    return ExpansionReport(expanded, predicted, sx, sp, sx.distance(sp), tol)
