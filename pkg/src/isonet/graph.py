"""Weighted digraphs with rational-function weights, structural sets and branches."""

from __future__ import annotations

import json
import os
from typing import Iterable, NamedTuple

import networkx as nx
import numpy as np

from .ratfunc import LAMBDA, ONE, ZERO, GaussianRational, ParseError, RationalFunction, parse

__all__ = [
    "WeightedDigraph",
    "StructuralCheck",
    "NotStructuralError",
    "vertex_cap",
    "is_structural_set",
    "is_complete_structural_set",
    "enumerate_branches",
    "branch_product",
    "restrict",
    "weight_sequence",
]

DEFAULT_MAX_VERTICES = 64


def vertex_cap() -> int:
    """Vertex cap for exhaustive operations; ``ISONET_MAX_VERTICES`` overrides it."""
    raw = os.environ.get("ISONET_MAX_VERTICES")
    return int(raw) if raw else DEFAULT_MAX_VERTICES


class NotStructuralError(ValueError):
    """Raised when a vertex set fails a structural-set test; carries the witness."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def _as_weight(a) -> RationalFunction:
    if isinstance(a, RationalFunction):
        return a
    if isinstance(a, str):
        return parse(a)
    if isinstance(a, (complex, np.complexfloating)):
        a = GaussianRational(complex(a))
    return RationalFunction.constant(a)


class WeightedDigraph:
    """Directed graph ``G = (V, E, w)`` with nonzero W[lambda] edge weights.

    ``vertices`` is an ordered tuple of unique labels.  ``edges`` maps
    ``(u, v)`` label pairs to :class:`RationalFunction` weights.  Instances
    are treated as immutable.
    """

    def __init__(self, vertices: Iterable, edges=None):
        self.vertices = tuple(str(v) for v in vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("vertex labels must be unique")
        self.index = {v: k for k, v in enumerate(self.vertices)}
        items = edges.items() if isinstance(edges, dict) else (edges or ())
        self.edges: dict[tuple[str, str], RationalFunction] = {}
        self._succ: dict[str, list[str]] = {v: [] for v in self.vertices}
        self._pred: dict[str, list[str]] = {v: [] for v in self.vertices}
        for (u, v), w in items:
            u, v = str(u), str(v)
            if u not in self.index or v not in self.index:
                raise ValueError(f"edge ({u}, {v}) references an unknown vertex")
            w = _as_weight(w)
            if not w:
                raise ValueError(f"edge ({u}, {v}) has zero weight; omit it instead")
            if (u, v) in self.edges:
                raise ValueError(f"duplicate edge ({u}, {v})")
            self.edges[(u, v)] = w
        for u, v in sorted(self.edges, key=lambda e: (self.index[e[0]], self.index[e[1]])):
            self._succ[u].append(v)
            self._pred[v].append(u)

    # basic queries

    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self):
        return hash((self.vertices, frozenset(self.edges.items())))

    def __repr__(self):
        return f"WeightedDigraph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    def weight(self, u: str, v: str) -> RationalFunction:
        return self.edges.get((u, v), ZERO)

    def loop_weight(self, v: str) -> RationalFunction:
        return self.edges.get((v, v), ZERO)

    def successors(self, v: str) -> list[str]:
        return self._succ[v]

    def predecessors(self, v: str) -> list[str]:
        return self._pred[v]

    def edge_weight_set(self) -> set[RationalFunction]:
        return set(self.edges.values())

    def is_complex_weighted(self) -> bool:
        return all(w.is_constant() for w in self.edges.values())

    def in_g_pi(self) -> bool:
        """True if every weight has ``deg(num) <= deg(den)``."""
        return all(w.pi() <= 0 for w in self.edges.values())

    def relabel(self, mapping: dict) -> WeightedDigraph:
        return WeightedDigraph([mapping.get(v, v) for v in self.vertices],
                               {(mapping.get(u, u), mapping.get(v, v)): w
                                for (u, v), w in self.edges.items()})

    def subset(self, S) -> list[str]:
        """Validate ``S`` and return it ordered as in ``self.vertices``."""
        S = {str(s) for s in S}
        bad = S - set(self.vertices)
        if bad:
            raise ValueError(f"unknown vertices {sorted(bad)}")
        return [v for v in self.vertices if v in S]

    # matrices

    def adjacency(self) -> list[list[RationalFunction]]:
        n = len(self.vertices)
        M = [[ZERO] * n for _ in range(n)]
        for (u, v), w in self.edges.items():
            M[self.index[u]][self.index[v]] = w
        return M

    def numeric_adjacency(self) -> np.ndarray:
        """Complex adjacency matrix; requires constant weights."""
        n = len(self.vertices)
        A = np.zeros((n, n), dtype=complex)
        for (u, v), w in self.edges.items():
            A[self.index[u], self.index[v]] = complex(w.constant_value())
        return A

    @classmethod
    def from_matrix(cls, A, labels=None) -> WeightedDigraph:
        """Graph whose weighted adjacency matrix is ``A``.

        Numeric entries are converted exactly (floats through their binary
        value).  Zero entries produce no edge.
        """
        n = len(A)
        labels = [f"v{k + 1}" for k in range(n)] if labels is None else list(labels)
        edges = {}
        for i in range(n):
            if len(A[i]) != n:
                raise ValueError("matrix must be square")
            for j in range(n):
                w = _as_weight(A[i][j])
                if w:
                    edges[(labels[i], labels[j])] = w
        return cls(labels, edges)

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.vertices)
        for (u, v), w in self.edges.items():
            g.add_edge(u, v, weight=w)
        return g

    # serialisation

    def to_dict(self) -> dict:
        order = sorted(self.edges, key=lambda e: (self.index[e[0]], self.index[e[1]]))
        return {
            "vertices": list(self.vertices),
            "edges": [{"from": u, "to": v, "w": str(self.edges[(u, v)])} for u, v in order],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: dict, _source: str | None = None) -> WeightedDigraph:
        if "vertices" not in data or "edges" not in data:
            raise ValueError("graph JSON needs 'vertices' and 'edges'")
        edges = {}
        cursor = 0
        for k, e in enumerate(data["edges"]):
            try:
                u, v, w = e["from"], e["to"], e.get("w", "1")
            except (KeyError, TypeError):
                raise ValueError(f"edge #{k} must have 'from', 'to' and 'w'") from None
            try:
                weight = parse(w) if isinstance(w, str) else RationalFunction.constant(w)
            except ParseError as err:
                if _source is not None:
                    raise _locate(err, _source, w, cursor) from None
                raise
            if _source is not None and isinstance(w, str):
                found = _source.find(json.dumps(w), cursor)
                cursor = found + 1 if found >= 0 else cursor
            if (u, v) in edges:
                raise ValueError(f"duplicate edge ({u}, {v})")
            edges[(u, v)] = weight
        return cls(data["vertices"], edges)

    @classmethod
    def from_json(cls, text: str) -> WeightedDigraph:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as err:
            raise ParseError(err.msg, text, line=err.lineno, column=err.colno) from None
        return cls.from_dict(data, _source=text)


def _locate(err: ParseError, source: str, w: str, cursor: int) -> ParseError:
    """Translate a weight-string error position into a file line/column."""
    at = source.find(json.dumps(w), cursor)
    if at < 0:
        return err
    start = at + 1  # skip the opening quote
    line = source.count("\n", 0, start) + 1
    col = start - (source.rfind("\n", 0, start) + 1) + 1
    return err.relocate(line, col)


class StructuralCheck(NamedTuple):
    ok: bool
    witness: object = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def _check_nonempty(G: WeightedDigraph, S) -> list[str]:
    S = G.subset(S)
    if not S:
        raise ValueError("a structural set must be nonempty")
    return S


def _cycle_outside(G: WeightedDigraph, S: set, include_loops: bool):
    """A cycle avoiding ``S`` (as a closed vertex tuple) or None."""
    rest = [v for v in G.vertices if v not in S]
    if include_loops:
        for v in rest:
            if (v, v) in G.edges:
                return (v, v)
    sub = nx.DiGraph()
    sub.add_nodes_from(rest)
    sub.add_edges_from((u, v) for (u, v) in G.edges if u != v and u not in S and v not in S)
    for comp in nx.strongly_connected_components(sub):
        if len(comp) > 1:
            cyc = nx.find_cycle(sub.subgraph(comp))
            path = [u for u, _ in cyc]
            return tuple(path + [path[0]])
    return None


def is_structural_set(G: WeightedDigraph, S) -> StructuralCheck:
    """Every non-loop cycle meets ``S`` and no loop off ``S`` has weight lambda."""
    S = set(_check_nonempty(G, S))
    cyc = _cycle_outside(G, S, include_loops=False)
    if cyc is not None:
        return StructuralCheck(False, cyc, "cycle avoiding S")
    for v in G.vertices:
        if v not in S and G.loop_weight(v) == LAMBDA:
            return StructuralCheck(False, v, "loop weight equals lambda")
    return StructuralCheck(True)


def is_complete_structural_set(G: WeightedDigraph, S) -> StructuralCheck:
    """Structural set meeting every cycle including loops, with every vertex on a branch."""
    Sl = _check_nonempty(G, S)
    S = set(Sl)
    cyc = _cycle_outside(G, S, include_loops=True)
    if cyc is not None:
        return StructuralCheck(False, cyc, "loop avoiding S" if len(cyc) == 2 and cyc[0] == cyc[1]
                               else "cycle avoiding S")
    covered = set()
    for branches in enumerate_branches(G, Sl).values():
        for b in branches:
            covered.update(b)
    for v in G.vertices:
        if v not in covered:
            return StructuralCheck(False, v, "vertex lies on no branch")
    return StructuralCheck(True)


def require_structural(G: WeightedDigraph, S, complete: bool = False) -> list[str]:
    check = (is_complete_structural_set if complete else is_structural_set)(G, S)
    if not check:
        kind = "complete structural" if complete else "structural"
        raise NotStructuralError(f"not a {kind} set: {check.reason} {check.witness}", check.witness)
    return G.subset(S)


def enumerate_branches(G: WeightedDigraph, S, max_vertices: int | None = None) -> dict:
    """All branches of ``G`` with respect to ``S``, keyed by endpoint pair.

    A branch is a tuple of labels; a loop at ``v`` in ``S`` is ``(v, v)``.
    Keys follow the order of ``S`` within ``G.vertices``; so do the branches
    under each key (depth-first, successors in vertex order).
    """
    cap = vertex_cap() if max_vertices is None else max_vertices
    if len(G) > cap:
        raise ValueError(f"graph has {len(G)} vertices, above the cap of {cap}")
    Sl = G.subset(S)
    Sset = set(Sl)
    out: dict[tuple[str, str], list[tuple[str, ...]]] = {}

    for s in Sl:
        found: list[tuple[str, ...]] = []
        path = [s]
        on_path = set()

        def dfs(v):
            for w in G.successors(v):
                if w in Sset:
                    found.append((s, s) if v == s == w else tuple(path) + (w,))
                elif w not in on_path and w != v:
                    path.append(w)
                    on_path.add(w)
                    dfs(w)
                    path.pop()
                    on_path.discard(w)

        dfs(s)
        for b in found:
            out.setdefault((b[0], b[-1]), []).append(b)
    order = {v: k for k, v in enumerate(G.vertices)}
    return {key: out[key] for key in sorted(out, key=lambda e: (order[e[0]], order[e[1]]))}


def branch_product(G: WeightedDigraph, b) -> RationalFunction:
    """``w(e12) * prod_{i=2}^{m-1} w(e_{i,i+1}) / (lambda - w(e_ii))``."""
    b = tuple(b)
    if len(b) == 1:
        return G.loop_weight(b[0])
    if len(b) == 2:
        return G.weight(b[0], b[1])
    out = G.weight(b[0], b[1])
    for k in range(1, len(b) - 1):
        loop = G.loop_weight(b[k])
        if loop == LAMBDA:
            raise ValueError(f"undefined branch product: loop at {b[k]} has weight lambda")
        out = out * G.weight(b[k], b[k + 1]) / (LAMBDA - loop)
    return out


def restrict(G: WeightedDigraph, S) -> WeightedDigraph:
    """Induced subgraph on the complement of ``S``."""
    S = set(G.subset(S))
    keep = [v for v in G.vertices if v not in S]
    ks = set(keep)
    return WeightedDigraph(keep, {e: w for e, w in G.edges.items() if e[0] in ks and e[1] in ks})


def weight_sequence(G: WeightedDigraph, b) -> tuple[RationalFunction, ...]:
    """Edge weights along ``b`` interleaved with interior loop weights (0 if absent)."""
    b = tuple(b)
    if len(b) == 1 or (len(b) == 2 and b[0] == b[1]):
        return (G.loop_weight(b[0]),)
    seq = [G.weight(b[0], b[1])]
    for k in range(1, len(b) - 1):
        seq.append(G.loop_weight(b[k]))
        seq.append(G.weight(b[k], b[k + 1]))
    return tuple(seq)


def unit_graph(vertices, edges) -> WeightedDigraph:
    """Graph with every listed edge of weight 1."""
    return WeightedDigraph(vertices, {(u, v): ONE for u, v in edges})
