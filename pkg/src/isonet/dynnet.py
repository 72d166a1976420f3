"""Dynamical networks: Lipschitz matrices, stability certificates, expansions, simulation."""

from __future__ import annotations

import itertools
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from .expr import ALPHA, coord, compile_expr, diff_expr, free_coords, parse_expression, to_text
from .graph import WeightedDigraph, enumerate_branches, is_complete_structural_set, unit_graph
from .graph import NotStructuralError
from .ratfunc import ParseError

__all__ = [
    "DynamicalNetwork",
    "interaction_graph",
    "lipschitz_matrix",
    "local_lipschitz_constants",
    "stability_matrix",
    "spectral_radius",
    "certify_stability",
    "StabilityCertificate",
    "admissible_sequences",
    "expand_network",
    "simulate",
    "SimulationReport",
]

log = logging.getLogger(__name__)

DEFAULT_GRID = 64
MAX_SAMPLES = 1_000_000


@dataclass(frozen=True)
class DynamicalNetwork:
    """A network ``F o T`` on a box ``X``.

    ``coords`` orders the coordinates.  ``components[c]`` is the interaction
    component producing coordinate ``c``; ``local_maps[c]`` (optional) is the
    local map applied to ``c`` before the interaction.  ``local_lipschitz``
    supplies ``L_c`` when known.
    """

    coords: tuple
    components: dict
    domains: dict
    local_maps: dict = field(default_factory=dict)
    local_lipschitz: dict = field(default_factory=dict)
    alpha: float | None = None
    alpha_range: tuple | None = None

    def __post_init__(self):
        known = set(self.coords)
        if len(known) != len(self.coords):
            raise ValueError("coordinate names must be unique")
        if set(self.components) != known:
            raise ValueError("every coordinate needs exactly one component")
        for c, (lo, hi) in self.domains.items():
            if not lo <= hi:
                raise ValueError(f"empty domain for {c}")
        if set(self.domains) != known:
            raise ValueError("every coordinate needs a domain")
        for c, e in self.components.items():
            bad = set(free_coords(e)) - known
            if bad:
                raise ValueError(f"component {c} reads unknown coordinates {sorted(bad)}")
        for c, e in self.local_maps.items():
            if c not in known or set(free_coords(e)) - {c}:
                raise ValueError(f"local map for {c} may only read {c}")

    # construction

    @classmethod
    def from_dict(cls, data: dict) -> DynamicalNetwork:
        comps = data.get("components")
        if not isinstance(comps, dict) or not comps:
            raise ValueError("network JSON needs a nonempty 'components' object")
        coords = tuple(data.get("coords", list(comps)))
        components = {}
        for c in coords:
            try:
                components[c] = parse_expression(str(comps[c]), coords)
            except ParseError as err:
                raise ParseError(f"component {c}: {str(err).rsplit(' at line ', 1)[0]}",
                                 err.text, line=err.line, column=err.column) from None
        dom = data.get("domains", {})
        default = dom.get("*", [0, 1]) if isinstance(dom, dict) else [0, 1]
        domains = {c: tuple(float(v) for v in dom.get(c, default)) for c in coords}
        local_maps = {c: parse_expression(str(t), [c]) for c, t in data.get("local_maps", {}).items()}
        ar = data.get("alpha_range")
        return cls(coords, components, domains, local_maps,
                   {c: float(v) for c, v in data.get("local_lipschitz", {}).items()},
                   data.get("alpha"), tuple(ar) if ar is not None else None)

    @classmethod
    def from_json(cls, text: str) -> DynamicalNetwork:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as err:
            raise ParseError(err.msg, text, line=err.lineno, column=err.colno) from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        out = {
            "coords": list(self.coords),
            "components": {c: to_text(self.components[c]) for c in self.coords},
            "domains": {c: list(self.domains[c]) for c in self.coords},
        }
        if self.local_maps:
            out["local_maps"] = {c: to_text(e) for c, e in self.local_maps.items()}
        if self.local_lipschitz:
            out["local_lipschitz"] = dict(self.local_lipschitz)
        if self.alpha is not None:
            out["alpha"] = self.alpha
        if self.alpha_range is not None:
            out["alpha_range"] = list(self.alpha_range)
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def with_alpha(self, alpha: float | None) -> DynamicalNetwork:
        return self if alpha is None else DynamicalNetwork(
            self.coords, self.components, self.domains, self.local_maps,
            self.local_lipschitz, alpha, self.alpha_range)

    # views

    def reads(self, c: str) -> list[str]:
        """Coordinates read by component ``c``, in coordinate order."""
        names = set(free_coords(self.components[c]))
        return [x for x in self.coords if x in names]

    def vertex(self, c: str) -> str:
        return "v" + c[1:] if c.startswith("x") and len(c) > 1 else c

    def coord_of(self, label: str) -> str:
        """Coordinate name for a vertex label or coordinate name."""
        if label in self.components:
            return label
        for c in self.coords:
            if self.vertex(c) == label:
                return c
        raise ValueError(f"unknown coordinate or vertex {label!r}")

    def as_interaction(self) -> DynamicalNetwork:
        """The same network with local maps folded into the components."""
        if not self.local_maps:
            return self
        sub = {coord(c): t for c, t in self.local_maps.items()}
        comps = {c: e.xreplace(sub) for c, e in self.components.items()}
        return DynamicalNetwork(self.coords, comps, self.domains, alpha=self.alpha,
                                alpha_range=self.alpha_range)

    def _alpha(self, alpha):
        a = self.alpha if alpha is None else alpha
        uses = any(ALPHA in e.free_symbols for e in
                   itertools.chain(self.components.values(), self.local_maps.values()))
        if uses and a is None:
            raise ValueError("network depends on alpha; pass --alpha or set 'alpha'")
        return a

    def step_function(self, alpha: float | None = None):
        """Vectorised map ``x -> F(T(x))`` over arrays of shape ``(..., n)``."""
        a = self._alpha(alpha)
        net = self.as_interaction()
        fs = [compile_expr(net.components[c], list(self.coords), a) for c in self.coords]

        def step(x):
            x = np.asarray(x, dtype=float)
            cols = [x[..., k] for k in range(len(self.coords))]
            return np.stack([f(*cols) for f in fs], axis=-1)

        return step


def interaction_graph(net: DynamicalNetwork) -> WeightedDigraph:
    """Unit-weight graph with an edge ``v_i -> v_j`` when component ``j`` reads ``x_i``."""
    V = [net.vertex(c) for c in net.coords]
    E = [(net.vertex(i), net.vertex(j)) for j in net.coords for i in net.reads(j)]
    return unit_graph(V, E)


# Lipschitz data


def _grid_max(e: sp.Expr, domains: dict, grid_n: int, alpha) -> float:
    """Max of ``|e|`` over a uniform grid on the box spanned by its variables."""
    names = free_coords(e)
    if not names:
        return abs(float(e.subs(ALPHA, alpha) if alpha is not None else e))
    n = grid_n
    while (n + 1) ** len(names) > MAX_SAMPLES and n > 1:
        n //= 2
    if n != grid_n:
        log.info("grid reduced from %d to %d subdivisions for %d variables", grid_n, n, len(names))
    for c in names:
        lo, hi = domains[c]
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError(f"domain of {c} is unbounded; grid maxima need a bounded box")
    axes = [np.linspace(*domains[c], n + 1) for c in names]
    mesh = np.meshgrid(*axes, indexing="ij", sparse=True)
    vals = compile_expr(e, names, alpha)(*mesh)
    return float(np.max(np.abs(vals)))


def lipschitz_matrix(net: DynamicalNetwork, grid_n: int = DEFAULT_GRID,
                     alpha: float | None = None, include_local: bool = False) -> np.ndarray:
    """``Lambda[i, j] = max |d F_j / d x_i|`` over a grid, zero when ``j`` does not read ``i``.

    ``grid_n`` counts subdivisions per axis, so doubling it refines the
    grid and never lowers an entry.  With ``include_local`` the local maps
    are folded in first (the network viewed as a bare interaction).
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    a = net._alpha(alpha)
    src = net.as_interaction() if include_local else net
    idx = {c: k for k, c in enumerate(net.coords)}
    L = np.zeros((len(net.coords), len(net.coords)))
    for j in net.coords:
        e = src.components[j]
        for i in free_coords(e):
            L[idx[i], idx[j]] = _grid_max(diff_expr(e, i), net.domains, grid_n, a)
    return L


def local_lipschitz_constants(net: DynamicalNetwork, grid_n: int = DEFAULT_GRID,
                              alpha: float | None = None) -> np.ndarray:
    """``L_i``: supplied values, else the grid max of ``|T_i'|``, else 1 (no local map)."""
    a = net._alpha(alpha)
    out = np.ones(len(net.coords))
    for k, c in enumerate(net.coords):
        if c in net.local_lipschitz:
            out[k] = net.local_lipschitz[c]
        elif c in net.local_maps:
            out[k] = _grid_max(diff_expr(net.local_maps[c], c), net.domains, grid_n * 16, a)
    return out


def stability_matrix(net: DynamicalNetwork, grid_n: int = DEFAULT_GRID,
                     alpha: float | None = None) -> np.ndarray:
    """``M_F = Lambda^T diag(L)``."""
    lam = lipschitz_matrix(net, grid_n, alpha)
    return lam.T * local_lipschitz_constants(net, grid_n, alpha)[None, :]


def spectral_radius(M, tol: float = 1e-10, max_iter: int = 100_000) -> float:
    """Spectral radius; Collatz-Wielandt power iteration for nonnegative input.

    Iterating on ``M + I`` keeps periodic (imprimitive) matrices from
    oscillating.  If the bracket does not close, fall back to a dense
    eigenvalue solve.
    """
    M = np.asarray(M, dtype=complex if np.iscomplexobj(M) else float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("spectral radius needs a square matrix")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    n = M.shape[0]
    if n == 0:
        return 0.0
    if np.iscomplexobj(M) or (M < 0).any():
        return float(np.max(np.abs(np.linalg.eigvals(M))))
    B = M + np.eye(n)
    x = np.ones(n)
    for _ in range(max_iter):
        y = B @ x
        ratios = y / x
        lo, hi = ratios.min(), ratios.max()
        if hi - lo <= tol * max(1.0, hi):
            return float(0.5 * (lo + hi) - 1.0)
        x = y / y.max()
        if x.min() <= 1e-300:
            break
    log.debug("power iteration did not bracket the Perron root; using eigvals")
    return float(np.max(np.abs(np.linalg.eigvals(M))))


@dataclass
class StabilityCertificate:
    verdict: str
    rho: float
    alpha: float | None
    grid_n: int

    @property
    def stable(self) -> bool:
        return self.verdict == "stable"

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "rho": self.rho, "alpha": self.alpha, "grid": self.grid_n}


def certify_stability(net: DynamicalNetwork, grid_n: int = DEFAULT_GRID,
                      alpha: float | None = None) -> StabilityCertificate:
    """``stable`` if ``rho(M_F) < 1``; otherwise ``inconclusive`` (never ``unstable``)."""
    a = net._alpha(alpha)
    rho = spectral_radius(stability_matrix(net, grid_n, a))
    return StabilityCertificate("stable" if rho < 1 else "inconclusive", rho, a, grid_n)


# expansion


def _require_complete(net: DynamicalNetwork, S) -> tuple[WeightedDigraph, list[str]]:
    G = interaction_graph(net)
    labels = [net.vertex(net.coord_of(s)) for s in S]
    check = is_complete_structural_set(G, labels)
    if not check:
        raise NotStructuralError(
            f"not a complete structural set: {check.reason} {check.witness}", check.witness)
    return G, G.subset(labels)


def admissible_sequences(net: DynamicalNetwork, S) -> list[tuple[str, ...]]:
    """Coordinate sequences of the branches over ``S`` with more than two vertices."""
    G, Sl = _require_complete(net, S)
    back = {net.vertex(c): c for c in net.coords}
    return [tuple(back[v] for v in b)
            for branches in enumerate_branches(G, Sl).values()
            for b in branches if len(b) > 2]


def sequence_name(seq, coords) -> str:
    """``x141`` style name when every coordinate is ``x<digit>``, else ``x1_4_1``."""
    suffix = [c[1:] if c.startswith("x") and len(c) > 1 else c for c in seq]
    if all(c.startswith("x") and len(c) == 2 and c[1].isdigit() for c in coords):
        return "x" + "".join(suffix)
    return "x" + "_".join(suffix)


def expand_network(net: DynamicalNetwork, S) -> DynamicalNetwork:
    """Dynamical network expansion over a complete structural set ``S``.

    Components for ``S`` are obtained by substituting the upstream
    components until every variable is indexed by a sequence starting in
    ``S``; each admissible sequence gets a chain of delay coordinates
    copying its first coordinate forward.  Local maps are folded in first.
    """
    base = net.as_interaction()
    G, Sl = _require_complete(base, S)
    S_coords = [c for c in base.coords if base.vertex(c) in set(Sl)]
    in_S = set(S_coords)
    depth_cap = len(base.coords)

    def name(seq):
        return sequence_name(seq, base.coords)

    components, sequences = {}, {}
    for j in S_coords:
        e = base.components[j].xreplace(
            {coord(i): coord(name((i, j))) for i in base.reads(j) if i not in in_S})
        pending = {name((i, j)): (i, j) for i in base.reads(j) if i not in in_S}
        depth = 0
        while pending:
            depth += 1
            if depth > depth_cap:
                raise RuntimeError("substitution did not terminate; is S complete?")
            sub, nxt = {}, {}
            for nm, seq in pending.items():
                head = seq[0]
                if head in in_S:
                    sequences[nm] = seq
                    continue
                repl = {}
                for k in base.reads(head):
                    new = (k,) + seq
                    repl[coord(k)] = coord(name(new))
                    nxt[name(new)] = new
                sub[coord(nm)] = base.components[head].xreplace(repl)
            e = e.xreplace(sub)
            pending = nxt
        components[j] = e

    order = {c: k for k, c in enumerate(base.coords)}
    chains = sorted(sequences.values(), key=lambda s: (order[s[0]], order[s[-1]], [order[c] for c in s]))
    coords = list(S_coords)
    domains = {c: base.domains[c] for c in S_coords}
    for seq in chains:
        final = name(seq)
        n_delay = len(seq) - 2
        names = [f"{final}d{i}" for i in range(2, n_delay + 1)] + [final]
        prev = seq[0]
        for nm in names:
            coords.append(nm)
            components[nm] = coord(prev)
            domains[nm] = base.domains[seq[0]]
            prev = nm
    return DynamicalNetwork(tuple(coords), components, domains,
                            alpha=net.alpha, alpha_range=net.alpha_range)


# simulation


@dataclass
class SimulationReport:
    trajectory: np.ndarray
    gaps: np.ndarray
    converged: bool
    steps: int
    fixed_point: np.ndarray
    distance_to_fixed_point: np.ndarray

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "steps": self.steps,
            "final_gap": float(self.gaps[-1]) if len(self.gaps) else 0.0,
            "fixed_point": self.fixed_point.tolist(),
            "gaps": self.gaps.tolist(),
        }


def simulate(net: DynamicalNetwork, x0, steps: int = 500, alpha: float | None = None,
             tol: float = 1e-12, stop_early: bool = True) -> SimulationReport:
    """Iterate ``x -> F(T(x))`` and report sup-metric gaps between iterates.

    The last iterate serves as the empirical fixed point.  Iteration stops
    once a gap falls to ``tol`` or below, unless ``stop_early`` is false.
    """
    x = np.asarray(x0, dtype=float)
    if x.shape != (len(net.coords),):
        raise ValueError(f"x0 must have {len(net.coords)} entries")
    for c, v in zip(net.coords, x):
        lo, hi = net.domains[c]
        if not lo <= v <= hi:
            raise ValueError(f"x0[{c}] = {v} lies outside [{lo}, {hi}]")
    step = net.step_function(alpha)
    traj, gaps = [x], []
    for _ in range(steps):
        y = step(x)
        gaps.append(float(np.max(np.abs(y - x))) if len(x) else 0.0)
        traj.append(y)
        x = y
        if stop_early and gaps[-1] <= tol:
            break
    traj = np.array(traj)
    fixed = traj[-1]
    dist = np.max(np.abs(traj - fixed), axis=1) if len(fixed) else np.zeros(len(traj))
    gaps = np.array(gaps)
    return SimulationReport(traj, gaps, bool(len(gaps) and gaps[-1] < 1e-8), len(gaps), fixed, dist)
