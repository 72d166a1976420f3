"""Bundled example inputs and the checks behind ``isonet verify``."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .dynnet import (
    DynamicalNetwork,
    certify_stability,
    expand_network,
    interaction_graph,
    lipschitz_matrix,
    spectral_radius,
)
from .expr import parse_expression
from .gersh import classic_region, radius_bound, reduced_region
from .graph import WeightedDigraph, is_complete_structural_set, is_structural_set
from .ratfunc import SpectrumMultiset, parse
from .reduce import (
    characteristic_function,
    cycle_count_rule_tau,
    graph_isomorphic,
    reduce_once,
    reduce_to,
    spectrally_equivalent,
    spectrum,
)
from .transform import isospectral_expansion, verify_expansion_determinant

__all__ = ["bundled_names", "bundled_path", "load", "load_text", "CHECKS", "run_checks", "Check"]


def bundled_names() -> list[str]:
    root = resources.files("isonet") / "data"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def bundled_path(name: str):
    root = resources.files("isonet") / "data"
    base = Path(name).name
    for cand in (base, base + ".json"):
        p = root / cand
        if p.is_file():
            return p
    raise FileNotFoundError(f"no bundled input named {name!r}; available: {bundled_names()}")


def load_text(path: str) -> str:
    """Read ``path``; fall back to the bundled corpus by file name."""
    p = Path(path)
    if p.is_file():
        return p.read_text()
    return bundled_path(path).read_text()


def load(path: str):
    """Parse a graph, network or matrix file into the matching object."""
    from .ratfunc import ParseError

    text = load_text(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(err.msg, text, line=err.lineno, column=err.colno) from None
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a JSON object")
    if "components" in data:
        return DynamicalNetwork.from_dict(data)
    if "vertices" in data:
        return WeightedDigraph.from_json(text)
    if "matrix" in data:
        return _matrix(data)
    raise ValueError(f"{path}: not a graph ('vertices'), network ('components') or matrix ('matrix')")


def _matrix(data: dict):
    rows = data["matrix"]
    M = np.array([[complex(parse(v).constant_value()) if isinstance(v, str) else complex(v)
                   for v in row] for row in rows])
    if not np.any(M.imag):
        M = M.real
    labels = data.get("labels") or [f"v{k + 1}" for k in range(len(rows))]
    return M, list(labels)


# example checks


@dataclass
class Check:
    example: int
    name: str
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        return {"example": self.example, "check": self.name, "passed": self.passed,
                "detail": self.detail}


def _graph(name):
    return WeightedDigraph.from_json(load_text(name))


def _net(name):
    return DynamicalNetwork.from_json(load_text(name))


def ex11_constant() -> float:
    q = math.pi / (4 * math.sqrt(2))
    return math.pi ** 2 * math.sin(q) / (16 * math.sqrt(2))


def ex10_rho(alpha: float) -> float:
    ap = alpha * math.pi
    return ap * (math.sqrt(34 - 2 * math.cos(2 * ap)) + 2 * math.sin(ap)) / 4


def _example1():
    G = _graph("fig2.json")
    S = ["v1", "v3"]
    R = reduce_once(G, S)
    target = parse("1/(l-1)")
    witness = is_structural_set(G, ["v1", "v5"]).witness
    return [
        Check(1, "S={v1,v3} structural", bool(is_structural_set(G, S)), ""),
        Check(1, "T={v1,v5} not structural", witness == ("v3", "v6", "v3"), f"witness {witness}"),
        Check(1, "four weights 1/(l-1)",
              len(R.edges) == 4 and all(w == target for w in R.edges.values()),
              ", ".join(f"{u}->{v}: {w}" for (u, v), w in R.edges.items())),
    ]


def _example2():
    G = _graph("fig2.json")
    R = reduce_once(G, ["v1", "v3"])
    sg, sr = spectrum(G)[0], spectrum(R)[0]
    det = characteristic_function(R)
    want_g = SpectrumMultiset.from_values([2, -1, 1, 1, 1, 0])
    want_r = SpectrumMultiset.from_values([2, -1, 0])
    return [
        Check(2, "sigma(G)", sg.distance(want_g) <= 1e-8, str(sg)),
        Check(2, "sigma(R_S(G))", sr.distance(want_r) <= 1e-8, str(sr)),
        Check(2, "det(R_S(G) - lI)", det == parse("(l^3-l^2-2*l)/(l-1)"), str(det)),
    ]


def _example4():
    G = _graph("fig4.json")
    keep = ["v1", "v4"]
    a = reduce_to(G, keep, order=["v2", "v3"])
    b = reduce_to(G, keep, order=["v3", "v2"])
    loop, cross = parse("l/(l^2-1)"), parse("1/(l^3-l)")
    weights_ok = (a.loop_weight("v1") == loop and a.loop_weight("v4") == loop
                  and a.weight("v1", "v4") == cross and a.weight("v4", "v1") == cross)
    return [
        Check(4, "both orders agree", a == b, ""),
        Check(4, "loops l/(l^2-1), cross 1/(l^3-l)", weights_ok,
              ", ".join(f"{u}->{v}: {w}" for (u, v), w in a.edges.items())),
    ]


def _example5():
    G, H = _graph("fig5_G.json"), _graph("fig5_H.json")
    tg, th = cycle_count_rule_tau(G), cycle_count_rule_tau(H)
    R = reduce_to(H, th)
    loop, edge = parse("1/l^2+2/l^3+1/l^4"), parse("2/l+1/l^3")
    ok = all(R.weight(u, v) == (loop if u == v else edge) for u in R.vertices for v in R.vertices)
    return [
        Check(5, "tau(G)=tau(H)={v1,v2}", tg == th == ["v1", "v2"], f"{tg} {th}"),
        Check(5, "reduced weights", ok, ", ".join(f"{u}->{v}: {w}" for (u, v), w in R.edges.items())),
        Check(5, "G ~ H", spectrally_equivalent(G, H, cycle_count_rule_tau), ""),
    ]


def _example6():
    H, G = _graph("fig6_H.json"), _graph("fig2.json")
    S = ["v1", "v3"]
    rep = verify_expansion_determinant(H, S)
    X = isospectral_expansion(H, S)
    sh = spectrum(H)[0]
    want = sh | SpectrumMultiset.from_values([1, 1])
    return [
        Check(6, "X_S(H) isomorphic to fig2.json", graph_isomorphic(X, G).isomorphic, ""),
        Check(6, "sigma(X_S(H)) = sigma(H) + {1,1}", rep.spectrum_expanded.distance(want) <= 1e-8,
              str(rep.spectrum_expanded)),
        Check(6, "determinant identity", rep.determinant_identity, rep.to_dict()["det_expanded"]),
        Check(6, "sigma(H)={2,-1,1,0}",
              sh.distance(SpectrumMultiset.from_values([2, -1, 1, 0])) <= 1e-8, str(sh)),
    ]


def _example7():
    net = _net("example7.json")
    alphas = np.linspace(0.01, 0.3, 10)
    err = max(abs(certify_stability(net, alpha=a).rho - 2 * a * math.pi) for a in alphas)
    cert = certify_stability(net, alpha=0.15)
    return [
        Check(7, "rho(M_F) = 2 alpha pi", err <= 1e-6, f"max error {err:.2e}"),
        Check(7, "stable at alpha=0.15", cert.stable, f"rho={cert.rho:.6f}"),
    ]


def _example8():
    net = _net("example8.json")
    X = expand_network(net, ["v1", "v3"])
    v = X.coords
    expected = {
        "x1": "1 - alpha*x1*(1 - alpha*x141*x341)",
        "x3": "1 - alpha*(1 - alpha*x123*x323)*x3",
        "x141": "x1", "x123": "x1", "x341": "x3", "x323": "x3",
    }
    same = set(v) == set(expected) and all(X.components[c] == parse_expression(e)
                                           for c, e in expected.items())
    G = interaction_graph(net)
    iso = graph_isomorphic(interaction_graph(X), isospectral_expansion(G, ["v1", "v3"]))
    return [
        Check(8, "S complete structural", bool(is_complete_structural_set(G, ["v1", "v3"])), ""),
        Check(8, "expansion components", same, "; ".join(f"{c}={X.components[c]}" for c in v)),
        Check(8, "Gamma(X_S F) ~ X_S(Gamma F)", iso.isomorphic, ""),
    ]


def _example10():
    net = _net("example10.json")
    X = expand_network(net, ["v1", "v3"])
    errs = [abs(spectral_radius(lipschitz_matrix(X, alpha=a)) - ex10_rho(a)) for a in (0.05, 0.1, 0.15)]
    exp18 = certify_stability(X, alpha=0.18)
    raw18 = certify_stability(net, alpha=0.18)
    return [
        Check(10, "rho(expanded Lambda) closed form", max(errs) <= 1e-3, f"max error {max(errs):.2e}"),
        Check(10, "expanded stable at alpha=0.18", exp18.stable, f"rho={exp18.rho:.6f}"),
        Check(10, "unexpanded inconclusive at 0.18", not raw18.stable and raw18.rho > 1,
              f"rho={raw18.rho:.6f}"),
    ]


def _example11():
    net = _net("example11_n2.json")
    S = ["v2", "v4"]
    X = expand_network(net, S)
    lam = lipschitz_matrix(X)
    labels = [X.vertex(c) for c in X.coords]
    a = ex11_constant()
    S_idx = [labels.index(s) for s in S]
    delay_idx = [k for k in range(len(labels)) if k not in S_idx]
    a_err = float(np.abs(lam[np.ix_(delay_idx, S_idx)][lam[np.ix_(delay_idx, S_idx)] > 0] - a).max())
    red = reduced_region(lam, S, labels)
    bound = radius_bound(red)
    classic = classic_region(lam).radius_bound()
    raw = certify_stability(net)
    return [
        Check(11, "unexpanded inconclusive", not raw.stable, f"rho={raw.rho:.6f}"),
        Check(11, "a recovered", a_err <= 1e-6, f"a={a:.9f} error {a_err:.2e}"),
        Check(11, "reduced bound 2 sqrt(a)", abs(bound - 2 * math.sqrt(a)) <= 1e-3 and bound < 1,
              f"bound={bound:.6f}"),
        Check(11, "classic bound 2", abs(classic - 2) <= 1e-9, f"bound={classic:.6f}"),
    ]


CHECKS = {1: _example1, 2: _example2, 4: _example4, 5: _example5, 6: _example6,
          7: _example7, 8: _example8, 10: _example10, 11: _example11}


def run_checks(examples=None) -> list[Check]:
    keys = sorted(CHECKS) if not examples else list(examples)
    out = []
    for k in keys:
        if k not in CHECKS:
            raise ValueError(f"no check for example {k}; available: {sorted(CHECKS)}")
        out.extend(CHECKS[k]())
    return out
