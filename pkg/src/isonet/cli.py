"""Command-line interface: ``isonet <verb> ...``.

Results go to stdout as JSON (``verify`` prints a table unless ``--json``);
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import _validation as val
from . import corpus
from .dynnet import (
    DEFAULT_GRID,
    DynamicalNetwork,
    certify_stability,
    expand_network,
    lipschitz_matrix,
    simulate,
    stability_matrix,
)
from .gersh import classic_region, radius_bound, raster_region, reduced_region
from .graph import NotStructuralError, WeightedDigraph
from .ratfunc import DEFAULT_PAIRING_TOL, DEFAULT_TOL, ParseError
from .reduce import (
    NotInGPiError,
    characteristic_function,
    cycle_count_rule_tau,
    graph_isomorphic,
    reduce_once,
    reduce_to,
    spectrum,
)
from .transform import branch_sets_isomorphic, isospectral_expansion

log = logging.getLogger("isonet")


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _num(v: float) -> float:
    return round(float(v), 12) + 0.0


def _spectrum_json(s) -> list:
    return [{"re": _num(v.real), "im": _num(v.imag), "multiplicity": m} for v, m in s.roots]


def _require(obj, kind, path):
    if not isinstance(obj, kind):
        want = "graph" if kind is WeightedDigraph else "network"
        raise ValueError(f"{path}: expected a {want} file")
    return obj


def _graph(path) -> WeightedDigraph:
    return _require(corpus.load(path), WeightedDigraph, path)


def _network(path, alpha=None) -> DynamicalNetwork:
    net = _require(corpus.load(path), DynamicalNetwork, path)
    val.check_alpha(alpha, net.alpha_range)
    return net.with_alpha(alpha)


# verbs


def cmd_reduce(args):
    G = _graph(args.input)
    _emit(reduce_once(G, val.check_vertex_set(G, args.over)).to_dict())


def cmd_reduce_to(args):
    G = _graph(args.input)
    order = val.split_list(args.order) or None
    _emit(reduce_to(G, val.check_vertex_set(G, args.keep), order=order).to_dict())


def cmd_spectrum(args):
    G = _graph(args.input)
    s, s_inv = spectrum(G, args.tol, args.pairing_tol)
    _emit({"det": str(characteristic_function(G)), "spectrum": _spectrum_json(s),
           "inverse_spectrum": _spectrum_json(s_inv), "text": str(s)})


def cmd_equiv(args):
    G, H = _graph(args.first), _graph(args.second)
    kg = val.check_vertex_set(G, args.keep_first) if args.keep_first else None
    kh = val.check_vertex_set(H, args.keep_second) if args.keep_second else None
    if (kg is None) != (kh is None) and args.rule != "cycle-count":
        raise ValueError("give both --keep-first and --keep-second, or a --rule")
    kg = kg or cycle_count_rule_tau(G)
    kh = kh or cycle_count_rule_tau(H)
    RG, RH = reduce_to(G, kg), reduce_to(H, kh)
    iso = graph_isomorphic(RG, RH)
    _emit({"equivalent": iso.isomorphic, "selected_first": kg, "selected_second": kh,
           "mapping": iso.mapping, "reduced_first": RG.to_dict(), "reduced_second": RH.to_dict()})


def cmd_expand(args):
    G = _graph(args.input)
    _emit(isospectral_expansion(G, val.check_vertex_set(G, args.over)).to_dict())


def cmd_check_wpt(args):
    G, H = _graph(args.first), _graph(args.second)
    S = val.split_list(args.over)
    _emit({"branch_sets_isomorphic": branch_sets_isomorphic(G, H, S), "over": S})


def cmd_stability(args):
    net = _network(args.input, args.alpha)
    over = val.split_list(args.expand_over)
    if over:
        net = expand_network(net, over)
    cert = certify_stability(net, args.grid)
    out = cert.to_dict()
    out["expanded_over"] = over or None
    out["coords"] = list(net.coords)
    out["matrix"] = [[_num(v) for v in row] for row in stability_matrix(net, args.grid)]
    _emit(out)


def cmd_expand_net(args):
    net = _network(args.input)
    _emit(expand_network(net, val.split_list(args.over)).to_dict())


def cmd_simulate(args):
    net = _network(args.input, args.alpha)
    if args.x0:
        x0 = val.check_floats(args.x0, len(net.coords), "--x0")
    else:
        rng = np.random.default_rng(args.seed)
        x0 = [rng.uniform(*net.domains[c]) for c in net.coords]
    rep = simulate(net, x0, val.check_positive_int(args.steps, "--steps"))
    _emit({"coords": list(net.coords), "x0": [_num(v) for v in x0], "converged": rep.converged,
           "steps": rep.steps, "final_gap": float(rep.gaps[-1]) if len(rep.gaps) else 0.0,
           "fixed_point": [_num(v) for v in rep.fixed_point]})


def _gersh_matrix(args):
    obj = corpus.load(args.input)
    if isinstance(obj, WeightedDigraph):
        return obj.numeric_adjacency(), list(obj.vertices)
    if isinstance(obj, DynamicalNetwork):
        net = obj.with_alpha(val.check_alpha(args.alpha, obj.alpha_range))
        over = val.split_list(args.expand_over)
        if over:
            net = expand_network(net, over)
        return lipschitz_matrix(net, args.grid), [net.vertex(c) for c in net.coords]
    return obj


def cmd_gersh(args):
    M, labels = _gersh_matrix(args)
    if args.reduced:
        if not args.keep:
            raise ValueError("--reduced needs --keep")
        region = reduced_region(M, val.split_list(args.keep), labels)
    else:
        region = classic_region(M)
    out = {"kind": region.kind, "radius_bound": radius_bound(region, args.tol_radius)}
    if args.out:
        window = val.check_window(args.window)
        raster = raster_region(region, window, val.check_positive_int(args.res, "--res", 16))
        with open(args.out, "w", newline="") as fh:
            raster.to_csv(fh, unit_circle=args.unit_circle)
        out.update({"out": args.out, "resolution": args.res, "window": list(window),
                    "cells_inside": int(raster.inside.sum())})
    _emit(out)


def cmd_verify(args):
    checks = corpus.run_checks(args.example)
    if args.json:
        _emit([c.to_dict() for c in checks])
    else:
        width = max(len(c.name) for c in checks)
        for c in checks:
            status = "PASS" if c.passed else "FAIL"
            print(f"Example {c.example:<3} {c.name:<{width}}  {status}  {c.detail}")
    return 0 if all(c.passed for c in checks) else 1


# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="root residual tolerance")
    common.add_argument("--pairing-tol", type=float, default=DEFAULT_PAIRING_TOL,
                        help="distance under which roots are paired")
    common.add_argument("--alpha", type=float, default=None, help="network parameter value")
    common.add_argument("--grid", type=int, default=DEFAULT_GRID,
                        help="grid subdivisions per axis for Lipschitz maxima")
    common.add_argument("--seed", type=int, default=0, help="seed for random initial states")
    common.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")

    p = argparse.ArgumentParser(prog="isonet", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    s = verb("reduce", cmd_reduce, "isospectral reduction over a structural set")
    s.add_argument("input")
    s.add_argument("--over", required=True, help="comma-separated vertex labels")

    s = verb("reduce-to", cmd_reduce_to, "sequential reduction onto any vertex set")
    s.add_argument("input")
    s.add_argument("--keep", required=True)
    s.add_argument("--order", help="removal order of the dropped vertices")

    s = verb("spectrum", cmd_spectrum, "spectrum and inverse spectrum")
    s.add_argument("input")

    s = verb("equiv", cmd_equiv, "spectral equivalence under a vertex-selection rule")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--rule", default="cycle-count", choices=["cycle-count"])
    s.add_argument("--keep-first", help="explicit vertex set for the first graph")
    s.add_argument("--keep-second", help="explicit vertex set for the second graph")

    s = verb("expand", cmd_expand, "isospectral expansion over a structural set")
    s.add_argument("input")
    s.add_argument("--over", required=True)

    s = verb("check-wpt", cmd_check_wpt, "compare branch sets of two graphs")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--over", required=True)

    s = verb("stability", cmd_stability, "stability certificate from the Lipschitz spectral radius")
    s.add_argument("input")
    s.add_argument("--expand-over", help="expand over this complete structural set first")

    s = verb("expand-net", cmd_expand_net, "dynamical network expansion")
    s.add_argument("input")
    s.add_argument("--over", required=True)

    s = verb("simulate", cmd_simulate, "iterate a network and report convergence")
    s.add_argument("input")
    s.add_argument("--x0", help="comma-separated initial state (default: random, --seed)")
    s.add_argument("--steps", type=int, default=500)

    s = verb("gersh", cmd_gersh, "classic or reduced Gershgorin region")
    s.add_argument("input", help="matrix, graph or network file")
    kind = s.add_mutually_exclusive_group()
    kind.add_argument("--classic", action="store_true", help="classic disc union (default)")
    kind.add_argument("--reduced", action="store_true", help="region of the reduced matrix")
    s.add_argument("--keep", help="complete structural set for --reduced")
    s.add_argument("--expand-over", help="for networks: expand over this set first")
    s.add_argument("--window", default="-2,2,-2,2", help="x0,x1,y0,y1")
    s.add_argument("--res", type=int, default=400)
    s.add_argument("--out", help="CSV raster path (re,im,inside)")
    s.add_argument("--unit-circle", action="store_true", help="add a unit_circle column")
    s.add_argument("--tol-radius", type=float, default=1e-6, help="radius bisection tolerance")

    s = verb("verify", cmd_verify, "run the bundled example checks")
    s.add_argument("--example", type=int, action="append", help="restrict to example number(s)")
    s.add_argument("--json", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        rc = args.func(args)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (NotStructuralError, NotInGPiError) as err:
        witness = getattr(err, "witness", None)
        print(f"error: {err}", file=sys.stderr)
        if witness is not None:
            print(f"witness: {witness}", file=sys.stderr)
        return 3
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, ZeroDivisionError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
