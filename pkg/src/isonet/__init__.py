"""Isospectral reductions and expansions of weighted digraphs, with stability
estimates for dynamical networks built on them."""

from .dynnet import (
    DynamicalNetwork,
    certify_stability,
    expand_network,
    interaction_graph,
    lipschitz_matrix,
    simulate,
    spectral_radius,
    stability_matrix,
)
from .expr import diff_expr, parse_expression
from .gersh import classic_region, radius_bound, raster_region, reduced_region
from .graph import (
    NotStructuralError,
    WeightedDigraph,
    enumerate_branches,
    is_complete_structural_set,
    is_structural_set,
)
from .ratfunc import LAMBDA, ParseError, Polynomial, RationalFunction, SpectrumMultiset, parse
from .reduce import (
    NotInGPiError,
    characteristic_function,
    cycle_count_rule_tau,
    graph_isomorphic,
    reduce_once,
    reduce_to,
    spectrally_equivalent,
    spectrum,
    verify_reduction_spectrum,
)
from .transform import branch_sets_isomorphic, isospectral_expansion, verify_expansion_determinant

__version__ = "0.1.0"

_ESTIMATORS = {"GershgorinLocalizer", "IsospectralExpander", "IsospectralReducer",
               "StabilityCertifier"}


def __getattr__(name):
    # scikit-learn is slow to import; the command line never needs it
    if name in _ESTIMATORS:
        from . import estimators

        return getattr(estimators, name)
    raise AttributeError(f"module 'isonet' has no attribute {name!r}")
