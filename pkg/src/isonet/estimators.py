"""scikit-learn style wrappers around the reduction, expansion, stability and Gershgorin tools.

These are thin conveniences: ``fit`` resolves and validates the
configuration against one input, ``transform``/``predict`` apply it.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import _validation as val
from .dynnet import (
    DEFAULT_GRID,
    DynamicalNetwork,
    expand_network,
    spectral_radius,
    stability_matrix,
)
from .gersh import classic_region, radius_bound, reduced_region
from .graph import WeightedDigraph
from .reduce import RULES, reduce_to
from .transform import isospectral_expansion


def _check_fitted(est, attr):
    if not hasattr(est, attr):
        raise NotFittedError(f"{type(est).__name__} is not fitted yet; call fit first")


class IsospectralReducer(TransformerMixin, BaseEstimator):
    """Sequentially reduce graphs onto a vertex set.

    Parameters
    ----------
    keep : str or list of str, optional
        Target vertex set.  When omitted the vertex-selection ``rule`` is
        applied to each graph.
    rule : str
        Name of a vertex-selection rule (``"cycle-count"``).
    """

    def __init__(self, keep=None, rule="cycle-count"):
        self.keep = keep
        self.rule = rule

    def _target(self, G):
        if self.keep is not None:
            return val.check_vertex_set(G, self.keep)
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")
        return RULES[self.rule](G)

    def fit(self, G, y=None):
        G = val.check_graph(G)
        self.keep_ = self._target(G)
        self.reduced_ = reduce_to(G, self.keep_)
        return self

    def transform(self, G):
        _check_fitted(self, "keep_")
        G = val.check_graph(G)
        return reduce_to(G, self._target(G) if self.keep is None else self.keep_)


class IsospectralExpander(TransformerMixin, BaseEstimator):
    """Isospectral expansion over a fixed structural set."""

    def __init__(self, over=None):
        self.over = over

    def fit(self, G, y=None):
        G = val.check_graph(G)
        self.over_ = val.check_vertex_set(G, self.over)
        return self

    def transform(self, G):
        _check_fitted(self, "over_")
        return isospectral_expansion(val.check_graph(G), self.over_)


class StabilityCertifier(BaseEstimator):
    """Certify global stability of a parameterised network across ``alpha`` values.

    ``fit`` stores the network (expanded over ``expand_over`` if given);
    ``predict`` returns True where ``rho(M_F) < 1``; ``score_samples``
    returns the spectral radii themselves.
    """

    def __init__(self, grid_n=DEFAULT_GRID, expand_over=None):
        self.grid_n = grid_n
        self.expand_over = expand_over

    def fit(self, net, y=None):
        if not isinstance(net, DynamicalNetwork):
            raise TypeError("fit expects a DynamicalNetwork")
        val.check_positive_int(self.grid_n, "grid_n", 2)
        over = val.split_list(self.expand_over)
        self.network_ = expand_network(net, over) if over else net
        return self

    def score_samples(self, alphas):
        _check_fitted(self, "network_")
        alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
        return np.array([spectral_radius(stability_matrix(self.network_, self.grid_n, float(a)))
                         for a in alphas])

    def predict(self, alphas):
        return self.score_samples(alphas) < 1


class GershgorinLocalizer(BaseEstimator):
    """Eigenvalue localisation by classic (``keep=None``) or reduced Gershgorin regions."""

    def __init__(self, keep=None, labels=None, tol=1e-6):
        self.keep = keep
        self.labels = labels
        self.tol = tol

    def fit(self, A, y=None):
        M = val.check_square_matrix(A)
        if self.keep is None:
            self.region_ = classic_region(M)
        else:
            labels = self.labels
            if labels is None:
                labels = [f"v{k + 1}" for k in range(M.shape[0])]
            G = WeightedDigraph(labels)
            self.region_ = reduced_region(M, val.check_vertex_set(G, self.keep), labels)
        self.radius_bound_ = radius_bound(self.region_, self.tol)
        return self

    def predict(self, z):
        """Membership of each query point; for reduced regions ``z = 0`` maps to False."""
        _check_fitted(self, "region_")
        return np.asarray(self.region_.contains(np.asarray(z, dtype=complex)), dtype=bool)
