import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from isonet import corpus
from isonet.estimators import (
    GershgorinLocalizer,
    IsospectralExpander,
    IsospectralReducer,
    StabilityCertifier,
)
from isonet.ratfunc import parse
from isonet.reduce import graph_isomorphic


def test_params_round_trip_and_clone():
    est = IsospectralReducer(keep="v1,v3")
    assert est.get_params() == {"keep": "v1,v3", "rule": "cycle-count"}
    est.set_params(keep=["v1"])
    assert clone(est).get_params()["keep"] == ["v1"]


def test_reducer_explicit_and_rule():
    G = corpus.load("fig2.json")
    R = IsospectralReducer(keep="v1,v3").fit(G).reduced_
    assert set(R.edges.values()) == {parse("1/(l-1)")}
    H = corpus.load("fig5_H.json")
    red = IsospectralReducer().fit(H)
    assert red.keep_ == ["v1", "v2"]
    assert graph_isomorphic(red.transform(corpus.load("fig5_G.json")), red.reduced_)


def test_unfitted_estimators_raise():
    with pytest.raises(NotFittedError):
        IsospectralReducer().transform(corpus.load("fig2.json"))
    with pytest.raises(NotFittedError):
        GershgorinLocalizer().predict([1])


def test_validation_errors():
    with pytest.raises(TypeError):
        IsospectralReducer().fit(np.eye(2))
    with pytest.raises(ValueError):
        IsospectralExpander(over="v1,v1").fit(corpus.load("fig2.json"))
    with pytest.raises(ValueError):
        GershgorinLocalizer().fit(np.ones((2, 3)))
    with pytest.raises(ValueError):
        StabilityCertifier(grid_n=1).fit(corpus.load("example7.json"))


def test_expander_matches_fig2():
    X = IsospectralExpander(over=["v1", "v3"]).fit_transform(corpus.load("fig6_H.json"))
    assert graph_isomorphic(X, corpus.load("fig2.json"))


def test_certifier_scores_and_predicts():
    cert = StabilityCertifier().fit(corpus.load("example7.json"))
    rho = cert.score_samples([0.1, 0.2])
    assert np.allclose(rho, [0.2 * math.pi, 0.4 * math.pi])
    assert cert.predict([0.1, 0.2]).tolist() == [True, False]
    exp = StabilityCertifier(expand_over="v1,v3").fit(corpus.load("example10.json"))
    assert exp.predict(0.18).tolist() == [True]


def test_localizer():
    A = np.array([[0, 1.0], [1.0, 0]])
    loc = GershgorinLocalizer().fit(A)
    assert loc.radius_bound_ == 1 and loc.predict([1, 3]).tolist() == [True, False]
    red = GershgorinLocalizer(keep=["v1"]).fit(A)
    assert red.radius_bound_ == pytest.approx(1, abs=1e-5)
    assert red.predict([1, -1, 0, 0.5]).tolist() == [True, True, False, False]
