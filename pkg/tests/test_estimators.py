import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from torsionlab.estimators import LinkingEstimator, RotationSetEstimator, TorsionEstimator
from torsionlab.linking import linking_n
from torsionlab.maps import DoubleShear, RotationIsotopy
from torsionlab.torsion import torsion_n


def test_torsion_estimator_matches_function():
    iso = DoubleShear(0.5, 0.5)
    X = np.random.default_rng(0).random((6, 2))
    est = TorsionEstimator(iso, n=8).fit(X)
    out = est.transform(X)
    assert out.shape == (6, 1)
    assert np.allclose(out[:, 0], [torsion_n(iso, x, (1, 0), 8) for x in X], atol=1e-7)


def test_linking_estimator_rotation():
    X = np.array([[0.1, 0.2, -0.3, 0.4], [0.5, 0.0, 0.0, 0.5]])
    out = LinkingEstimator(RotationIsotopy(-0.7), n=5).fit_transform(X)
    assert np.allclose(out, -0.7, atol=1e-12)


def test_linking_estimator_pairs():
    iso = DoubleShear(1.0, 1.0)
    X = np.array([[0.41, 0.73, 0.38, 0.71]])
    out = LinkingEstimator(iso, n=20).fit(X).transform(X)
    assert out[0, 0] == pytest.approx(linking_n(iso, X[0, :2], X[0, 2:], 20), abs=1e-7)


def test_validation_errors():
    with pytest.raises(TypeError):
        TorsionEstimator(None).fit()
    with pytest.raises(ValueError):
        TorsionEstimator(RotationIsotopy(0.1), n=0).fit()
    with pytest.raises(ValueError):
        TorsionEstimator(RotationIsotopy(0.1)).fit(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        LinkingEstimator(RotationIsotopy(0.1)).fit(np.zeros((3, 2)))
    with pytest.raises(NotFittedError):
        TorsionEstimator(RotationIsotopy(0.1)).transform(np.zeros((1, 2)))
    with pytest.raises(TypeError):
        RotationSetEstimator(None).fit()


def test_params_and_clone():
    est = TorsionEstimator(RotationIsotopy(0.3), n=16)
    params = est.get_params()
    assert params["n"] == 16
    twin = clone(est).set_params(n=4)
    assert twin.n == 4 and est.n == 16


def test_pipeline_composition():
    pipe = make_pipeline(FunctionTransformer(lambda X: X * 0.5),
                         TorsionEstimator(RotationIsotopy(0.3), n=4))
    assert np.allclose(pipe.fit_transform(np.ones((3, 2))), 0.3, atol=1e-12)


def test_rotation_set_estimator():
    est = RotationSetEstimator(DoubleShear(1.0, 1.0), grid=32, n=200).fit()
    assert est.approx_.area == pytest.approx(4.0, abs=1e-9)
    X = np.array([[0.0, 0.0], [0.9, -0.9], [1.5, 0.0]])
    assert list(est.predict(X)) == [True, True, False]
    d = est.decision_function(X)
    assert d[0] == pytest.approx(1.0) and d[2] == pytest.approx(-0.5)
