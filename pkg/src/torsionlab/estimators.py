"""scikit-learn style wrappers around the torsion, linking and rotation-set routines.

Rows of ``X`` are points of the surface (two columns) or, for the linking
estimator, pairs of points (four columns ``x_x, x_y, y_x, y_y``).
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .lift import DEFAULT_SAMPLES, DEFAULT_TOL
from .linking import linking_n_many
from .maps import Isotopy, SurfaceMap
from .rotset import estimate_rotation_set, signed_margin
from .torsion import DEFAULT_XI, torsion_n_many


def _check_points(X, width=2):
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != width:
        raise ValueError(f"expected {width} columns, got {X.shape[1]}")
    return X


def _check_isotopy(isotopy):
    if not isinstance(isotopy, Isotopy):
        raise TypeError(f"isotopy must be an Isotopy, got {type(isotopy).__name__}")


class TorsionEstimator(TransformerMixin, BaseEstimator):
    """Finite-time torsion of each row point.

    Parameters
    ----------
    isotopy : Isotopy
    n : int
        Horizon (number of iterates).
    xi : tuple
        Initial tangent direction (any nonzero vector).
    tol, samples_per_unit :
        Step-halving tolerance and initial lift grid density.
    """

    def __init__(self, isotopy=None, n=64, xi=DEFAULT_XI, tol=DEFAULT_TOL,
                 samples_per_unit=DEFAULT_SAMPLES):
        self.isotopy = isotopy
        self.n = n
        self.xi = xi
        self.tol = tol
        self.samples_per_unit = samples_per_unit

    def fit(self, X=None, y=None):
        _check_isotopy(self.isotopy)
        if int(self.n) < 1:
            raise ValueError("n must be a positive integer")
        if X is not None:
            _check_points(X)
        self.n_features_in_ = 2
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = _check_points(X)
        vals = torsion_n_many(self.isotopy, X, self.xi, int(self.n), self.tol,
                              self.samples_per_unit)
        return vals.reshape(-1, 1)


class LinkingEstimator(TransformerMixin, BaseEstimator):
    """Finite-time linking number of each row pair ``(x, y)``."""

    def __init__(self, isotopy=None, n=64, tol=DEFAULT_TOL, samples_per_unit=DEFAULT_SAMPLES):
        self.isotopy = isotopy
        self.n = n
        self.tol = tol
        self.samples_per_unit = samples_per_unit

    def fit(self, X=None, y=None):
        _check_isotopy(self.isotopy)
        if int(self.n) < 1:
            raise ValueError("n must be a positive integer")
        if X is not None:
            _check_points(X, 4)
        self.n_features_in_ = 4
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = _check_points(X, 4)
        vals = linking_n_many(self.isotopy, X[:, :2], X[:, 2:], int(self.n), self.tol,
                              self.samples_per_unit)
        return vals.reshape(-1, 1)


class RotationSetEstimator(BaseEstimator):
    """Polygonal approximation of the rotation set of a torus map.

    ``fit`` samples a ``grid x grid`` lattice; ``predict`` tells whether row
    vectors lie in the polygon and ``decision_function`` returns the signed
    distance to its boundary (positive inside).
    """

    def __init__(self, fmap=None, grid=128, n=1000, nested=True):
        self.fmap = fmap
        self.grid = grid
        self.n = n
        self.nested = nested

    def fit(self, X=None, y=None):
        if not isinstance(self.fmap, SurfaceMap):
            raise TypeError("fmap must be a SurfaceMap")
        self.approx_ = estimate_rotation_set(self.fmap, int(self.grid), int(self.n), self.nested)
        self.vertices_ = self.approx_.vertices
        self.n_features_in_ = 2
        return self

    def decision_function(self, X):
        check_is_fitted(self, "approx_")
        X = _check_points(X)
        return np.array([signed_margin(p, self.vertices_) for p in X])

    def predict(self, X):
        return self.decision_function(X) >= -1e-12
