"""scikit-learn style wrappers over the cone tests.

Rows are X-matrices flattened to 16 reals ``(a, b, Re z, Im z)``.
Nothing is learned; ``fit`` only validates and records the input width.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .classify import SIGNATURE_CONES, lattice_profile, partition_class
from .criteria import PRIMAL_CONES, Cone, in_cone
from .xcore import DEFAULT_TOL, InvalidInputError, XMatrix, x_part

N_FEATURES = 16


def check_x_rows(X) -> np.ndarray:
    """Validate an ``(n, 16)`` array of flattened X-matrices."""
    X = check_array(X, dtype=np.float64, ensure_all_finite=True)
    if X.shape[1] != N_FEATURES:
        raise InvalidInputError(f"expected {N_FEATURES} columns, got {X.shape[1]}")
    return X


def check_full_matrices(H) -> np.ndarray:
    """Validate an ``(n, 8, 8)`` stack of complex matrices."""
    H = np.asarray(H, dtype=complex)
    if H.ndim != 3 or H.shape[1:] != (8, 8):
        raise InvalidInputError(f"expected shape (n, 8, 8), got {H.shape}")
    if not np.all(np.isfinite(H)):
        raise InvalidInputError("matrices have non-finite entries")
    return H


def rows_to_x(X) -> list[XMatrix]:
    return [XMatrix.from_vector(row) for row in check_x_rows(X)]


def x_to_rows(xs) -> np.ndarray:
    return np.array([x.to_vector() for x in xs]).reshape(-1, N_FEATURES)


def _check_tol(tol):
    if not (isinstance(tol, (int, float)) and tol >= 0):
        raise InvalidInputError(f"tol must be a nonnegative number, got {tol!r}")


class XPartProjector(TransformerMixin, BaseEstimator):
    """Project ``(n, 8, 8)`` matrices onto their X part, as 16-column rows.

    With ``return_off_norm=True`` a 17th column holds the Frobenius norm of
    what was dropped.
    """

    def __init__(self, return_off_norm=False):
        self.return_off_norm = return_off_norm

    def fit(self, H, y=None):
        check_full_matrices(H)
        self.n_features_in_ = 64
        return self

    def transform(self, H):
        check_is_fitted(self, "n_features_in_")
        H = check_full_matrices(H)
        rows = x_to_rows(x_part(h) for h in H)
        if not self.return_off_norm:
            return rows
        mask = np.ones((8, 8), dtype=bool)
        idx = np.arange(8)
        mask[idx, idx] = mask[idx, 7 - idx] = False
        off = np.linalg.norm(H[:, mask], axis=1)
        return np.column_stack([rows, off])


class ConeMembership(BaseEstimator):
    """Membership test for one cone.

    ``predict`` gives booleans; ``decision_function`` the smallest
    inequality slack (``-inf`` when the positivity precondition fails).
    """

    def __init__(self, cone="A", tol=DEFAULT_TOL):
        self.cone = cone
        self.tol = tol

    def fit(self, X, y=None):
        check_x_rows(X)
        _check_tol(self.tol)
        self.cone_ = Cone.parse(self.cone) if isinstance(self.cone, str) else Cone(self.cone)
        self.n_features_in_ = N_FEATURES
        return self

    def _verdicts(self, X):
        check_is_fitted(self, "cone_")
        return [in_cone(x, self.cone_, self.tol) for x in rows_to_x(X)]

    def predict(self, X):
        return np.array([v.member for v in self._verdicts(X)], dtype=bool)

    def decision_function(self, X):
        out = []
        for v in self._verdicts(X):
            out.append(v.min_slack if v.positive and v.reports else (np.inf if v.positive else -np.inf))
        return np.array(out, dtype=float)


class PartialSeparabilityClassifier(TransformerMixin, BaseEstimator):
    """Class labels for X-shaped states.

    ``transform`` returns the 11 primal-cone membership bits (columns in
    ``cones_`` order), ``predict`` the class names.
    """

    def __init__(self, tol=DEFAULT_TOL, signature_only=False):
        self.tol = tol
        self.signature_only = signature_only

    def fit(self, X, y=None):
        check_x_rows(X)
        _check_tol(self.tol)
        self.cones_ = SIGNATURE_CONES if self.signature_only else PRIMAL_CONES
        self.n_features_in_ = N_FEATURES
        return self

    def transform(self, X):
        check_is_fitted(self, "cones_")
        profiles = [lattice_profile(x, self.tol) for x in rows_to_x(X)]
        return np.array([[p[c] for c in self.cones_] for p in profiles], dtype=bool).reshape(-1, len(self.cones_))

    def predict(self, X):
        check_is_fitted(self, "cones_")
        return np.array([partition_class(lattice_profile(x, self.tol)).name for x in rows_to_x(X)], dtype=object)
