"""scikit-learn style adapter around the invariant pipeline.

Rows of ``X`` are the samples ``(x_1..x_n, y_1..y_n, z)`` of one curve taken
at uniform horizontal arc-length spacing ``step``. ``transform`` returns one
row ``(kappa_1, ..., kappa_k, tau)`` per sample; ``inverse_transform``
rebuilds a curve (the canonical representative starting at the origin) from
such rows.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._rank import DEFAULT_RANK_TOL
from .classify import curve_order
from .curve import MIN_SAMPLES, SampledCurve
from .frames import InvariantProfile, invariants_along
from .synth import synthesize_curve

__all__ = ["CurveInvariantTransformer", "check_curve_array"]


def check_curve_array(X, n: int | None = None) -> np.ndarray:
    """Validate an ``(N, 2n+1)`` array of curve samples."""
    X = check_array(X, dtype=np.float64, ensure_min_samples=MIN_SAMPLES)
    cols = X.shape[1]
    if cols < 3 or cols % 2 == 0:
        raise ValueError(f"curve samples need 2n+1 columns, got {cols}")
    if n is not None and cols != 2 * n + 1:
        raise ValueError(f"expected {2 * n + 1} columns for H_{n}, got {cols}")
    return X


class CurveInvariantTransformer(TransformerMixin, BaseEstimator):
    """Map an arc-length sampled curve to its p-curvatures and contact normality.

    Parameters
    ----------
    step : float
        Horizontal arc-length spacing between consecutive rows of ``X``.
    order : int or None
        Order at which invariants are taken; detected in ``fit`` when None.
    tol_rank : float
        Relative singular-value threshold of the rank tests.

    Attributes
    ----------
    n_ : int
        Complex dimension of the ambient Heisenberg group.
    order_ : int
        Order used by ``transform``.
    report_ : OrderReport or None
        Classification of the fitted curve (None when ``order`` was given).
    """

    def __init__(self, step=1e-3, order=None, tol_rank=DEFAULT_RANK_TOL):
        self.step = step
        self.order = order
        self.tol_rank = tol_rank

    def _curve(self, X, n=None) -> SampledCurve:
        X = check_curve_array(X, n)
        s = self.step * np.arange(X.shape[0])
        return SampledCurve(X.shape[1] // 2, s, X, is_arclength=True)

    def fit(self, X, y=None):
        if self.step <= 0:
            raise ValueError("step must be positive")
        c = self._curve(X)
        self.n_ = c.n
        self.n_features_in_ = X.shape[1] if hasattr(X, "shape") else 2 * c.n + 1
        if self.order is None:
            self.report_ = curve_order(c, self.tol_rank)
            self.order_ = self.report_.order
        else:
            if not 1 <= self.order <= c.n:
                raise ValueError(f"order must lie in [1, {c.n}]")
            self.report_ = None
            self.order_ = int(self.order)
        return self

    def transform(self, X):
        check_is_fitted(self, "order_")
        c = self._curve(X, self.n_)
        profile = invariants_along(c, self.order_, self.tol_rank)
        return np.column_stack([profile.kappas.T, profile.tau])

    def inverse_transform(self, X):
        """Curve samples in H_n whose invariants are the rows of ``X``."""
        check_is_fitted(self, "order_")
        X = check_array(X, dtype=np.float64, ensure_min_samples=2)
        k = self.order_
        if X.shape[1] != k + 1:
            raise ValueError(f"expected {k + 1} columns (kappa_1..kappa_{k}, tau), got {X.shape[1]}")
        s = self.step * np.arange(X.shape[0])
        curve = synthesize_curve(InvariantProfile(s, X[:, :k].T, X[:, k]))
        return curve.embed(self.n_).points

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "order_")
        return np.array([f"kappa_{j}" for j in range(1, self.order_ + 1)] + ["tau"], dtype=object)
