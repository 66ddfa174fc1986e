"""Closed-form horizontal geodesics of H_n.

A unit-speed horizontal geodesic with parameter ``lam`` starts at
``(x0, y0, t0)`` with horizontal velocity ``A + iB`` and satisfies
``beta'(s) = (A + iB) exp(-2i lam s)``. Its p-curvature is the constant
``-2 lam`` and it is horizontal, so its contact normality vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import SampledCurve

__all__ = ["GeodesicSpec", "geodesic_curve", "geodesic_derivatives", "geodesic_coefficients"]

_SPEED_TOL = 1e-12
_SERIES_LAMBDA = 1e-6
_SMALL_ANGLE = 0.1


@dataclass(frozen=True, eq=False)
class GeodesicSpec:
    n: int
    lam: float
    A: np.ndarray
    B: np.ndarray
    x0: np.ndarray = None
    y0: np.ndarray = None
    t0: float = 0.0

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ValueError("n must be positive")
        fields = {}
        for name in ("A", "B", "x0", "y0"):
            value = getattr(self, name)
            arr = np.zeros(n) if value is None else np.atleast_1d(np.asarray(value, dtype=float)).copy()
            if arr.shape != (n,):
                raise ValueError(f"{name} must have length {n}, got shape {arr.shape}")
            arr.flags.writeable = False
            fields[name] = arr
        speed2 = float(np.sum(fields["A"] ** 2 + fields["B"] ** 2))
        if abs(speed2 - 1.0) > _SPEED_TOL:
            raise ValueError(f"initial horizontal velocity must be unit length, sum(A^2 + B^2) = {speed2!r}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "t0", float(self.t0))
        for name, arr in fields.items():
            object.__setattr__(self, name, arr)


def geodesic_coefficients(lam: float, s) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(S, C, D)`` with ``S = sin(2 lam s)/(2 lam)``, ``C = (1 - cos(2 lam s))/(2 lam)``,
    ``D = (s - S)/(2 lam)``, continued analytically through ``lam = 0``."""
    s = np.asarray(s, dtype=float)
    lam = float(lam)
    if abs(lam) < _SERIES_LAMBDA:
        w = 2.0 * lam
        w2 = w * w
        s2 = s * s
        S = s * (1.0 - w2 * s2 / 6.0 * (1.0 - w2 * s2 / 20.0 * (1.0 - w2 * s2 / 42.0)))
        C = lam * s2 * (1.0 - w2 * s2 / 12.0 * (1.0 - w2 * s2 / 30.0 * (1.0 - w2 * s2 / 56.0)))
        D = w * s2 * s / 6.0 * (1.0 - w2 * s2 / 20.0 * (1.0 - w2 * s2 / 42.0 * (1.0 - w2 * s2 / 72.0)))
        return S, C, D
    theta = 2.0 * lam * s
    S = np.sin(theta) / (2.0 * lam)
    C = np.sin(lam * s) ** 2 / lam
    # theta - sin(theta) cancels catastrophically for small angles
    small = np.abs(theta) < _SMALL_ANGLE
    t2 = theta * theta
    series = theta * t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0 * (1.0 - t2 / 72.0 * (1.0 - t2 / 110.0))))
    diff = np.where(small, series, theta - np.sin(theta))
    D = diff / (2.0 * lam) ** 2
    return S, C, D


def geodesic_curve(spec: GeodesicSpec, s_grid) -> SampledCurve:
    """Sample the geodesic at the horizontal arc-length values ``s_grid``."""
    s = np.asarray(s_grid, dtype=float)
    S, C, D = geodesic_coefficients(spec.lam, s)
    A, B, x0, y0 = spec.A, spec.B, spec.x0, spec.y0
    x = x0 + np.outer(S, A) + np.outer(C, B)
    y = y0 - np.outer(C, A) + np.outer(S, B)
    z = spec.t0 + D + C * np.sum(A * x0 + B * y0) - S * np.sum(B * x0 - A * y0)
    points = np.column_stack([x, y, z])
    return SampledCurve(spec.n, s, points, is_arclength=True)


def geodesic_derivatives(spec: GeodesicSpec, s, k: int) -> np.ndarray:
    """Exact ``beta^(k)(s)`` as complex arrays of shape ``(len(s), n)``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    s = np.atleast_1d(np.asarray(s, dtype=float))
    c = spec.A + 1j * spec.B
    rate = -2j * spec.lam
    return (rate ** (k - 1)) * np.exp(rate * s)[:, None] * c[None, :]
