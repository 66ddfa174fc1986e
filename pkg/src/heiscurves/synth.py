"""Curves from prescribed invariants, and congruence of curves.

The lifted frame ``M(s)`` of a unit-speed curve solves ``M' = M phi(s)`` with
``phi`` the Darboux matrix built from the invariants. Integrating that
equation reconstructs the curve; two curves with equal invariants differ by
the rigid motion that matches their initial frames.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from ._rank import DEFAULT_RANK_TOL
from .classify import curve_order
from .curve import SampledCurve, derivatives_at
from .exceptions import InconsistencyError, StepSizeError
from .frames import InvariantProfile, build_frame, darboux_from_values, invariants_along
from .heis_core import Symmetry, j_matrix, project_unitary

__all__ = [
    "GroupPath",
    "CongruenceReport",
    "integrate_frame_ode",
    "synthesize_curve",
    "congruence_report",
    "congruence_test",
]

_PROJECTION_LIMIT = 1e-6


@dataclass(frozen=True, eq=False)
class GroupPath:
    """Frames ``M(s_i)`` of a lifted curve, each a ``(2n+2) x (2n+2)`` symmetry matrix."""

    s_grid: np.ndarray
    frames: np.ndarray
    corrections: np.ndarray = field(default=None)

    @property
    def n(self) -> int:
        return (self.frames.shape[-1] - 2) // 2

    def points(self) -> np.ndarray:
        return self.frames[:, 1:, 0]

    def curve(self) -> SampledCurve:
        return SampledCurve(self.n, self.s_grid, self.points(), is_arclength=True)

    def symmetry(self, i: int) -> Symmetry:
        return Symmetry.from_matrix(self.frames[i])

    def residuals(self) -> dict:
        """Worst group-membership defects along the path."""
        n = self.n
        m = self.frames
        rot = m[:, 1:2 * n + 1, 1:2 * n + 1]
        jm = j_matrix(n)
        orth = np.max(np.abs(np.swapaxes(rot, -1, -2) @ rot - np.eye(2 * n)))
        comm = np.max(np.abs(rot @ jm - jm @ rot))
        rebuilt = np.stack([_rebuild(f) for f in m])
        return {
            "orthogonality": float(orth),
            "j_commutation": float(comm),
            "last_row": float(np.max(np.abs(rebuilt - m))),
        }


def _rebuild(m: np.ndarray) -> np.ndarray:
    """Project onto PSH(n): unitary rotation block, fixed border, last row from the translation."""
    d = m.shape[0]
    n = (d - 2) // 2
    out = np.zeros_like(m)
    out[0, 0] = 1.0
    out[d - 1, d - 1] = 1.0
    rot = project_unitary(m[1:2 * n + 1, 1:2 * n + 1])
    p = m[1:2 * n + 1, 0]
    out[1:2 * n + 1, 0] = p
    out[1:2 * n + 1, 1:2 * n + 1] = rot
    out[d - 1, 0] = m[d - 1, 0]
    out[d - 1, 1:2 * n + 1] = np.concatenate([p[n:], -p[:n]]) @ rot
    return out


def _as_matrix(m0, n: int) -> np.ndarray:
    if m0 is None:
        return np.eye(2 * n + 2)
    if isinstance(m0, Symmetry):
        m = m0.matrix()
    else:
        m = Symmetry.from_matrix(np.asarray(m0, dtype=float)).matrix()
    if m.shape != (2 * n + 2, 2 * n + 2):
        raise ValueError(f"initial frame must be a PSH({n}) element")
    return m


def integrate_frame_ode(profile: InvariantProfile, m0=None) -> GroupPath:
    """Solve ``M' = M phi(s)`` on the profile grid with classical RK4.

    Invariants are interpolated to half steps with cubic splines. After each
    step the rotation block is projected back onto U(n) and the last row is
    rebuilt from the translation; a projection larger than 1e-6 means the
    step is too coarse.
    """
    n = profile.n
    s = profile.s_grid
    if len(profile) < 2:
        raise ValueError("profile needs at least two samples")
    steps = np.diff(s)
    if np.any(steps <= 0):
        raise ValueError("profile grid must be strictly increasing")
    table = np.vstack([profile.kappas, profile.tau[None, :]])
    spline = CubicSpline(s, table, axis=1)
    mid = spline(0.5 * (s[:-1] + s[1:]))

    def phi_at(values):
        return darboux_from_values(values[:n], values[n])

    frames = np.empty((s.size, 2 * n + 2, 2 * n + 2))
    corrections = np.zeros(s.size)
    m = _as_matrix(m0, n)
    frames[0] = m
    phi_next = phi_at(table[:, 0])
    for i, h in enumerate(steps):
        phi0 = phi_next
        phi_half = phi_at(mid[:, i])
        phi_next = phi_at(table[:, i + 1])
        k1 = m @ phi0
        k2 = (m + 0.5 * h * k1) @ phi_half
        k3 = (m + 0.5 * h * k2) @ phi_half
        k4 = (m + h * k3) @ phi_next
        stepped = m + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        m = _rebuild(stepped)
        corrections[i + 1] = np.max(np.abs(m - stepped))
        if corrections[i + 1] > _PROJECTION_LIMIT:
            raise StepSizeError(
                f"projection moved the frame by {corrections[i + 1]:.2e} at s={s[i + 1]:.6g}; use a finer grid")
        frames[i + 1] = m
    return GroupPath(s.copy(), frames, corrections)


def synthesize_curve(profile: InvariantProfile, m0=None) -> SampledCurve:
    """A unit-speed curve with the given p-curvatures and contact normality.

    With the default initial frame (identity) the curve starts at the
    origin with ``e_j(0)`` the standard frame; any other solution differs
    from it by a rigid motion.
    """
    return integrate_frame_ode(profile, m0).curve()


@dataclass(frozen=True, eq=False)
class CongruenceReport:
    orders: tuple
    differences: np.ndarray
    symmetry: Symmetry | None
    alignment_residual: float | None

    @property
    def congruent(self) -> bool:
        return self.symmetry is not None


def _initial_frame(c: SampledCurve, order: int, tol: float) -> np.ndarray:
    jet = derivatives_at(c, 0, order)
    return build_frame(jet, c.point(0), tol).matrix()


def congruence_report(c1: SampledCurve, c2: SampledCurve, tol: float = 1e-6,
                      rank_tol: float = DEFAULT_RANK_TOL) -> CongruenceReport:
    """Compare invariants and, when they agree, recover ``g`` with ``g o c1 = c2``."""
    if c1.n != c2.n:
        raise ValueError(f"curves live in H_{c1.n} and H_{c2.n}")
    if len(c1) != len(c2) or not np.allclose(c1.params - c1.params[0], c2.params - c2.params[0],
                                             rtol=0.0, atol=1e-12 * max(1.0, abs(c1.params[-1]))):
        raise ValueError("curves must be sampled on the same arc-length grid")
    if not (c1.is_arclength and c2.is_arclength):
        raise ValueError("congruence is decided on arc-length curves; reparametrize first")
    k1 = curve_order(c1, rank_tol).order
    k2 = curve_order(c2, rank_tol).order
    if k1 != k2:
        return CongruenceReport((k1, k2), np.array([]), None, None)
    p1 = invariants_along(c1, k1, rank_tol)
    p2 = invariants_along(c2, k2, rank_tol)
    diffs = p1.sup_differences(p2)
    if np.any(diffs > tol):
        return CongruenceReport((k1, k2), diffs, None, None)
    m1 = _initial_frame(c1, k1, rank_tol)
    m2 = _initial_frame(c2, k2, rank_tol)
    g = Symmetry.from_matrix(m2 @ np.linalg.inv(m1))
    moved = g.apply_arrays(c1.points)
    residual = float(np.max(np.linalg.norm(moved - c2.points, axis=1)))
    if residual > 10.0 * tol:
        raise InconsistencyError(
            f"invariants agree within {tol:g} but the aligned curves differ by {residual:.2e}")
    return CongruenceReport((k1, k2), diffs, g, residual)


def congruence_test(c1: SampledCurve, c2: SampledCurve, tol: float = 1e-6,
                    rank_tol: float = DEFAULT_RANK_TOL) -> Symmetry | None:
    """The rigid motion carrying ``c1`` onto ``c2``, or ``None`` if their invariants differ."""
    return congruence_report(c1, c2, tol, rank_tol).symmetry
