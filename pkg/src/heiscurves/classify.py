"""Order of horizontally regular curves and reduction of degenerate ones.

The order is the largest ``k`` for which ``beta', ..., beta^(k)`` stay
complex-independent at every sample. A curve of order ``k < n`` lies, after a
rigid motion, in the subgroup ``H_k`` (first ``k`` complex coordinates).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rank import DEFAULT_RANK_TOL, complex_rank_margin, totally_real_margin
from .curve import (DEFAULT_REGULARITY_TOL, HorizontalJet, SampledCurve, derivatives_at,
                    is_horizontally_regular, jet_arrays)
from .exceptions import DegeneracyError, InconsistencyError, NotRegularError
from .frames import build_frame
from .heis_core import HPoint, Symmetry, group_inv

__all__ = [
    "OrderReport",
    "Reduction",
    "wronskian_nonzero",
    "totally_real",
    "curve_order",
    "reduce_degenerate",
]

_REDUCTION_TOL = 1e-6


@dataclass(frozen=True)
class OrderReport:
    """Outcome of the descending Wronskian scan.

    ``margins[k-1]`` is the worst (smallest) value over the grid of
    ``sigma_k / max(sigma_1, 1)`` for the jet ``beta'..beta^(k)``.
    """

    order: int
    margins: tuple
    totally_real: bool
    nondegenerate: bool

    @property
    def n(self) -> int:
        return len(self.margins)

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "totally_real": self.totally_real,
            "nondegenerate": self.nondegenerate,
            "margins": [float(m) for m in self.margins],
        }


def _columns(jet: HorizontalJet) -> np.ndarray:
    if jet.order > jet.n:
        raise ValueError(f"a jet of order {jet.order} cannot be independent in C^{jet.n}")
    return jet.beta_derivs.T


def wronskian_nonzero(jet: HorizontalJet, tol: float = DEFAULT_RANK_TOL) -> bool:
    """``beta' ^ ... ^ beta^(k) != 0`` as a relative complex-rank test."""
    return bool(complex_rank_margin(_columns(jet)) > tol)


def totally_real(jet: HorizontalJet, tol: float = DEFAULT_RANK_TOL) -> bool:
    """Whether the real span P of the jet vectors meets J(P) only in 0."""
    return bool(totally_real_margin(_columns(jet)) > tol)


def curve_order(c: SampledCurve, tol: float = DEFAULT_RANK_TOL,
                regularity_tol: float = DEFAULT_REGULARITY_TOL) -> OrderReport:
    if not is_horizontally_regular(c, regularity_tol):
        raise NotRegularError("curve is not horizontally regular")
    n = c.n
    derivs, _ = jet_arrays(c, n)
    cols = np.swapaxes(derivs, -1, -2)
    margins = tuple(float(np.min(complex_rank_margin(cols[:, :, :k]))) for k in range(1, n + 1))
    order = next((k for k in range(n, 0, -1) if margins[k - 1] > tol), None)
    if order is None:
        raise InconsistencyError("no order passes the rank test although the curve is horizontally regular")
    real_ok = bool(np.all(totally_real_margin(cols[:, :, :order]) > tol))
    return OrderReport(order, margins, real_ok, order == n and real_ok)


@dataclass(frozen=True, eq=False)
class Reduction:
    """A degenerate curve moved into the subgroup H_k.

    ``curve`` is ``symmetry o gamma`` in H_n, ``reduced`` the same curve
    read in H_k, ``residual`` the sup of the coordinates that had to vanish.
    """

    symmetry: Symmetry
    curve: SampledCurve
    reduced: SampledCurve
    residual: float
    order: int


def reduce_degenerate(c: SampledCurve, tol: float = DEFAULT_RANK_TOL, order: int | None = None) -> Reduction:
    """Find ``phi`` in PSH(n) with ``phi o gamma`` inside ``H_k``, ``k`` the order.

    ``phi`` translates ``gamma(0)`` to the origin and then rotates the adapted
    frame at the first sample onto the standard frame, so the complex span of
    ``beta'(0)..beta^(k)(0)`` becomes ``C^k``. Going straight to ``H_k`` is the
    composite of the one-step reductions ``H_n -> H_{n-1} -> ... -> H_k``.
    """
    n = c.n
    k = curve_order(c, tol).order if order is None else int(order)
    if not 1 <= k < n:
        raise ValueError(f"reduction needs a degenerate curve (order < {n}), got order {k}")
    jet = derivatives_at(c, 0, k)
    if not totally_real(jet, tol):
        raise DegeneracyError("osculating span at the base point is not totally real")
    frame = build_frame(jet, tol=tol)
    back = Symmetry.translation_by(group_inv(c.point(0)))
    rotate = Symmetry(frame.rotation.T, HPoint(np.zeros(n), np.zeros(n), 0.0))
    phi = rotate @ back
    moved = c.transformed(phi)
    outside = np.concatenate([moved.points[:, k:n], moved.points[:, n + k:2 * n]], axis=1)
    residual = float(np.max(np.abs(outside)))
    if residual > _REDUCTION_TOL:
        raise InconsistencyError(
            f"curve leaves H_{k} by {residual:.2e} after reduction; the order was misclassified (tolerance too loose)")
    return Reduction(phi, moved, moved.restrict(k), residual, k)
