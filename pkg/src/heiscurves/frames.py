"""Adapted moving frames, p-curvatures, contact normality and the Darboux matrix.

Frame vectors are handled as complex n-vectors (contact-plane coefficients
``x + i y``), so ``J e`` is ``1j * e`` and the real Levi inner product is
``Re(vdot(u, v))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rank import DEFAULT_RANK_TOL, complex_rank_margin
from .curve import SampledCurve, HorizontalJet, derivative_array, jet_arrays
from .exceptions import ConditioningError, DegeneracyError, ResolutionError
from .heis_core import HPoint, Symmetry, j_matrix, to_real

__all__ = [
    "FrameState",
    "InvariantProfile",
    "hermitian_gram_schmidt",
    "complete_unitary",
    "build_frame",
    "frame_fields",
    "invariants_along",
    "darboux_from_values",
    "darboux_matrix",
]

_FRAME_TOL = 1e-8
_CONDITIONING_TOL = 1e-6
_MAX_FRAME_ANGLE = 0.5
_UNIT_SPEED_TOL = 5e-4


@dataclass(frozen=True, eq=False)
class FrameState:
    """The lifted frame ``(gamma; e_1..e_2n, T)`` at one point.

    ``e[a]`` holds the coefficients of ``e_{a+1}`` in the left-invariant
    frame, so the rotation part of the corresponding PSH(n) element has the
    ``e[a]`` as columns.
    """

    base: HPoint
    e: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.e, dtype=float).copy()
        n = self.base.n
        if e.shape != (2 * n, 2 * n):
            raise ValueError(f"frame must hold {2 * n} vectors of length {2 * n}, got {e.shape}")
        gram = np.max(np.abs(e @ e.T - np.eye(2 * n)))
        if gram > _FRAME_TOL:
            raise ConditioningError(f"frame is not orthonormal (residual {gram:.2e})")
        adapted = np.max(np.abs(e[n:] - e[:n] @ j_matrix(n).T))
        if adapted > _FRAME_TOL:
            raise ValueError(f"frame is not J-adapted (residual {adapted:.2e})")
        e.flags.writeable = False
        object.__setattr__(self, "e", e)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def rotation(self) -> np.ndarray:
        return self.e.T

    def symmetry(self) -> Symmetry:
        """The PSH(n) element carrying the standard frame at the origin to this frame."""
        return Symmetry(self.rotation, self.base)

    def matrix(self) -> np.ndarray:
        return self.symmetry().matrix()


@dataclass(frozen=True, eq=False)
class InvariantProfile:
    """p-curvatures ``kappas[j-1] = kappa_j`` and contact normality on an arc-length grid."""

    s_grid: np.ndarray
    kappas: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s_grid, dtype=float).copy()
        kappas = np.atleast_2d(np.asarray(self.kappas, dtype=float)).copy()
        tau = np.asarray(self.tau, dtype=float).copy()
        if s.ndim != 1 or tau.shape != s.shape or kappas.shape[1:] != s.shape:
            raise ValueError(f"profile arrays disagree: s {s.shape}, kappas {kappas.shape}, tau {tau.shape}")
        if kappas.shape[0] < 1:
            raise ValueError("a profile needs at least one p-curvature")
        for a in (s, kappas, tau):
            a.flags.writeable = False
        object.__setattr__(self, "s_grid", s)
        object.__setattr__(self, "kappas", kappas)
        object.__setattr__(self, "tau", tau)

    @property
    def n(self) -> int:
        return self.kappas.shape[0]

    def __len__(self) -> int:
        return self.s_grid.size

    @property
    def step(self) -> float:
        return float((self.s_grid[-1] - self.s_grid[0]) / (self.s_grid.size - 1))

    def sup_differences(self, other: "InvariantProfile") -> np.ndarray:
        """Sup-norm differences ``(kappa_1, ..., kappa_n, tau)`` against another profile."""
        if other.n != self.n or len(other) != len(self):
            raise ValueError("profiles have different shapes")
        dk = np.max(np.abs(self.kappas - other.kappas), axis=1)
        return np.append(dk, np.max(np.abs(self.tau - other.tau)))

    def as_table(self) -> np.ndarray:
        """Columns ``s, kappa_1, ..., kappa_n, tau``."""
        return np.column_stack([self.s_grid, self.kappas.T, self.tau])


def hermitian_gram_schmidt(vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormalize complex vectors against both ``e_i`` and ``J e_i``.

    ``vectors`` has shape ``(..., k, n)``. Returns the frame vectors and the
    norms of the residuals before normalization. Each output satisfies
    ``<e_j, v_j> = |residual_j| > 0``, which fixes the orientation.
    """
    v = np.array(vectors, dtype=complex, copy=True)
    k = v.shape[-2]
    e = np.empty_like(v)
    norms = np.empty(v.shape[:-1])
    for j in range(k):
        w = v[..., j, :]
        # two passes of modified Gram-Schmidt keep the frame unitary to round-off
        for _ in range(2):
            for i in range(j):
                coeff = np.sum(np.conj(e[..., i, :]) * w, axis=-1, keepdims=True)
                w = w - coeff * e[..., i, :]
        r = np.linalg.norm(w, axis=-1)
        norms[..., j] = r
        with np.errstate(divide="ignore", invalid="ignore"):
            e[..., j, :] = w / r[..., None]
    return e, norms


def complete_unitary(e: np.ndarray) -> np.ndarray:
    """Extend ``k`` orthonormal complex n-vectors (rows) to a unitary basis of C^n."""
    k, n = e.shape
    if k == n:
        return e.copy()
    q, _ = np.linalg.qr(np.concatenate([e.T, np.eye(n, dtype=complex)], axis=1))
    rest = q[:, k:n].T
    rest = rest - (rest @ np.conj(e).T) @ e
    rest, _ = hermitian_gram_schmidt(rest)
    return np.concatenate([e, rest], axis=0)


def _real_frame(e_complex: np.ndarray) -> np.ndarray:
    """Rows ``e_1..e_n, Je_1..Je_n`` as real 2n-vectors."""
    return np.concatenate([to_real(e_complex), to_real(1j * e_complex)], axis=0)


def build_frame(jet: HorizontalJet, base: HPoint | None = None, tol: float = DEFAULT_RANK_TOL) -> FrameState:
    """Adapted frame from the jet ``beta', ..., beta^(k)``.

    For ``k = n`` the frame is fully determined; for a lower order the
    first ``k`` vectors are determined and the rest is a fixed unitary
    completion.
    """
    n = jet.n
    base = base if base is not None else HPoint(np.zeros(n), np.zeros(n), 0.0)
    if base.n != n:
        raise ValueError(f"jet lives in C^{n} but base point in H_{base.n}")
    if jet.order > n:
        raise ValueError(f"a jet of order {jet.order} exceeds the complex dimension {n}")
    margin = complex_rank_margin(jet.beta_derivs.T)
    if not margin > tol:
        raise DegeneracyError(
            f"beta' .. beta^({jet.order}) are complex-dependent (margin {margin:.2e}); classify and reduce the curve first")
    e, _ = hermitian_gram_schmidt(jet.beta_derivs)
    full = complete_unitary(e)
    real = _real_frame(full)
    resid = np.max(np.abs(real @ real.T - np.eye(2 * n)))
    if resid > _CONDITIONING_TOL:
        raise ConditioningError(f"frame orthonormality residual {resid:.2e}")
    # polish round-off so FrameState's 1e-8 invariants hold
    u, _, vh = np.linalg.svd(full.T)
    full = (u @ vh).T
    return FrameState(base, _real_frame(full))


def _check_unit_speed(c: SampledCurve, speed: np.ndarray) -> None:
    if not c.is_arclength:
        raise ValueError("invariants are defined along arc-length curves; reparametrize first")
    dev = np.max(np.abs(speed - 1.0))
    if dev > _UNIT_SPEED_TOL:
        raise ValueError(f"curve flagged arc-length but |beta'| deviates from 1 by {dev:.2e}")


def frame_fields(c: SampledCurve, order: int | None = None, tol: float = DEFAULT_RANK_TOL,
                 stride: int | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sign-coherent frame vectors ``e_1..e_k`` along the whole curve.

    Returns ``(e, derivs, tau)``: ``e`` of shape ``(N, k, n)`` complex, the
    jets used to build it, and the T-coefficient of gamma'.
    """
    k = c.n if order is None else int(order)
    if not 1 <= k <= c.n:
        raise ValueError(f"order must lie in [1, {c.n}], got {k}")
    derivs, tau = jet_arrays(c, k, stride)
    margins = complex_rank_margin(np.swapaxes(derivs, -1, -2))
    bad = np.flatnonzero(~(margins > tol))
    if bad.size:
        raise DegeneracyError(
            f"jet of order {k} is degenerate at {bad.size} samples (first at index {bad[0]}); "
            "classify and reduce the curve first")
    e, _ = hermitian_gram_schmidt(derivs)
    gram = np.einsum("skn,sln->skl", np.conj(e), e)
    resid = np.max(np.abs(gram - np.eye(k)))
    if resid > _CONDITIONING_TOL:
        raise ConditioningError(f"frame orthonormality residual {resid:.2e}")
    # one sequential pass making each field continuous along the grid
    for i in range(1, len(c)):
        dots = np.real(np.sum(np.conj(e[i - 1]) * e[i], axis=-1))
        flip = dots < 0
        if np.any(flip):
            e[i, flip] *= -1.0
    dots = np.clip(np.real(np.sum(np.conj(e[:-1]) * e[1:], axis=-1)), -1.0, 1.0)
    worst = float(np.max(np.arccos(dots)))
    if worst > _MAX_FRAME_ANGLE:
        raise ResolutionError(f"frame turns {worst:.2f} rad between adjacent samples; refine the grid")
    return e, derivs, tau


def invariants_along(c: SampledCurve, order: int | None = None, tol: float = DEFAULT_RANK_TOL,
                     stride: int | None = None) -> InvariantProfile:
    """p-curvatures and contact normality of an arc-length curve.

    ``kappa_j = <e_j', e_{j+1}>`` for ``j < k`` and ``kappa_k = <e_k', J e_k>``
    with ``k`` the order used (``n`` by default); ``tau`` is the T-coefficient
    of the velocity. Frame derivatives are finite differences of the
    sign-coherent frame fields.
    """
    e, derivs, tau = frame_fields(c, order, tol, stride)
    _check_unit_speed(c, np.linalg.norm(derivs[:, 0], axis=-1))
    k = e.shape[1]
    # the frame carries the error of the highest derivative it was built from
    noise = np.finfo(float).eps ** (4.0 / (k + 4))
    de = derivative_array(e, c.params, 1, noise=noise)
    kappas = np.empty((k, len(c)))
    for j in range(k - 1):
        kappas[j] = np.real(np.sum(np.conj(e[:, j + 1]) * de[:, j], axis=-1))
    kappas[k - 1] = np.imag(np.sum(np.conj(e[:, k - 1]) * de[:, k - 1], axis=-1))
    return InvariantProfile(c.params, kappas, tau)


def darboux_from_values(kappas, tau: float) -> np.ndarray:
    """Lie-algebra element ``phi`` with ``M^{-1} dM/ds = phi`` for given invariant values."""
    kappas = np.atleast_1d(np.asarray(kappas, dtype=float))
    n = kappas.size
    phi = np.zeros((2 * n + 2, 2 * n + 2))
    phi[1, 0] = 1.0
    phi[2 * n + 1, 0] = tau
    # -omega^1 sits in the first y-slot of the last row
    phi[2 * n + 1, n + 1] = -1.0
    for j in range(1, n):
        kj = kappas[j - 1]
        for off in (0, n):
            phi[off + j + 1, off + j] = kj
            phi[off + j, off + j + 1] = -kj
    phi[2 * n, n] = kappas[n - 1]
    phi[n, 2 * n] = -kappas[n - 1]
    return phi


def darboux_matrix(profile: InvariantProfile, i: int) -> np.ndarray:
    """The Darboux derivative of the lifted curve at grid index ``i``."""
    return darboux_from_values(profile.kappas[:, i], profile.tau[i])
