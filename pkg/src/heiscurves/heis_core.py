"""Heisenberg group H_n, its contact/CR structure and the rigid motions PSH(n).

Points are stored as real arrays ordered ``(x_1..x_n, y_1..y_n, z)``. Horizontal
vectors are stored by their coefficients in the left-invariant frame
``e_1..e_2n`` (same x-block / y-block order), which identifies the contact
plane with C^n through ``x + i y``; the CR structure J is multiplication by i.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "HPoint",
    "TangentVector",
    "Symmetry",
    "origin",
    "group_mul",
    "group_inv",
    "mul_arrays",
    "inv_arrays",
    "j_matrix",
    "j_apply",
    "levi_inner",
    "contact_theta",
    "theta_arrays",
    "decompose",
    "apply_symmetry",
    "symmetry_to_matrix",
    "project_unitary",
    "random_unitary",
    "random_symmetry",
    "to_complex",
    "to_real",
]

# how far an input rotation may be from U(n) before projection refuses it
_PROJECTION_GUARD = 1e-6


def to_complex(v: np.ndarray) -> np.ndarray:
    """Map real ``(..., 2n)`` coefficient arrays to complex ``(..., n)`` arrays."""
    v = np.asarray(v, dtype=float)
    n = v.shape[-1] // 2
    return v[..., :n] + 1j * v[..., n:]


def to_real(c: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_complex`."""
    c = np.asarray(c, dtype=complex)
    return np.concatenate([c.real, c.imag], axis=-1)


@dataclass(frozen=True, eq=False)
class HPoint:
    """A point ``(x, y, z)`` of H_n."""

    x: np.ndarray
    y: np.ndarray
    z: float

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float)).copy()
        y = np.atleast_1d(np.asarray(self.y, dtype=float)).copy()
        if x.ndim != 1 or x.shape != y.shape or x.size == 0:
            raise ValueError(f"x and y must be non-empty vectors of equal length, got {x.shape} and {y.shape}")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", float(self.z))

    @property
    def n(self) -> int:
        return self.x.size

    @classmethod
    def from_array(cls, arr) -> "HPoint":
        arr = np.asarray(arr, dtype=float)
        if arr.ndim != 1 or arr.size % 2 != 1 or arr.size < 3:
            raise ValueError(f"expected a vector of odd length 2n+1, got shape {arr.shape}")
        n = arr.size // 2
        return cls(arr[:n], arr[n:2 * n], arr[2 * n])

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.x, self.y, [self.z]])

    @property
    def beta(self) -> np.ndarray:
        """Projection to C^n."""
        return self.x + 1j * self.y

    def __eq__(self, other):
        if not isinstance(other, HPoint):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.as_array(), other.as_array())

    def __repr__(self):
        return f"HPoint(x={self.x.tolist()}, y={self.y.tolist()}, z={self.z!r})"


def origin(n: int) -> HPoint:
    return HPoint(np.zeros(n), np.zeros(n), 0.0)


def mul_arrays(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Group product on broadcastable ``(..., 2n+1)`` coordinate arrays."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape[-1] != q.shape[-1]:
        raise ValueError(f"dimension mismatch: {p.shape[-1]} vs {q.shape[-1]}")
    n = p.shape[-1] // 2
    px, py = p[..., :n], p[..., n:2 * n]
    qx, qy = q[..., :n], q[..., n:2 * n]
    out = np.array(np.broadcast_arrays(p, q)[0], dtype=float, copy=True)
    out[..., :2 * n] = p[..., :2 * n] + q[..., :2 * n]
    out[..., 2 * n] = p[..., 2 * n] + q[..., 2 * n] + np.sum(py * qx - px * qy, axis=-1)
    return out


def inv_arrays(p: np.ndarray) -> np.ndarray:
    return -np.asarray(p, dtype=float)


def group_mul(p: HPoint, q: HPoint) -> HPoint:
    """Return ``p o q``."""
    if p.n != q.n:
        raise ValueError(f"dimension mismatch: H_{p.n} vs H_{q.n}")
    return HPoint.from_array(mul_arrays(p.as_array(), q.as_array()))


def group_inv(p: HPoint) -> HPoint:
    return HPoint(-p.x, -p.y, -p.z)


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A tangent vector at ``base`` written in the frame ``e_1..e_2n, T``."""

    base: HPoint
    xi: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float).copy()
        if xi.shape != (2 * self.base.n,):
            raise ValueError(f"xi must have length {2 * self.base.n}, got shape {xi.shape}")
        xi.flags.writeable = False
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "t", float(self.t))

    @property
    def is_horizontal(self) -> bool:
        return self.t == 0.0

    def to_coordinates(self) -> np.ndarray:
        """Coordinate components ``(dx, dy, dz)`` of this vector."""
        n = self.base.n
        a, b = self.xi[:n], self.xi[n:]
        dz = self.t + np.dot(self.base.y, a) - np.dot(self.base.x, b)
        return np.concatenate([a, b, [dz]])


def j_matrix(n: int) -> np.ndarray:
    """The matrix J_0 of the CR structure on frame coefficients."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


def j_apply(v: TangentVector) -> TangentVector:
    """Apply the CR structure J to a horizontal vector."""
    if v.t != 0.0:
        raise ValueError("J is only defined on the contact plane; t coefficient must be 0")
    n = v.base.n
    return TangentVector(v.base, np.concatenate([-v.xi[n:], v.xi[:n]]), 0.0)


def levi_inner(u: TangentVector, v: TangentVector) -> float:
    """Levi metric: the frame ``e_1..e_2n, T`` is orthonormal."""
    if u.base != v.base:
        raise ValueError("tangent vectors live at different base points")
    return float(np.dot(u.xi, v.xi) + u.t * v.t)


def theta_arrays(points: np.ndarray, velocities: np.ndarray) -> np.ndarray:
    """Contact form evaluated row-wise: ``dz + sum(x dy - y dx)``."""
    points = np.asarray(points, dtype=float)
    velocities = np.asarray(velocities, dtype=float)
    n = points.shape[-1] // 2
    x, y = points[..., :n], points[..., n:2 * n]
    dx, dy, dz = velocities[..., :n], velocities[..., n:2 * n], velocities[..., 2 * n]
    return dz + np.sum(x * dy - y * dx, axis=-1)


def contact_theta(base: HPoint, velocity) -> float:
    """Evaluate theta on a coordinate vector ``(dx, dy, dz)`` at ``base``."""
    velocity = np.asarray(velocity, dtype=float)
    if velocity.shape != (2 * base.n + 1,):
        raise ValueError(f"velocity must have length {2 * base.n + 1}")
    return float(theta_arrays(base.as_array(), velocity))


def decompose(base: HPoint, velocity) -> TangentVector:
    """Split a coordinate vector into its contact part and its T part."""
    velocity = np.asarray(velocity, dtype=float)
    n = base.n
    return TangentVector(base, velocity[:2 * n], contact_theta(base, velocity))


def _unitary_residuals(rot: np.ndarray) -> tuple[float, float]:
    n2 = rot.shape[0]
    jm = j_matrix(n2 // 2)
    orth = np.max(np.abs(rot.T @ rot - np.eye(n2)))
    comm = np.max(np.abs(rot @ jm - jm @ rot))
    return float(orth), float(comm)


def project_unitary(rot: np.ndarray) -> np.ndarray:
    """Nearest J_0-commuting orthogonal matrix (polar factor of the complex block)."""
    rot = np.asarray(rot, dtype=float)
    n = rot.shape[0] // 2
    a = 0.5 * (rot[:n, :n] + rot[n:, n:])
    b = 0.5 * (rot[n:, :n] - rot[:n, n:])
    u, _, vh = np.linalg.svd(a + 1j * b)
    w = u @ vh
    return np.block([[w.real, -w.imag], [w.imag, w.real]])


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random element of U(n) as a real 2n x 2n matrix."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return np.block([[q.real, -q.imag], [q.imag, q.real]])


@dataclass(frozen=True, eq=False)
class Symmetry:
    """Element of PSH(n): ``q -> translation o (rotation . q)``.

    The rotation acts on the (x, y) block and fixes z; it is projected onto
    the J_0-commuting orthogonal matrices at construction.
    """

    rotation: np.ndarray
    translation: HPoint = field(default=None)

    def __post_init__(self):
        rot = np.asarray(self.rotation, dtype=float)
        if rot.ndim != 2 or rot.shape[0] != rot.shape[1] or rot.shape[0] % 2:
            raise ValueError(f"rotation must be a square 2n x 2n matrix, got {rot.shape}")
        n = rot.shape[0] // 2
        trans = self.translation if self.translation is not None else origin(n)
        if trans.n != n:
            raise ValueError(f"translation lives in H_{trans.n}, rotation in U({n})")
        orth, comm = _unitary_residuals(rot)
        if orth > _PROJECTION_GUARD or comm > _PROJECTION_GUARD:
            raise ValueError(
                f"rotation is not (close to) unitary: orthogonality {orth:.2e}, J-commutator {comm:.2e}")
        rot = project_unitary(rot)
        rot.flags.writeable = False
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", trans)

    @property
    def n(self) -> int:
        return self.rotation.shape[0] // 2

    @classmethod
    def identity(cls, n: int) -> "Symmetry":
        return cls(np.eye(2 * n), origin(n))

    @classmethod
    def translation_by(cls, p: HPoint) -> "Symmetry":
        return cls(np.eye(2 * p.n), p)

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "Symmetry":
        """Inverse of :func:`symmetry_to_matrix` (the last row is re-derived)."""
        m = np.asarray(m, dtype=float)
        d = m.shape[0]
        if m.shape != (d, d) or d % 2:
            raise ValueError(f"expected a (2n+2) x (2n+2) matrix, got {m.shape}")
        n = (d - 2) // 2
        pxy = m[1:2 * n + 1, 0]
        trans = HPoint(pxy[:n], pxy[n:], m[2 * n + 1, 0])
        return cls(m[1:2 * n + 1, 1:2 * n + 1], trans)

    def matrix(self) -> np.ndarray:
        return symmetry_to_matrix(self)

    def apply_arrays(self, points: np.ndarray) -> np.ndarray:
        """Apply to ``(..., 2n+1)`` coordinate arrays."""
        points = np.asarray(points, dtype=float)
        n = self.n
        if points.shape[-1] != 2 * n + 1:
            raise ValueError(f"points must have {2 * n + 1} coordinates, got {points.shape[-1]}")
        rotated = np.array(points, dtype=float, copy=True)
        rotated[..., :2 * n] = points[..., :2 * n] @ self.rotation.T
        return mul_arrays(self.translation.as_array(), rotated)

    def __call__(self, p: HPoint) -> HPoint:
        return apply_symmetry(self, p)

    def __matmul__(self, other: "Symmetry") -> "Symmetry":
        """Composition ``self o other``."""
        if not isinstance(other, Symmetry):
            return NotImplemented
        if other.n != self.n:
            raise ValueError("cannot compose symmetries of different dimension")
        return Symmetry.from_matrix(self.matrix() @ other.matrix())

    def inverse(self) -> "Symmetry":
        rt = self.rotation.T
        n = self.n
        p = self.translation.as_array()
        back = np.concatenate([-(rt @ p[:2 * n]), [-p[2 * n]]])
        # R^T fixes z and preserves the symplectic form, so R^T(p^-1) is the translation part
        return Symmetry(rt, HPoint.from_array(back))

    def __repr__(self):
        return f"Symmetry(n={self.n}, translation={self.translation!r})"


def apply_symmetry(phi: Symmetry, p: HPoint) -> HPoint:
    if phi.n != p.n:
        raise ValueError(f"dimension mismatch: PSH({phi.n}) acting on H_{p.n}")
    return HPoint.from_array(phi.apply_arrays(p.as_array()))


def symmetry_to_matrix(phi: Symmetry) -> np.ndarray:
    """Matrix ``M`` with ``M @ (1, q) = (1, phi(q))``."""
    n = phi.n
    p = phi.translation
    m = np.zeros((2 * n + 2, 2 * n + 2))
    m[0, 0] = 1.0
    m[1:2 * n + 1, 0] = np.concatenate([p.x, p.y])
    m[1:2 * n + 1, 1:2 * n + 1] = phi.rotation
    m[2 * n + 1, 0] = p.z
    m[2 * n + 1, 1:2 * n + 1] = np.concatenate([p.y, -p.x]) @ phi.rotation
    m[2 * n + 1, 2 * n + 1] = 1.0
    return m


def random_symmetry(n: int, rng: np.random.Generator, scale: float = 1.0) -> Symmetry:
    trans = HPoint.from_array(scale * rng.standard_normal(2 * n + 1))
    return Symmetry(random_unitary(n, rng), trans)
