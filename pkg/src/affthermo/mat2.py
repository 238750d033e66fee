"""Exact-size 2x2 linear algebra: singular values, the singular value
function, rank-one factorization, projective directions and proximality.

Everything here is closed-form; no general SVD routine is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import RankError

#: Default relative tolerance for rank decisions.
DEFAULT_RANK_TOL = 1e-10

#: Tolerance for comparing projective directions (angles mod pi).
DIRECTION_TOL = 1e-12


@dataclass(frozen=True)
class Mat2:
    """A real 2x2 matrix with row-major entries a, b, c, d."""

    a: float
    b: float
    c: float
    d: float

    @staticmethod
    def from_rows(rows) -> "Mat2":
        (a, b), (c, d) = rows
        return Mat2(float(a), float(b), float(c), float(d))

    @staticmethod
    def from_array(arr) -> "Mat2":
        arr = np.asarray(arr, dtype=float)
        return Mat2(arr[0, 0], arr[0, 1], arr[1, 0], arr[1, 1])

    @staticmethod
    def identity() -> "Mat2":
        return Mat2(1.0, 0.0, 0.0, 1.0)

    @staticmethod
    def zero() -> "Mat2":
        return Mat2(0.0, 0.0, 0.0, 0.0)

    @staticmethod
    def rotation(angle: float) -> "Mat2":
        ca, sa = math.cos(angle), math.sin(angle)
        return Mat2(ca, -sa, sa, ca)

    @staticmethod
    def diagonal(x: float, y: float) -> "Mat2":
        return Mat2(float(x), 0.0, 0.0, float(y))

    def to_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __mul__(self, scalar: float) -> "Mat2":
        s = float(scalar)
        return Mat2(self.a * s, self.b * s, self.c * s, self.d * s)

    __rmul__ = __mul__

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.array([self.a * x[0] + self.b * x[1], self.c * x[0] + self.d * x[1]])

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def trace(self) -> float:
        return self.a + self.d

    def transpose(self) -> "Mat2":
        return Mat2(self.a, self.c, self.b, self.d)

    def max_abs_entry(self) -> float:
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))

    def norm(self) -> float:
        """Operator norm, equal to the largest singular value."""
        return self.singular_values()[0]

    def singular_values(self) -> tuple:
        """Largest and smallest singular value, from the eigenvalues of AtA.

        The closed form uses the trace and determinant of AtA with a guarded
        square root; alpha2 is recovered from alpha1*alpha2 = |det A| for
        numerical stability.
        """
        t = self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
        det = self.det()
        disc = t * t - 4.0 * det * det
        if disc < 0.0:
            disc = 0.0
        lam1 = 0.5 * (t + math.sqrt(disc))
        alpha1 = math.sqrt(lam1) if lam1 > 0.0 else 0.0
        alpha2 = abs(det) / alpha1 if alpha1 > 0.0 else 0.0
        if alpha2 > alpha1:
            alpha2 = alpha1
        return alpha1, alpha2

    def spectral_radius(self) -> float:
        t = self.trace()
        det = self.det()
        disc = t * t - 4.0 * det
        if disc >= 0.0:
            r = math.sqrt(disc)
            return max(abs(0.5 * (t + r)), abs(0.5 * (t - r)))
        # complex conjugate pair; modulus is sqrt(det)
        return math.sqrt(det)

    def rank(self, tol: float = DEFAULT_RANK_TOL) -> int:
        """Number of singular values exceeding tol * alpha1.

        Rank 0 is declared when every entry vanishes within tol.
        """
        if self.max_abs_entry() <= tol:
            return 0
        alpha1, alpha2 = self.singular_values()
        if alpha1 <= tol:
            return 0
        return 1 + (alpha2 > tol * alpha1)

    def is_invertible(self, tol: float = DEFAULT_RANK_TOL) -> bool:
        return self.rank(tol) == 2

    def is_conformal(self, tol: float = 1e-12) -> Optional[float]:
        """If this matrix is a scalar multiple of an orthogonal matrix,
        return that scalar (the common singular value); otherwise None."""
        g11 = self.a * self.a + self.c * self.c
        g22 = self.b * self.b + self.d * self.d
        g12 = self.a * self.b + self.c * self.d
        scale = max(g11, g22, 1e-300)
        if abs(g11 - g22) <= tol * scale and abs(g12) <= tol * scale:
            return math.sqrt(0.5 * (g11 + g22))
        return None


@dataclass(frozen=True)
class Direction:
    """A line through the origin, represented by its angle mod pi."""

    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", self.angle % math.pi)

    @staticmethod
    def of_vector(x) -> "Direction":
        return Direction(math.atan2(float(x[1]), float(x[0])))

    def unit_vector(self) -> np.ndarray:
        return np.array([math.cos(self.angle), math.sin(self.angle)])

    def perpendicular(self) -> "Direction":
        return Direction(self.angle + math.pi / 2.0)

    def distance(self, other: "Direction") -> float:
        d = abs(self.angle - other.angle) % math.pi
        return min(d, math.pi - d)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Direction):
            return NotImplemented
        return self.distance(other) <= DIRECTION_TOL

    def __hash__(self):
        # tolerance-based equality is incompatible with exact hashing;
        # hash on a coarse bucket so equal directions rarely split
        return hash(round(self.angle, 6))


@dataclass(frozen=True)
class RankOneForm:
    """Factorization A = v w^T of a rank-one matrix, with its projection form.

    For non-nilpotent A the matrix is <v,w> times the oblique projection onto
    its image along its kernel; for nilpotent A it is |v||w| times a rotation
    composed with the orthogonal projection onto the kernel's perpendicular.
    """

    v: np.ndarray
    w: np.ndarray
    nilpotent: bool
    scale: float
    kernel_line: Direction
    image_line: Direction
    rotation: Optional[float]  # signed angle with R(w/|w|) = v/|v|, nilpotent only

    def reconstruct(self) -> Mat2:
        return Mat2(
            self.v[0] * self.w[0],
            self.v[0] * self.w[1],
            self.v[1] * self.w[0],
            self.v[1] * self.w[1],
        )


def singular_values(A: Mat2) -> tuple:
    return A.singular_values()


def svf_phi(A: Mat2, s: float) -> float:
    """Singular value function: alpha1^s for s <= 1, alpha1*alpha2^(s-1) for
    1 < s <= 2, |det|^(s/2) beyond, with the convention 0^0 = 1."""
    if s < 0:
        raise ValueError(f"svf_phi requires s >= 0, got {s}")
    alpha1, alpha2 = A.singular_values()
    if s == 0.0:
        return 1.0
    if s <= 1.0:
        return alpha1**s
    if s <= 2.0:
        if alpha2 == 0.0:
            return 0.0
        return alpha1 * alpha2 ** (s - 1.0)
    return abs(A.det()) ** (s / 2.0)


def rank_one_factor(A: Mat2, tol: float = DEFAULT_RANK_TOL) -> RankOneForm:
    """Factor a rank-one matrix as v w^T with |v| = |w| = sqrt(norm).

    The dominant column fixes the direction of v (ties broken toward the
    first column); w follows from w = A^T v/|v|, which is exact in rank one.
    """
    if A.rank(tol) != 1:
        raise RankError(f"rank_one_factor requires rank 1, got rank {A.rank(tol)}")
    arr = A.to_array()
    col0, col1 = arr[:, 0], arr[:, 1]
    n0, n1 = float(np.hypot(*col0)), float(np.hypot(*col1))
    v_hat = (col0 / n0) if n0 >= n1 else (col1 / n1)
    w_full = arr.T @ v_hat
    alpha1 = float(np.hypot(*w_full))
    root = math.sqrt(alpha1)
    v = v_hat * root
    w = w_full / root
    trace = A.trace()
    nilpotent = abs(trace) <= tol * alpha1
    scale = alpha1 if nilpotent else trace
    image_line = Direction.of_vector(v)
    kernel_line = Direction.of_vector(w).perpendicular()
    rotation = None
    if nilpotent:
        w_hat = w_full / alpha1
        rotation = math.atan2(
            w_hat[0] * v_hat[1] - w_hat[1] * v_hat[0], float(w_hat @ v_hat)
        )
    return RankOneForm(v, w, nilpotent, scale, kernel_line, image_line, rotation)


def is_proximal(A: Mat2, tol: float = DEFAULT_RANK_TOL) -> bool:
    """True iff A has two real eigenvalues with different absolute values."""
    alpha1, _ = A.singular_values()
    if abs(A.det()) <= tol * alpha1 * alpha1:
        raise RankError("is_proximal requires an invertible matrix")
    t = A.trace()
    return bool(t * t > 4.0 * A.det() and t != 0.0)


def projective_action(A: Mat2, direction: Direction) -> Direction:
    """Image line of a direction under A; requires A nonzero on the line."""
    y = A.apply(direction.unit_vector())
    n = float(np.hypot(*y))
    if n <= 1e-300:
        raise RankError("direction lies in the kernel; image is not a line")
    return Direction.of_vector(y)
