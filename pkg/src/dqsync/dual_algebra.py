"""Dual numbers, quaternions, and dual quaternions.

The three value types defined here are the scalar tower the rest of the
package computes over: ``DualNumber`` (a + b*eps with eps**2 = 0),
``Quaternion`` (Hamilton's algebra), and ``DualQuaternion`` (a dual number
whose coordinates are quaternions). Every type is an immutable value and
every operation is pure, so instances can be shared freely across threads.

Scalars are 64-bit floats throughout. Nilpotency (and therefore
invertibility) is decided relative to the operand's magnitude with the
threshold ``TAU_ZERO``; algebraic identities are verified in tests against
``TAU_NUM``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering

import numpy as np

from .errors import DomainError, NotInvertible

# Nilpotency / invertibility threshold, relative to operand magnitude.
TAU_ZERO = 1e-12
# Default tolerance for numerically verified algebraic identities.
TAU_NUM = 1e-9


@total_ordering
@dataclass(frozen=True)
class DualNumber:
    """a + b*eps where eps**2 = 0.

    ``re`` is the real coordinate, ``du`` the dual coordinate. The order
    implemented by the comparison operators is lexicographic: first by the
    real coordinate, ties broken by the dual coordinate. It is a total
    order.
    """

    re: float
    du: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "re", float(self.re))
        object.__setattr__(self, "du", float(self.du))

    # -- predicates -------------------------------------------------------

    @property
    def is_nilpotent(self) -> bool:
        """True when the real coordinate vanishes relative to the operand size."""
        scale = max(abs(self.re), abs(self.du))
        return abs(self.re) <= TAU_ZERO * scale

    @property
    def is_invertible(self) -> bool:
        return not self.is_nilpotent

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = _as_dual(other)
        if other is NotImplemented:
            return NotImplemented
        return DualNumber(self.re + other.re, self.du + other.du)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_dual(other)
        if other is NotImplemented:
            return NotImplemented
        return DualNumber(self.re - other.re, self.du - other.du)

    def __rsub__(self, other):
        other = _as_dual(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _as_dual(other)
        if other is NotImplemented:
            return NotImplemented
        return DualNumber(self.re * other.re, self.re * other.du + self.du * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_dual(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _as_dual(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __neg__(self):
        return DualNumber(-self.re, -self.du)

    def __lt__(self, other):
        other = _as_dual(other)
        if other is NotImplemented:
            return NotImplemented
        return (self.re, self.du) < (other.re, other.du)

    def inverse(self) -> "DualNumber":
        """Multiplicative inverse a**-1 - b*a**-2*eps; raises NotInvertible if nilpotent."""
        if self.is_nilpotent:
            raise NotInvertible(f"dual number {self!r} has no inverse")
        inv = 1.0 / self.re
        return DualNumber(inv, -self.du * inv * inv)

    def sqrt(self) -> "DualNumber":
        """Square root, defined for positive-and-invertible operands and for zero."""
        if self.re > 0.0:
            s = math.sqrt(self.re)
            return DualNumber(s, self.du / (2.0 * s))
        if self.re == 0.0 and self.du == 0.0:
            return DualNumber(0.0, 0.0)
        raise DomainError(f"square root undefined for {self!r}")

    def __abs__(self) -> "DualNumber":
        if self.re != 0.0:
            sgn = 1.0 if self.re > 0.0 else -1.0
            return DualNumber(abs(self.re), sgn * self.du)
        return DualNumber(0.0, abs(self.du))

    def __repr__(self):
        return f"DualNumber({self.re!r}, {self.du!r})"


def _as_dual(value):
    if isinstance(value, DualNumber):
        return value
    if isinstance(value, (int, float)):
        return DualNumber(float(value))
    return NotImplemented


@dataclass(frozen=True)
class Quaternion:
    """Hamilton quaternion w + x*i + y*j + z*k.

    ``w`` is the first coordinate; the generator relations are
    i**2 = j**2 = k**2 = i*j*k = -1. Conjugation negates the i, j, k
    coordinates and is an anti-automorphism of the product.
    """

    w: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        for name in ("w", "x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def identity(cls) -> "Quaternion":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_vector(cls, v) -> "Quaternion":
        """Pure quaternion v1*i + v2*j + v3*k from a 3-vector."""
        v = np.asarray(v, dtype=float)
        return cls(0.0, v[0], v[1], v[2])

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def __add__(self, other):
        other = _as_quat(other)
        if other is NotImplemented:
            return NotImplemented
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_quat(other)
        if other is NotImplemented:
            return NotImplemented
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __rsub__(self, other):
        other = _as_quat(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            s = float(other)
            return Quaternion(self.w * s, self.x * s, self.y * s, self.z * s)
        if isinstance(other, Quaternion):
            w1, x1, y1, z1 = self.w, self.x, self.y, self.z
            w2, x2, y2, z2 = other.w, other.x, other.y, other.z
            return Quaternion(
                w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
                w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
                w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
                w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
            )
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return NotImplemented

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def dot(self, other: "Quaternion") -> float:
        """Euclidean inner product of the coefficient 4-vectors."""
        return self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z

    def norm_squared(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    def inverse(self) -> "Quaternion":
        n2 = self.norm_squared()
        if math.sqrt(n2) <= TAU_ZERO:
            raise NotInvertible("zero quaternion has no inverse")
        return Quaternion(self.w / n2, -self.x / n2, -self.y / n2, -self.z / n2)

    def normalized(self) -> "Quaternion":
        n = self.norm()
        if n <= TAU_ZERO:
            raise NotInvertible("cannot normalize the zero quaternion")
        return Quaternion(self.w / n, self.x / n, self.y / n, self.z / n)

    def __repr__(self):
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"


def _as_quat(value):
    if isinstance(value, Quaternion):
        return value
    if isinstance(value, (int, float)):
        return Quaternion(float(value))
    return NotImplemented


@dataclass(frozen=True)
class DualQuaternion:
    """a + b*eps with quaternion coordinates a (``re``) and b (``du``).

    The product follows the dual-number rule with quaternion products in
    place of real ones; dual numbers are central, so multiplying or
    dividing by a ``DualNumber`` acts on both coordinates.
    """

    re: Quaternion
    du: Quaternion = Quaternion(0.0)

    @classmethod
    def identity(cls) -> "DualQuaternion":
        return cls(Quaternion.identity())

    @classmethod
    def zero(cls) -> "DualQuaternion":
        return cls(Quaternion(0.0))

    @classmethod
    def from_array(cls, arr) -> "DualQuaternion":
        """Build from a (2, 4) array: row 0 the real, row 1 the dual coordinate."""
        arr = np.asarray(arr, dtype=float)
        return cls(Quaternion(*arr[0]), Quaternion(*arr[1]))

    def as_array(self) -> np.ndarray:
        return np.array([self.re.as_array(), self.du.as_array()])

    @property
    def is_nilpotent(self) -> bool:
        scale = max(self.re.norm(), self.du.norm())
        return self.re.norm() <= TAU_ZERO * scale

    def is_unit(self, tol: float = TAU_NUM) -> bool:
        d = self.conj_product()
        return abs(d.re - 1.0) <= tol and abs(d.du) <= tol

    def __add__(self, other):
        other = _as_dq(other)
        if other is NotImplemented:
            return NotImplemented
        return DualQuaternion(self.re + other.re, self.du + other.du)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_dq(other)
        if other is NotImplemented:
            return NotImplemented
        return DualQuaternion(self.re - other.re, self.du - other.du)

    def __rsub__(self, other):
        other = _as_dq(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, DualNumber):
            # Dual numbers are central: scale both coordinates.
            return DualQuaternion(
                self.re * other.re, self.re * other.du + self.du * other.re
            )
        other = _as_dq(other)
        if other is NotImplemented:
            return NotImplemented
        return DualQuaternion(
            self.re * other.re, self.re * other.du + self.du * other.re
        )

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            s = float(other)
            return DualQuaternion(self.re * s, self.du * s)
        if isinstance(other, DualNumber):
            return self * other
        if isinstance(other, Quaternion):
            return DualQuaternion(other) * self
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            other = DualNumber(float(other))
        if isinstance(other, DualNumber):
            return self * other.inverse()
        return NotImplemented

    def __neg__(self):
        return DualQuaternion(-self.re, -self.du)

    def conjugate(self) -> "DualQuaternion":
        """Quaternion-conjugate both coordinates (the algebra involution)."""
        return DualQuaternion(self.re.conjugate(), self.du.conjugate())

    def combined_conjugate(self) -> "DualQuaternion":
        """Quaternion-conjugate both coordinates and negate the dual one.

        This is the conjugate under which unit dual quaternions act on
        embedded points of 3-space.
        """
        return DualQuaternion(self.re.conjugate(), -self.du.conjugate())

    def conj_product(self) -> DualNumber:
        """x* x as a dual number: |a|**2 + (a b* + b a*) eps."""
        return DualNumber(self.re.norm_squared(), 2.0 * self.re.dot(self.du))

    def __abs__(self) -> DualNumber:
        na2 = self.re.norm_squared()
        if na2 != 0.0:
            na = math.sqrt(na2)
            return DualNumber(na, self.re.dot(self.du) / na)
        return DualNumber(0.0, self.du.norm())

    def inverse(self) -> "DualQuaternion":
        """x* / (x* x); defined exactly for the non-nilpotent elements."""
        if self.is_nilpotent:
            raise NotInvertible(f"dual quaternion {self!r} has no inverse")
        return self.conjugate() * self.conj_product().inverse()

    def __repr__(self):
        return f"DualQuaternion({self.re!r}, {self.du!r})"


def _as_dq(value):
    if isinstance(value, DualQuaternion):
        return value
    if isinstance(value, Quaternion):
        return DualQuaternion(value)
    if isinstance(value, (int, float)):
        return DualQuaternion(Quaternion(float(value)))
    return NotImplemented
