"""Dense vectors and matrices over the dual quaternions.

Entries are stored packed as float arrays of shape (..., 2, 4): axis -2
separates the real and dual quaternion coordinates, axis -1 holds the
(w, x, y, z) components. Bulk products are evaluated with vectorized
Hamilton products, which keeps matrix-vector work in numpy; individual
entries are exposed as ``DualQuaternion`` values.

The norm of a vector follows the two-case rule: a vector whose entries
all have vanishing real coordinates has norm c*eps (an honest nilpotent),
otherwise the norm is the dual-number square root of the entry-wise sum
of |x_j|**2. The power iteration approximates the eigenpair whose
eigenvalue has the largest real-coordinate magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dual_algebra import TAU_NUM, TAU_ZERO, DualNumber, DualQuaternion
from .errors import DimensionMismatch, NotHermitian, ZeroIterate

_QCONJ = np.array([1.0, -1.0, -1.0, -1.0])


def _quat_mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product on trailing axis-4 arrays, broadcasting leading axes."""
    w1, x1, y1, z1 = np.moveaxis(p, -1, 0)
    w2, x2, y2, z2 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ],
        axis=-1,
    )


def _dq_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Entry-wise dual quaternion product on (..., 2, 4) arrays."""
    re = _quat_mul(a[..., 0, :], b[..., 0, :])
    du = _quat_mul(a[..., 0, :], b[..., 1, :]) + _quat_mul(a[..., 1, :], b[..., 0, :])
    return np.stack([re, du], axis=-2)


def _dq_conj(a: np.ndarray) -> np.ndarray:
    return a * _QCONJ


def _dq_scale_dual(a: np.ndarray, d: DualNumber) -> np.ndarray:
    """Entry-wise product with a central dual number."""
    re = a[..., 0, :] * d.re
    du = a[..., 1, :] * d.re + a[..., 0, :] * d.du
    return np.stack([re, du], axis=-2)


class DQVector:
    """A column of dual quaternions, packed as a (n, 2, 4) float array."""

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray):
        data = np.asarray(data, dtype=float)
        if data.ndim != 3 or data.shape[1:] != (2, 4) or data.shape[0] < 1:
            raise DimensionMismatch(f"expected shape (n, 2, 4), got {data.shape}")
        self.data = data

    @classmethod
    def from_entries(cls, entries) -> "DQVector":
        return cls(np.array([e.as_array() for e in entries]))

    @classmethod
    def zeros(cls, n: int) -> "DQVector":
        return cls(np.zeros((n, 2, 4)))

    def __len__(self) -> int:
        return self.data.shape[0]

    def __getitem__(self, j: int) -> DualQuaternion:
        return DualQuaternion.from_array(self.data[j])

    def entries(self) -> list[DualQuaternion]:
        return [DualQuaternion.from_array(row) for row in self.data]

    def __add__(self, other: "DQVector") -> "DQVector":
        self._check_same_length(other)
        return DQVector(self.data + other.data)

    def __sub__(self, other: "DQVector") -> "DQVector":
        self._check_same_length(other)
        return DQVector(self.data - other.data)

    def scale_right(self, a: DualQuaternion) -> "DQVector":
        """Entry-wise right multiplication x_j a."""
        return DQVector(_dq_mul(self.data, a.as_array()[None, :, :]))

    def scale_dual(self, d: DualNumber) -> "DQVector":
        """Multiplication by a central dual number."""
        return DQVector(_dq_scale_dual(self.data, d))

    def __truediv__(self, d: DualNumber) -> "DQVector":
        return self.scale_dual(d.inverse())

    def inner(self, other: "DQVector") -> DualQuaternion:
        """sum_j x_j* y_j."""
        self._check_same_length(other)
        total = _dq_mul(_dq_conj(self.data), other.data).sum(axis=0)
        return DualQuaternion.from_array(total)

    def norm(self) -> DualNumber:
        """Two-case norm; see the module docstring."""
        re_sq = np.einsum("jk,jk->j", self.data[:, 0, :], self.data[:, 0, :])
        du_sq = np.einsum("jk,jk->j", self.data[:, 1, :], self.data[:, 1, :])
        m_re = float(np.sqrt(re_sq.max()))
        m_du = float(np.sqrt(du_sq.max()))
        if m_re <= TAU_ZERO * max(1.0, m_du):
            # Every entry is (numerically) a pure dual: norm is nilpotent.
            return DualNumber(0.0, float(np.sqrt(du_sq.sum())))
        dots = np.einsum("jk,jk->j", self.data[:, 0, :], self.data[:, 1, :])
        total = DualNumber(float(re_sq.sum()), 2.0 * float(dots.sum()))
        return total.sqrt()

    def _check_same_length(self, other: "DQVector"):
        if len(self) != len(other):
            raise DimensionMismatch(f"lengths {len(self)} and {len(other)} differ")


class DQMatrix:
    """A square matrix of dual quaternions, packed as (n, n, 2, 4)."""

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray):
        data = np.asarray(data, dtype=float)
        if (
            data.ndim != 4
            or data.shape[2:] != (2, 4)
            or data.shape[0] != data.shape[1]
            or data.shape[0] < 1
        ):
            raise DimensionMismatch(f"expected shape (n, n, 2, 4), got {data.shape}")
        self.data = data

    @classmethod
    def from_entries(cls, rows) -> "DQMatrix":
        return cls(np.array([[e.as_array() for e in row] for row in rows]))

    @classmethod
    def identity(cls, n: int) -> "DQMatrix":
        data = np.zeros((n, n, 2, 4))
        data[np.arange(n), np.arange(n), 0, 0] = 1.0
        return cls(data)

    @classmethod
    def zeros(cls, n: int) -> "DQMatrix":
        return cls(np.zeros((n, n, 2, 4)))

    @classmethod
    def outer(cls, x: DQVector, y: DQVector) -> "DQMatrix":
        """x y*: entries x_i y_j*."""
        if len(x) != len(y):
            raise DimensionMismatch(f"lengths {len(x)} and {len(y)} differ")
        return cls(_dq_mul(x.data[:, None], _dq_conj(y.data)[None, :]))

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def __getitem__(self, ij) -> DualQuaternion:
        i, j = ij
        return DualQuaternion.from_array(self.data[i, j])

    def conj_transpose(self) -> "DQMatrix":
        return DQMatrix(_dq_conj(self.data.swapaxes(0, 1)))

    def symmetrized(self) -> "DQMatrix":
        """(A + A*) / 2; the result is Hermitian exactly."""
        return DQMatrix(0.5 * (self.data + _dq_conj(self.data.swapaxes(0, 1))))

    def is_hermitian(self, tol: float = TAU_NUM) -> bool:
        return float(np.max(np.abs(self.data - _dq_conj(self.data.swapaxes(0, 1))))) <= tol

    def __add__(self, other: "DQMatrix") -> "DQMatrix":
        if self.n != other.n:
            raise DimensionMismatch(f"sizes {self.n} and {other.n} differ")
        return DQMatrix(self.data + other.data)

    def scale(self, s: float) -> "DQMatrix":
        return DQMatrix(self.data * float(s))

    def __matmul__(self, x: DQVector) -> DQVector:
        if not isinstance(x, DQVector):
            return NotImplemented
        if len(x) != self.n:
            raise DimensionMismatch(f"matrix size {self.n}, vector length {len(x)}")
        return DQVector(_dq_mul(self.data, x.data[None, :, :, :]).sum(axis=1))


@dataclass
class PowerIterationResult:
    """Dominant eigenpair estimate and the iteration's trace."""

    eigvec: DQVector
    eigval: DualNumber
    iterations: int
    residual: float
    converged: bool
    residuals: list[float] = field(default_factory=list)


def random_dqvector(n: int, rng: np.random.Generator) -> DQVector:
    """Standard Gaussian on all eight components of every entry, normalized.

    Almost surely the expansion coefficient on the dominant eigenvector has
    a non-zero real coordinate, which the convergence theory requires.
    """
    v = DQVector(rng.normal(size=(n, 2, 4)))
    return v / v.norm()


def power_iteration(
    a: DQMatrix,
    v0: DQVector | None = None,
    max_iters: int | None = None,
    tol: float = 1e-10,
    rng: np.random.Generator | int | None = None,
    hermitian_tol: float = TAU_NUM,
) -> PowerIterationResult:
    """Dominant eigenpair of a Hermitian dual quaternion matrix.

    Iterates y = A v, lambda = v* y, v <- y / ||y|| until the residual
    ||A v - v lambda|| (standard part) drops to ``tol`` or ``max_iters``
    (default 10 n + 1000) runs out; running out sets ``converged`` False
    without raising. The eigenvalue returned is the dual number read off
    the self-adjoint Rayleigh product.

    Raises ``ZeroIterate`` when an iterate's norm has no usable standard
    part (a rank-deficient direction, or a vector that is purely dual);
    synchronization matrices never reach this branch because their
    identity diagonal keeps real parts alive.
    """
    if not a.is_hermitian(hermitian_tol):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    n = a.n
    if max_iters is None:
        max_iters = 10 * n + 1000
    if v0 is None:
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(0 if rng is None else rng)
        v0 = random_dqvector(n, rng)
    elif len(v0) != n:
        raise DimensionMismatch(f"matrix size {n}, start vector length {len(v0)}")

    nv = v0.norm()
    if nv.re <= TAU_ZERO:
        raise ZeroIterate("start vector has no real part to iterate on")
    v = v0 / nv
    y = a @ v
    lam = DualNumber(0.0)
    residual = float("inf")
    residuals: list[float] = []
    iterations = 0
    converged = False
    for k in range(1, max_iters + 1):
        ny = y.norm()
        if ny.re <= TAU_ZERO:
            raise ZeroIterate(f"iterate {k} has norm {ny!r}")
        v = y / ny
        y = a @ v
        rayleigh = v.inner(y)
        lam = DualNumber(rayleigh.re.w, rayleigh.du.w)
        residual = (y - v.scale_dual(lam)).norm().re
        residuals.append(residual)
        iterations = k
        if residual <= tol:
            converged = True
            break
    return PowerIterationResult(v, lam, iterations, residual, converged, residuals)
