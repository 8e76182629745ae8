"""Rigid motions of 3-space and their interchangeable representations.

A pose is carried as ``SE3Element``: a unit quaternion on the canonical
sheet of the double cover (non-negative first coordinate) plus a
translation 3-vector. Conversions are provided to and from unit dual
quaternions, 4x4 homogeneous matrices, and axis-angle form, together with
the group operations, the point actions, and the projections used by the
synchronization solvers.

Embedding convention
--------------------
A pose (R, t) maps to the unit dual quaternion

    x = q + (1/2) t' q * eps

where q covers R and t' = t1*i + t2*j + t3*k. Equivalently x = t_dq * q
with t_dq = 1 + (1/2) t' eps, i.e. the translation factor sits on the
LEFT. This is the factor order under which the point action
x (1 + s' eps) x-bar  (x-bar the combined conjugate) expands to
1 + (q s' q* + t') eps, matching the rotation-then-translate convention
of the pair representation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dual_algebra import TAU_NUM, TAU_ZERO, DualQuaternion, Quaternion
from .errors import (
    Degenerate,
    NotAPose,
    NotPure,
    NotUnit,
    ZeroInput,
)

# Validation threshold for externally supplied data (files, user matrices).
# Internally produced values are held to the tighter TAU_NUM by tests.
TAU_LOOSE = 1e-6


def canonical_quat(q: Quaternion) -> Quaternion:
    """Flip q to the canonical sheet: w > 0, or w ~ 0 and the first
    non-zero of (x, y, z) positive."""
    w = q.w
    if w > TAU_ZERO:
        return q
    if w < -TAU_ZERO:
        return -q
    for c in (q.x, q.y, q.z):
        if c != 0.0:
            return q if c > 0.0 else -q
    return q


@dataclass(frozen=True, eq=False)
class SE3Element:
    """A rigid motion: canonical unit rotation quaternion plus translation.

    The constructor validates rather than repairs: the quaternion must be
    unit within ``TAU_LOOSE`` and on the canonical sheet (w >= 0 up to
    ``TAU_ZERO``). Values parsed from files are therefore stored verbatim,
    which keeps write/read round trips exact.
    """

    rot: Quaternion
    trans: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.trans, dtype=float)
        if t.shape != (3,):
            raise NotAPose(f"translation must be a 3-vector, got shape {t.shape}")
        object.__setattr__(self, "trans", t)
        n = self.rot.norm()
        if abs(n - 1.0) > TAU_LOOSE:
            raise NotUnit(f"rotation quaternion has norm {n!r}")
        if self.rot.w < -TAU_ZERO:
            raise NotUnit("rotation quaternion is not on the canonical sheet (w < 0)")

    @classmethod
    def identity(cls) -> "SE3Element":
        return cls(Quaternion.identity(), np.zeros(3))

    @classmethod
    def from_rotation_translation(cls, q: Quaternion, t) -> "SE3Element":
        """Normalize and canonicalize q, then build the pose."""
        return cls(canonical_quat(q.normalized()), np.asarray(t, dtype=float))


@dataclass(frozen=True, eq=False)
class AxisAngle:
    """A rotation as a unit axis and an angle in [0, 2*pi) radians."""

    axis: np.ndarray
    angle: float

    def __post_init__(self):
        a = np.asarray(self.axis, dtype=float)
        object.__setattr__(self, "axis", a)
        object.__setattr__(self, "angle", float(self.angle))
        if abs(np.linalg.norm(a) - 1.0) > TAU_NUM:
            raise NotUnit(f"axis has norm {np.linalg.norm(a)!r}")
        if not (0.0 <= self.angle < 2.0 * math.pi):
            raise DomainError(f"angle {self.angle!r} outside [0, 2*pi)")


# -- rotations -------------------------------------------------------------


def so3_apply(q: Quaternion, v, tol: float = TAU_NUM) -> np.ndarray:
    """Rotate a 3-vector by the unit quaternion q via q v' q*."""
    if abs(q.norm() - 1.0) > tol:
        raise NotUnit(f"quaternion has norm {q.norm()!r}")
    r = q * Quaternion.from_vector(v) * q.conjugate()
    return r.vec


def quat_from_axis_angle(aa: AxisAngle) -> Quaternion:
    """cos(angle/2) + sin(angle/2) * axis, canonicalized."""
    half = 0.5 * aa.angle
    s = math.sin(half)
    return canonical_quat(
        Quaternion(math.cos(half), s * aa.axis[0], s * aa.axis[1], s * aa.axis[2])
    )


def axis_angle_from_quat(q: Quaternion, tol: float = TAU_NUM) -> AxisAngle:
    """Inverse conversion; identity rotations report axis (1, 0, 0)."""
    if abs(q.norm() - 1.0) > tol:
        raise NotUnit(f"quaternion has norm {q.norm()!r}")
    q = canonical_quat(q)
    vn = math.sqrt(q.x * q.x + q.y * q.y + q.z * q.z)
    angle = 2.0 * math.atan2(vn, q.w)
    if vn <= TAU_ZERO:
        return AxisAngle(np.array([1.0, 0.0, 0.0]), 0.0)
    return AxisAngle(q.vec / vn, angle % (2.0 * math.pi))


def rotmat_from_quat(q: Quaternion) -> np.ndarray:
    """The 3x3 matrix of the rotation covered by the unit quaternion q."""
    w, x, y, z = q.w, q.x, q.y, q.z
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def quat_from_rotmat(m) -> Quaternion:
    """Canonical unit quaternion covering a rotation matrix (Shepperd's rule)."""
    m = np.asarray(m, dtype=float)
    tr = m[0, 0] + m[1, 1] + m[2, 2]
    if tr > 0.0:
        s = math.sqrt(tr + 1.0) * 2.0
        q = Quaternion(
            0.25 * s,
            (m[2, 1] - m[1, 2]) / s,
            (m[0, 2] - m[2, 0]) / s,
            (m[1, 0] - m[0, 1]) / s,
        )
    elif m[0, 0] > m[1, 1] and m[0, 0] > m[2, 2]:
        s = math.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2.0
        q = Quaternion(
            (m[2, 1] - m[1, 2]) / s,
            0.25 * s,
            (m[0, 1] + m[1, 0]) / s,
            (m[0, 2] + m[2, 0]) / s,
        )
    elif m[1, 1] > m[2, 2]:
        s = math.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2.0
        q = Quaternion(
            (m[0, 2] - m[2, 0]) / s,
            (m[0, 1] + m[1, 0]) / s,
            0.25 * s,
            (m[1, 2] + m[2, 1]) / s,
        )
    else:
        s = math.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2.0
        q = Quaternion(
            (m[1, 0] - m[0, 1]) / s,
            (m[0, 2] + m[2, 0]) / s,
            (m[1, 2] + m[2, 1]) / s,
            0.25 * s,
        )
    return canonical_quat(q.normalized())


# -- group operations ------------------------------------------------------


def se3_compose(g1: SE3Element, g2: SE3Element) -> SE3Element:
    """(R1, t1) o (R2, t2) = (R1 R2, t1 + R1 t2)."""
    q = canonical_quat(g1.rot * g2.rot)
    t = g1.trans + so3_apply(g1.rot, g2.trans)
    return SE3Element(q, t)


def se3_inverse(g: SE3Element) -> SE3Element:
    qinv = g.rot.conjugate()
    return SE3Element(canonical_quat(qinv), -so3_apply(qinv, g.trans))


# -- dual quaternion representation ----------------------------------------


def dq_from_se3(g: SE3Element) -> DualQuaternion:
    """Unit dual quaternion q + (1/2) t' q eps covering the pose."""
    tq = Quaternion.from_vector(g.trans)
    return DualQuaternion(g.rot, 0.5 * (tq * g.rot))


def se3_from_dq(x: DualQuaternion, tol: float = TAU_NUM) -> SE3Element:
    """Pose covered by a unit dual quaternion; picks the canonical sheet."""
    d = x.conj_product()
    if abs(d.re - 1.0) > tol or abs(d.du) > tol:
        raise NotUnit(f"not a unit dual quaternion: x* x = {d!r}")
    if canonical_quat(x.re) is not x.re:
        x = -x
    tq = 2.0 * (x.du * x.re.conjugate())
    if abs(tq.w) > tol:
        raise NotPure(f"recovered translation has first coordinate {tq.w!r}")
    return SE3Element(x.re, tq.vec)


def dq_act_on_point(x: DualQuaternion, s, tol: float = TAU_NUM) -> np.ndarray:
    """Apply the rigid motion covered by unit x to a point of 3-space.

    The point embeds as 1 + s' eps (no 1/2 factor) and transforms as
    x s x-bar with the combined conjugate; the image is the vector part
    of the dual coordinate.
    """
    d = x.conj_product()
    if abs(d.re - 1.0) > tol or abs(d.du) > tol:
        raise NotUnit(f"not a unit dual quaternion: x* x = {d!r}")
    embedded = DualQuaternion(Quaternion.identity(), Quaternion.from_vector(s))
    moved = x * embedded * x.combined_conjugate()
    return moved.du.vec


# -- homogeneous matrix representation --------------------------------------


def mat4_from_se3(g: SE3Element) -> np.ndarray:
    """4x4 block matrix [R t; 0 1]."""
    m = np.eye(4)
    m[:3, :3] = rotmat_from_quat(g.rot)
    m[:3, 3] = g.trans
    return m


def mat4_inverse_pose(g: SE3Element) -> np.ndarray:
    """Exact inverse block matrix [R^T  -R^T t; 0 1]."""
    r = rotmat_from_quat(g.rot)
    m = np.eye(4)
    m[:3, :3] = r.T
    m[:3, 3] = -(r.T @ g.trans)
    return m


def se3_from_mat4(m, tol: float = TAU_LOOSE) -> SE3Element:
    """Pose from a homogeneous matrix; validates the block structure."""
    m = np.asarray(m, dtype=float)
    if m.shape != (4, 4):
        raise NotAPose(f"expected a 4x4 matrix, got shape {m.shape}")
    if np.max(np.abs(m[3] - np.array([0.0, 0.0, 0.0, 1.0]))) > tol:
        raise NotAPose(f"bottom row {m[3]!r} is not (0, 0, 0, 1)")
    r = m[:3, :3]
    if np.max(np.abs(r.T @ r - np.eye(3))) > tol:
        raise NotAPose("rotation block is not orthogonal")
    if abs(np.linalg.det(r) - 1.0) > tol:
        raise NotAPose(f"rotation block has determinant {np.linalg.det(r)!r}")
    return SE3Element(quat_from_rotmat(r), m[:3, 3])


# -- projections -------------------------------------------------------------


def project_to_unit_dq(x: DualQuaternion) -> DualQuaternion:
    """Nearest unit dual quaternion, x / |x|, for invertible x.

    For non-zero nilpotent x (vanishing real coordinate) the minimizer is
    a family; the member returned is b/|b| with zero dual coordinate,
    which is deterministic and satisfies the family's constraint
    b* b' + b'* b = 0.
    """
    if x.re.norm() == 0.0 and x.du.norm() == 0.0:
        raise ZeroInput("cannot project the zero dual quaternion")
    if x.is_nilpotent:
        return DualQuaternion(x.du.normalized())
    return x / abs(x)


def project_to_so3(m) -> np.ndarray:
    """Nearest rotation matrix U diag(1, 1, det(U V^T)) V^T via the SVD."""
    m = np.asarray(m, dtype=float)
    u, s, vt = np.linalg.svd(m)
    if s[-1] <= TAU_ZERO:
        raise Degenerate(f"smallest singular value {s[-1]!r} is not positive")
    d = np.sign(np.linalg.det(u @ vt))
    return (u * np.array([1.0, 1.0, d])) @ vt


# -- distances ---------------------------------------------------------------


def rotation_distance(q1: Quaternion, q2: Quaternion, tol: float = TAU_NUM) -> float:
    """2 * arccos(2 <q1, q2>**2 - 1), in [0, 2*pi]; sign-flip invariant."""
    for q in (q1, q2):
        if abs(q.norm() - 1.0) > tol:
            raise NotUnit(f"quaternion has norm {q.norm()!r}")
    c = 2.0 * q1.dot(q2) ** 2 - 1.0
    return 2.0 * math.acos(min(1.0, max(-1.0, c)))


def translation_distance(t1, t2) -> float:
    return float(np.linalg.norm(np.asarray(t1, dtype=float) - np.asarray(t2, dtype=float)))
