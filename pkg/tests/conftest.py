import math

import numpy as np
import pytest

from dqsync import DualNumber, DualQuaternion, Quaternion, SE3Element
from dqsync.se3 import canonical_quat


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_dual(rng, scale=2.0):
    return DualNumber(*(scale * rng.standard_normal(2)))


def random_quat(rng, scale=1.0):
    return Quaternion(*(scale * rng.standard_normal(4)))


def random_unit_quat(rng):
    while True:
        q = random_quat(rng)
        if q.norm() > 1e-6:
            return canonical_quat(q.normalized())


def random_dq(rng, scale=1.0):
    return DualQuaternion(random_quat(rng, scale), random_quat(rng, scale))


def random_pose(rng, trans_scale=1.0):
    return SE3Element(random_unit_quat(rng), trans_scale * rng.standard_normal(3))


def random_unit_dq(rng):
    from dqsync import dq_from_se3

    return dq_from_se3(random_pose(rng))


def clustered_pose(rng, max_angle=1.2):
    """Pose with rotation angle below max_angle; pairwise quaternion dots of
    such poses stay positive, keeping canonical lifts coherent."""
    angle = rng.uniform(0.0, max_angle)
    axis = rng.standard_normal(3)
    axis = axis / np.linalg.norm(axis)
    half = 0.5 * angle
    q = Quaternion(math.cos(half), *(math.sin(half) * axis))
    return SE3Element(canonical_quat(q), rng.standard_normal(3))


def dn_close(x: DualNumber, y: DualNumber, tol=1e-9):
    return abs(x.re - y.re) <= tol and abs(x.du - y.du) <= tol


def quat_close(p: Quaternion, q: Quaternion, tol=1e-9):
    return max(abs(p.w - q.w), abs(p.x - q.x), abs(p.y - q.y), abs(p.z - q.z)) <= tol


def dq_close(x: DualQuaternion, y: DualQuaternion, tol=1e-9):
    return quat_close(x.re, y.re, tol) and quat_close(x.du, y.du, tol)


def pose_close(g: SE3Element, h: SE3Element, tol=1e-9):
    rot_ok = quat_close(g.rot, h.rot, tol) or quat_close(g.rot, -h.rot, tol)
    return rot_ok and np.max(np.abs(g.trans - h.trans)) <= tol
