"""Spectral rigid-motion synchronization over dual quaternions.

Estimates absolute poses from noisy pairwise ratio measurements with two
interchangeable spectral solvers: a dual quaternion power iteration with
entry-wise nearest-unit rounding, and the classical baseline on the 4x4
homogeneous matrix representation. Includes the synthetic measurement
models, global alignment, error metrics, and a reproducible sweep harness
with a CLI front end.
"""

from .bench import (
    ErrorReport,
    ExperimentConfig,
    ExperimentRow,
    NoiseSpec,
    SummaryRow,
    align,
    alignment_objective,
    evaluate,
    make_problem,
    run_experiment,
    sample_ground_truth,
    summarize,
)
from .dq_linalg import (
    DQMatrix,
    DQVector,
    PowerIterationResult,
    power_iteration,
    random_dqvector,
)
from .dual_algebra import TAU_NUM, TAU_ZERO, DualNumber, DualQuaternion, Quaternion
from .se3 import (
    TAU_LOOSE,
    AxisAngle,
    SE3Element,
    axis_angle_from_quat,
    canonical_quat,
    dq_act_on_point,
    dq_from_se3,
    mat4_from_se3,
    project_to_so3,
    project_to_unit_dq,
    quat_from_axis_angle,
    quat_from_rotmat,
    rotation_distance,
    rotmat_from_quat,
    se3_compose,
    se3_from_dq,
    se3_from_mat4,
    se3_inverse,
    so3_apply,
    translation_distance,
)
from .sync_core import (
    MeasurementProblem,
    SolverOptions,
    SyncEstimate,
    build_dq_matrix,
    build_mat_matrix,
    solve,
    solve_dq_spectral,
    solve_mat_spectral,
)

__version__ = "0.1.0"
