"""Synthetic data generation, alignment, error metrics, and sweep runner.

Ground truth poses use uniform angles on [0, 2*pi), uniform axes on the
sphere, and standard Gaussian translation components. Measurements follow
an edge-presence / corruption / multiplicative-perturbation model with
parameters (p, q, sigma_r, sigma_t); sigma_r is a standard deviation in
degrees, sigma_t in the translation length unit.

Randomness is driven by numpy's splittable ``SeedSequence``: every stream
is derived from (master seed, sweep index, repeat index, purpose), so a
run is reproducible bit-for-bit regardless of execution order or worker
count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dual_algebra import TAU_ZERO, Quaternion
from .errors import (
    DegenerateAlignment,
    DegenerateSpectrum,
    DisconnectedGraph,
    RoundingDegenerate,
    ZeroIterate,
)
from .se3 import (
    SE3Element,
    canonical_quat,
    rotation_distance,
    rotmat_from_quat,
    se3_compose,
    se3_inverse,
    so3_apply,
    translation_distance,
)
from .sync_core import MeasurementProblem, SolverOptions, solve

_SEED_MASK = (1 << 64) - 1
_PURPOSE_TRUTH = 0
_PURPOSE_NOISE = 1
_PURPOSE_SOLVER = 2


@dataclass(frozen=True)
class NoiseSpec:
    """Measurement model parameters.

    p: edge presence probability; q: probability an edge is NOT corrupted;
    sigma_r: perturbation rotation-angle standard deviation in degrees;
    sigma_t: perturbation translation standard deviation.
    """

    p: float
    q: float
    sigma_r: float
    sigma_t: float

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0 and 0.0 <= self.q <= 1.0):
            raise ValueError(f"p and q must lie in [0, 1], got p={self.p}, q={self.q}")
        if self.sigma_r < 0.0 or self.sigma_t < 0.0:
            raise ValueError("noise levels must be non-negative")


@dataclass
class ExperimentConfig:
    n: int
    noise: NoiseSpec
    repeats: int
    seed: int
    method: str = "both"
    sweep: tuple[NoiseSpec, ...] = ()
    corruption_from_prior: bool = True
    tol: float = 1e-10
    max_iters: int | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need n >= 2, got {self.n}")
        if self.repeats < 1:
            raise ValueError(f"need repeats >= 1, got {self.repeats}")
        if self.method not in ("dq", "mat", "both"):
            raise ValueError(f"unknown method {self.method!r}")

    @property
    def methods(self) -> tuple[str, ...]:
        return ("dq", "mat") if self.method == "both" else (self.method,)

    @property
    def points(self) -> tuple[NoiseSpec, ...]:
        return self.sweep if self.sweep else (self.noise,)


@dataclass
class ErrorReport:
    """Entry-wise rotation/translation errors and their aggregates."""

    rot_mean: float
    rot_min: float
    rot_max: float
    trans_mean: float
    trans_min: float
    trans_max: float
    rot_errors: np.ndarray | None = None
    trans_errors: np.ndarray | None = None

    @classmethod
    def from_errors(cls, rot_errors, trans_errors, keep_entries: bool = True):
        r = np.asarray(rot_errors, dtype=float)
        t = np.asarray(trans_errors, dtype=float)
        return cls(
            rot_mean=float(r.mean()),
            rot_min=float(r.min()),
            rot_max=float(r.max()),
            trans_mean=float(t.mean()),
            trans_min=float(t.min()),
            trans_max=float(t.max()),
            rot_errors=r if keep_entries else None,
            trans_errors=t if keep_entries else None,
        )


@dataclass
class ExperimentRow:
    """One (sweep point, repeat, method) outcome."""

    sweep_index: int
    noise: NoiseSpec
    repeat: int
    method: str
    status: str
    report: ErrorReport | None
    iterations: int
    residual: float
    runtime_s: float


@dataclass
class SummaryRow:
    """Per-(sweep point, method) means over the successful repeats."""

    sweep_index: int
    noise: NoiseSpec
    method: str
    repeats_total: int
    repeats_ok: int
    rot_mean: float | None
    rot_min: float | None
    rot_max: float | None
    trans_mean: float | None
    trans_min: float | None
    trans_max: float | None


# -- sampling ----------------------------------------------------------------


def _sample_axis(rng: np.random.Generator) -> np.ndarray:
    while True:
        v = rng.standard_normal(3)
        n = np.linalg.norm(v)
        if n > 1e-12:
            return v / n


def _quat_from_angle_axis(angle: float, axis: np.ndarray) -> Quaternion:
    half = 0.5 * angle
    s = math.sin(half)
    return canonical_quat(
        Quaternion(math.cos(half), s * axis[0], s * axis[1], s * axis[2])
    )


def sample_ground_truth(n: int, rng: np.random.Generator) -> list[SE3Element]:
    """n i.i.d. poses: angle ~ U[0, 2*pi), axis ~ U(S^2), translation ~ N(0, I)."""
    poses = []
    for _ in range(n):
        angle = rng.uniform(0.0, 2.0 * math.pi)
        axis = _sample_axis(rng)
        trans = rng.standard_normal(3)
        poses.append(SE3Element(_quat_from_angle_axis(angle, axis), trans))
    return poses


def _sample_perturbation(noise: NoiseSpec, rng: np.random.Generator) -> SE3Element:
    # Angle is drawn in degrees, stored in radians.
    angle = math.radians(rng.standard_normal() * noise.sigma_r)
    axis = _sample_axis(rng)
    trans = rng.standard_normal(3) * noise.sigma_t
    return SE3Element(_quat_from_angle_axis(angle, axis), trans)


def _sample_corruption(
    noise: NoiseSpec, rng: np.random.Generator, from_prior: bool
) -> SE3Element:
    if from_prior:
        angle = rng.uniform(0.0, 2.0 * math.pi)
        axis = _sample_axis(rng)
        trans = rng.standard_normal(3)
    else:
        # Literal reading: corrupted entries reuse the (sigma_r, sigma_t) scales.
        angle = math.radians(rng.standard_normal() * noise.sigma_r)
        axis = _sample_axis(rng)
        trans = rng.standard_normal(3) * noise.sigma_t
    return SE3Element(_quat_from_angle_axis(angle, axis), trans)


def make_problem(
    truth: list[SE3Element],
    noise: NoiseSpec,
    rng: np.random.Generator,
    corruption_from_prior: bool = True,
) -> MeasurementProblem:
    """Sample a measurement set over the given ground truth.

    Each pair i < j independently: present with probability p; a present
    edge carries the perturbed true ratio with probability q, otherwise an
    independent corruption. Disconnected samples are returned as-is (the
    solvers reject them), so small-p statistics stay unbiased.
    """
    n = len(truth)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() >= noise.p:
                continue
            if rng.random() < noise.q:
                ratio = se3_compose(truth[i], se3_inverse(truth[j]))
                label = se3_compose(ratio, _sample_perturbation(noise, rng))
            else:
                label = _sample_corruption(noise, rng, corruption_from_prior)
            edges.append((i, j, label))
    return MeasurementProblem(n=n, edges=edges, ground_truth=list(truth))


# -- alignment and evaluation --------------------------------------------------


def align(
    truth: list[SE3Element], est: list[SE3Element]
) -> tuple[SE3Element, list[SE3Element]]:
    """Best global right factor g making est_j o g match truth_j.

    The rotation part maximizes sum_j tr(Q^T Rhat_j^T R_j), i.e. it is the
    top eigenvector of the 4x4 second-moment matrix of the relative
    quaternions rhat_j* r_j. (The moment matrix is blind to the sign of
    each relative quaternion, so mixed double-cover representatives cannot
    cancel each other.) The translation part is the closed-form least
    squares mean. Raises ``DegenerateAlignment`` when the top eigenvalue of
    the moment matrix is not simple.
    """
    if len(truth) != len(est) or not truth:
        raise ValueError("need two equal-length, non-empty pose sequences")
    n = len(truth)
    moment = np.zeros((4, 4))
    for g, e in zip(truth, est):
        m = (e.rot.conjugate() * g.rot).as_array()
        moment += np.outer(m, m)
    eigvals, eigvecs = np.linalg.eigh(moment)
    if eigvals[-1] - eigvals[-2] <= TAU_ZERO * max(1.0, eigvals[-1]):
        raise DegenerateAlignment("rotation aligner is not determined")
    q = canonical_quat(Quaternion(*eigvecs[:, -1]).normalized())
    t = np.zeros(3)
    for g, e in zip(truth, est):
        t += so3_apply(e.rot.conjugate(), g.trans - e.trans)
    aligner = SE3Element(q, t / n)
    aligned = [se3_compose(e, aligner) for e in est]
    return aligner, aligned


def alignment_objective(
    truth: list[SE3Element], est: list[SE3Element], g: SE3Element
) -> float:
    """Sum of squared Frobenius rotation gaps plus squared translation gaps
    at the candidate aligner g."""
    rot_g = rotmat_from_quat(g.rot)
    total = 0.0
    for gt, e in zip(truth, est):
        dr = rotmat_from_quat(e.rot) @ rot_g - rotmat_from_quat(gt.rot)
        total += float(np.sum(dr * dr))
        dt = so3_apply(e.rot, g.trans) + e.trans - gt.trans
        total += float(np.dot(dt, dt))
    return total


def evaluate(
    truth: list[SE3Element], aligned: list[SE3Element], keep_entries: bool = True
) -> ErrorReport:
    """Entry-wise rotation and translation distances plus aggregates."""
    if len(truth) != len(aligned) or not truth:
        raise ValueError("need two equal-length, non-empty pose sequences")
    rot = [rotation_distance(g.rot, e.rot) for g, e in zip(truth, aligned)]
    trans = [translation_distance(g.trans, e.trans) for g, e in zip(truth, aligned)]
    return ErrorReport.from_errors(rot, trans, keep_entries=keep_entries)


# -- experiment runner ---------------------------------------------------------


def _stream(seed: int, sweep_index: int, repeat: int, purpose: int) -> np.random.Generator:
    ss = np.random.SeedSequence([seed & _SEED_MASK, sweep_index, repeat, purpose])
    return np.random.default_rng(ss)


def _solver_seed(seed: int, sweep_index: int, repeat: int, method_index: int) -> int:
    ss = np.random.SeedSequence(
        [seed & _SEED_MASK, sweep_index, repeat, _PURPOSE_SOLVER, method_index]
    )
    return int(ss.generate_state(1, np.uint64)[0])


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: the explicit request, capped by DQSYNC_THREADS (default 1)."""
    env = os.environ.get("DQSYNC_THREADS")
    cap = max(1, int(env)) if env else None
    if threads is None:
        return cap if cap is not None else 1
    return min(threads, cap) if cap is not None else max(1, threads)


def _run_repeat(cfg: ExperimentConfig, sweep_index: int, repeat: int) -> list[ExperimentRow]:
    noise = cfg.points[sweep_index]
    truth = sample_ground_truth(cfg.n, _stream(cfg.seed, sweep_index, repeat, _PURPOSE_TRUTH))
    problem = make_problem(
        truth,
        noise,
        _stream(cfg.seed, sweep_index, repeat, _PURPOSE_NOISE),
        corruption_from_prior=cfg.corruption_from_prior,
    )
    rows = []
    for mi, method in enumerate(cfg.methods):
        opts = SolverOptions(
            tol=cfg.tol,
            max_iters=cfg.max_iters,
            seed=_solver_seed(cfg.seed, sweep_index, repeat, mi),
        )
        status = "ok"
        report = None
        iterations = 0
        residual = 0.0
        runtime = 0.0
        try:
            estimate = solve(problem, method, opts)
            iterations = estimate.iterations
            residual = estimate.residual
            runtime = estimate.runtime_s
            if not estimate.converged:
                status = "no_convergence"
            else:
                _, aligned = align(truth, estimate.elements)
                report = evaluate(truth, aligned, keep_entries=False)
        except DisconnectedGraph:
            status = "disconnected"
        except DegenerateSpectrum:
            status = "degenerate_spectrum"
        except RoundingDegenerate:
            status = "rounding_degenerate"
        except DegenerateAlignment:
            status = "degenerate_alignment"
        except ZeroIterate:
            status = "zero_iterate"
        rows.append(
            ExperimentRow(
                sweep_index=sweep_index,
                noise=noise,
                repeat=repeat,
                method=method,
                status=status,
                report=report,
                iterations=iterations,
                residual=residual,
                runtime_s=runtime,
            )
        )
    return rows


def run_experiment(
    cfg: ExperimentConfig, threads: int | None = None
) -> list[ExperimentRow]:
    """All (sweep point, repeat, method) rows, sorted deterministically.

    Repeats are independent tasks with private seed-derived generators, so
    the output is identical for any worker count.
    """
    tasks = [
        (si, ri) for si in range(len(cfg.points)) for ri in range(cfg.repeats)
    ]
    workers = resolve_threads(threads)
    if workers <= 1:
        chunks = [_run_repeat(cfg, si, ri) for si, ri in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda t: _run_repeat(cfg, *t), tasks))
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r.sweep_index, r.repeat, r.method))
    return rows


def summarize(cfg: ExperimentConfig, rows: list[ExperimentRow]) -> list[SummaryRow]:
    """Mean of each error aggregate over the successful repeats, the
    quantity the sweep figures plot."""
    out = []
    for si, noise in enumerate(cfg.points):
        for method in cfg.methods:
            group = [r for r in rows if r.sweep_index == si and r.method == method]
            ok = [r for r in group if r.status == "ok"]
            means = {}
            for name in ("rot_mean", "rot_min", "rot_max", "trans_mean", "trans_min", "trans_max"):
                if ok:
                    means[name] = float(np.mean([getattr(r.report, name) for r in ok]))
                else:
                    means[name] = None
            out.append(
                SummaryRow(
                    sweep_index=si,
                    noise=noise,
                    method=method,
                    repeats_total=len(group),
                    repeats_ok=len(ok),
                    **means,
                )
            )
    return out
