"""Text format for synchronization problems and pose estimates.

Layout (UTF-8, LF line endings, one record per line):

    dqsync-problem v1 n=<n>
    E i j qw qx qy qz tx ty tz     # one per edge, 1-based, i < j
    G i qw qx qy qz tx ty tz       # optional ground truth / estimate poses

Edge line (i, j, ...) labels a measurement of g_i g_j^{-1}. Quaternions
must be unit within 1e-6 with qw >= 0. Floats are written with ``repr``,
which round-trips float64 exactly, so parse(format(problem)) reproduces
the problem bit-for-bit.
"""

from __future__ import annotations

import numpy as np

from .dual_algebra import Quaternion
from .errors import ProblemFormatError
from .se3 import TAU_LOOSE, SE3Element
from .sync_core import MeasurementProblem

HEADER_PREFIX = "dqsync-problem v1 n="


def _format_floats(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def format_problem(problem: MeasurementProblem) -> str:
    lines = [f"{HEADER_PREFIX}{problem.n}"]
    for i, j, label in sorted(problem.edges, key=lambda e: (e[0], e[1])):
        q, t = label.rot, label.trans
        lines.append(
            f"E {i + 1} {j + 1} " + _format_floats([q.w, q.x, q.y, q.z, t[0], t[1], t[2]])
        )
    if problem.ground_truth is not None:
        for i, g in enumerate(problem.ground_truth):
            q, t = g.rot, g.trans
            lines.append(
                f"G {i + 1} " + _format_floats([q.w, q.x, q.y, q.z, t[0], t[1], t[2]])
            )
    return "\n".join(lines) + "\n"


def write_problem(path, problem: MeasurementProblem) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_problem(problem))


def format_estimate(elements: list[SE3Element]) -> str:
    return format_problem(
        MeasurementProblem(n=len(elements), edges=[], ground_truth=list(elements))
    )


def write_estimate(path, elements: list[SE3Element]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_estimate(elements))


def _parse_pose(fields: list[str], lineno: int) -> SE3Element:
    try:
        vals = [float(f) for f in fields]
    except ValueError as exc:
        raise ProblemFormatError(f"bad numeric field: {exc}", lineno) from None
    q = Quaternion(*vals[:4])
    if abs(q.norm() - 1.0) > TAU_LOOSE:
        raise ProblemFormatError(f"quaternion has norm {q.norm()!r}", lineno)
    if q.w < 0.0:
        raise ProblemFormatError("quaternion first coordinate is negative", lineno)
    return SE3Element(q, np.array(vals[4:7]))


def parse_problem(text: str) -> MeasurementProblem:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(HEADER_PREFIX):
        raise ProblemFormatError(f"missing header '{HEADER_PREFIX}<n>'", 1)
    try:
        n = int(lines[0][len(HEADER_PREFIX):])
    except ValueError:
        raise ProblemFormatError("header size field is not an integer", 1) from None
    if n < 1:
        raise ProblemFormatError(f"need n >= 1, got {n}", 1)

    edges: list[tuple[int, int, SE3Element]] = []
    seen_edges: set[tuple[int, int]] = set()
    truth: dict[int, SE3Element] = {}
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        kind = fields[0]
        if kind == "E":
            if len(fields) != 10:
                raise ProblemFormatError(
                    f"edge line needs 10 fields, got {len(fields)}", lineno
                )
            try:
                i, j = int(fields[1]), int(fields[2])
            except ValueError:
                raise ProblemFormatError("edge indices must be integers", lineno) from None
            if not (1 <= i < j <= n):
                raise ProblemFormatError(
                    f"edge indices ({i}, {j}) must satisfy 1 <= i < j <= {n}", lineno
                )
            if (i, j) in seen_edges:
                raise ProblemFormatError(f"duplicate edge ({i}, {j})", lineno)
            seen_edges.add((i, j))
            edges.append((i - 1, j - 1, _parse_pose(fields[3:], lineno)))
        elif kind == "G":
            if len(fields) != 9:
                raise ProblemFormatError(
                    f"pose line needs 9 fields, got {len(fields)}", lineno
                )
            try:
                i = int(fields[1])
            except ValueError:
                raise ProblemFormatError("pose index must be an integer", lineno) from None
            if not (1 <= i <= n):
                raise ProblemFormatError(f"pose index {i} out of range", lineno)
            if i in truth:
                raise ProblemFormatError(f"duplicate pose line for index {i}", lineno)
            truth[i] = _parse_pose(fields[2:], lineno)
        else:
            raise ProblemFormatError(f"unknown record kind {kind!r}", lineno)

    ground_truth = None
    if truth:
        if len(truth) != n:
            raise ProblemFormatError(
                f"found {len(truth)} pose lines, expected all {n} or none"
            )
        ground_truth = [truth[i] for i in range(1, n + 1)]
    return MeasurementProblem(n=n, edges=edges, ground_truth=ground_truth)


def read_problem(path) -> MeasurementProblem:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_problem(fh.read())


def read_poses(path) -> list[SE3Element]:
    """Read a file that must carry a full pose sequence (estimate or truth)."""
    problem = read_problem(path)
    if problem.ground_truth is None:
        raise ProblemFormatError(f"{path}: no pose lines found")
    return problem.ground_truth
