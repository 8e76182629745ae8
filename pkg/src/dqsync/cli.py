"""Command-line front end.

Subcommands: ``generate`` (sample a problem file), ``solve`` (estimate
poses from a problem file), ``evaluate`` (align an estimate against
ground truth and report errors), ``experiment`` (full sweep harness with
per-repeat and summary CSVs, optionally rendered as figures), and
``plot`` (figures from an existing summary CSV).

Exit codes: 0 success; 1 usage, parse, or format errors; 2 infeasible
problem (disconnected graph, degenerate spectrum or rounding); 3 solver
non-convergence. All files are UTF-8 with LF line endings; CSV numbers
always use '.' as the decimal separator.
"""

from __future__ import annotations

import argparse
import csv
import sys
from itertools import product
from pathlib import Path

from . import bench, problem_io
from .bench import ExperimentConfig, NoiseSpec
from .errors import (
    DegenerateAlignment,
    DegenerateSpectrum,
    DisconnectedGraph,
    DQSyncError,
    ProblemFormatError,
    RoundingDegenerate,
)
from .sync_core import SolverOptions, solve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_NO_CONVERGENCE = 3

RESULTS_COLUMNS = [
    "method", "n", "p", "q", "sigma_r_deg", "sigma_t", "repeat", "seed",
    "rot_err_mean", "rot_err_min", "rot_err_max",
    "trans_err_mean", "trans_err_min", "trans_err_max",
    "iterations", "residual", "runtime_s", "status",
]

SUMMARY_COLUMNS = [
    "method", "n", "p", "q", "sigma_r_deg", "sigma_t",
    "repeats_ok", "repeats_total",
    "rot_err_mean", "rot_err_min", "rot_err_max",
    "trans_err_mean", "trans_err_min", "trans_err_max",
]


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors by default; 2 is taken.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def _parse_sweep(text: str) -> tuple[str, list[float]]:
    """'<param>=<start>:<stop>:<step>' with an inclusive stop."""
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"bad sweep spec {text!r}, expected name=start:stop:step")
    name, _, rng = text.partition("=")
    if name not in ("p", "q", "sigma-r", "sigma-t"):
        raise argparse.ArgumentTypeError(f"unknown sweep parameter {name!r}")
    parts = rng.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"bad sweep range {rng!r}, expected start:stop:step")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad sweep range {rng!r}") from None
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"sweep range {rng!r} must ascend with step > 0")
    count = int((stop - start) / step + 1e-9) + 1
    return name, [round(start + k * step, 12) for k in range(count)]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dqsync", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="sample a synthetic problem file")
    gen.add_argument("--n", type=int, required=True, help="number of absolute poses")
    gen.add_argument("--p", type=float, default=1.0, help="edge presence probability")
    gen.add_argument("--q", type=float, default=1.0, help="non-corruption probability")
    gen.add_argument("--sigma-r", type=float, default=0.0, help="rotation noise std [deg]")
    gen.add_argument("--sigma-t", type=float, default=0.0, help="translation noise std")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--corruption-sigma", action="store_true",
                     help="draw corrupted labels at the (sigma-r, sigma-t) scales "
                          "instead of the ground-truth prior")
    gen.add_argument("--out", required=True, help="output problem file")

    sol = sub.add_parser("solve", help="solve a problem file")
    sol.add_argument("--in", dest="in_path", required=True, help="input problem file")
    sol.add_argument("--method", choices=("dq", "mat"), required=True)
    sol.add_argument("--out", required=True, help="output estimate file (pose lines)")
    sol.add_argument("--tol", type=float, default=1e-10)
    sol.add_argument("--max-iters", type=int, default=None)
    sol.add_argument("--seed", type=int, default=0, help="power iteration start seed")

    ev = sub.add_parser("evaluate", help="align an estimate to ground truth and report errors")
    ev.add_argument("--problem", required=True, help="problem file carrying pose lines")
    ev.add_argument("--estimate", required=True, help="estimate file (pose lines)")
    ev.add_argument("--out", default=None, help="optional single-row CSV output")

    exp = sub.add_parser("experiment", help="run a sweep and write CSV tables")
    exp.add_argument("--n", type=int, required=True)
    exp.add_argument("--repeats", type=int, required=True)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--method", choices=("dq", "mat", "both"), default="both")
    exp.add_argument("--p", type=_float_list, default=[1.0], help="comma list")
    exp.add_argument("--q", type=_float_list, default=[1.0], help="comma list")
    exp.add_argument("--sigma-r", type=_float_list, default=[0.0], help="comma list [deg]")
    exp.add_argument("--sigma-t", type=_float_list, default=[0.0], help="comma list")
    exp.add_argument("--sweep", type=_parse_sweep, action="append", default=[],
                     metavar="PARAM=START:STOP:STEP",
                     help="swept parameter (repeatable; multiple sweeps are zipped)")
    exp.add_argument("--corruption-sigma", action="store_true",
                     help="draw corrupted labels at the (sigma-r, sigma-t) scales")
    exp.add_argument("--tol", type=float, default=1e-10)
    exp.add_argument("--max-iters", type=int, default=None)
    exp.add_argument("--timing", action="store_true",
                     help="write measured runtimes (breaks byte-for-byte determinism)")
    exp.add_argument("--plot-dir", default=None,
                     help="also render summary figures into this directory")
    exp.add_argument("--out-csv", required=True)

    plo = sub.add_parser("plot", help="render figures from a summary CSV")
    plo.add_argument("--summary", required=True)
    plo.add_argument("--out-dir", required=True)
    plo.add_argument("--x", default=None, choices=("p", "q", "sigma_r_deg", "sigma_t"),
                     help="column to use as the sweep axis (default: auto-detect)")

    return parser


# -- helpers -------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _sweep_points(args) -> list[NoiseSpec]:
    lists = {
        "p": list(args.p),
        "q": list(args.q),
        "sigma-r": list(args.sigma_r),
        "sigma-t": list(args.sigma_t),
    }
    swept_names = [name for name, _ in args.sweep]
    if len(set(swept_names)) != len(swept_names):
        raise ValueError("a parameter may appear in at most one --sweep")
    sweep_lengths = {len(vals) for _, vals in args.sweep}
    if len(sweep_lengths) > 1:
        raise ValueError("all --sweep ranges must have the same length (they are zipped)")
    for name in swept_names:
        if len(lists[name]) != 1:
            raise ValueError(f"parameter {name!r} is swept; its flag must hold a single value")
    static = [name for name in ("p", "q", "sigma-r", "sigma-t") if name not in swept_names]
    k = sweep_lengths.pop() if args.sweep else 1
    sweeps = dict(args.sweep)
    points = []
    for combo in product(*(lists[name] for name in static)):
        values = dict(zip(static, combo))
        for idx in range(k):
            for name in swept_names:
                values[name] = sweeps[name][idx]
            points.append(
                NoiseSpec(
                    p=values["p"],
                    q=values["q"],
                    sigma_r=values["sigma-r"],
                    sigma_t=values["sigma-t"],
                )
            )
    return points


def _write_csv(path, columns, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)


def write_results_csv(path, cfg: ExperimentConfig, rows, timing: bool = False) -> None:
    table = []
    for r in rows:
        rep = r.report
        table.append([
            r.method, cfg.n, _fmt(r.noise.p), _fmt(r.noise.q),
            _fmt(r.noise.sigma_r), _fmt(r.noise.sigma_t), r.repeat, cfg.seed,
            _fmt(rep.rot_mean if rep else None),
            _fmt(rep.rot_min if rep else None),
            _fmt(rep.rot_max if rep else None),
            _fmt(rep.trans_mean if rep else None),
            _fmt(rep.trans_min if rep else None),
            _fmt(rep.trans_max if rep else None),
            r.iterations,
            _fmt(r.residual),
            _fmt(r.runtime_s if timing else 0.0),
            r.status,
        ])
    _write_csv(path, RESULTS_COLUMNS, table)


def write_summary_csv(path, cfg: ExperimentConfig, summary) -> None:
    table = []
    for s in summary:
        table.append([
            s.method, cfg.n, _fmt(s.noise.p), _fmt(s.noise.q),
            _fmt(s.noise.sigma_r), _fmt(s.noise.sigma_t),
            s.repeats_ok, s.repeats_total,
            _fmt(s.rot_mean), _fmt(s.rot_min), _fmt(s.rot_max),
            _fmt(s.trans_mean), _fmt(s.trans_min), _fmt(s.trans_max),
        ])
    _write_csv(path, SUMMARY_COLUMNS, table)


def summary_path_for(out_csv) -> Path:
    out = Path(out_csv)
    return out.with_name(out.stem + "-summary" + (out.suffix or ".csv"))


# -- commands ------------------------------------------------------------------


def _cmd_generate(args) -> int:
    import numpy as np

    if args.n < 1:
        print("error: need --n >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        noise = NoiseSpec(p=args.p, q=args.q, sigma_r=args.sigma_r, sigma_t=args.sigma_t)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    truth = bench.sample_ground_truth(
        args.n, np.random.default_rng(np.random.SeedSequence([args.seed & (2**64 - 1), 0]))
    )
    problem = bench.make_problem(
        truth,
        noise,
        np.random.default_rng(np.random.SeedSequence([args.seed & (2**64 - 1), 1])),
        corruption_from_prior=not args.corruption_sigma,
    )
    problem_io.write_problem(args.out, problem)
    return EXIT_OK


def _cmd_solve(args) -> int:
    problem = problem_io.read_problem(args.in_path)
    opts = SolverOptions(tol=args.tol, max_iters=args.max_iters, seed=args.seed)
    try:
        estimate = solve(problem, args.method, opts)
    except DisconnectedGraph as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (DegenerateSpectrum, RoundingDegenerate) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    problem_io.write_estimate(args.out, estimate.elements)
    if not estimate.converged:
        print(
            f"warning: no convergence after {estimate.iterations} iterations "
            f"(residual {estimate.residual!r})",
            file=sys.stderr,
        )
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    problem = problem_io.read_problem(args.problem)
    if problem.ground_truth is None:
        print("error: problem file carries no pose lines", file=sys.stderr)
        return EXIT_USAGE
    estimate = problem_io.read_poses(args.estimate)
    if len(estimate) != problem.n:
        print(
            f"error: estimate has {len(estimate)} poses, problem has {problem.n}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    try:
        _, aligned = bench.align(problem.ground_truth, estimate)
    except DegenerateAlignment as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    report = bench.evaluate(problem.ground_truth, aligned)
    fields = [
        ("rot_err_mean", report.rot_mean), ("rot_err_min", report.rot_min),
        ("rot_err_max", report.rot_max), ("trans_err_mean", report.trans_mean),
        ("trans_err_min", report.trans_min), ("trans_err_max", report.trans_max),
    ]
    for name, value in fields:
        print(f"{name} {value!r}")
    if args.out:
        _write_csv(args.out, [f[0] for f in fields], [[repr(f[1]) for f in fields]])
    return EXIT_OK


def _cmd_experiment(args) -> int:
    try:
        points = _sweep_points(args)
        cfg = ExperimentConfig(
            n=args.n,
            noise=points[0],
            repeats=args.repeats,
            seed=args.seed,
            method=args.method,
            sweep=tuple(points),
            corruption_from_prior=not args.corruption_sigma,
            tol=args.tol,
            max_iters=args.max_iters,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rows = bench.run_experiment(cfg)
    summary = bench.summarize(cfg, rows)
    write_results_csv(args.out_csv, cfg, rows, timing=args.timing)
    spath = summary_path_for(args.out_csv)
    write_summary_csv(spath, cfg, summary)
    print(f"wrote {args.out_csv} and {spath}")
    if args.plot_dir:
        from . import plotting

        written = plotting.render_figures(plotting.load_summary(spath), args.plot_dir)
        for path in written:
            print(f"wrote {path}")
    return EXIT_OK


def _cmd_plot(args) -> int:
    from . import plotting

    rows = plotting.load_summary(args.summary)
    try:
        written = plotting.render_figures(rows, args.out_dir, x=args.x)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "solve": _cmd_solve,
    "evaluate": _cmd_evaluate,
    "experiment": _cmd_experiment,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ProblemFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DQSyncError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
