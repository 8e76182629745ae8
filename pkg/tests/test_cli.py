import csv

import pytest

from dqsync import align, evaluate
from dqsync.cli import RESULTS_COLUMNS, SUMMARY_COLUMNS, main, summary_path_for
from dqsync.problem_io import read_poses, read_problem


def run(argv):
    return main([str(a) for a in argv])


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


class TestGenerate:
    def test_two_node_complete(self, tmp_path):
        out = tmp_path / "p.txt"
        assert run(["generate", "--n", 2, "--p", 1, "--q", 1,
                    "--sigma-r", 0, "--sigma-t", 0, "--seed", 7, "--out", out]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "dqsync-problem v1 n=2"
        assert sum(1 for l in lines if l.startswith("E ")) == 1
        assert sum(1 for l in lines if l.startswith("G ")) == 2

    def test_p_zero_no_edges(self, tmp_path):
        out = tmp_path / "p.txt"
        assert run(["generate", "--n", 4, "--p", 0, "--seed", 1, "--out", out]) == 0
        assert sum(1 for l in out.read_text().splitlines() if l.startswith("E ")) == 0

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        args = ["generate", "--n", 6, "--p", 0.7, "--sigma-r", 3, "--seed", 42]
        assert run(args + ["--out", a]) == 0
        assert run(args + ["--out", b]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_bad_flags(self, tmp_path):
        assert run(["generate", "--n", 3, "--p", 2.0, "--out", tmp_path / "x"]) == 1


class TestSolve:
    @pytest.fixture
    def noiseless(self, tmp_path):
        path = tmp_path / "problem.txt"
        run(["generate", "--n", 8, "--p", 1, "--seed", 3, "--out", path])
        return path

    def test_exact_recovery_both_methods(self, tmp_path, noiseless):
        problem = read_problem(noiseless)
        for method in ("dq", "mat"):
            out = tmp_path / f"est_{method}.txt"
            assert run(["solve", "--in", noiseless, "--method", method, "--out", out]) == 0
            est = read_poses(out)
            _, aligned = align(problem.ground_truth, est)
            report = evaluate(problem.ground_truth, aligned)
            assert report.rot_max < 1e-6 and report.trans_max < 1e-6

    def test_methods_agree(self, tmp_path, noiseless):
        out_dq, out_mat = tmp_path / "dq.txt", tmp_path / "mat.txt"
        run(["solve", "--in", noiseless, "--method", "dq", "--out", out_dq])
        run(["solve", "--in", noiseless, "--method", "mat", "--out", out_mat])
        dq, mat = read_poses(out_dq), read_poses(out_mat)
        _, aligned = align(dq, mat)
        report = evaluate(dq, aligned)
        assert report.rot_max < 1e-6 and report.trans_max < 1e-6

    def test_deterministic(self, tmp_path, noiseless):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        run(["solve", "--in", noiseless, "--method", "dq", "--out", a])
        run(["solve", "--in", noiseless, "--method", "dq", "--out", b])
        assert a.read_bytes() == b.read_bytes()

    def test_disconnected_exit_2_no_file(self, tmp_path):
        path = tmp_path / "disc.txt"
        run(["generate", "--n", 6, "--p", 0, "--seed", 1, "--out", path])
        out = tmp_path / "est.txt"
        assert run(["solve", "--in", path, "--method", "dq", "--out", out]) == 2
        assert not out.exists()

    def test_no_convergence_exit_3(self, tmp_path, capsys):
        path = tmp_path / "p.txt"
        run(["generate", "--n", 6, "--p", 1, "--sigma-r", 5, "--seed", 2, "--out", path])
        out = tmp_path / "est.txt"
        # an unreachable tolerance forces the non-convergence path
        assert run(["solve", "--in", path, "--method", "dq", "--out", out,
                    "--tol", "1e-300", "--max-iters", 3]) == 3
        assert out.exists()  # estimate is still written
        assert "no convergence" in capsys.readouterr().err

    def test_parse_error_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("dqsync-problem v1 n=2\nE 1 2 9 0 0 0 0 0 0\n")
        out = tmp_path / "est.txt"
        assert run(["solve", "--in", bad, "--method", "dq", "--out", out]) == 1
        assert "line 2" in capsys.readouterr().err


class TestEvaluate:
    def test_reports_errors(self, tmp_path, capsys):
        problem = tmp_path / "p.txt"
        run(["generate", "--n", 6, "--p", 1, "--seed", 9, "--out", problem])
        est = tmp_path / "est.txt"
        run(["solve", "--in", problem, "--method", "dq", "--out", est])
        out_csv = tmp_path / "report.csv"
        assert run(["evaluate", "--problem", problem, "--estimate", est, "--out", out_csv]) == 0
        captured = capsys.readouterr().out
        assert "rot_err_mean" in captured
        rows = read_rows(out_csv)
        assert len(rows) == 1
        assert float(rows[0]["rot_err_max"]) < 1e-6

    def test_requires_truth(self, tmp_path):
        bare = tmp_path / "bare.txt"
        bare.write_text("dqsync-problem v1 n=2\nE 1 2 1 0 0 0 0 0 0\n")
        est = tmp_path / "est.txt"
        est.write_text("dqsync-problem v1 n=2\nG 1 1 0 0 0 0 0 0\nG 2 1 0 0 0 0 0 0\n")
        assert run(["evaluate", "--problem", bare, "--estimate", est]) == 1


class TestExperiment:
    def test_exact_recovery_rows(self, tmp_path):
        out = tmp_path / "res.csv"
        assert run(["experiment", "--n", 10, "--repeats", 2, "--seed", 1,
                    "--method", "both", "--p", 1, "--q", 1,
                    "--sigma-r", 0, "--sigma-t", 0, "--out-csv", out]) == 0
        rows = read_rows(out)
        assert len(rows) == 4
        assert [r["method"] for r in rows] == ["dq", "mat", "dq", "mat"]
        for r in rows:
            assert r["status"] == "ok"
            for col in ("rot_err_mean", "rot_err_max", "trans_err_mean", "trans_err_max"):
                assert float(r[col]) < 1e-6
        summary = read_rows(summary_path_for(out))
        assert len(summary) == 2
        assert {r["method"] for r in summary} == {"dq", "mat"}

    def test_headers_golden(self, tmp_path):
        out = tmp_path / "res.csv"
        run(["experiment", "--n", 4, "--repeats", 2, "--seed", 2,
             "--method", "dq", "--out-csv", out])
        header = out.read_text().splitlines()[0]
        assert header == ",".join(RESULTS_COLUMNS)
        assert header == (
            "method,n,p,q,sigma_r_deg,sigma_t,repeat,seed,"
            "rot_err_mean,rot_err_min,rot_err_max,"
            "trans_err_mean,trans_err_min,trans_err_max,"
            "iterations,residual,runtime_s,status"
        )
        sheader = summary_path_for(out).read_text().splitlines()[0]
        assert sheader == ",".join(SUMMARY_COLUMNS)

    def test_sweep_grammar_and_grid(self, tmp_path):
        out = tmp_path / "res.csv"
        assert run(["experiment", "--n", 6, "--repeats", 2, "--seed", 3,
                    "--method", "dq", "--p", "0.6,1.0", "--q", 1,
                    "--sweep", "sigma-r=1:3:1", "--sigma-t", 0,
                    "--out-csv", out]) == 0
        rows = read_rows(out)
        assert len(rows) == 2 * 3 * 2  # p values x sweep points x repeats
        sigmas = [float(r["sigma_r_deg"]) for r in rows if r["p"] == "0.6"]
        assert sorted(set(sigmas)) == [1.0, 2.0, 3.0]

    def test_zipped_sweeps(self, tmp_path):
        out = tmp_path / "res.csv"
        assert run(["experiment", "--n", 6, "--repeats", 1, "--seed", 3,
                    "--method", "dq", "--sweep", "sigma-r=1:2:1",
                    "--sweep", "sigma-t=0.01:0.02:0.01", "--out-csv", out]) == 0
        rows = read_rows(out)
        pairs = {(r["sigma_r_deg"], r["sigma_t"]) for r in rows}
        assert pairs == {("1.0", "0.01"), ("2.0", "0.02")}

    def test_bad_sweep_grammar(self, tmp_path):
        out = tmp_path / "res.csv"
        # malformed specs are rejected at argument parsing time
        for spec in ("sigma-r=1:20", "bogus=1:2:1", "sigma-r=2:1:1"):
            with pytest.raises(SystemExit) as err:
                main(["experiment", "--n", "4", "--repeats", "1", "--sweep", spec,
                      "--out-csv", str(out)])
            assert err.value.code == 1
        # a swept parameter cannot also carry a value list
        assert run(["experiment", "--n", 4, "--repeats", 1, "--sweep", "sigma-r=1:2:1",
                    "--sigma-r", "1,2", "--out-csv", out]) == 1

    def test_deterministic_across_runs_and_threads(self, tmp_path, monkeypatch):
        args = ["experiment", "--n", 6, "--repeats", 2, "--seed", 5, "--method", "both",
                "--p", 0.9, "--sweep", "sigma-r=1:2:1", "--sigma-t", 0.01]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        monkeypatch.setenv("DQSYNC_THREADS", "1")
        assert run(args + ["--out-csv", a]) == 0
        monkeypatch.setenv("DQSYNC_THREADS", "4")
        assert run(args + ["--out-csv", b]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert summary_path_for(a).read_bytes() == summary_path_for(b).read_bytes()

    def test_runtime_zero_without_timing_flag(self, tmp_path):
        out = tmp_path / "res.csv"
        run(["experiment", "--n", 6, "--repeats", 1, "--seed", 1, "--method", "dq",
             "--out-csv", out])
        rows = read_rows(out)
        assert all(r["runtime_s"] == "0.0" for r in rows)
        out2 = tmp_path / "res2.csv"
        run(["experiment", "--n", 6, "--repeats", 1, "--seed", 1, "--method", "dq",
             "--timing", "--out-csv", out2])
        assert all(float(r["runtime_s"]) > 0.0 for r in read_rows(out2))

    def test_failed_rows_have_empty_metrics(self, tmp_path):
        out = tmp_path / "res.csv"
        run(["experiment", "--n", 8, "--repeats", 4, "--seed", 2, "--method", "dq",
             "--p", 0.05, "--out-csv", out])
        rows = read_rows(out)
        failed = [r for r in rows if r["status"] != "ok"]
        assert failed
        for r in failed:
            assert r["rot_err_mean"] == ""
            assert r["trans_err_mean"] == ""


class TestPlot:
    def test_renders_figures(self, tmp_path):
        out = tmp_path / "res.csv"
        run(["experiment", "--n", 6, "--repeats", 2, "--seed", 4, "--method", "both",
             "--sweep", "sigma-r=1:3:1", "--out-csv", out])
        figdir = tmp_path / "figs"
        assert run(["plot", "--summary", summary_path_for(out), "--out-dir", figdir]) == 0
        assert (figdir / "rotation_errors.png").exists()
        assert (figdir / "translation_errors.png").exists()

    def test_experiment_plot_dir(self, tmp_path):
        out = tmp_path / "res.csv"
        figdir = tmp_path / "figs"
        assert run(["experiment", "--n", 6, "--repeats", 1, "--seed", 4, "--method", "dq",
                    "--sweep", "sigma-r=1:2:1", "--plot-dir", figdir,
                    "--out-csv", out]) == 0
        assert (figdir / "rotation_errors.png").exists()


class TestUsage:
    def test_unknown_flag_exit_1(self):
        with pytest.raises(SystemExit) as err:
            main(["generate", "--bogus"])
        assert err.value.code == 1

    def test_missing_subcommand_exit_1(self):
        with pytest.raises(SystemExit) as err:
            main([])
        assert err.value.code == 1

    def test_missing_file_exit_1(self, tmp_path):
        assert run(["solve", "--in", tmp_path / "nope.txt", "--method", "dq",
                    "--out", tmp_path / "o.txt"]) == 1
