import csv
import json
from pathlib import Path

import pytest

from rbline.cli import main
from rbline.experiment import separation_rows
from rbline.optsolve import SolveLimits

GOLDEN = Path(__file__).parent / "golden" / "separation_ell2_p1.csv"


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestSeparationExperiment:
    def test_row_contents_ell2(self, tmp_path):
        out = tmp_path / "sep.csv"
        assert main(["experiment", "separation", "--ell-max", "2", "--phases", "2", "-o", str(out)]) == 0
        rows = read_rows(out)
        opt2 = [r for r in rows if r["ell"] == "2" and r["buffer"] == "2" and r["method"] == "opt"]
        assert opt2[0]["cost"] == "8"
        opt1 = [r for r in rows if r["ell"] == "2" and r["buffer"] == "1" and r["method"] == "opt"]
        assert int(opt1[0]["cost"]) >= int(opt1[0]["t_hat_bound"]) == 6

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["experiment", "separation", "--ell-max", "2", "--phases", "1", "2"]
        assert main(args + ["-o", str(a)]) == 0
        assert main(args + ["-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_matches_golden_file(self, tmp_path):
        out = tmp_path / "sep.csv"
        assert main(["experiment", "separation", "--ell-max", "2", "--phases", "1", "-o", str(out)]) == 0
        assert out.read_text() == GOLDEN.read_text()

    def test_bound_invariants_hold_on_every_opt_row(self, tmp_path):
        out = tmp_path / "sep.csv"
        assert main(["experiment", "separation", "--ell-max", "3", "--phases", "1", "2", "-o", str(out)]) == 0
        for row in read_rows(out):
            if row["method"] == "opt" and row["optimal_flag"] == "exact":
                cost = int(row["cost"])
                if row["tau_bound"]:
                    assert cost >= float(row["tau_bound"]) - 1e-9
                if row["t_hat_bound"]:
                    assert cost >= int(row["t_hat_bound"])
            if row["method"] == "basic-trajectory":
                assert int(row["cost"]) == int(row["phases"]) * 2 ** int(row["ell"])

    def test_solver_abort_becomes_flagged_row(self):
        rows = separation_rows(2, [2], limits=SolveLimits(max_states=8))
        flagged = [r for r in rows if r["optimal_flag"] == "limit"]
        assert flagged
        assert all(r["method"] == "opt" for r in flagged)

    def test_ell_guard(self):
        with pytest.raises(ValueError):
            separation_rows(4, [1])

    def test_svg_side_outputs(self, tmp_path):
        out = tmp_path / "sep.csv"
        svg_dir = tmp_path / "figs"
        svg_dir.mkdir()
        assert main([
            "experiment", "separation", "--ell-max", "2", "--phases", "1",
            "-o", str(out), "--svg-dir", str(svg_dir),
        ]) == 0
        assert sorted(p.name for p in svg_dir.iterdir()) == [
            "separation_ell1_p1.svg",
            "separation_ell2_p1.svg",
        ]


class TestCli:
    def test_gen_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["gen", "--ell", "3", "--phases", "2", "-o", str(a)]) == 0
        assert main(["gen", "--ell", "3", "--phases", "2", "-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_gen_rejects_bad_ell(self, tmp_path):
        assert main(["gen", "--ell", "0", "-o", str(tmp_path / "x.json")]) == 2

    def test_gen_theorem1_records_epsilon(self, tmp_path):
        out = tmp_path / "t1.json"
        assert main(["gen", "--theorem1", "--k", "8", "--n", "17", "--delta", "0.5", "-o", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["meta"]["epsilon"] == "1/4"
        assert doc["meta"]["beta"] == 8
        assert doc["n_sites"] == 17

    def test_gen_theorem1_degenerate_is_usage_error(self, tmp_path, capsys):
        rc = main(["gen", "--theorem1", "--k", "4", "--n", "17", "--delta", "1/2", "-o", str(tmp_path / "x.json")])
        assert rc == 2
        assert "degenerate" in capsys.readouterr().err

    def test_simulate_reports_cost(self, tmp_path, capsys):
        inst = tmp_path / "inst.json"
        main(["gen", "--ell", "2", "-o", str(inst)])
        assert main(["simulate", "-i", str(inst), "--policy", "basic-trajectory", "--capacity", "2"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc == {
            "capacity": 2,
            "cost": 4,
            "feasible": True,
            "max_pending": 2,
            "per_phase_cost": [4],
            "policy": "basic-trajectory",
        }

    def test_simulate_infeasible_capacity(self, tmp_path, capsys):
        inst = tmp_path / "inst.json"
        main(["gen", "--ell", "2", "-o", str(inst)])
        assert main(["simulate", "-i", str(inst), "--policy", "basic-trajectory", "--capacity", "1"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["feasible"] is False
        assert doc["step"] == 0

    def test_solve_writes_schedule_usable_by_render(self, tmp_path, capsys):
        inst = tmp_path / "inst.json"
        sched = tmp_path / "sched.json"
        svg = tmp_path / "out.svg"
        main(["gen", "--ell", "2", "-o", str(inst)])
        assert main([
            "solve", "-i", str(inst), "--capacity", "2",
            "--schedule-out", str(sched), "-o", str(tmp_path / "report.json"),
        ]) == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["cost"] == 4 and report["optimal"] is True
        assert main(["render", "-i", str(inst), "--schedule", str(sched), "-o", str(svg)]) == 0
        text = svg.read_text()
        assert "<polyline" in text and text.count('<rect class="anchor"') == 4

    def test_solve_limit_is_flagged_not_fatal(self, tmp_path, capsys):
        inst = tmp_path / "inst.json"
        main(["gen", "--ell", "2", "--phases", "2", "-o", str(inst)])
        assert main(["solve", "-i", str(inst), "--capacity", "2", "--max-states", "8"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["optimal"] is False

    def test_bounds_table_stdout(self, capsys):
        assert main(["bounds", "t-table", "--p-max", "1", "--q-max", "2", "--r-max", "0"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "p,q,r,t_hat"
        assert "0,2,0,6" in out and "1,2,0,3" in out

    def test_verify_tau_exit_codes(self, tmp_path, capsys):
        ok = main(["bounds", "verify-tau", "--p-max", "4", "--q-max", "4", "--r-max", "2"])
        assert ok == 0
        bad = main([
            "bounds", "verify-tau", "--p-max", "4", "--q-max", "4", "--r-max", "2",
            "--tau-factor", "3/2", "-o", str(tmp_path / "fail.csv"),
        ])
        assert bad == 1
        lines = (tmp_path / "fail.csv").read_text().splitlines()
        assert lines[0] == "check,family,eta,p,q,r,lhs,rhs,margin"
        assert len(lines) > 1

    def test_verify_steps_ok(self):
        assert main(["bounds", "verify-steps", "--p-max", "4", "--q-max", "4", "--r-max", "2"]) == 0

    def test_verify_steps_exact_eta_zero_tolerance(self):
        assert main([
            "bounds", "verify-steps", "--p-max", "6", "--q-max", "6", "--r-max", "3",
            "--eta", "1/3", "--tolerance", "0",
        ]) == 0

    def test_experiment_ell_guard_is_usage_error(self, tmp_path):
        rc = main(["experiment", "separation", "--ell-max", "4", "-o", str(tmp_path / "x.csv")])
        assert rc == 2

    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_render_rejects_invalid_instance(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(
            '{"format_version": 1, "n_sites": 2, "meta": {}, '
            '"arrivals": [{"id": 0, "step": 0, "site": 9, "kind": "generic"}]}'
        )
        assert main(["render", "-i", str(bad), "-o", str(tmp_path / "x.svg")]) == 2
