import json
import subprocess
import sys

import pytest
from conftest import LN2, LN_PHI, write_system

from bsdim import io as bio
from bsdim.cli import RunConfig, grid, main
from bsdim.errors import ValidationError


@pytest.fixture
def full2_path(tmp_path):
    return str(write_system(tmp_path / "full2.json", [[1, 1], [1, 1]], {"0": 1.0, "1": 1.0}))


@pytest.fixture
def golden_path(tmp_path):
    return str(write_system(tmp_path / "goldenmean.json", [[1, 1], [1, 0]], {"0": 1.0, "1": 1.0}))


@pytest.fixture
def reducible_path(tmp_path):
    return str(write_system(tmp_path / "red.json", [[1, 1], [0, 1]], {"0": 1.0, "1": 1.0}))


def run(args, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main([*args, "--output", str(out)])
    return code, out


class TestCommands:
    def test_dim(self, full2_path, tmp_path):
        code, out = run(["dim", "--system", full2_path, "--depth", "12", "--tol", "1e-8"], tmp_path)
        assert code == 0
        rep = bio.read_report(out)
        assert rep["bowen_root"] == pytest.approx(0.6931472, abs=1e-7)
        for key in ("cover_exponent", "pack_exponent", "capacity_exponent", "weighted_exponent"):
            assert rep[key] == pytest.approx(LN2, abs=1e-7)
        assert all(rep["checks"].values())

    def test_verify_golden(self, golden_path, tmp_path):
        code, out = run(["verify", "--system", golden_path, "--depth", "12", "--seed", "7"], tmp_path)
        assert code == 0
        checks = bio.read_report(out)["checks"]
        assert checks and all(c["verdict"] == "pass" for c in checks)

    def test_pressure_curve_csv(self, full2_path, tmp_path):
        code, out = run(["pressure-curve", "--system", full2_path, "--format", "csv"], tmp_path, "c.csv")
        assert code == 0
        curve = bio.read_pressure_csv(out.read_text())
        assert len(curve.samples) == 11
        for s, p in curve.samples:
            assert p == pytest.approx(LN2 - s, abs=1e-12)
        assert all(a[1] > b[1] for a, b in zip(curve.samples, curve.samples[1:]))
        assert curve.root == pytest.approx(LN2, abs=1e-10) and curve.samples[curve.root_row][0] == 0.6

    def test_pressure_curve_no_root(self, full2_path, tmp_path):
        code, out = run(["pressure-curve", "--system", full2_path, "--s-max", "0.5"], tmp_path)
        assert code == 0
        assert bio.read_report(out)["root"] is None

    @pytest.mark.parametrize("cmd", ["cover", "pack", "capacity", "weighted", "frostman"])
    def test_single_value_commands(self, golden_path, tmp_path, cmd):
        code, out = run([cmd, "--system", golden_path, "--depth", "8", "--alpha", "0.5"], tmp_path)
        assert code == 0
        assert bio.read_report(out)

    def test_variational_with_sub_set(self, full2_path, tmp_path):
        zpath = tmp_path / "z.json"
        zpath.write_text(json.dumps({"sub_adjacency": [[1, 1], [1, 0]]}))
        code, out = run(["variational", "--system", full2_path, "--set", str(zpath), "--draws", "50"], tmp_path)
        assert code == 0
        rep = bio.read_report(out)
        assert rep["s_star"] == pytest.approx(LN_PHI, abs=1e-9)
        assert set(rep["equilibrium"]) == {"states", "transition", "stationary"}
        assert rep["certificate"]["verdicts"]["weak_duality"] == "pass"

    def test_stdout(self, golden_path, capsys):
        assert main(["capacity", "--system", golden_path, "--depth", "4", "--s", "0"]) == 0
        assert json.loads(capsys.readouterr().out)["value"] == 8


class TestExitCodes:
    def test_negative_alpha(self, full2_path, tmp_path):
        code, out = run(["cover", "--system", full2_path, "--alpha", "-0.1"], tmp_path)
        assert code == 2
        assert bio.read_report(out)["error"] == "ValidationError"

    def test_not_irreducible(self, reducible_path, tmp_path, capsys):
        code, out = run(["pressure-curve", "--system", reducible_path], tmp_path)
        assert code == 3
        rep = bio.read_report(out)
        assert rep["error"] == "NotIrreducible" and rep["exit_code"] == 3 and rep["message"]
        assert "NotIrreducible" in capsys.readouterr().err

    def test_missing_system(self, tmp_path):
        code, _ = run(["dim", "--system", str(tmp_path / "none.json")], tmp_path)
        assert code == 2

    @pytest.mark.parametrize(
        "extra",
        [["--depth", "0"], ["--min-depth", "9", "--depth", "8"], ["--tol", "0"], ["--format", "csv"]],
    )
    def test_bad_config(self, full2_path, tmp_path, extra):
        code, _ = run(["cover", "--system", full2_path, "--alpha", "1", *extra], tmp_path)
        assert code == 2

    def test_alpha_required(self, full2_path, tmp_path):
        assert run(["pack", "--system", full2_path], tmp_path)[0] == 2

    def test_verify_failure_exit(self, full2_path, tmp_path, monkeypatch, capsys):
        from bsdim import verify

        original = verify.run_suite

        def broken(*a, **k):
            rep = original(*a, **k)
            rep.checks[0] = verify.Check(rep.checks[0].name, False, {})
            return rep

        monkeypatch.setattr("bsdim.cli.run_suite", broken)
        code, out = run(["verify", "--system", full2_path, "--depth", "6"], tmp_path)
        assert code == 4
        assert "verification failed" in capsys.readouterr().err
        assert bio.read_report(out)["passed"] is False

    def test_subprocess_entry_point(self, full2_path, tmp_path):
        out = tmp_path / "o.json"
        proc = subprocess.run(
            [sys.executable, "-m", "bsdim", "cover", "--system", full2_path, "--alpha", "-1", "--output", str(out)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 2 and "ValidationError" in proc.stderr


class TestDeterminism:
    def test_byte_identical(self, golden_path, tmp_path):
        args = ["verify", "--system", golden_path, "--depth", "10", "--seed", "3"]
        _, a = run(args, tmp_path, "a.json")
        _, b = run(args, tmp_path, "b.json")
        assert a.read_bytes() == b.read_bytes()

    def test_seed_matters(self, golden_path, tmp_path):
        base = ["variational", "--system", golden_path, "--draws", "10"]
        _, a = run([*base, "--seed", "1"], tmp_path, "a.json")
        _, b = run([*base, "--seed", "2"], tmp_path, "b.json")
        assert a.read_bytes() != b.read_bytes()


class TestHelpers:
    def test_grid(self):
        assert grid(0.0, 1.0, 0.1) == [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
        assert grid(0.5, 0.5, 0.1) == [0.5]

    def test_config_validate(self):
        cfg = RunConfig("dim", "x", None, 4, 5, None, 1e-10, 0, None, "json")
        with pytest.raises(ValidationError):
            cfg.validate()
