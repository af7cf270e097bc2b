"""
Integration tests for the command-line surface
"""

import json
from pathlib import Path

import pandas as pd
import pytest

from cli.main import run

PROBLEMS = Path(__file__).resolve().parents[2] / "problems"
WORKED = str(PROBLEMS / "ls_worked_example.json")
HEAT = str(PROBLEMS / "heat_neumann.json")


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


class TestClassifyCommand:
    """Test classify end to end"""

    def test_worked_example(self, capsys):
        """Test the resonant worked example on stdout"""
        code = run(["classify", "--config", WORKED])
        payload = _stdout_json(capsys)

        # Assertions
        assert code == 0
        assert payload["kind"] == "NotAsymptoticallyPeriodic"
        assert payload["witness"]["n"] == -1
        assert payload["witness"]["kind"] == "boundary_mode"

    def test_empty_tables(self, capsys):
        """Test zero data with u_0 = 0 is exactly periodic"""
        code = run([
            "classify", "--set", "preset=ls-dirichlet", "--set", "omega=2.0", "--set", "initial.kind=zero",
            "--set", "n_max=4",
        ])
        payload = _stdout_json(capsys)

        # Assertions
        assert code == 0
        assert payload["kind"] == "ExactlyPeriodic"

    def test_writes_verdict(self, capsys, output_dir):
        """Test --output-dir adds verdict.json and its sidecar"""
        code = run(["classify", "--config", HEAT, "--output-dir", str(output_dir)])
        payload = _stdout_json(capsys)
        written = json.loads((output_dir / "verdict.json").read_text(encoding="utf-8"))
        sidecar = json.loads((output_dir / "verdict.json.meta.json").read_text(encoding="utf-8"))

        # Assertions
        assert code == 0
        assert written == payload
        assert sidecar["config"]["preset"] == "heat-neumann"
        assert sidecar["command"] == "classify"


class TestDtnCommand:
    """Test dtn outputs"""

    def test_tables(self, capsys, output_dir):
        """Test JSON payload and CSV table for the worked example"""
        code = run(["dtn", "--config", WORKED, "--output-dir", str(output_dir)])
        payload = _stdout_json(capsys)
        frame = pd.read_csv(output_dir / "dtn.csv")

        # Assertions
        assert code == 0
        assert payload["resonant_modes"] == [-1]
        assert list(frame.columns) == ["n", "trace", "re", "im", "min_norm"]
        assert set(frame["n"]) == {1}
        assert (output_dir / "dtn.json.meta.json").exists()


class TestFileCommands:
    """Test construct, simulate and delta-map artefacts"""

    def test_construct(self, capsys, output_dir):
        """Test u_T, u_1 and the manifest"""
        code = run([
            "construct", "--config", HEAT, "--output-dir", str(output_dir),
            "--set", "sampling.x_points=11", "--set", "sampling.t_points=4",
        ])
        payload = _stdout_json(capsys)
        u1 = pd.read_csv(output_dir / "u_1.csv")
        manifest = json.loads((output_dir / "u_1.manifest.json").read_text(encoding="utf-8"))

        # Assertions
        assert code == 0
        assert payload["period"] == pytest.approx(1.0)
        assert len(pd.read_csv(output_dir / "u_T.csv")) == 11
        assert len(u1) == 44
        assert list(u1.columns) == ["t", "x", "re", "im"]
        assert {-1, 1} <= set(manifest["modes"])

    def test_simulate(self, capsys, output_dir):
        """Test the long-format trajectory and diagnostics"""
        code = run([
            "simulate", "--config", HEAT, "--output-dir", str(output_dir),
            "--set", "oracle.points=12", "--set", "oracle.dt=0.01", "--set", "oracle.t_end=0.1",
        ])
        payload = _stdout_json(capsys)
        trajectory = pd.read_csv(output_dir / "trajectory.csv")

        # Assertions
        assert code == 0
        assert payload["snapshots"] == 11
        assert len(trajectory) == 11 * 13
        assert (output_dir / "diagnostics.json").exists()
        assert (output_dir / "trajectory.csv.meta.json").exists()

    def test_delta_map(self, capsys, output_dir, write_config):
        """Test the heatmap grid without zero location"""
        path = write_config({
            "preset": "stokes-decoupled",
            "period": 1.0,
            "delta_map": {"x_min": -2, "x_max": 2, "y_min": -2, "y_max": 2, "nx": 5, "ny": 4, "locate": False},
        })
        code = run(["delta-map", "--config", path, "--output-dir", str(output_dir)])
        payload = _stdout_json(capsys)
        frame = pd.read_csv(output_dir / "delta_map.csv")

        # Assertions
        assert code == 0
        assert payload["family"] == "uncoupled"
        assert len(frame) == 20
        assert list(frame.columns) == ["re_k", "im_k", "sin_arg"]
        assert not (output_dir / "zeros.json").exists()


class TestExitCodes:
    """Test error reporting"""

    def test_missing_config(self, capsys, tmp_path):
        """Test exit code 2 with a JSON error on stderr"""
        code = run(["classify", "--config", str(tmp_path / "absent.json"), "--log-level", "CRITICAL"])
        captured = capsys.readouterr()
        error = json.loads(captured.err[captured.err.index("{"):])

        # Assertions
        assert code == 2
        assert captured.out == ""
        assert error["error_type"] == "ConfigurationError"

    def test_ill_posed(self, capsys):
        """Test exit code 3 for |beta| < 1"""
        code = run([
            "classify", "--set", "preset=stokes-coupled", "--set", "beta=0.5", "--set", "period=1.0",
            "--log-level", "CRITICAL",
        ])

        # Assertions
        assert code == 3

    def test_numerical_failure(self, capsys, output_dir):
        """Test exit code 4 when u_1 does not exist"""
        code = run(["verify", "--config", WORKED, "--output-dir", str(output_dir), "--log-level", "CRITICAL"])

        # Assertions
        assert code == 4
        assert not (output_dir / "verify.json").exists()
