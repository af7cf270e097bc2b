"""
Unit tests for service layer
"""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from core.boundary import LEFT, RIGHT, Trace
from core.config import settings
from core.exceptions import ConfigurationError, IllPosed, MalformedBoundaryConditions, ProfileSingular
from core.presets import Preset, ls_dirichlet_data
from schemas.problem import InitialDatumSpec, ProblemConfig
from services.problem_service import (
    apply_overrides,
    build_problem,
    classification_datum,
    decomposition_reference,
    discretisation,
    explicit_datum,
    frequency,
    initial_datum,
    load_config,
    mean_of,
    parse_override,
    periodic_part,
    profile_manifest,
    sample_u1,
)
from services.report_service import (
    ReportWriter,
    dtn_frame,
    dtn_payload,
    field_frame,
    heatmap_frame,
    to_jsonable,
)
from spectral.detfun import DeterminantFunction, Rectangle, export_heatmap
from spectral.dtn import solve_dtn
from spectral.periodic import eval_u1, eval_uT

PROBLEMS = Path(__file__).resolve().parents[2] / "problems"
XS = np.linspace(0.0, 1.0, 17)


def _config(**document):
    return ProblemConfig(**document)


class TestOverrides:
    """Test --set parsing"""

    def test_json_value(self):
        """Test dotted key with a JSON number"""
        # Assertions
        assert parse_override("oracle.dt=0.002") == (["oracle", "dt"], 0.002)

    def test_plain_string(self):
        """Test non-JSON values stay strings"""
        # Assertions
        assert parse_override("preset=ls-dirichlet") == (["preset"], "ls-dirichlet")

    @pytest.mark.parametrize("text", ["nokey", "=3"])
    def test_malformed(self, text):
        """Test missing '=' or empty key"""
        with pytest.raises(ConfigurationError):
            parse_override(text)

    def test_nested_creation(self):
        """Test intermediate sections are created"""
        document = apply_overrides({"n_max": 8}, ["oracle.points=16", "n_max=4"])

        # Assertions
        assert document == {"n_max": 4, "oracle": {"points": 16}}


class TestLoadConfig:
    """Test loading problem documents"""

    def test_shipped_problem(self):
        """Test the worked example document"""
        config = load_config(str(PROBLEMS / "ls_worked_example.json"))

        # Assertions
        assert config.preset == "ls-dirichlet"
        assert config.omega == pytest.approx(math.pi ** 2)

    def test_overrides_only(self):
        """Test a document built from overrides alone"""
        config = load_config(None, ["preset=heat-neumann", "period=1.0"])

        # Assertions
        assert config.preset == "heat-neumann"
        assert frequency(config) == pytest.approx(2 * math.pi)

    def test_missing_file(self, tmp_path):
        """Test a missing path"""
        with pytest.raises(ConfigurationError) as excinfo:
            load_config(str(tmp_path / "absent.json"))

        # Assertions
        assert excinfo.value.exit_code == 2

    def test_invalid_json(self, tmp_path):
        """Test a file that is not JSON"""
        path = tmp_path / "broken.json"
        path.write_text("{preset: ", encoding="utf-8")

        with pytest.raises(ConfigurationError):
            load_config(str(path))

    def test_not_an_object(self, write_config):
        """Test a JSON array document"""
        with pytest.raises(ConfigurationError):
            load_config(write_config([1, 2]))

    def test_schema_violation(self, write_config):
        """Test validation messages land in the context"""
        with pytest.raises(ConfigurationError) as excinfo:
            load_config(write_config({"preset": "ls-dirichlet"}))

        # Assertions
        assert excinfo.value.context["errors"]


class TestBuildProblem:
    """Test problem resolution"""

    def test_period_ratio(self):
        """Test T = (p/q)(2/pi) gives omega = pi^2 q / p"""
        config = _config(preset="ls-dirichlet", period_ratio=[2, 1])
        problem = build_problem(config)

        # Assertions
        assert frequency(config) == pytest.approx(math.pi ** 2 / 2)
        assert problem.data.period == pytest.approx(4 / math.pi)
        assert problem.period_ratio == 2

    def test_worked_example_tables(self):
        """Test rows [n, re, im] become mode tables"""
        problem = build_problem(load_config(str(PROBLEMS / "ls_worked_example.json")))

        # Assertions
        assert problem.preset is Preset.LS_DIRICHLET
        assert problem.data.value(Trace(LEFT, 0), -1) == pytest.approx(0.5j)
        assert problem.data.value(Trace(LEFT, 0), 1) == pytest.approx(-0.5j)
        assert problem.data.value(Trace(RIGHT, 0), 1) == 0
        assert problem.n_max == 8

    def test_default_cutoffs(self):
        """Test cutoffs fall back to settings"""
        problem = build_problem(_config(preset="heat-neumann", period=1.0))

        # Assertions
        assert problem.n_max == settings.N_MAX
        assert problem.m_max == settings.M_MAX

    def test_unexpected_table(self):
        """Test a Dirichlet table under the Neumann preset"""
        with pytest.raises(MalformedBoundaryConditions):
            build_problem(_config(preset="heat-neumann", period=1.0, boundary={"G0": [[1, 1.0, 0.0]]}))

    def test_ill_posed_coupling(self):
        """Test |beta| < 1 is refused before any solve"""
        with pytest.raises(IllPosed):
            build_problem(_config(preset="stokes-coupled", beta=0.5, period=1.0))

    def test_explicit_symbol_matches_preset(self):
        """Test a = i, N = 2 reproduces the Schroedinger DtN table"""
        boundary = {"G0": [[1, 0.0, -0.5], [-1, 0.0, 0.5]], "H0": []}
        explicit = build_problem(_config(symbol={"a": [0.0, 1.0], "order": 2}, omega=2.0, boundary=boundary))
        preset = build_problem(_config(preset="ls-dirichlet", omega=2.0, boundary=boundary))
        left = solve_dtn(explicit.pde, explicit.data, n_max=2)
        right = solve_dtn(preset.pde, preset.data, n_max=2)

        # Assertions
        assert explicit.preset is None
        assert left.solution(1).traces == pytest.approx(right.solution(1).traces)
        with pytest.raises(ConfigurationError):
            explicit.require_preset("verify")

    def test_discretisation_overrides(self):
        """Test unset oracle fields keep the settings defaults"""
        disc = discretisation(_config(preset="heat-neumann", period=1.0, oracle={"points": 16}))

        # Assertions
        assert disc.points == 16
        assert disc.dt == settings.ORACLE_DT


class TestInitialData:
    """Test initial datum kinds"""

    def test_kinds(self):
        """Test zero, polynomial, cosine and samples"""
        zero = explicit_datum(InitialDatumSpec(kind="zero"))
        poly = explicit_datum(InitialDatumSpec(kind="polynomial", coefficients=[0.0, 1.0, -2.1, 1.1]))
        cosine = explicit_datum(InitialDatumSpec(kind="cosine", amplitude=0.3, mode=1))
        sampled = explicit_datum(InitialDatumSpec(kind="samples", samples=[[0.0, 0.0], [1.0, 2.0]]))

        # Assertions
        assert explicit_datum(InitialDatumSpec(kind="uT")) is None
        assert np.all(zero(XS) == 0)
        assert poly(1.0) == pytest.approx(0.0, abs=1e-14)
        assert cosine(0.0) == pytest.approx(0.3)
        assert sampled(0.25) == pytest.approx(0.25 + 0.5j)

    def test_mean(self):
        """Test Gauss quadrature of x and cos(pi x)"""
        # Assertions
        assert mean_of(lambda x: x) == pytest.approx(0.5)
        assert abs(mean_of(lambda x: np.cos(math.pi * x))) < 1e-14

    def test_plus_uT(self):
        """Test u_0 - u_T is the explicit part"""
        problem = build_problem(load_config(str(PROBLEMS / "heat_neumann.json")))
        u0 = initial_datum(problem)
        _, solution = periodic_part(problem)

        # Assertions
        assert np.allclose(u0(XS) - eval_uT(solution, XS), 0.3 * np.cos(math.pi * XS), atol=1e-12)

    def test_classification_descriptor(self):
        """Test 'uT', None and callables"""
        base = {"preset": "heat-neumann", "period": 1.0}

        # Assertions
        assert classification_datum(build_problem(_config(**base))) == "uT"
        assert classification_datum(build_problem(_config(**base, initial={"kind": "zero"}))) is None
        assert callable(classification_datum(build_problem(_config(**base, initial={"kind": "cosine"}))))


class TestReference:
    """Test the u_1 + u_2 reference"""

    def test_heat_reference_starts_at_u0(self):
        """Test the reference reproduces u_0 at t = 0 and decays onto u_1"""
        problem = build_problem(load_config(str(PROBLEMS / "heat_neumann.json")))
        u0 = initial_datum(problem)
        reference = decomposition_reference(problem, u0)
        _, solution = periodic_part(problem)

        # Assertions
        assert np.allclose(reference(XS, 0.0), u0(XS), atol=1e-10)
        assert np.allclose(
            reference(XS, 0.1) - eval_u1(solution, XS, 0.1),
            0.3 * math.exp(-math.pi ** 2 * 0.1) * np.cos(math.pi * XS),
            atol=1e-10,
        )

    def test_resonant_problem(self):
        """Test the worked example has no periodic part"""
        problem = build_problem(load_config(str(PROBLEMS / "ls_worked_example.json")))

        with pytest.raises(ProfileSingular):
            decomposition_reference(problem, lambda x: np.zeros_like(x, dtype=complex))

    def test_sampling_and_manifest(self):
        """Test the u_1 grid shape and per-mode manifest"""
        problem = build_problem(load_config(str(PROBLEMS / "heat_neumann.json")))
        _, solution = periodic_part(problem)
        grid = sample_u1(solution, x_points=5, t_points=4)
        manifest = profile_manifest(solution)

        # Assertions
        assert grid["values"].shape == (4, 5)
        assert grid["t"][-1] == pytest.approx(0.75)
        assert [entry["n"] for entry in manifest] == sorted(solution.profiles)
        assert all("trace_residual" in entry for entry in manifest)


class TestReports:
    """Test artefact writers and frames"""

    def test_dtn_frame_empty_for_zero_data(self):
        """Test zero data gives an empty table with the expected columns"""
        result = solve_dtn(Preset.LS_DIRICHLET.pde, ls_dirichlet_data(2.0), n_max=3)
        frame = dtn_frame(result)

        # Assertions
        assert frame.empty
        assert list(frame.columns) == ["n", "trace", "re", "im", "min_norm"]

    def test_dtn_frame_worked_example(self, ls_worked_data):
        """Test only recovered traces of solved modes appear"""
        result = solve_dtn(Preset.LS_DIRICHLET.pde, ls_worked_data, n_max=3)
        frame = dtn_frame(result)
        payload = dtn_payload(result)

        # Assertions
        assert set(frame["n"]) == {1}
        assert set(frame["trace"]) <= {"G1", "H1"}
        assert payload["resonant_modes"] == [-1]

    def test_jsonable(self):
        """Test complex and numpy values"""
        # Assertions
        assert to_jsonable({"z": 1 + 2j, "n": np.int64(3), "a": np.array([0.5])}) == {
            "z": [1.0, 2.0], "n": 3, "a": [0.5],
        }

    def test_writer(self, output_dir):
        """Test artefacts, sidecars and no leftover temporaries"""
        writer = ReportWriter(str(output_dir), {"preset": "heat-neumann"}, "simulate")
        frame = field_frame(np.array([0.0, 0.5]), np.array([0.0, 1.0]), np.ones((2, 2)) * (1 + 1j))
        writer.write_frame("trajectory.csv", frame)
        writer.write_json("diagnostics.json", {"value": 2j})

        sidecar = json.loads((output_dir / "trajectory.csv.meta.json").read_text(encoding="utf-8"))
        payload = json.loads((output_dir / "diagnostics.json").read_text(encoding="utf-8"))

        # Assertions
        assert sidecar["command"] == "simulate"
        assert sidecar["config"] == {"preset": "heat-neumann"}
        assert sidecar["rows"] == 4
        assert payload == {"value": [0.0, 2.0]}
        assert (output_dir / "trajectory.csv").read_bytes().count(b"\r\n") == 5
        assert not [p for p in output_dir.iterdir() if p.name.startswith(".")]
        assert len(writer.written) == 2

    def test_heatmap_frame(self):
        """Test rows ordered by im_k, then re_k"""
        grid = export_heatmap(DeterminantFunction.uncoupled(), Rectangle(-1.0, 1.0, -1.0, 1.0), (3, 2))
        frame = heatmap_frame(grid)

        # Assertions
        assert len(frame) == 6
        assert list(frame["re_k"][:3]) == [-1.0, 0.0, 1.0]
        assert list(frame["im_k"][:3]) == [-1.0, -1.0, -1.0]
        assert np.all(np.abs(frame["sin_arg"]) <= 1)
