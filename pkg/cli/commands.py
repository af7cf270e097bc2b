# ============================================================================
# File: cli/commands.py
# Description: The six subcommands
# ============================================================================
"""
Subcommand implementations.

Each command takes a resolved Problem and an optional ReportWriter and
returns the JSON payload printed on stdout. Commands that produce file
artefacts always get a writer.
"""

from typing import Any, Dict, Optional

import numpy as np
import structlog

from core.exceptions import ConfigurationError
from core.presets import Preset
from oracle.stepper import step_solve
from oracle.verification import verify_decomposition
from services.problem_service import (
    Problem,
    classification_datum,
    decomposition_reference,
    discretisation,
    explicit_datum,
    initial_datum,
    mean_of,
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
    profile_frame,
    zeros_payload,
)
from spectral.classify import classify
from spectral.detfun import DeterminantFunction, Rectangle, export_heatmap, locate_zeros
from spectral.dtn import heat_mean_target, solve_dtn
from spectral.periodic import eval_uT

logger = structlog.get_logger(__name__)

Payload = Dict[str, Any]


def _u0_mean(problem: Problem) -> complex:
    """Mean of the explicit initial datum; u_T-based data contribute zero."""
    spec = problem.config.initial
    explicit = explicit_datum(spec)
    if explicit is None or spec.plus_uT or problem.preset is not Preset.HEAT_NEUMANN:
        return 0j
    return mean_of(explicit)


def cmd_classify(problem: Problem, writer: Optional[ReportWriter] = None) -> Payload:
    preset = problem.require_preset("classify")
    verdict = classify(
        preset,
        problem.data,
        u0=classification_datum(problem),
        n_max=problem.n_max,
        m_max=problem.m_max,
        tol=problem.config.resonance_tol,
        period_ratio=problem.period_ratio,
        q_max=problem.config.q_max,
    )
    payload = verdict.model_dump(mode="json")
    if writer is not None:
        writer.write_json("verdict.json", payload)
    return payload


def cmd_dtn(problem: Problem, writer: Optional[ReportWriter] = None) -> Payload:
    mean_value = None
    if problem.preset is Preset.HEAT_NEUMANN:
        mean_value = heat_mean_target(problem.data, _u0_mean(problem))
    result = solve_dtn(
        problem.pde,
        problem.data,
        n_max=problem.n_max,
        mean_value=mean_value,
        tol=problem.config.resonance_tol,
    )
    frame = dtn_frame(result)
    payload = dtn_payload(result)
    payload["table"] = frame.to_dict(orient="records")
    if writer is not None:
        writer.write_json("dtn.json", payload)
        writer.write_frame("dtn.csv", frame)
    return payload


def cmd_construct(problem: Problem, writer: ReportWriter) -> Payload:
    _, solution = periodic_part(problem, _u0_mean(problem))
    sampling = problem.config.sampling
    xs = np.linspace(0.0, 1.0, sampling.x_points)
    writer.write_frame("u_T.csv", profile_frame(xs, eval_uT(solution, xs)))
    grid = sample_u1(solution, sampling.x_points, sampling.t_points)
    writer.write_frame("u_1.csv", field_frame(grid["t"], grid["x"], grid["values"]))
    manifest = {
        "omega": solution.omega,
        "period": solution.period,
        "modes": list(solution.modes()),
        "truncation_norm": solution.truncation_norm(),
        "profiles": profile_manifest(solution),
    }
    writer.write_json("u_1.manifest.json", manifest)
    return {"period": solution.period, "modes": len(solution.modes()), "written": list(writer.written)}


def cmd_simulate(problem: Problem, writer: ReportWriter) -> Payload:
    spec = problem.config.oracle
    disc = discretisation(problem.config)
    u0 = initial_datum(problem)
    trajectory = step_solve(problem.pde, problem.data, u0, spec.t_end, disc, record_every=spec.record_every)
    sup = trajectory.sup_norms()
    diagnostics: Payload = {
        "points": disc.points,
        "dt": disc.dt,
        "t_end": float(trajectory.times[-1]),
        "snapshots": int(trajectory.times.size),
        "sup_norm_final": float(sup[-1]),
        "sup_norm_max": float(sup.max()),
    }
    period = problem.data.period
    try:
        times, defect = trajectory.periodicity_defect(period)
    except ValueError:
        diagnostics["periodicity_defect"] = None
        diagnostics["note"] = "period is not a multiple of the snapshot spacing"
    else:
        diagnostics["periodicity_defect"] = {
            "times": times.tolist(),
            "values": defect.tolist(),
        }
        if defect.size >= 2 and np.all(defect > 0):
            diagnostics["defect_decay_rate"] = trajectory.decay_fit(period)
    writer.write_frame("trajectory.csv", trajectory.to_frame())
    writer.write_json("diagnostics.json", diagnostics)
    return {**{k: v for k, v in diagnostics.items() if k != "periodicity_defect"}, "written": list(writer.written)}


def _delta_function(problem: Problem) -> DeterminantFunction:
    spec = problem.config.delta_map
    family = spec.family
    beta = spec.beta if spec.beta is not None else problem.beta
    if family is None:
        if problem.preset is Preset.STOKES_DECOUPLED:
            family = "uncoupled"
        elif problem.preset is Preset.STOKES_COUPLED:
            family = "coupled"
        else:
            raise ConfigurationError(
                "delta-map needs delta_map.family for non-Stokes problems",
                context={"preset": problem.preset.value if problem.preset else None},
            )
    if family == "coupled":
        if beta is None:
            raise ConfigurationError("coupled delta-map needs beta", context={"family": family})
        return DeterminantFunction.coupled(beta)
    return DeterminantFunction.uncoupled()


def cmd_delta_map(problem: Problem, writer: ReportWriter) -> Payload:
    spec = problem.config.delta_map
    delta = _delta_function(problem)
    rect = Rectangle(spec.x_min, spec.x_max, spec.y_min, spec.y_max)
    grid = export_heatmap(delta, rect, (spec.nx, spec.ny))
    writer.write_frame("delta_map.csv", heatmap_frame(grid), meta={"family": delta.family.value, "beta": delta.beta})
    payload: Payload = {"family": delta.family.value, "beta": delta.beta, "rect": rect.as_list()}
    if spec.locate:
        zero_set = locate_zeros(delta, rect)
        zeros = zeros_payload(zero_set)
        for entry, zero in zip(zeros["zeros"], zero_set.zeros):
            lam = zero.location
            entry["in_closure_of_D"] = bool((lam ** 3).imag <= 1e-9 * abs(lam) ** 3)
        writer.write_json("zeros.json", zeros)
        payload["count"] = zero_set.count
        payload["located"] = len(zero_set.zeros)
    payload["written"] = list(writer.written)
    return payload


def cmd_verify(problem: Problem, writer: ReportWriter) -> Payload:
    problem.require_preset("verify")
    u0 = initial_datum(problem)
    reference = decomposition_reference(problem, u0)
    report = verify_decomposition(
        problem.pde,
        problem.data,
        u0,
        reference,
        problem.config.oracle.times,
        discretisation(problem.config),
    )
    payload = report.to_dict()
    writer.write_json("verify.json", payload)
    logger.info("verify_finished", passed=report.passed, max_error=report.max_error)
    return {**payload, "written": list(writer.written)}


COMMANDS = {
    "classify": cmd_classify,
    "dtn": cmd_dtn,
    "construct": cmd_construct,
    "simulate": cmd_simulate,
    "delta-map": cmd_delta_map,
    "verify": cmd_verify,
}

FILE_COMMANDS = {"construct", "simulate", "delta-map", "verify"}
