# ============================================================================
# File: services/problem_service.py
# Description: Problem documents to domain objects and reference solutions
# ============================================================================
"""
Problem service.

Turns a validated ProblemConfig into the objects the numerical layers
work with (symbol, boundary data, initial datum) and assembles the
spectral reference u_1 + u_2 used by the verify command.
"""

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from pydantic import ValidationError

from core.boundary import Coupling, FourierBoundaryData, ModeTable, Trace
from core.config import settings
from core.exceptions import ConfigurationError, IllPosed, MalformedBoundaryConditions
from core.presets import (
    Preset,
    heat_neumann_data,
    ls_dirichlet_data,
    stokes_coupled_data,
    stokes_decoupled_data,
)
from core.symbol import DispersionMonomial
from oracle.stepper import Discretisation
from schemas.problem import CoefficientRow, InitialDatumSpec, ProblemConfig
from spectral.contour import contour_representation
from spectral.dtn import DtnResult, heat_mean_target, solve_dtn
from spectral.homogeneous import gauss_grid, heat_remainder, ls_remainder, stokes_coupled_remainder
from spectral.periodic import PeriodicSolution, build_periodic_solution, eval_u1, eval_uT

logger = structlog.get_logger(__name__)

Datum = Callable[[np.ndarray], np.ndarray]
Reference = Callable[[np.ndarray, float], np.ndarray]

PRESET_LABELS = {
    Preset.LS_DIRICHLET: ("G0", "H0"),
    Preset.HEAT_NEUMANN: ("G1", "H1"),
    Preset.STOKES_DECOUPLED: ("G0", "H0", "H1"),
    Preset.STOKES_COUPLED: ("G0", "H0"),
}


# ----------------------------------------------------------------------------
# Loading
# ----------------------------------------------------------------------------

def parse_override(text: str):
    """'a.b=value' -> (['a', 'b'], value); value parsed as JSON when possible."""
    if "=" not in text:
        raise ConfigurationError("Overrides look like key.path=value", context={"override": text})
    key, raw = text.split("=", 1)
    path = [part for part in key.strip().split(".") if part]
    if not path:
        raise ConfigurationError("Empty override key", context={"override": text})
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return path, value


def apply_overrides(document: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    for text in overrides:
        path, value = parse_override(text)
        node = document
        for part in path[:-1]:
            child = node.get(part)
            if not isinstance(child, dict):
                child = {}
                node[part] = child
            node = child
        node[path[-1]] = value
    return document


def load_config(path: Optional[str], overrides: Sequence[str] = ()) -> ProblemConfig:
    """
    Read a JSON problem document, apply overrides and validate.

    Raises:
        ConfigurationError: Unreadable file, invalid JSON or schema violation
    """
    document: Dict[str, Any] = {}
    if path:
        try:
            document = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError as e:
            raise ConfigurationError("Config file not found", context={"path": path}, original_exception=e)
        except json.JSONDecodeError as e:
            raise ConfigurationError(
                "Config file is not valid JSON",
                context={"path": path, "line": e.lineno},
                original_exception=e,
            )
        if not isinstance(document, dict):
            raise ConfigurationError("Config document must be a JSON object", context={"path": path})
    document = apply_overrides(document, overrides)
    try:
        return ProblemConfig(**document)
    except ValidationError as e:
        raise ConfigurationError(
            "Config failed validation",
            context={"path": path, "errors": [err["msg"] for err in e.errors()]},
            original_exception=e,
        )


# ----------------------------------------------------------------------------
# Domain objects
# ----------------------------------------------------------------------------

def table_from_rows(rows: Sequence[CoefficientRow]) -> ModeTable:
    """[[n, re, im], ...] -> ModeTable, summing repeated n."""
    table = ModeTable()
    for n, re, im in rows:
        table = table + ModeTable.single(int(n), complex(re, im))
    return table


def frequency(config: ProblemConfig) -> float:
    if config.omega is not None:
        return float(config.omega)
    if config.period is not None:
        return 2 * math.pi / config.period
    p, q = config.period_ratio
    # T = (p/q)(2/pi)
    return math.pi ** 2 * q / p


@dataclass
class Problem:
    """Resolved problem: preset (if any), symbol, boundary data and cutoffs."""

    config: ProblemConfig
    preset: Optional[Preset]
    pde: DispersionMonomial
    data: FourierBoundaryData
    n_max: int
    m_max: int

    @property
    def period_ratio(self) -> Optional[Fraction]:
        if self.config.period_ratio is None:
            return None
        return Fraction(*self.config.period_ratio)

    @property
    def beta(self) -> Optional[float]:
        return self.config.beta

    def require_preset(self, command: str) -> Preset:
        if self.preset is None:
            raise ConfigurationError(
                f"{command} needs one of the preset problems",
                context={"command": command},
            )
        return self.preset


def _preset_data(preset: Preset, config: ProblemConfig, omega: float) -> FourierBoundaryData:
    allowed = PRESET_LABELS[preset]
    extra = sorted(set(config.boundary) - set(allowed))
    if extra or config.couplings:
        raise MalformedBoundaryConditions(
            "Boundary tables do not match the preset",
            context={"preset": preset.value, "allowed": list(allowed), "unexpected": extra},
        )
    tables = {label.lower(): table_from_rows(config.boundary.get(label, [])) for label in allowed}
    real = config.real_valued
    if preset is Preset.LS_DIRICHLET:
        return ls_dirichlet_data(omega, tables["g0"], tables["h0"], real_valued=real)
    if preset is Preset.HEAT_NEUMANN:
        return heat_neumann_data(omega, tables["g1"], tables["h1"], real_valued=real)
    if preset is Preset.STOKES_DECOUPLED:
        return stokes_decoupled_data(omega, tables["g0"], tables["h0"], tables["h1"], real_valued=real)
    return stokes_coupled_data(omega, config.beta, tables["g0"], tables["h0"], real_valued=real)


def _explicit_data(config: ProblemConfig, omega: float) -> FourierBoundaryData:
    couplings = tuple(
        Coupling(
            {Trace.parse(label): complex(*w) for label, w in spec.weights.items()},
            table_from_rows(spec.rhs),
        )
        for spec in config.couplings
    )
    return FourierBoundaryData(
        omega=omega,
        order=config.symbol.order,
        prescribed={Trace.parse(label): table_from_rows(rows) for label, rows in config.boundary.items()},
        couplings=couplings,
        real_valued=config.real_valued,
    )


def build_problem(config: ProblemConfig) -> Problem:
    """
    Raises:
        MalformedBoundaryConditions: Tables that do not fit the problem
        InvalidSymbolError: Inadmissible explicit symbol
        IllPosed: Coupled Stokes data with |beta| < 1
    """
    omega = frequency(config)
    if config.preset is not None:
        preset = Preset(config.preset)
        if preset is Preset.STOKES_COUPLED and abs(config.beta) < 1:
            raise IllPosed(
                "Coupled Stokes problem blows up instantaneously for |beta| < 1",
                context={"beta": config.beta},
            )
        pde = preset.pde
        data = _preset_data(preset, config, omega)
    else:
        preset = None
        pde = DispersionMonomial(complex(*config.symbol.a), config.symbol.order)
        data = _explicit_data(config, omega)
    problem = Problem(
        config=config,
        preset=preset,
        pde=pde,
        data=data,
        n_max=config.n_max or settings.N_MAX,
        m_max=config.m_max or settings.M_MAX,
    )
    logger.debug(
        "problem_built",
        preset=preset.value if preset else None,
        order=pde.order,
        omega=omega,
        support=data.support(),
    )
    return problem


def discretisation(config: ProblemConfig) -> Discretisation:
    spec = config.oracle
    overrides = {
        key: value
        for key, value in (("points", spec.points), ("dt", spec.dt), ("rannacher_steps", spec.rannacher_steps))
        if value is not None
    }
    return Discretisation(**overrides)


# ----------------------------------------------------------------------------
# Initial data
# ----------------------------------------------------------------------------

def explicit_datum(spec: InitialDatumSpec) -> Optional[Datum]:
    """The explicit part of u_0, or None for kind 'uT'."""
    if spec.kind == "uT":
        return None
    if spec.kind == "zero":
        return lambda x: np.zeros(np.shape(x), dtype=complex)
    if spec.kind == "polynomial":
        coefficients = np.asarray(spec.coefficients or [0.0], dtype=float)
        return lambda x: np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), coefficients).astype(complex)
    if spec.kind in ("cosine", "sine"):
        basis = np.cos if spec.kind == "cosine" else np.sin
        return lambda x: (spec.amplitude * basis(spec.mode * math.pi * np.asarray(x, dtype=float))).astype(complex)
    values = np.array([complex(re, im) for re, im in spec.samples])
    nodes = np.linspace(0.0, 1.0, values.size)

    def sampled(x):
        x_arr = np.asarray(x, dtype=float)
        return np.interp(x_arr, nodes, values.real) + 1j * np.interp(x_arr, nodes, values.imag)

    return sampled


def mean_of(func: Datum) -> complex:
    xs, ws = gauss_grid()
    return complex(np.dot(ws, np.asarray(func(xs), dtype=complex) * np.ones_like(xs)))


def periodic_part(problem: Problem, u0_mean: complex = 0j) -> Tuple[DtnResult, PeriodicSolution]:
    """
    DtN solve and u_1.

    For Neumann heat data the zero mode is closed so that u_T has mean
    u0_mean.
    """
    mean_value = None
    if problem.preset is Preset.HEAT_NEUMANN:
        mean_value = heat_mean_target(problem.data, u0_mean)
    dtn = solve_dtn(problem.pde, problem.data, n_max=problem.n_max, mean_value=mean_value,
                    tol=problem.config.resonance_tol)
    solution = build_periodic_solution(problem.pde, problem.data, dtn)
    return dtn, solution


def initial_datum(problem: Problem) -> Datum:
    """
    u_0 as a callable.

    kind 'uT' and plus_uT use the u_T whose mean is zero (heat) so that
    the explicit part carries the mean of u_0.
    """
    spec = problem.config.initial
    explicit = explicit_datum(spec)
    if explicit is not None and not spec.plus_uT:
        return explicit
    _, solution = periodic_part(problem)

    def uT(x):
        return np.asarray(eval_uT(solution, x), dtype=complex)

    if explicit is None:
        return uT
    return lambda x: uT(x) + np.asarray(explicit(x), dtype=complex)


def classification_datum(problem: Problem):
    """Descriptor accepted by classify: None, 'uT' or a callable."""
    spec = problem.config.initial
    if spec.kind == "uT" and not spec.plus_uT:
        return "uT"
    if spec.kind == "zero" and not spec.plus_uT:
        return None
    return initial_datum(problem)


# ----------------------------------------------------------------------------
# Reference decomposition
# ----------------------------------------------------------------------------

def decomposition_reference(problem: Problem, u0: Datum) -> Reference:
    """
    Callable (x, t) -> u_1(x, t) + u_2(x, t) for a preset problem.

    Raises:
        ConfigurationError: For explicit symbols
        ProfileSingular: If a mode in range is resonant
        EigenBasisUnavailable: From the coupled Stokes series
    """
    preset = problem.require_preset("verify")
    u0_mean = mean_of(u0) if preset is Preset.HEAT_NEUMANN else 0j
    _, solution = periodic_part(problem, u0_mean)

    def w0(x):
        return np.asarray(u0(x), dtype=complex) - np.asarray(eval_uT(solution, x), dtype=complex)

    if preset is Preset.LS_DIRICHLET:
        remainder = ls_remainder(w0, problem.m_max)
    elif preset is Preset.HEAT_NEUMANN:
        remainder = heat_remainder(w0, problem.m_max)
    elif preset is Preset.STOKES_COUPLED:
        remainder = stokes_coupled_remainder(w0, problem.beta, problem.m_max)
    else:
        representation = contour_representation(w0)

        def remainder(x, t):
            x_arr = np.atleast_1d(np.asarray(x, dtype=float))
            if t == 0:
                return w0(x_arr)
            return np.array([representation.evaluate(float(xi), t) for xi in x_arr])

    def reference(x, t: float):
        return np.asarray(eval_u1(solution, x, t), dtype=complex) + np.asarray(remainder(x, t), dtype=complex)

    return reference


def sample_u1(solution: PeriodicSolution, x_points: int, t_points: int) -> Dict[str, np.ndarray]:
    """u_1 on a uniform (t, x) grid covering one period."""
    xs = np.linspace(0.0, 1.0, x_points)
    ts = np.arange(t_points) * solution.period / t_points
    values = np.vstack([np.asarray(eval_u1(solution, xs, t), dtype=complex) for t in ts])
    return {"x": xs, "t": ts, "values": values}


def profile_manifest(solution: PeriodicSolution) -> List[Dict[str, Any]]:
    """Per-mode profile description sufficient to re-evaluate u_1."""
    entries = []
    for n, profile in sorted(solution.profiles.items()):
        entries.append({
            "n": n,
            "polynomial": profile.is_polynomial,
            "wavenumbers": [[k.real, k.imag] for k in profile.wavenumbers],
            "anchors": list(profile.anchors),
            "amplitudes": [[complex(a).real, complex(a).imag] for a in profile.amplitudes],
            "trace_residual": profile.trace_residual,
        })
    return entries
