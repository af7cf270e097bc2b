# ============================================================================
# File: spectral/classify.py
# Description: Periodicity verdicts for the four preset problems
# ============================================================================
"""
Classification of long-time behaviour.

Each preset is decided from three kinds of evidence:

    1. Resonance: a mode whose boundary system is singular while its data
       is not compatible obstructs periodicity (boundary_mode witness)
    2. u_0 = u_T: the forced solution is then exactly T-periodic
    3. The remainder u_2: periodic with period 2/pi (Schroedinger),
       decaying (heat, Stokes), or undetermined (coupled Stokes, |beta| = 1)

The Schroedinger verdict additionally depends on whether T and 2/pi are
rationally dependent.
"""

import math
from fractions import Fraction
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
import structlog

from core.boundary import LEFT, RIGHT, FourierBoundaryData, Trace
from core.config import settings
from core.exceptions import IllPosed, MalformedBoundaryConditions
from core.presets import Preset, coupling_beta
from core.symbol import denominator_roots
from schemas.verdict import (
    CommensurabilityReport,
    ModeEvidence,
    PeriodInfo,
    Verdict,
    VerdictKind,
    Witness,
    WitnessKind,
    pair,
)
from spectral.commensurability import commensurability, resonance_set
from spectral.detfun import DeterminantFunction, eigen_search_rect, locate_zeros
from spectral.dtn import DtnResult, heat_mean_target, solve_dtn
from spectral.homogeneous import distinct_eigenparameters, gauss_grid, ls_remainder
from spectral.periodic import PeriodicSolution, build_periodic_solution, eval_uT

logger = structlog.get_logger(__name__)

InitialDatum = Union[None, str, Callable[[np.ndarray], np.ndarray]]

EXACT_TOL = 1e-10
_GRID = np.linspace(0.0, 1.0, 201)

BETA_ONE_REMARK = (
    "Every mode satisfies Delta(k_n) != 0 or G_n^(0) = 0, but the real zeros of Delta "
    "give non-decaying eigenmodes: the solution will not usually be asymptotically periodic."
)
INCOMMENSURATE_CAVEAT = (
    "Independence of T and 2/pi is established only up to the continued-fraction "
    "denominator bound; non-periodicity for generic u_0 is checked empirically by the oracle."
)


def initial_function(u0: InitialDatum, solution: Optional[PeriodicSolution]) -> Callable[[np.ndarray], np.ndarray]:
    """Resolve an initial-datum descriptor: None (zero), "uT", or a callable."""
    if u0 is None:
        return lambda x: np.zeros_like(np.asarray(x, dtype=float), dtype=complex)
    if isinstance(u0, str):
        if u0 != "uT":
            raise MalformedBoundaryConditions(
                "Named initial data other than 'uT' must be resolved before classification",
                context={"u0": u0},
            )
        if solution is None:
            raise MalformedBoundaryConditions("u0 = uT needs a periodic solution", context={"u0": u0})
        return lambda x: np.asarray(eval_uT(solution, x), dtype=complex)
    return u0


def _mean(func: Callable[[np.ndarray], np.ndarray]) -> complex:
    xs, ws = gauss_grid()
    return complex(np.dot(ws, np.asarray(func(xs), dtype=complex) * np.ones_like(xs)))


def _lead_trace(data: FourierBoundaryData) -> Trace:
    return min(data.prescribed) if data.prescribed else Trace(LEFT, 0)


def _largest_mode_value(data: FourierBoundaryData, n: int) -> complex:
    """Largest prescribed or coupling value of mode n; a resonant mode always carries one."""
    values = [data.value(trace, n) for trace in data.prescribed]
    values += [coupling.rhs[n] for coupling in data.couplings]
    return max(values, key=abs, default=0j)


def _mode_evidence(
    dtn: DtnResult,
    data: FourierBoundaryData,
    delta: Optional[DeterminantFunction] = None,
) -> List[ModeEvidence]:
    lead = _lead_trace(data)
    records = []
    for n, solution in sorted(dtn.modes.items()):
        abs_delta = None
        root = solution.diagnostics.get("root")
        if delta is not None and n != 0:
            k_n = denominator_roots(dtn.pde, data.omega, n).real_root()
            abs_delta = float(abs(delta(k_n)))
            root = k_n
        records.append(
            ModeEvidence(
                n=n,
                status=solution.status.value,
                det_ratio=solution.diagnostics.get("det_ratio"),
                abs_delta=abs_delta,
                root=pair(root) if root is not None else None,
                coefficient=pair(data.value(lead, n)),
                min_norm=solution.min_norm,
            )
        )
    return records


def _resonance_witness(preset: Preset, dtn: DtnResult, data: FourierBoundaryData) -> Witness:
    n = min(dtn.resonant_modes(), key=lambda m: (abs(m), m))
    root = dtn.modes[n].diagnostics.get("root")
    if preset is Preset.LS_DIRICHLET and n != 0:
        m = int(round(math.sqrt(abs(n) * data.omega) / math.pi))
        coefficient = data.value(Trace(LEFT, 0), n) - (-1) ** m * data.value(Trace(RIGHT, 0), n)
        description = f"sqrt(|n| omega) = {m} pi with G - (-1)^m H != 0"
        kind = WitnessKind.BOUNDARY_MODE
    elif preset is Preset.HEAT_NEUMANN and n == 0:
        coefficient = data.value(Trace(LEFT, 1), 0) - data.value(Trace(RIGHT, 1), 0)
        description = "net boundary flux G_0^(1) - H_0^(1) is nonzero"
        kind = WitnessKind.MEAN_FLUX
    else:
        coefficient = data.value(_lead_trace(data), n)
        description = "singular boundary system with incompatible data"
        kind = WitnessKind.BOUNDARY_MODE
    if coefficient == 0:
        coefficient = _largest_mode_value(data, n)
        description = "singular boundary system with incompatible data"
    return Witness(
        kind=kind,
        n=n,
        root=pair(root) if root is not None else None,
        coefficient=pair(coefficient),
        description=description,
    )


def _sup_distance(u0: Callable, uT: Callable) -> float:
    return float(np.max(np.abs(np.asarray(u0(_GRID), dtype=complex) - np.asarray(uT(_GRID), dtype=complex))))


def _period_info(period: float) -> PeriodInfo:
    return PeriodInfo(value=period, formula="T")


def _stokes_zero_evidence(beta: float, modes: int) -> Tuple[List[complex], List[complex]]:
    """Distinct Delta-zeros and those with Im(lambda^3) <= 0 (the closure of D)."""
    delta = DeterminantFunction.coupled(beta)
    zero_set = locate_zeros(delta, eigen_search_rect(delta, modes))
    parameters = distinct_eigenparameters(zero_set.locations())
    closure = [lam for lam in parameters if (lam ** 3).imag <= 1e-9 * abs(lam) ** 3]
    return parameters, closure


def classify(
    preset: Preset,
    data: FourierBoundaryData,
    u0: InitialDatum = None,
    n_max: Optional[int] = None,
    m_max: Optional[int] = None,
    tol: Optional[float] = None,
    period_ratio: Optional[Fraction] = None,
    q_max: Optional[int] = None,
) -> Verdict:
    """
    Periodicity verdict with evidence.

    Args:
        preset: Problem family
        data: Boundary data (omega and the Fourier tables)
        u0: Initial datum: None for zero, "uT", or a callable on [0, 1]
        n_max: Mode cutoff
        m_max: Remainder series length / Stokes zero search size
        tol: Resonance tolerance
        period_ratio: Exact T / (2/pi), used instead of the float period
            for the commensurability test
        q_max: Denominator bound of the floating commensurability search

    Raises:
        IllPosed: For coupled Stokes conditions with |beta| < 1
        MalformedBoundaryConditions: If data does not fit the preset
    """
    preset = Preset(preset)
    n_max = settings.N_MAX if n_max is None else n_max
    m_max = settings.M_MAX if m_max is None else m_max
    pde = preset.pde
    period = data.period

    beta = None
    delta = None
    if preset is Preset.STOKES_COUPLED:
        beta = coupling_beta(data)
        if beta is None:
            raise MalformedBoundaryConditions(
                "Coupled Stokes data needs a u_x(0) = beta u_x(1) coupling",
                context={"preset": preset.value},
            )
        if abs(beta) < 1:
            raise IllPosed(
                "Coupled Stokes problem blows up instantaneously for |beta| < 1",
                context={"beta": beta},
            )
        delta = DeterminantFunction.coupled(beta)
    elif preset is Preset.STOKES_DECOUPLED:
        delta = DeterminantFunction.uncoupled()

    mean_value = None
    if preset is Preset.HEAT_NEUMANN:
        u0_func = initial_function(u0, None) if not isinstance(u0, str) else None
        u0_mean = _mean(u0_func) if u0_func is not None else 0j
        mean_value = heat_mean_target(data, u0_mean)

    dtn = solve_dtn(pde, data, n_max=n_max, mean_value=mean_value, tol=tol)
    evidence = _mode_evidence(dtn, data, delta)
    base = {"preset": preset.value, "evidence": evidence}

    report = None
    if preset is Preset.LS_DIRICHLET:
        comm = commensurability(period_ratio if period_ratio is not None else period, q_max=q_max)
        report = CommensurabilityReport(
            dependent=comm.dependent,
            ratio=(comm.ratio.numerator, comm.ratio.denominator) if comm.dependent else None,
            lcm_multiple_of_2_over_pi=comm.lcm_multiple,
            lcm_period=comm.lcm_period,
            q_max=comm.q_max,
            residual=comm.residual,
            exact=comm.exact,
            resonance_set=resonance_set(comm.ratio, n_max) if comm.dependent else [],
        )
        base["commensurability"] = report

    # ------------------------------------------------------------------
    # Resonance
    # ------------------------------------------------------------------
    if dtn.resonant_modes():
        witness = _resonance_witness(preset, dtn, data)
        logger.info("classified", preset=preset.value, kind="NotAsymptoticallyPeriodic", witness=witness.n)
        return Verdict(kind=VerdictKind.NOT_ASYMPTOTICALLY_PERIODIC, witness=witness, **base)

    solution = build_periodic_solution(pde, data, dtn)
    u0_func = initial_function(u0, solution)
    uT = lambda x: eval_uT(solution, x)  # noqa: E731
    distance = _sup_distance(u0_func, uT)
    exact = distance <= EXACT_TOL
    notes = [f"sup|u0 - uT| = {distance:.3e}"]

    if exact:
        verdict = Verdict(
            kind=VerdictKind.EXACTLY_PERIODIC,
            period=_period_info(period),
            notes=notes,
            **base,
        )
        logger.info("classified", preset=preset.value, kind=verdict.kind)
        return verdict

    if preset is Preset.LS_DIRICHLET:
        if report.dependent:
            lcm = report.lcm_period
            verdict = Verdict(
                kind=VerdictKind.PERIODIC_IFF_COMMENSURATE,
                period=PeriodInfo(
                    value=lcm,
                    multiple_of_2_over_pi=(report.lcm_multiple_of_2_over_pi, 1),
                    formula="lcm(T, 2/pi)",
                ),
                notes=notes,
                **base,
            )
        else:
            w0 = lambda x: np.asarray(u0_func(x), dtype=complex) - np.asarray(uT(x), dtype=complex)  # noqa: E731
            series = ls_remainder(w0, m_max)
            m = series.lowest_mode() or 1
            coefficient = complex(series.coefficients[m - 1])
            if coefficient == 0:
                coefficient = complex(distance)
            witness = Witness(
                kind=WitnessKind.FREE_MODE,
                n=m,
                root=pair(m * math.pi),
                coefficient=pair(coefficient),
                description="lowest sine mode of u0 - uT evolves with period 2/pi, incommensurate with T",
            )
            verdict = Verdict(
                kind=VerdictKind.NOT_ASYMPTOTICALLY_PERIODIC,
                witness=witness,
                caveats=[INCOMMENSURATE_CAVEAT],
                notes=notes,
                **base,
            )

    elif preset is Preset.HEAT_NEUMANN:
        verdict = Verdict(
            kind=VerdictKind.STRONGLY_ASYMPTOTICALLY_PERIODIC,
            period=_period_info(period),
            decay_rate=math.pi ** 2,
            notes=notes,
            **base,
        )

    elif preset is Preset.STOKES_DECOUPLED:
        verdict = Verdict(
            kind=VerdictKind.STRONGLY_ASYMPTOTICALLY_PERIODIC,
            period=_period_info(period),
            notes=notes + ["Delta(k_n) != 0 for every real k_n; remainder decays"],
            **base,
        )

    else:
        search = (m_max + 1) // 2 + 1
        if abs(abs(beta) - 1.0) <= 1e-12:
            verdict = Verdict(
                kind=VerdictKind.UNDETERMINED,
                notes=notes + [BETA_ONE_REMARK],
                **base,
            )
        else:
            zeros, closure = _stokes_zero_evidence(beta, search)
            if closure:
                verdict = Verdict(
                    kind=VerdictKind.UNDETERMINED,
                    zeros_in_closure=[pair(z) for z in closure],
                    notes=notes + ["Delta has zeros in the closure of D; decay of u_2 is not established"],
                    **base,
                )
            else:
                sigma = min((abs((1j * lam ** 3).real) for lam in zeros), default=None)
                verdict = Verdict(
                    kind=VerdictKind.STRONGLY_ASYMPTOTICALLY_PERIODIC,
                    period=_period_info(period),
                    decay_rate=sigma,
                    notes=notes + ["no Delta-zeros in the closure of D"],
                    **base,
                )

    logger.info("classified", preset=preset.value, kind=verdict.kind)
    return verdict
