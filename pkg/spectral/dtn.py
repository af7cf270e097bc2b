# ============================================================================
# File: spectral/dtn.py
# Description: Per-mode linear systems of the asymptotic Dirichlet-to-Neumann map
# ============================================================================
"""
Asymptotic Dirichlet-to-Neumann map.

For every Fourier mode n the numerator of q_n(k) must vanish wherever its
denominator i n omega + Omega(k) does, otherwise q_n is not entire. For
n != 0 these are N simple roots; for n = 0 the root k = 0 has order N and
the first N derivatives of the numerator must vanish there. Substituting
the prescribed traces and eliminating couplings leaves an N x N complex
system in the remaining unknown traces.

A mode is Resonant when its (row-equilibrated) determinant falls below
the resonance tolerance and the right-hand side is outside the column
space. Singular but compatible modes are solved in minimum norm and
flagged. Resonance is reported as data, never raised.
"""

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
import structlog
from scipy.linalg import lu_factor, lu_solve

from core.boundary import LEFT, RIGHT, FourierBoundaryData, ModeRational, ModeTable, Trace
from core.config import settings
from core.exceptions import MalformedBoundaryConditions, ResonanceError
from core.presets import coupling_beta
from core.symbol import DispersionMonomial, build_symbol_polynomials, denominator_roots
from spectral.detfun import DeterminantFunction

logger = structlog.get_logger(__name__)

# Affine dependence of a trace on the free unknowns: (constant, {free trace: coefficient})
_Affine = Tuple[complex, Dict[Trace, complex]]


class ModeStatus(str, Enum):
    SOLVED = "solved"
    RESONANT = "resonant"


@dataclass(frozen=True)
class ModeSystem:
    """
    Assembled N x N system for one mode.

    Attributes:
        n: Mode index
        matrix: Coefficients of the free unknowns, one row per condition
        rhs: Right-hand side after substituting prescribed data
        unknown_labels: Labels of the free unknowns, column order
        det: Determinant of matrix
        roots: Denominator roots used as rows (empty for n = 0)
        expressions: Every trace as an affine function of the free unknowns
        structural_rows: Rows with no unknown left (pure data conditions)
        data_scale: Per-row sum of |weight * prescribed value| before the
            terms cancel; the size the rhs is measured against
        delta_ratio: det / (k_n Delta(k_n)) for the Stokes presets, with k_n
            the first denominator root; the same constant for every n
    """

    n: int
    matrix: np.ndarray
    rhs: np.ndarray
    unknown_labels: Tuple[str, ...]
    det: complex
    roots: Tuple[complex, ...]
    expressions: Dict[Trace, _Affine] = field(repr=False)
    structural_rows: Tuple[int, ...] = ()
    data_scale: Optional[np.ndarray] = field(default=None, repr=False)
    delta_ratio: Optional[complex] = None

    def row_scale(self) -> np.ndarray:
        norms = np.linalg.norm(self.matrix, axis=1)
        return np.where(norms > 0, norms, 1.0)

    def equilibrated(self) -> Tuple[np.ndarray, np.ndarray]:
        """Rows scaled to unit 2-norm; zero rows are left as is."""
        scale = self.row_scale()
        return self.matrix / scale[:, None], self.rhs / scale

    def data_norm(self) -> float:
        """Norm of the equilibrated data contributions, ignoring cancellation."""
        raw = np.abs(self.rhs) if self.data_scale is None else self.data_scale
        return float(np.linalg.norm(raw / self.row_scale()))


@dataclass(frozen=True)
class ModeSolution:
    """
    Outcome of one mode solve.

    Attributes:
        n: Mode index
        status: SOLVED or RESONANT
        traces: All 2N boundary coefficients (prescribed and recovered);
            empty for resonant modes
        min_norm: True when a singular, compatible system was solved in
            minimum norm
        diagnostics: |det|, determinant ratio, rhs norm, residual, root
    """

    n: int
    status: ModeStatus
    traces: Dict[Trace, complex]
    min_norm: bool = False
    diagnostics: Dict[str, object] = field(default_factory=dict)

    @property
    def solved(self) -> bool:
        return self.status is ModeStatus.SOLVED

    def side(self, side: int, order: int) -> Tuple[complex, ...]:
        return tuple(self.traces.get(Trace(side, j), 0j) for j in range(order))


@dataclass
class DtnResult:
    """
    Per-mode Dirichlet-to-Neumann results for |n| <= n_max.

    Modes outside the data support carry zero data and are reported as
    zero solutions on request.
    """

    pde: DispersionMonomial
    data: FourierBoundaryData
    n_max: int
    modes: Dict[int, ModeSolution]

    def solution(self, n: int) -> ModeSolution:
        if n in self.modes:
            return self.modes[n]
        if abs(n) > self.n_max:
            raise KeyError(f"mode {n} outside |n| <= {self.n_max}")
        zeros = {Trace(side, j): 0j for side in (LEFT, RIGHT) for j in range(self.pde.order)}
        return ModeSolution(n=n, status=ModeStatus.SOLVED, traces=zeros)

    def resonant_modes(self) -> List[int]:
        return sorted(n for n, sol in self.modes.items() if not sol.solved)

    def flagged_modes(self) -> List[int]:
        return sorted(n for n, sol in self.modes.items() if sol.min_norm)

    def entirety_failures(self) -> List[int]:
        """Solved modes whose numerator residual exceeded ENTIRETY_TOL in solve_dtn."""
        return sorted(
            n for n, sol in self.modes.items()
            if sol.diagnostics.get("entirety_residual", 0.0) > settings.ENTIRETY_TOL
        )

    def solved_modes(self) -> List[int]:
        return sorted(n for n, sol in self.modes.items() if sol.solved)

    def table(self, trace: Trace) -> ModeTable:
        """Recovered (or prescribed) coefficient series of one trace."""
        return ModeTable({
            n: sol.traces.get(trace, 0j) for n, sol in self.modes.items() if sol.solved
        })

    def mode_rational(self, n: int) -> ModeRational:
        sol = self.solution(n)
        order = self.pde.order
        return ModeRational(
            pde=self.pde,
            n=n,
            omega=self.data.omega,
            left=sol.side(LEFT, order),
            right=sol.side(RIGHT, order),
        )

    def entirety_residuals(self, n: int) -> List[float]:
        """Relative numerator residuals at the denominator roots of mode n != 0."""
        spectrum = denominator_roots(self.pde, self.data.omega, n)
        return self.mode_rational(n).entirety_residuals(spectrum.roots)


# ----------------------------------------------------------------------------
# Assembly
# ----------------------------------------------------------------------------

def _trace_expressions(data: FourierBoundaryData, n: int) -> Tuple[Dict[Trace, _Affine], List[Trace]]:
    """Express all 2N traces through the free unknowns of mode n."""
    pivots: Dict[Trace, _Affine] = {}
    for coupling in data.couplings:
        constant = coupling.rhs[n]
        coefficients: Dict[Trace, complex] = {}
        for trace, weight in coupling.weights.items():
            if trace in data.prescribed:
                constant -= weight * data.value(trace, n)
            elif trace in pivots:
                pivot_constant, pivot_linear = pivots[trace]
                constant -= weight * pivot_constant
                for free, coef in pivot_linear.items():
                    coefficients[free] = coefficients.get(free, 0j) + weight * coef
            else:
                coefficients[trace] = coefficients.get(trace, 0j) + weight

        candidates = [t for t in sorted(coefficients) if coefficients[t] != 0]
        if not candidates:
            raise MalformedBoundaryConditions(
                "Coupling is redundant with earlier conditions",
                context={"order": data.order, "n": n, "reason": "no pivot left"},
            )
        pivot = candidates[0]
        lead = coefficients[pivot]
        expression: _Affine = (
            constant / lead,
            {t: -c / lead for t, c in coefficients.items() if t != pivot and c != 0},
        )
        for other, (other_constant, other_linear) in list(pivots.items()):
            if pivot in other_linear:
                weight = other_linear.pop(pivot)
                other_constant += weight * expression[0]
                for free, coef in expression[1].items():
                    other_linear[free] = other_linear.get(free, 0j) + weight * coef
                pivots[other] = (other_constant, other_linear)
        pivots[pivot] = expression

    free = [t for t in data.unknown_traces() if t not in pivots]
    expressions: Dict[Trace, _Affine] = {}
    for side in (LEFT, RIGHT):
        for j in range(data.order):
            trace = Trace(side, j)
            if trace in data.prescribed:
                expressions[trace] = (data.value(trace, n), {})
            elif trace in pivots:
                expressions[trace] = pivots[trace]
            else:
                expressions[trace] = (0j, {trace: 1.0 + 0j})
    return expressions, free


def _assemble(
    n: int,
    weights_per_row: List[Dict[Trace, complex]],
    expressions: Dict[Trace, _Affine],
    free: List[Trace],
    roots: Tuple[complex, ...],
    delta: Optional[DeterminantFunction] = None,
) -> ModeSystem:
    column = {trace: idx for idx, trace in enumerate(free)}
    size = len(weights_per_row)
    matrix = np.zeros((size, len(free)), dtype=complex)
    rhs = np.zeros(size, dtype=complex)
    data_scale = np.zeros(size)
    for row, weights in enumerate(weights_per_row):
        for trace, weight in weights.items():
            constant, linear = expressions[trace]
            rhs[row] -= weight * constant
            data_scale[row] += abs(weight * constant)
            for free_trace, coef in linear.items():
                matrix[row, column[free_trace]] += weight * coef

    row_scale = np.max(np.abs(matrix)) if matrix.size else 0.0
    structural = tuple(
        row for row in range(size)
        if np.max(np.abs(matrix[row]), initial=0.0) <= 1e-14 * max(row_scale, 1e-300)
    )
    det = complex(np.linalg.det(matrix)) if matrix.shape[0] == matrix.shape[1] else 0j
    delta_ratio = None
    if delta is not None and roots:
        reference = roots[0] * delta(roots[0])
        if reference != 0:
            delta_ratio = complex(det / reference)
    return ModeSystem(
        n=n,
        matrix=matrix,
        rhs=rhs,
        unknown_labels=tuple(t.label for t in free),
        det=det,
        roots=roots,
        expressions=expressions,
        structural_rows=structural,
        data_scale=data_scale,
        delta_ratio=delta_ratio,
    )


def assemble_mode_system(pde: DispersionMonomial, data: FourierBoundaryData, n: int) -> ModeSystem:
    """
    Numerator-vanishing conditions at the N roots of i n omega + Omega(k).

    Row r reads sum_j c_j(kappa_r) (G^(j) - exp(-i kappa_r) H^(j)) = 0 with
    prescribed traces moved to the right-hand side.

    Raises:
        MalformedBoundaryConditions: If data does not fix N conditions
    """
    if n == 0:
        raise ValueError("use assemble_zero_mode_system for n = 0")
    _check_order(pde, data)
    symbol = build_symbol_polynomials(pde)
    spectrum = denominator_roots(pde, data.omega, n)
    expressions, free = _trace_expressions(data, n)

    rows = []
    for kappa in spectrum.roots:
        c = symbol.evaluate_all(kappa)
        shift = np.exp(-1j * kappa)
        weights = {}
        for j in range(pde.order):
            weights[Trace(LEFT, j)] = c[j]
            weights[Trace(RIGHT, j)] = -shift * c[j]
        rows.append(weights)
    return _assemble(n, rows, expressions, free, spectrum.roots, _stokes_determinant(pde, data))


def assemble_zero_mode_system(pde: DispersionMonomial, data: FourierBoundaryData) -> ModeSystem:
    """
    Derivative conditions d^r/dk^r numerator(0) = 0, r = 0..N-1.

    Only c_j^(d_j)(0) = C_j d_j! survives, d_j = N - 1 - j, so the right
    trace H^(j) enters row r >= d_j with weight
    -binom(r, d_j) C_j d_j! (-i)^(r - d_j).
    """
    _check_order(pde, data)
    symbol = build_symbol_polynomials(pde)
    expressions, free = _trace_expressions(data, 0)

    rows = []
    for r in range(pde.order):
        weights = {}
        for j in range(pde.order):
            degree = symbol.degree(j)
            weights[Trace(LEFT, j)] = symbol.derivative_at_zero(j, r)
            if r >= degree:
                weights[Trace(RIGHT, j)] = (
                    -math.comb(r, degree)
                    * symbol.coefficients[j]
                    * math.factorial(degree)
                    * (-1j) ** (r - degree)
                )
            else:
                weights[Trace(RIGHT, j)] = 0j
        rows.append(weights)
    return _assemble(0, rows, expressions, free, ())


def _stokes_determinant(pde: DispersionMonomial, data: FourierBoundaryData) -> Optional[DeterminantFunction]:
    """Delta of the matching Stokes family, None for any other boundary set."""
    if pde.order != 3 or pde.a != -1j:
        return None
    prescribed = set(data.prescribed)
    if prescribed == {Trace(LEFT, 0), Trace(RIGHT, 0), Trace(RIGHT, 1)} and not data.couplings:
        return DeterminantFunction.uncoupled()
    beta = coupling_beta(data)
    if prescribed == {Trace(LEFT, 0), Trace(RIGHT, 0)} and len(data.couplings) == 1 and beta is not None:
        return DeterminantFunction.coupled(beta)
    return None


def _check_order(pde: DispersionMonomial, data: FourierBoundaryData) -> None:
    if pde.order != data.order:
        raise MalformedBoundaryConditions(
            "Boundary data order does not match the equation",
            context={"order": pde.order, "data_order": data.order},
        )


def _mean_closure(system: ModeSystem, mean_value: complex, order: int) -> ModeSystem:
    """
    Replace the first structural row by int_0^1 U_0 = mean_value.

    U_0 is the polynomial with Taylor coefficients G_0^(p) / p!, so the
    condition reads sum_p G_0^(p) / (p+1)! = mean_value.
    """
    row_index = system.structural_rows[0]
    column = {label: idx for idx, label in enumerate(system.unknown_labels)}
    row = np.zeros(system.matrix.shape[1], dtype=complex)
    value = complex(mean_value)
    magnitude = abs(value)
    for p in range(order):
        weight = 1.0 / math.factorial(p + 1)
        constant, linear = system.expressions[Trace(LEFT, p)]
        value -= weight * constant
        magnitude += abs(weight * constant)
        for free_trace, coef in linear.items():
            row[column[free_trace.label]] += weight * coef
    matrix = system.matrix.copy()
    rhs = system.rhs.copy()
    matrix[row_index] = row
    rhs[row_index] = value
    data_scale = np.abs(system.rhs) if system.data_scale is None else system.data_scale.copy()
    data_scale[row_index] = magnitude
    return ModeSystem(
        n=system.n,
        matrix=matrix,
        rhs=rhs,
        unknown_labels=system.unknown_labels,
        det=complex(np.linalg.det(matrix)),
        roots=system.roots,
        expressions=system.expressions,
        structural_rows=tuple(r for r in system.structural_rows if r != row_index),
        data_scale=data_scale,
    )


# ----------------------------------------------------------------------------
# Solving
# ----------------------------------------------------------------------------

def solve_mode_system(system: ModeSystem, tol: Optional[float] = None) -> ModeSolution:
    """
    Solve one assembled system with resonance detection.

    Residuals are measured against the size of the data entering the rhs,
    so a compatible mode whose rhs cancels to roundoff is solved in
    minimum norm instead of being declared Resonant.
    """
    tol = settings.RESONANCE_TOL if tol is None else tol
    matrix, rhs = system.equilibrated()
    ratio = float(abs(np.linalg.det(matrix)))
    rhs_norm = float(np.linalg.norm(system.rhs))
    reference = max(float(np.linalg.norm(rhs)), system.data_norm())
    root = _reported_root(system)
    diagnostics: Dict[str, object] = {
        "abs_det": abs(system.det),
        "det_ratio": ratio,
        "rhs_norm": rhs_norm,
        "root": root,
    }
    if system.delta_ratio is not None:
        diagnostics["delta_ratio"] = system.delta_ratio

    if ratio > tol and not system.structural_rows:
        factors = lu_factor(matrix)
        solution = lu_solve(factors, rhs)
        if matrix.shape[0] > 3:
            solution = solution + lu_solve(factors, rhs - matrix @ solution)
        diagnostics["residual"] = _relative_residual(matrix, solution, rhs, reference)
        return _mode_solution(system, solution, ModeStatus.SOLVED, False, diagnostics)

    solution, *_ = np.linalg.lstsq(matrix, rhs, rcond=tol)
    residual = _relative_residual(matrix, solution, rhs, reference)
    diagnostics["residual"] = residual
    if residual > tol:
        return ModeSolution(
            n=system.n, status=ModeStatus.RESONANT, traces={}, diagnostics=diagnostics
        )
    return _mode_solution(system, solution, ModeStatus.SOLVED, True, diagnostics)


def _relative_residual(matrix: np.ndarray, solution: np.ndarray, rhs: np.ndarray, reference: float) -> float:
    if reference == 0.0:
        return 0.0
    return float(np.linalg.norm(matrix @ solution - rhs)) / reference


def _reported_root(system: ModeSystem) -> complex:
    if not system.roots:
        return 0j
    return min(system.roots, key=lambda kappa: abs(kappa.imag))


def _mode_solution(
    system: ModeSystem,
    solution: np.ndarray,
    status: ModeStatus,
    min_norm: bool,
    diagnostics: Dict[str, object],
) -> ModeSolution:
    column = {label: idx for idx, label in enumerate(system.unknown_labels)}
    traces = {}
    for trace, (constant, linear) in system.expressions.items():
        value = constant
        for free_trace, coef in linear.items():
            value += coef * solution[column[free_trace.label]]
        traces[trace] = complex(value)
    return ModeSolution(
        n=system.n, status=status, traces=traces, min_norm=min_norm, diagnostics=diagnostics
    )


def solve_mode(
    pde: DispersionMonomial,
    data: FourierBoundaryData,
    n: int,
    mean_value: Optional[complex] = None,
    tol: Optional[float] = None,
) -> ModeSolution:
    """Assemble and solve a single mode, applying the mean closure at n = 0."""
    if n != 0:
        return solve_mode_system(assemble_mode_system(pde, data, n), tol=tol)

    system = assemble_zero_mode_system(pde, data)
    if system.structural_rows and mean_value is not None:
        tol_value = settings.RESONANCE_TOL if tol is None else tol
        data_scale = max(float(np.linalg.norm(system.rhs)), 1.0)
        incompatible = any(
            abs(system.rhs[row]) > tol_value * data_scale for row in system.structural_rows
        )
        if not incompatible:
            system = _mean_closure(system, mean_value, pde.order)
    return solve_mode_system(system, tol=tol)


def _check_entirety(result: DtnResult) -> List[int]:
    """Record the worst numerator residual of each solved mode n != 0; return the failing modes."""
    failing = []
    for n, solution in result.modes.items():
        if n == 0 or not solution.solved:
            continue
        worst = max(result.entirety_residuals(n), default=0.0)
        solution.diagnostics["entirety_residual"] = worst
        if worst > settings.ENTIRETY_TOL:
            failing.append(n)
    return sorted(failing)


def solve_dtn(
    pde: DispersionMonomial,
    data: FourierBoundaryData,
    n_max: Optional[int] = None,
    mean_value: Optional[complex] = None,
    tol: Optional[float] = None,
) -> DtnResult:
    """
    Solve every mode |n| <= n_max that carries data, plus n = 0.

    Args:
        pde: Dispersion monomial
        data: Boundary data with exactly N conditions per mode
        n_max: Mode cutoff (default settings.N_MAX)
        mean_value: Value of int_0^1 U_0 used to close a zero mode whose
            conditions leave the constant undetermined (Neumann data)
        tol: Resonance tolerance (default settings.RESONANCE_TOL)

    Returns:
        DtnResult with Solved / Resonant status per mode
    """
    n_max = settings.N_MAX if n_max is None else n_max
    modes = sorted(set(data.support(n_max)) | {0})
    results: Dict[int, ModeSolution] = {}
    for n in modes:
        results[n] = solve_mode(pde, data, n, mean_value=mean_value, tol=tol)
        logger.debug(
            "mode_solved",
            n=n,
            status=results[n].status.value,
            min_norm=results[n].min_norm,
            det_ratio=results[n].diagnostics.get("det_ratio"),
        )

    result = DtnResult(pde=pde, data=data, n_max=n_max, modes=results)
    failing = _check_entirety(result)
    resonant = result.resonant_modes()
    flagged = result.flagged_modes()
    logger.info("dtn_solved", modes=len(modes), resonant=resonant, min_norm=flagged)
    if flagged:
        logger.warning("dtn_min_norm_modes", modes=flagged)
    if failing:
        logger.warning("dtn_entirety_failures", modes=failing, tol=settings.ENTIRETY_TOL)
    return result


# ----------------------------------------------------------------------------
# Closed forms for the second-order presets
# ----------------------------------------------------------------------------

def ls_closed_form(
    n: int,
    omega: float,
    G0: complex,
    H0: complex,
    tol: Optional[float] = None,
) -> Tuple[complex, complex]:
    """
    Neumann values of u_t = i u_xx from Dirichlet values, mode n != 0.

    n > 0, s = sqrt(n omega):
        G1 = s (H0 - G0 cosh s) / sinh s,  H1 = s (H0 cosh s - G0) / sinh s
    n < 0, s = sqrt(|n| omega):
        G1 = s (H0 - G0 cos s) / sin s,    H1 = s (H0 cos s - G0) / sin s

    Raises:
        ResonanceError: If sin s vanishes (n < 0 only)
    """
    tol = settings.RESONANCE_TOL if tol is None else tol
    s = math.sqrt(abs(n) * omega)
    if n > 0:
        return (
            s * (H0 - G0 * math.cosh(s)) / math.sinh(s),
            s * (H0 * math.cosh(s) - G0) / math.sinh(s),
        )
    sin_s, cos_s = math.sin(s), math.cos(s)
    if abs(sin_s) <= tol:
        raise ResonanceError(
            "Dirichlet-to-Neumann map undefined at a resonant mode",
            context={"n": n, "omega": omega, "sin_value": sin_s},
        )
    return s * (H0 - G0 * cos_s) / sin_s, s * (H0 * cos_s - G0) / sin_s


def heat_closed_form(n: int, omega: float, G1: complex, H1: complex, branch: int = 1) -> Tuple[complex, complex]:
    """
    Dirichlet values of u_t = u_xx from Neumann values, mode n != 0.

    Both expressions are even in the square root, so branch = -1 (the
    other root) gives the same values.

    n > 0, r = sqrt(i n omega):
        G0 = (csch r H1 - coth r G1) / r,  H0 = (coth r H1 - csch r G1) / r
    n < 0, rho = sqrt(i |n| omega):
        G0 = (cot rho G1 - csc rho H1) / rho,  H0 = (csc rho G1 - cot rho H1) / rho
    """
    if n > 0:
        r = branch * cmath.sqrt(1j * n * omega)
        sinh_r, cosh_r = cmath.sinh(r), cmath.cosh(r)
        return (H1 - cosh_r * G1) / (r * sinh_r), (cosh_r * H1 - G1) / (r * sinh_r)
    rho = branch * cmath.sqrt(1j * abs(n) * omega)
    sin_rho, cos_rho = cmath.sin(rho), cmath.cos(rho)
    return (cos_rho * G1 - H1) / (rho * sin_rho), (G1 - cos_rho * H1) / (rho * sin_rho)


def heat_mean_target(data: FourierBoundaryData, u0_mean: complex) -> complex:
    """
    Mean of U_0 that makes int_0^1 (u_0 - u_T) vanish for Neumann heat data.

    d/dt int u = u_x(1,t) - u_x(0,t), so every mode n != 0 of u_T carries
    mean (H_n^(1) - G_n^(1)) / (i n omega); U_0 gets the remainder.
    """
    left = data.prescribed.get(Trace(LEFT, 1), ModeTable())
    right = data.prescribed.get(Trace(RIGHT, 1), ModeTable())
    flux_means = sum(
        (right[n] - left[n]) / (1j * n * data.omega)
        for n in set(left.support()) | set(right.support())
        if n != 0
    )
    return complex(u0_mean) - complex(flux_means)
