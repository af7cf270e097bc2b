# ============================================================================
# File: spectral/periodic.py
# Description: Mode profiles U_n and the exactly periodic solution u_1
# ============================================================================
"""
Exactly T-periodic solution built from the Dirichlet-to-Neumann traces.

Every mode n contributes exp(i n omega t) U_n(x) where U_n solves the mode
ODE [i n omega + Omega(-i d/dx)] U_n = 0 and reproduces all 2N boundary
traces of the mode. For n != 0 the profile lives in the span of the N
exponentials exp(i kappa_r x); for n = 0 in the polynomials of degree
below N. Amplitudes are recovered by least squares over the 2N traces,
which doubles as a consistency check of the solved mode.

Each exponential is anchored at the end where it is largest,
exp(i kappa (x - x0)) with x0 = 1 when Im kappa < 0, so amplitudes stay
bounded for large n omega.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Tuple

import numpy as np
import structlog

from core.boundary import LEFT, RIGHT, FourierBoundaryData, Trace
from core.config import settings
from core.exceptions import ProfileSingular
from core.symbol import DispersionMonomial, denominator_roots
from spectral.dtn import DtnResult

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class PeriodicProfile:
    """
    Profile U_n(x) of one Fourier mode.

    Attributes:
        n: Mode index
        order: Spatial order N
        wavenumbers: kappa_r (empty for the polynomial zero mode)
        anchors: Anchor x0 per wavenumber
        amplitudes: Exponential amplitudes, or monomial coefficients for n = 0
        trace_residual: Relative least-squares residual of the trace fit
    """

    n: int
    order: int
    wavenumbers: Tuple[complex, ...]
    anchors: Tuple[float, ...]
    amplitudes: np.ndarray
    trace_residual: float = 0.0

    @property
    def is_polynomial(self) -> bool:
        return not self.wavenumbers

    def __call__(self, x, derivative: int = 0):
        """d^derivative U_n / dx^derivative at scalar or array x."""
        x_arr = np.asarray(x, dtype=float)
        if self.is_polynomial:
            coefficients = np.polynomial.polynomial.polyder(self.amplitudes, derivative) if derivative else self.amplitudes
            value = np.polynomial.polynomial.polyval(x_arr, coefficients)
        else:
            value = np.zeros(x_arr.shape, dtype=complex)
            for kappa, anchor, amplitude in zip(self.wavenumbers, self.anchors, self.amplitudes):
                if amplitude == 0:
                    continue
                value = value + amplitude * (1j * kappa) ** derivative * np.exp(1j * kappa * (x_arr - anchor))
        value = np.asarray(value, dtype=complex)
        return value if value.shape else complex(value)

    def traces(self) -> Dict[Trace, complex]:
        return {
            Trace(side, j): complex(self(float(side), derivative=j))
            for side in (LEFT, RIGHT)
            for j in range(self.order)
        }

    def ode_residual(self, pde: DispersionMonomial, omega: float, x) -> np.ndarray:
        """i n omega U + a (-i)^N U^(N) at the sample points."""
        u = np.asarray(self(x), dtype=complex)
        top = np.asarray(self(x, derivative=pde.order), dtype=complex)
        return 1j * self.n * omega * u + pde.a * (-1j) ** pde.order * top

    def scale(self) -> float:
        return float(np.max(np.abs(self.amplitudes), initial=0.0))


def _exponential_trace_matrix(roots: Tuple[complex, ...], anchors: Tuple[float, ...], order: int) -> np.ndarray:
    rows = []
    for side in (LEFT, RIGHT):
        for j in range(order):
            rows.append([
                (1j * kappa) ** j * np.exp(1j * kappa * (side - anchor))
                for kappa, anchor in zip(roots, anchors)
            ])
    return np.array(rows, dtype=complex)


def _polynomial_trace_matrix(order: int) -> np.ndarray:
    matrix = np.zeros((2 * order, order), dtype=complex)
    for j in range(order):
        matrix[j, j] = math.factorial(j)
        for p in range(j, order):
            matrix[order + j, p] = math.factorial(p) / math.factorial(p - j)
    return matrix


def build_profile(
    pde: DispersionMonomial,
    data: FourierBoundaryData,
    n: int,
    dtn: DtnResult,
    drop: Optional[float] = None,
) -> PeriodicProfile:
    """
    Fit U_n to all 2N traces of a solved mode.

    Raises:
        ProfileSingular: If the mode is resonant or the trace system is rank deficient
    """
    drop = settings.AMPLITUDE_DROP if drop is None else drop
    solution = dtn.solution(n)
    if not solution.solved:
        raise ProfileSingular(
            "Mode is resonant; no periodic profile exists",
            context={"n": n, "det_ratio": solution.diagnostics.get("det_ratio"), "root": solution.diagnostics.get("root")},
        )

    order = pde.order
    targets = np.array(
        [solution.traces.get(Trace(side, j), 0j) for side in (LEFT, RIGHT) for j in range(order)],
        dtype=complex,
    )
    if n == 0:
        roots: Tuple[complex, ...] = ()
        anchors: Tuple[float, ...] = ()
        matrix = _polynomial_trace_matrix(order)
    else:
        roots = denominator_roots(pde, data.omega, n).roots
        anchors = tuple(1.0 if kappa.imag < 0 else 0.0 for kappa in roots)
        matrix = _exponential_trace_matrix(roots, anchors, order)

    row_scale = np.max(np.abs(matrix), axis=1)
    row_scale = np.where(row_scale > 0, row_scale, 1.0)
    scaled_matrix = matrix / row_scale[:, None]
    scaled_targets = targets / row_scale
    amplitudes, _, rank, _ = np.linalg.lstsq(scaled_matrix, scaled_targets, rcond=None)
    if rank < order:
        raise ProfileSingular(
            "Boundary-trace system of the profile is rank deficient",
            context={"n": n, "rank": int(rank), "order": order},
        )

    target_norm = float(np.linalg.norm(scaled_targets))
    residual = float(np.linalg.norm(scaled_matrix @ amplitudes - scaled_targets))
    relative = residual / target_norm if target_norm > 0 else residual
    if relative > 1e-8:
        logger.warning("profile_trace_mismatch", n=n, residual=relative)

    peak = float(np.max(np.abs(amplitudes), initial=0.0))
    amplitudes = np.where(np.abs(amplitudes) < drop * peak, 0j, amplitudes)
    return PeriodicProfile(
        n=n,
        order=order,
        wavenumbers=tuple(roots),
        anchors=anchors,
        amplitudes=np.asarray(amplitudes, dtype=complex),
        trace_residual=relative,
    )


@dataclass
class PeriodicSolution:
    """
    u_1(x, t) = sum_n exp(i n omega t) U_n(x), with u_T = u_1(., 0).

    Attributes:
        pde: Dispersion monomial
        omega: Angular frequency
        profiles: Mode index -> profile
    """

    pde: DispersionMonomial
    omega: float
    profiles: Dict[int, PeriodicProfile] = field(default_factory=dict)

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega

    def modes(self) -> Tuple[int, ...]:
        return tuple(sorted(self.profiles))

    def __call__(self, x, t: float = 0.0, derivative: int = 0):
        return eval_u1(self, x, t, derivative=derivative)

    def time_derivative(self, x, t: float):
        t_mod = math.fmod(float(t), self.period)
        terms = (
            1j * n * self.omega * np.exp(1j * n * self.omega * t_mod) * np.asarray(profile(x), dtype=complex)
            for n, profile in sorted(self.profiles.items())
        )
        value = _kahan_sum(terms, np.shape(x))
        return value if value.shape else complex(value)

    def pde_residual(self, x, t: float):
        """u_t + Omega(-i d/dx) u at sample points."""
        top = eval_u1(self, x, t, derivative=self.pde.order)
        return self.time_derivative(x, t) + self.pde.a * (-1j) ** self.pde.order * np.asarray(top)

    def boundary_value(self, trace: Trace, t: float) -> complex:
        return complex(eval_u1(self, float(trace.side), t, derivative=trace.order))

    def truncation_norm(self) -> float:
        """Largest profile amplitude at the cutoff modes, a crude tail estimate."""
        if not self.profiles:
            return 0.0
        edge = max(abs(n) for n in self.profiles)
        return max(
            (p.scale() for n, p in self.profiles.items() if abs(n) == edge),
            default=0.0,
        )


def _kahan_sum(terms: Iterable[np.ndarray], shape) -> np.ndarray:
    total = np.zeros(shape, dtype=complex)
    carry = np.zeros(shape, dtype=complex)
    for term in terms:
        adjusted = term - carry
        running = total + adjusted
        carry = (running - total) - adjusted
        total = running
    return total


def build_periodic_solution(
    pde: DispersionMonomial,
    data: FourierBoundaryData,
    dtn: DtnResult,
    n_max: Optional[int] = None,
) -> PeriodicSolution:
    """
    Assemble u_1 from every solved mode |n| <= n_max.

    Raises:
        ProfileSingular: If any mode in range is resonant
    """
    n_max = dtn.n_max if n_max is None else n_max
    resonant = [n for n in dtn.resonant_modes() if abs(n) <= n_max]
    if resonant:
        raise ProfileSingular(
            "Resonant modes prevent a periodic solution",
            context={"modes": resonant, "n_max": n_max},
        )
    profiles = {}
    for n in sorted(dtn.modes):
        if abs(n) > n_max:
            continue
        profile = build_profile(pde, data, n, dtn)
        if profile.scale() > 0:
            profiles[n] = profile
    logger.info(
        "periodic_solution_built",
        modes=len(profiles),
        n_max=n_max,
        period=2 * math.pi / data.omega,
    )
    return PeriodicSolution(pde=pde, omega=data.omega, profiles=profiles)


def eval_u1(solution: PeriodicSolution, x, t: float, derivative: int = 0):
    """
    u_1(x, t) with t reduced modulo T and compensated summation over modes.
    """
    t_mod = math.fmod(float(t), solution.period)
    terms = (
        np.exp(1j * n * solution.omega * t_mod) * np.asarray(profile(x, derivative=derivative), dtype=complex)
        for n, profile in sorted(solution.profiles.items())
    )
    value = _kahan_sum(terms, np.shape(x))
    return value if value.shape else complex(value)


def eval_uT(solution: PeriodicSolution, x):
    """u_T(x) = u_1(x, 0)."""
    return eval_u1(solution, x, 0.0)


def ls_profile_closed_form(n: int, omega: float, G0: complex, H0: complex, x):
    """
    Schroedinger Dirichlet profile with s = sqrt(-n omega):

        U_n(x) = G0 cos(s x) + (H0 - cos(s) G0) / sin(s) sin(s x)
    """
    s = np.sqrt(complex(-n * omega))
    x_arr = np.asarray(x, dtype=float)
    return G0 * np.cos(s * x_arr) + (H0 - np.cos(s) * G0) / np.sin(s) * np.sin(s * x_arr)
