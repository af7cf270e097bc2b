# ============================================================================
# File: spectral/homogeneous.py
# Description: Remainder u_2 with homogeneous boundary conditions
# ============================================================================
"""
Series representations of the remainder u_2.

u_2 solves the PDE with homogeneous boundary conditions and initial datum
w0 = u_0 - u_T:

    Schroedinger, Dirichlet:  sine series,   phases exp(-i m^2 pi^2 t)
    heat, Neumann:            cosine series, decay exp(-m^2 pi^2 t)
    Stokes, coupled |beta|>1: biorthogonal eigenfunction series,
                              time factor exp(i lambda_m^3 t)

The decoupled Stokes operator has no complete eigenbasis; see
spectral.contour for its integral representation.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from core.config import settings
from core.exceptions import EigenBasisUnavailable, IllPosed, MeanNotZero
from spectral.detfun import ALPHA, DeterminantFunction, eigen_search_rect, locate_zeros, predict_zero_seeds

logger = structlog.get_logger(__name__)

Datum = Callable[[np.ndarray], np.ndarray]

_MEAN_TOL = 1e-10


def gauss_grid(panels: int = 16, nodes: int = 32) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [0, 1]."""
    base_x, base_w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(0.0, 1.0, panels + 1)
    xs, ws = [], []
    for left, right in zip(edges[:-1], edges[1:]):
        half = (right - left) / 2
        xs.append(left + half * (base_x + 1))
        ws.append(half * base_w)
    return np.concatenate(xs), np.concatenate(ws)


def _sample(w0: Datum, xs: np.ndarray) -> np.ndarray:
    return np.asarray(w0(xs), dtype=complex) * np.ones_like(xs)


# ----------------------------------------------------------------------------
# Second-order presets
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class TrigonometricSeries:
    """
    Sine or cosine remainder series on [0, 1].

    Attributes:
        kind: "sine" (Schroedinger, Dirichlet) or "cosine" (heat, Neumann)
        coefficients: b_m (or a_m) for m = 1..m_max
    """

    kind: str
    coefficients: np.ndarray

    @property
    def m_max(self) -> int:
        return len(self.coefficients)

    def _time_factor(self, m: np.ndarray, t: float) -> np.ndarray:
        if self.kind == "sine":
            return np.exp(-1j * m ** 2 * math.pi ** 2 * t)
        return np.exp(-(m ** 2) * math.pi ** 2 * t)

    def __call__(self, x, t: float = 0.0):
        x_arr = np.asarray(x, dtype=float)
        m = np.arange(1, self.m_max + 1, dtype=float)
        basis = np.sin if self.kind == "sine" else np.cos
        modes = basis(np.multiply.outer(x_arr, m) * math.pi)
        value = modes @ (self.coefficients * self._time_factor(m, t))
        return value if np.shape(value) else complex(value)

    def lowest_mode(self, tol: float = 1e-10) -> Optional[int]:
        """Smallest m whose coefficient exceeds tol times the largest."""
        peak = float(np.max(np.abs(self.coefficients), initial=0.0))
        if peak == 0.0:
            return None
        for idx, value in enumerate(self.coefficients):
            if abs(value) > tol * max(peak, 1.0):
                return idx + 1
        return None


def sine_coefficients(w0: Datum, m_max: int, grid: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> np.ndarray:
    """b_m = 2 int_0^1 w0(x) sin(m pi x) dx, m = 1..m_max."""
    xs, ws = grid or gauss_grid(panels=max(16, m_max // 2))
    values = _sample(w0, xs)
    m = np.arange(1, m_max + 1)
    return 2 * np.sin(np.multiply.outer(m, xs) * math.pi) @ (ws * values)


def cosine_coefficients(w0: Datum, m_max: int, grid: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> Tuple[complex, np.ndarray]:
    """(a_0, [a_m]) with a_0 = int w0 and a_m = 2 int w0 cos(m pi x)."""
    xs, ws = grid or gauss_grid(panels=max(16, m_max // 2))
    values = _sample(w0, xs)
    m = np.arange(1, m_max + 1)
    mean = complex(np.dot(ws, values))
    return mean, 2 * np.cos(np.multiply.outer(m, xs) * math.pi) @ (ws * values)


def ls_remainder(w0: Datum, m_max: Optional[int] = None) -> TrigonometricSeries:
    m_max = settings.M_MAX if m_max is None else m_max
    return TrigonometricSeries("sine", sine_coefficients(w0, m_max))


def heat_remainder(w0: Datum, m_max: Optional[int] = None) -> TrigonometricSeries:
    """
    Raises:
        MeanNotZero: If int_0^1 w0 exceeds 1e-10 (Neumann compatibility)
    """
    m_max = settings.M_MAX if m_max is None else m_max
    mean, coefficients = cosine_coefficients(w0, m_max)
    if abs(mean) > _MEAN_TOL:
        raise MeanNotZero(
            "Neumann remainder requires a mean-zero datum",
            context={"mean": mean, "tolerance": _MEAN_TOL},
        )
    return TrigonometricSeries("cosine", coefficients)


def ls_u2(w0: Datum, x, t: float, m_max: Optional[int] = None):
    """Schroedinger remainder sum_m b_m sin(m pi x) exp(-i m^2 pi^2 t); period 2/pi."""
    return ls_remainder(w0, m_max)(x, t)


def heat_u2(w0: Datum, x, t: float, m_max: Optional[int] = None):
    """Heat remainder sum_m a_m cos(m pi x) exp(-m^2 pi^2 t)."""
    return heat_remainder(w0, m_max)(x, t)


# ----------------------------------------------------------------------------
# Stokes, coupled ends
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentialFunction:
    """sum_r A_r exp(i nu_r (x - x0_r)) on [0, 1]."""

    wavenumbers: Tuple[complex, ...]
    anchors: Tuple[float, ...]
    amplitudes: np.ndarray

    def __call__(self, x, derivative: int = 0):
        x_arr = np.asarray(x, dtype=float)
        value = np.zeros(x_arr.shape, dtype=complex)
        for nu, anchor, amplitude in zip(self.wavenumbers, self.anchors, self.amplitudes):
            value = value + amplitude * (1j * nu) ** derivative * np.exp(1j * nu * (x_arr - anchor))
        return value if value.shape else complex(value)

    def scaled(self, factor: complex) -> "ExponentialFunction":
        return ExponentialFunction(self.wavenumbers, self.anchors, self.amplitudes * factor)


@dataclass(frozen=True)
class EigenMode:
    """
    Eigenpair of L u = -u''' with u(0) = u(1) = 0, u'(0) = beta u'(1).

    Attributes:
        lam: Spectral parameter lambda with eigenvalue i lambda^3
        eigenfunction: E_m
        adjoint: E*_m, normalised so that <E_m, E*_m> = 1
        coefficient: <w0, E*_m> once projected (0 before)
    """

    lam: complex
    eigenfunction: ExponentialFunction
    adjoint: ExponentialFunction
    coefficient: complex = 0j

    @property
    def eigenvalue(self) -> complex:
        return 1j * self.lam ** 3

    @property
    def decay_rate(self) -> float:
        return -float(self.eigenvalue.real)

    def residual(self, x) -> float:
        """max |-E''' - i lambda^3 E| / max |E| at the sample points."""
        values = np.asarray(self.eigenfunction(x), dtype=complex)
        third = np.asarray(self.eigenfunction(x, derivative=3), dtype=complex)
        scale = max(float(np.max(np.abs(values))), 1e-300) * max(abs(self.eigenvalue), 1.0)
        return float(np.max(np.abs(-third - self.eigenvalue * values))) / scale


def _anchored(nu: Sequence[complex]) -> Tuple[float, ...]:
    return tuple(1.0 if v.imag < 0 else 0.0 for v in nu)


def _null_function(nu: Tuple[complex, ...], rows: Callable[[Tuple[complex, ...], Tuple[float, ...]], np.ndarray]) -> ExponentialFunction:
    anchors = _anchored(nu)
    matrix = rows(nu, anchors)
    matrix = matrix / np.maximum(np.linalg.norm(matrix, axis=1), 1e-300)[:, None]
    _, _, vh = np.linalg.svd(matrix)
    amplitudes = vh[-1].conj()
    return ExponentialFunction(nu, anchors, amplitudes)


def _eigen_rows(beta: float):
    def rows(nu, anchors):
        at_left = [np.exp(1j * v * (0.0 - x0)) for v, x0 in zip(nu, anchors)]
        at_right = [np.exp(1j * v * (1.0 - x0)) for v, x0 in zip(nu, anchors)]
        slope = [1j * v * (a - beta * b) for v, a, b in zip(nu, at_left, at_right)]
        return np.array([at_left, at_right, slope], dtype=complex)
    return rows


def _adjoint_rows(beta: float):
    def rows(nu, anchors):
        at_left = [np.exp(1j * v * (0.0 - x0)) for v, x0 in zip(nu, anchors)]
        at_right = [np.exp(1j * v * (1.0 - x0)) for v, x0 in zip(nu, anchors)]
        slope = [1j * v * (beta * a - b) for v, a, b in zip(nu, at_left, at_right)]
        return np.array([at_left, at_right, slope], dtype=complex)
    return rows


def inner_product(f: Callable, g: Callable, grid: Tuple[np.ndarray, np.ndarray]) -> complex:
    """<f, g> = int_0^1 f conj(g) dx."""
    xs, ws = grid
    return complex(np.sum(ws * np.asarray(f(xs)) * np.conj(np.asarray(g(xs)))))


def _grid_for(lam: complex) -> Tuple[np.ndarray, np.ndarray]:
    return gauss_grid(panels=max(8, int(math.ceil(abs(lam) / 2))), nodes=32)


def eigen_mode(lam: complex, beta: float) -> EigenMode:
    """E_m and its normalised adjoint for one Delta-zero lambda."""
    nu = tuple(lam * ALPHA ** r for r in range(3))
    eigenfunction = _null_function(nu, _eigen_rows(beta))
    nu_adjoint = tuple(lam.conjugate() * ALPHA ** r for r in range(3))
    adjoint = _null_function(nu_adjoint, _adjoint_rows(beta))
    pairing = inner_product(eigenfunction, adjoint, _grid_for(lam))
    if abs(pairing) < 1e-14:
        raise EigenBasisUnavailable(
            "Eigenfunction is orthogonal to its adjoint",
            context={"lambda": lam, "beta": beta, "pairing": pairing},
        )
    return EigenMode(lam=lam, eigenfunction=eigenfunction, adjoint=adjoint.scaled(1 / pairing.conjugate()))


def distinct_eigenparameters(zeros: Sequence[complex], tol: float = 1e-8) -> List[complex]:
    """Drop k = 0 and keep one representative per value of lambda^3."""
    kept: List[complex] = []
    for lam in sorted(zeros, key=lambda z: (abs(z), -z.imag, z.real)):
        if abs(lam) <= tol:
            continue
        cube = lam ** 3
        if any(abs(cube - other ** 3) <= tol * max(1.0, abs(cube)) for other in kept):
            continue
        kept.append(lam)
    return kept


def stokes_coupled_modes(beta: float, m_max: Optional[int] = None) -> List[EigenMode]:
    """
    First m_max eigenmodes (by |lambda|) of the coupled Stokes operator.

    Raises:
        IllPosed: If |beta| < 1
        EigenBasisUnavailable: If fewer than m_max zeros are located
    """
    m_max = settings.M_MAX if m_max is None else m_max
    if abs(beta) < 1:
        raise IllPosed(
            "Coupled Stokes problem is ill posed for |beta| < 1",
            context={"beta": beta},
        )
    delta = DeterminantFunction.coupled(beta)
    search = (m_max + 1) // 2 + 1
    rect = eigen_search_rect(delta, search)
    seeds = predict_zero_seeds(delta, [m for m in range(-search, search + 1) if m != 0])
    zero_set = locate_zeros(delta, rect, seeds=seeds)
    parameters = distinct_eigenparameters(zero_set.locations())
    if len(parameters) < m_max:
        raise EigenBasisUnavailable(
            "Not enough Delta-zeros for the requested eigenmodes",
            context={"beta": beta, "requested": m_max, "found": len(parameters), "rect": rect.as_list()},
        )
    modes = [eigen_mode(lam, beta) for lam in parameters[:m_max]]
    logger.info(
        "stokes_eigenmodes_built",
        beta=beta,
        modes=len(modes),
        slowest_decay=min(m.decay_rate for m in modes),
    )
    return modes


@dataclass
class BiorthogonalSeries:
    """u_2(x, t) = sum_m <w0, E*_m> exp(i lambda_m^3 t) E_m(x)."""

    beta: float
    modes: List[EigenMode] = field(default_factory=list)

    def __call__(self, x, t: float = 0.0):
        x_arr = np.asarray(x, dtype=float)
        value = np.zeros(x_arr.shape, dtype=complex)
        for mode in self.modes:
            if mode.coefficient == 0:
                continue
            value = value + mode.coefficient * np.exp(mode.eigenvalue * t) * np.asarray(mode.eigenfunction(x_arr))
        return value if value.shape else complex(value)

    def decay_bound(self) -> float:
        """sigma = min_m |Re(i lambda_m^3)| over the retained modes."""
        return min((abs(m.eigenvalue.real) for m in self.modes), default=math.inf)

    def biorthogonality(self) -> np.ndarray:
        size = len(self.modes)
        gram = np.zeros((size, size), dtype=complex)
        for row, left in enumerate(self.modes):
            for col, right in enumerate(self.modes):
                grid = _grid_for(max(left.lam, right.lam, key=abs))
                gram[row, col] = inner_product(left.eigenfunction, right.adjoint, grid)
        return gram


def stokes_coupled_remainder(w0: Datum, beta: float, m_max: Optional[int] = None) -> BiorthogonalSeries:
    modes = stokes_coupled_modes(beta, m_max)
    projected = []
    for mode in modes:
        coefficient = inner_product(w0, mode.adjoint, _grid_for(mode.lam))
        projected.append(EigenMode(mode.lam, mode.eigenfunction, mode.adjoint, coefficient))
    return BiorthogonalSeries(beta=beta, modes=projected)


def stokes_coupled_u2(w0: Datum, beta: float, x, t: float, m_max: Optional[int] = None):
    """Biorthogonal-series remainder of the coupled Stokes problem."""
    return stokes_coupled_remainder(w0, beta, m_max)(x, t)


# ----------------------------------------------------------------------------
# Diagnostics
# ----------------------------------------------------------------------------

def decay_rate(times: Sequence[float], norms: Sequence[float]) -> float:
    """Least-squares rate sigma in norm ~ C exp(-sigma t)."""
    times_arr = np.asarray(times, dtype=float)
    norms_arr = np.asarray(norms, dtype=float)
    mask = norms_arr > 0
    if mask.sum() < 2:
        raise ValueError("decay fit needs at least two positive norms")
    slope, _ = np.polyfit(times_arr[mask], np.log(norms_arr[mask]), 1)
    return float(-slope)


def power_law_exponent(times: Sequence[float], values: Sequence[float]) -> float:
    """Exponent p in value ~ C t^p from a log-log fit."""
    times_arr = np.asarray(times, dtype=float)
    values_arr = np.asarray(values, dtype=float)
    slope, _ = np.polyfit(np.log(times_arr), np.log(values_arr), 1)
    return float(slope)
