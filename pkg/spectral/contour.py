# ============================================================================
# File: spectral/contour.py
# Description: Contour-integral remainder u_2 for decoupled Stokes conditions
# ============================================================================
"""
Remainder of u_t + u_xxx = 0 with u(0) = u(1) = u_x(1) = 0.

    2 pi u_2(x, t) = int_R    exp(i k x + i k^3 t) w0_hat(k) dk
                   + int_dD+  exp(i k x + i k^3 t) Z+(k) dk
                   + int_dD-  exp(i k (x-1) + i k^3 t) Z-(k) dk

with w0_hat(k) = int_0^1 exp(-i k y) w0(y) dy and the kernels

    Z+ = [-w0_hat(k)(a^2 e(a^2 k) + a e(a k)) + (a w0_hat(a k) + a^2 w0_hat(a^2 k)) e(k)] / D(k)
    Z- = [w0_hat(k) + a w0_hat(a k) + a^2 w0_hat(a^2 k)] / D(k)

where e(k) = exp(-i k), a = exp(2 pi i / 3) and
D(k) = e(k) + a e(a k) + a^2 e(a^2 k), the uncoupled determinant without
its (a^2 - a) prefactor.

Every ray of the three contours is rotated by delta into the adjacent
sector where Re(i k^3) < 0, so the integrands decay like
exp(-r^3 t sin(3 delta)). The rotations sweep no zero of D as long as
delta < pi / 6; each rotated ray must also keep a clearance eps from the
located zeros. Near k = 0 both kernels are 0/0 and are evaluated from the
moments of w0 instead.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, List, Optional, Tuple

import numpy as np
import structlog

from core.config import settings
from core.exceptions import PoleClearanceFailure
from spectral.detfun import ALPHA, PREFACTOR, DeterminantFunction, Rectangle, locate_zeros
from spectral.homogeneous import gauss_grid

logger = structlog.get_logger(__name__)

Datum = Callable[[np.ndarray], np.ndarray]

_SERIES_RADIUS = 0.25
_SERIES_TERMS = 24
# exponent budget: integrand below exp(-40) past the truncation radius
_TRUNCATION_EXPONENT = 40.0
_MIN_PANELS = 8
_MAX_PANELS = 2048
_PANEL_NODES = 16


def _residue_class_two(p: int) -> float:
    return 1.0 if p % 3 == 2 else 0.0


@dataclass
class ContourRepresentation:
    """
    Integral representation of the decoupled Stokes remainder.

    Attributes:
        nodes: Quadrature nodes on [0, 1] for w0_hat
        weighted: w0 at the nodes times quadrature weights
        moments: mu_p = int_0^1 y^p w0(y) dy, p < _SERIES_TERMS
        delta: Ray rotation angle in radians
        zeros: Located nonzero zeros of D within the largest radius used
        epsilon: Required clearance between rays and zeros
    """

    nodes: np.ndarray
    weighted: np.ndarray
    moments: np.ndarray
    delta: float
    zeros: List[complex] = field(default_factory=list)
    epsilon: float = 0.25

    # ------------------------------------------------------------------
    # Transforms and kernels
    # ------------------------------------------------------------------

    def w0_hat(self, k: np.ndarray) -> np.ndarray:
        k_arr = np.asarray(k, dtype=complex)
        phases = np.exp(-1j * np.multiply.outer(k_arr, self.nodes))
        return phases @ self.weighted

    def denominator(self, k: np.ndarray) -> np.ndarray:
        return np.asarray(DeterminantFunction.uncoupled()(k)) / PREFACTOR

    def _series_kernels(self, k: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        powers = np.stack([(-1j * k) ** p / math.factorial(p) for p in range(_SERIES_TERMS)])
        klass = np.array([_residue_class_two(p) for p in range(_SERIES_TERMS)])
        denominator = 3 * np.tensordot(klass, powers, axes=1)
        minus = 3 * np.tensordot(klass * self.moments, powers, axes=1)
        plus = np.zeros_like(k, dtype=complex)
        for p in range(_SERIES_TERMS):
            for q in range(_SERIES_TERMS - p):
                weight = klass[p] - klass[q]
                if weight == 0:
                    continue
                plus = plus + 3 * weight * self.moments[p] * (-1j * k) ** (p + q) / (
                    math.factorial(p) * math.factorial(q)
                )
        with np.errstate(invalid="ignore", divide="ignore"):
            z_plus = np.where(np.abs(k) > 0, plus / denominator, self.moments[2] - self.moments[0])
            z_minus = np.where(np.abs(k) > 0, minus / denominator, self.moments[2])
        return z_plus, z_minus

    def kernels(self, k) -> Tuple[np.ndarray, np.ndarray]:
        """(Z+(k), Z-(k)) for an array of k."""
        k_arr = np.asarray(k, dtype=complex)
        near = np.abs(k_arr) < _SERIES_RADIUS
        z_plus = np.empty(k_arr.shape, dtype=complex)
        z_minus = np.empty(k_arr.shape, dtype=complex)
        if near.any():
            z_plus[near], z_minus[near] = self._series_kernels(k_arr[near])
        far = ~near
        if far.any():
            kf = k_arr[far]
            hat0 = self.w0_hat(kf)
            hat1 = self.w0_hat(ALPHA * kf)
            hat2 = self.w0_hat(ALPHA ** 2 * kf)
            e0 = np.exp(-1j * kf)
            e1 = np.exp(-1j * ALPHA * kf)
            e2 = np.exp(-1j * ALPHA ** 2 * kf)
            denominator = e0 + ALPHA * e1 + ALPHA ** 2 * e2
            z_plus[far] = (-hat0 * (ALPHA ** 2 * e2 + ALPHA * e1) + (ALPHA * hat1 + ALPHA ** 2 * hat2) * e0) / denominator
            z_minus[far] = (hat0 + ALPHA * hat1 + ALPHA ** 2 * hat2) / denominator
        return z_plus, z_minus

    # ------------------------------------------------------------------
    # Contours
    # ------------------------------------------------------------------

    def rays(self) -> List[Tuple[float, str, int]]:
        """(angle, integrand, sign) for every rotated ray, oriented outward."""
        d = self.delta
        return [
            # real line: in along pi - d, out along d
            (d, "real", 1),
            (math.pi - d, "real", -1),
            # boundary of D+: out along pi/3, in along 2pi/3
            (math.pi / 3 - d, "plus", 1),
            (2 * math.pi / 3 + d, "plus", -1),
            # boundary of D-: out along -pi/3, in along 0, out along -pi, in along -2pi/3
            (-math.pi / 3 - d, "minus", 1),
            (d, "minus", -1),
            (math.pi - d, "minus", 1),
            (-2 * math.pi / 3 + d, "minus", -1),
        ]

    def truncation_radius(self, t: float) -> float:
        """Smallest r with r^3 t sin(3 delta) - 2 r >= 40."""
        rate = t * math.sin(3 * self.delta)
        radius = 1.0
        while radius ** 3 * rate - 2 * radius < _TRUNCATION_EXPONENT:
            radius *= 1.1
        return radius

    def check_clearance(self, radius: float) -> float:
        """Smallest ray-zero distance within radius; raises when below epsilon."""
        closest = math.inf
        for angle, _, _ in self.rays():
            direction = complex(math.cos(angle), math.sin(angle))
            for zero in self.zeros:
                if abs(zero) > radius + self.epsilon:
                    continue
                along = (zero * direction.conjugate()).real
                along = min(max(along, 0.0), radius)
                closest = min(closest, abs(zero - along * direction))
        if closest < self.epsilon:
            raise PoleClearanceFailure(
                "Deformed contour passes too close to a Delta-zero",
                context={"delta": self.delta, "epsilon": self.epsilon, "distance": closest},
            )
        return closest

    def _integrand(self, k: np.ndarray, x: float, t: float, kind: str) -> np.ndarray:
        growth = 1j * k ** 3 * t
        if kind == "real":
            return np.exp(1j * k * x + growth) * self.w0_hat(k)
        z_plus, z_minus = self.kernels(k)
        if kind == "plus":
            return np.exp(1j * k * x + growth) * z_plus
        return np.exp(1j * k * (x - 1) + growth) * z_minus

    def _ray_integral(self, x: float, t: float, radius: float, panels: int) -> complex:
        base_x, base_w = np.polynomial.legendre.leggauss(_PANEL_NODES)
        edges = np.linspace(0.0, radius, panels + 1)
        half = (edges[1:] - edges[:-1]) / 2
        r = (edges[:-1, None] + half[:, None] * (base_x[None, :] + 1)).ravel()
        w = (half[:, None] * base_w[None, :]).ravel()
        total = 0j
        for angle, kind, sign in self.rays():
            direction = complex(math.cos(angle), math.sin(angle))
            values = self._integrand(r * direction, x, t, kind)
            total += sign * direction * complex(np.dot(w, values))
        return total

    def evaluate(self, x: float, t: float, tol: Optional[float] = None) -> complex:
        """
        u_2(x, t) for t > 0 by panel-doubling Gauss-Legendre quadrature.

        Raises:
            PoleClearanceFailure: If a ray comes within epsilon of a zero
        """
        if not t > 0:
            raise ValueError("contour representation requires t > 0")
        tol = settings.QUAD_TOL if tol is None else tol
        radius = self.truncation_radius(t)
        self.check_clearance(radius)

        panels = max(_MIN_PANELS, int(math.ceil(radius)))
        previous = self._ray_integral(x, t, radius, panels)
        while panels < _MAX_PANELS:
            panels *= 2
            current = self._ray_integral(x, t, radius, panels)
            if abs(current - previous) <= tol * max(1.0, abs(current)):
                return current / (2 * math.pi)
            previous = current
        logger.warning("contour_quadrature_unconverged", x=x, t=t, panels=panels)
        return previous / (2 * math.pi)


@lru_cache(maxsize=8)
def _uncoupled_zeros(radius: float) -> Tuple[complex, ...]:
    zero_set = locate_zeros(DeterminantFunction.uncoupled(), Rectangle(-radius, radius, -radius, radius))
    return tuple(z for z in zero_set.locations() if abs(z) > 1e-8)


def _zero_clearance(zeros: List[complex], cap: float) -> float:
    nonzero = [z for z in zeros if abs(z) > 1e-8]
    if len(nonzero) < 2:
        return cap
    separation = min(
        abs(a - b) for idx, a in enumerate(nonzero) for b in nonzero[idx + 1:]
    )
    return min(separation / 2, cap)


def contour_representation(
    w0: Datum,
    delta_deg: Optional[float] = None,
    zero_radius: float = 40.0,
    quadrature_panels: int = 32,
) -> ContourRepresentation:
    """
    Prepare transforms, moments and zero data for a datum w0.

    Args:
        w0: Initial datum of u_2 on [0, 1]
        delta_deg: Ray rotation in degrees, in (0, 30) (default settings.CONTOUR_DELTA_DEG)
        zero_radius: Half-width of the square searched for zeros of D
    """
    delta_deg = settings.CONTOUR_DELTA_DEG if delta_deg is None else delta_deg
    if not 0 < delta_deg < 30:
        raise ValueError("delta must lie strictly between 0 and 30 degrees")

    xs, ws = gauss_grid(panels=quadrature_panels, nodes=_PANEL_NODES)
    values = np.asarray(w0(xs), dtype=complex) * np.ones_like(xs)
    weighted = ws * values
    moments = np.array([np.dot(xs ** p, weighted) for p in range(_SERIES_TERMS)], dtype=complex)

    zeros = list(_uncoupled_zeros(float(zero_radius)))
    epsilon = _zero_clearance(zeros, settings.CLEARANCE_CAP)
    logger.debug("contour_prepared", delta_deg=delta_deg, zeros=len(zeros), epsilon=epsilon)
    return ContourRepresentation(
        nodes=xs,
        weighted=weighted,
        moments=moments,
        delta=math.radians(delta_deg),
        zeros=zeros,
        epsilon=epsilon,
    )


def stokes_decoupled_u2(w0: Datum, x: float, t: float, delta_deg: Optional[float] = None) -> complex:
    """Decoupled Stokes remainder at one (x, t), t > 0."""
    return contour_representation(w0, delta_deg).evaluate(x, t)
