# ============================================================================
# File: spectral/detfun.py
# Description: Stokes boundary determinants and their complex zeros
# ============================================================================
"""
Exponential-polynomial determinants of the Stokes mode systems.

    uncoupled:  Delta(k) = (a^2 - a) sum_j a^j exp(-i a^j k)
    coupled:    Delta(k) = (a^2 - a) sum_j a^j (exp(i a^j k) + beta exp(-i a^j k))

with a = exp(2 pi i / 3). Zeros are counted by the argument principle,
evaluated as a phase-continuation winding number along the boundary of a
rectangle, and located by recursive subdivision plus Newton refinement
with the analytic derivative.

Both determinants satisfy Delta(a k) = Delta(k) / a, so their zero sets
are invariant under rotation by 120 degrees, and both vanish to second
order at k = 0 (fifth order for beta = -1).
"""

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy.optimize import brentq
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from core.config import settings
from core.exceptions import BoundaryZero, NonConvergence

logger = structlog.get_logger(__name__)

ALPHA = cmath.exp(2j * math.pi / 3)
PREFACTOR = ALPHA ** 2 - ALPHA
_POWERS = np.array([1.0, ALPHA, ALPHA ** 2], dtype=complex)

# |Delta| below this multiple of its term scale counts as a zero on a contour
_ZERO_FLOOR = 1e-13
_MAX_PHASE_REFINEMENTS = 48
_SPLIT_FRACTIONS = (0.5, 0.47, 0.53, 0.44, 0.56)
# Largest radius of the disk around k = 0 removed before subdivision
_ORIGIN_CLEARANCE = 0.05


class DeltaFamily(str, Enum):
    UNCOUPLED = "uncoupled"
    COUPLED = "coupled"


@dataclass(frozen=True)
class DeterminantFunction:
    """
    Delta(k) of one Stokes boundary family.

    Attributes:
        family: UNCOUPLED or COUPLED
        beta: Coupling coefficient in u_x(0,t) = beta u_x(1,t) (COUPLED only)
    """

    family: DeltaFamily
    beta: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "family", DeltaFamily(self.family))
        if self.family is DeltaFamily.COUPLED and self.beta is None:
            raise ValueError("coupled determinant requires beta")

    @classmethod
    def uncoupled(cls) -> "DeterminantFunction":
        return cls(DeltaFamily.UNCOUPLED)

    @classmethod
    def coupled(cls, beta: float) -> "DeterminantFunction":
        return cls(DeltaFamily.COUPLED, float(beta))

    def describe(self) -> dict:
        return {"family": self.family.value, "beta": self.beta}

    @property
    def origin_order(self) -> int:
        """Order of the zero at k = 0 from the Taylor series."""
        if self.family is DeltaFamily.COUPLED and self.beta == -1.0:
            return 5
        return 2

    def _terms(self, k: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """exp(+i a^j k) and exp(-i a^j k), shape (3, ...)."""
        rotated = _POWERS.reshape((3,) + (1,) * k.ndim) * k
        return np.exp(1j * rotated), np.exp(-1j * rotated)

    def __call__(self, k):
        k_arr = np.asarray(k, dtype=complex)
        plus, minus = self._terms(k_arr)
        weights = _POWERS.reshape((3,) + (1,) * k_arr.ndim)
        if self.family is DeltaFamily.UNCOUPLED:
            value = PREFACTOR * np.sum(weights * minus, axis=0)
        else:
            value = PREFACTOR * np.sum(weights * (plus + self.beta * minus), axis=0)
        return value if value.shape else complex(value)

    def derivative(self, k):
        """Term-by-term derivative of Delta."""
        k_arr = np.asarray(k, dtype=complex)
        plus, minus = self._terms(k_arr)
        weights = _POWERS.reshape((3,) + (1,) * k_arr.ndim) ** 2
        if self.family is DeltaFamily.UNCOUPLED:
            value = PREFACTOR * np.sum(-1j * weights * minus, axis=0)
        else:
            value = PREFACTOR * np.sum(1j * weights * (plus - self.beta * minus), axis=0)
        return value if value.shape else complex(value)

    def scale(self, k):
        """Sum of term magnitudes, the natural size of |Delta| near k."""
        k_arr = np.asarray(k, dtype=complex)
        plus, minus = self._terms(k_arr)
        if self.family is DeltaFamily.UNCOUPLED:
            value = abs(PREFACTOR) * np.sum(np.abs(minus), axis=0)
        else:
            value = abs(PREFACTOR) * np.sum(np.abs(plus) + abs(self.beta) * np.abs(minus), axis=0)
        return value if value.shape else float(value)

    def split_form(self, k):
        """
        Coupled Delta written through sin, cos and exp(+-sqrt(3) k / 2).

        Real and imaginary parts for real k; the identity is analytic, so
        it holds for complex k as well.
        """
        if self.family is not DeltaFamily.COUPLED:
            raise ValueError("split form exists for the coupled family only")
        k_arr = np.asarray(k, dtype=complex)
        root3 = math.sqrt(3.0)
        grow = np.exp(root3 * k_arr / 2)
        decay = np.exp(-root3 * k_arr / 2)
        real_part = (self.beta - 1) * root3 * (
            -np.sin(k_arr)
            + np.sin(k_arr / 2 + 2 * math.pi / 3) * grow
            + np.sin(k_arr / 2 - 2 * math.pi / 3) * decay
        )
        imag_part = (self.beta + 1) * root3 * (
            np.cos(k_arr)
            - np.sin(math.pi / 6 + k_arr / 2) * grow
            - np.sin(math.pi / 6 - k_arr / 2) * decay
        )
        value = real_part - 1j * imag_part
        return value if value.shape else complex(value)


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned rectangle [x_min, x_max] x [y_min, y_max] in the k-plane."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError(f"degenerate rectangle {self}")

    @classmethod
    def around(cls, center: complex, half_width: float, half_height: Optional[float] = None) -> "Rectangle":
        half_height = half_width if half_height is None else half_height
        return cls(
            center.real - half_width, center.real + half_width,
            center.imag - half_height, center.imag + half_height,
        )

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def center(self) -> complex:
        return complex((self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2)

    def vertices(self) -> List[complex]:
        """Counter-clockwise corners starting bottom-left."""
        return [
            complex(self.x_min, self.y_min),
            complex(self.x_max, self.y_min),
            complex(self.x_max, self.y_max),
            complex(self.x_min, self.y_max),
        ]

    def contains(self, z: complex, margin: float = 0.0) -> bool:
        return (
            self.x_min - margin <= z.real <= self.x_max + margin
            and self.y_min - margin <= z.imag <= self.y_max + margin
        )

    def split(self, fraction: float) -> Tuple["Rectangle", "Rectangle"]:
        """Cut across the longer side at the given fraction."""
        if self.width >= self.height:
            cut = self.x_min + fraction * self.width
            return (
                Rectangle(self.x_min, cut, self.y_min, self.y_max),
                Rectangle(cut, self.x_max, self.y_min, self.y_max),
            )
        cut = self.y_min + fraction * self.height
        return (
            Rectangle(self.x_min, self.x_max, self.y_min, cut),
            Rectangle(self.x_min, self.x_max, cut, self.y_max),
        )

    def dithered(self, attempt: int, relative: float = 1e-3) -> "Rectangle":
        """Deterministic perturbation of all four sides."""
        rng = np.random.default_rng(attempt)
        shifts = rng.uniform(-relative, relative, size=4) * max(self.width, self.height)
        return Rectangle(
            self.x_min + shifts[0], self.x_max + shifts[1],
            self.y_min + shifts[2], self.y_max + shifts[3],
        )

    def as_list(self) -> List[float]:
        return [self.x_min, self.x_max, self.y_min, self.y_max]


@dataclass(frozen=True)
class LocatedZero:
    location: complex
    multiplicity: int
    residual: float


@dataclass
class ZeroSet:
    """
    Zeros found inside a region.

    Attributes:
        zeros: Refined zeros with multiplicities and relative residuals
        region: Rectangle actually used (possibly dithered)
        count: Argument-principle count over the region
    """

    zeros: List[LocatedZero] = field(default_factory=list)
    region: Optional[Rectangle] = None
    count: int = 0

    def locations(self) -> List[complex]:
        return [z.location for z in self.zeros]

    def total_multiplicity(self) -> int:
        return sum(z.multiplicity for z in self.zeros)

    def nonzero(self, tol: float = 1e-8) -> List[LocatedZero]:
        return [z for z in self.zeros if abs(z.location) > tol]


@dataclass(frozen=True)
class HeatmapGrid:
    """sin(arg Delta) sampled row-major; rows follow ys, columns follow xs."""

    values: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    rect: Rectangle


# ----------------------------------------------------------------------------
# Argument principle
# ----------------------------------------------------------------------------

def _polygon_points(vertices: Sequence[complex], density: float) -> np.ndarray:
    points = []
    count = len(vertices)
    for idx in range(count):
        start, end = vertices[idx], vertices[(idx + 1) % count]
        samples = max(16, int(math.ceil(abs(end - start) * density)))
        points.append(start + (end - start) * np.arange(samples) / samples)
    points.append(np.array([vertices[0]], dtype=complex))
    return np.concatenate(points)


def winding_number(
    func: Callable[[np.ndarray], np.ndarray],
    scale: Callable[[np.ndarray], np.ndarray],
    vertices: Sequence[complex],
    density: float = 4.0,
) -> int:
    """
    Winding number of func along a closed polygon.

    Segments are bisected until every phase increment is below pi / 2.

    Raises:
        BoundaryZero: If func (numerically) vanishes on the contour
    """
    points = _polygon_points(vertices, density)
    values = np.asarray(func(points), dtype=complex)
    for _ in range(_MAX_PHASE_REFINEMENTS):
        floor = _ZERO_FLOOR * np.asarray(scale(points))
        small = np.abs(values) <= floor
        if small.any():
            raise BoundaryZero(
                "Contour passes through a zero",
                context={"vertices": list(vertices)[:4], "point": complex(points[np.argmax(small)])},
            )
        steps = np.angle(values[1:] / values[:-1])
        bad = np.nonzero(np.abs(steps) >= math.pi / 2)[0]
        if bad.size == 0:
            total = float(np.sum(steps)) / (2 * math.pi)
            rounded = int(round(total))
            if abs(total - rounded) > 0.05:
                raise BoundaryZero(
                    "Winding number is not close to an integer",
                    context={"vertices": list(vertices)[:4], "winding": total},
                )
            return rounded
        if np.min(np.abs(points[bad + 1] - points[bad])) < 1e-13 * max(1.0, float(np.max(np.abs(points)))):
            raise BoundaryZero(
                "Phase continuation cannot resolve a contour segment",
                context={"vertices": list(vertices)[:4], "point": complex(points[bad[0]])},
            )
        midpoints = 0.5 * (points[bad] + points[bad + 1])
        points = np.insert(points, bad + 1, midpoints)
        values = np.insert(values, bad + 1, np.asarray(func(midpoints), dtype=complex))
    raise BoundaryZero(
        "Phase continuation did not settle",
        context={"vertices": list(vertices)[:4]},
    )


def _count_with_dither(delta: DeterminantFunction, rect: Rectangle, attempts: Optional[int] = None) -> Tuple[int, Rectangle]:
    attempts = settings.DITHER_ATTEMPTS if attempts is None else attempts
    for attempt in Retrying(
        stop=stop_after_attempt(attempts),
        retry=retry_if_exception_type(BoundaryZero),
        reraise=True,
    ):
        with attempt:
            number = attempt.retry_state.attempt_number
            trial = rect if number == 1 else rect.dithered(number)
            if number > 1:
                logger.warning("contour_dithered", attempt=number, rect=trial.as_list())
            return winding_number(delta, delta.scale, trial.vertices()), trial
    raise BoundaryZero("Dithering exhausted", context={"rect": rect.as_list()})


def count_zeros(delta: DeterminantFunction, rect: Rectangle, attempts: Optional[int] = None) -> int:
    """
    Number of zeros of Delta inside rect, with multiplicity.

    The boundary is dithered deterministically when it passes through a
    zero; BoundaryZero is raised after the configured number of attempts.
    """
    count, _ = _count_with_dither(delta, rect, attempts)
    return count


def disk_winding(delta: DeterminantFunction, center: complex, radius: float, sides: int = 32) -> int:
    vertices = [center + radius * cmath.exp(2j * math.pi * idx / sides) for idx in range(sides)]
    return winding_number(delta, delta.scale, vertices, density=4.0 / max(radius, 1e-6))


# ----------------------------------------------------------------------------
# Zero location
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class _ExcludedOrigin:
    """Disk around k = 0 whose zero is accounted for from its known order."""

    order: int
    radius: float

    def count_in(self, region: Rectangle) -> int:
        return self.order if region.contains(0j) else 0

    def cut_too_close(self, region: Rectangle, fraction: float) -> bool:
        if not region.contains(0j):
            return False
        if region.width >= region.height:
            cut = region.x_min + fraction * region.width
        else:
            cut = region.y_min + fraction * region.height
        return abs(cut) <= self.radius


def _exclude_origin(delta: DeterminantFunction, region: Rectangle) -> Optional[_ExcludedOrigin]:
    """
    Isolate the zero at k = 0 inside region.

    The disk radius is halved until the disk winds exactly origin_order
    times, so no other zero shares it.

    Raises:
        NonConvergence: If no admissible radius is found
    """
    if not region.contains(0j):
        return None
    distance = min(-region.x_min, region.x_max, -region.y_min, region.y_max)
    if distance <= 0:
        return None
    radius = min(_ORIGIN_CLEARANCE, 0.1 * min(region.width, region.height), 0.5 * distance)
    order = delta.origin_order
    for _ in range(12):
        try:
            if disk_winding(delta, 0j, radius) == order:
                return _ExcludedOrigin(order=order, radius=radius)
        except BoundaryZero:
            pass
        radius /= 2
    raise NonConvergence(
        "Cannot isolate the zero at k = 0",
        context={"rect": region.as_list(), "order": order, "radius": radius},
    )


def _split_fractions(region: Rectangle, excluded: Optional[_ExcludedOrigin]) -> List[float]:
    fractions = list(_SPLIT_FRACTIONS)
    if excluded is None or not region.contains(0j):
        return fractions
    low, length = (region.x_min, region.width) if region.width >= region.height else (region.y_min, region.height)
    for offset in (2.0, -2.0, 4.0, -4.0):
        fraction = (offset * excluded.radius - low) / length
        if 0.1 <= fraction <= 0.9:
            fractions.append(fraction)
    return [f for f in fractions if not excluded.cut_too_close(region, f)]


def _newton(
    delta: DeterminantFunction,
    start: complex,
    multiplicity: int,
    region: Rectangle,
    max_iter: int,
) -> Optional[complex]:
    z = complex(start)
    reach = 0.5 * max(region.width, region.height)
    for _ in range(max_iter):
        value = delta(z)
        if abs(value) <= _ZERO_FLOOR * delta.scale(z):
            return z
        slope = delta.derivative(z)
        if slope == 0 or not np.isfinite(slope):
            return None
        step = multiplicity * value / slope
        z = z - step
        if not region.contains(z, margin=reach) or not np.isfinite(z):
            return None
        if abs(step) <= 1e-14 * max(1.0, abs(z)):
            return z
    return None


def _accept(
    delta: DeterminantFunction,
    z: Optional[complex],
    count: int,
    region: Rectangle,
    excluded: Optional[_ExcludedOrigin],
) -> bool:
    if z is None or not region.contains(z):
        return False
    radius = min(1e-3, 0.25 * min(region.width, region.height))
    if excluded is not None:
        if abs(z) <= excluded.radius:
            return False
        radius = min(radius, 0.5 * abs(z))
    try:
        return disk_winding(delta, z, radius) == count
    except BoundaryZero:
        return False


def _net_count(delta: DeterminantFunction, region: Rectangle, excluded: Optional[_ExcludedOrigin]) -> int:
    count = winding_number(delta, delta.scale, region.vertices())
    return count - (excluded.count_in(region) if excluded is not None else 0)


def _refine(
    delta: DeterminantFunction,
    region: Rectangle,
    count: int,
    depth: int,
    seeds: Sequence[complex],
    found: List[LocatedZero],
    max_depth: int,
    max_iter: int,
    excluded: Optional[_ExcludedOrigin] = None,
) -> None:
    if count == 0:
        return
    if depth > max_depth:
        raise NonConvergence(
            "Zero refinement exceeded the subdivision depth",
            context={"rect": region.as_list(), "depth": depth, "count": count},
        )

    starts = [s for s in seeds if region.contains(s)] + [region.center]
    for start in starts:
        z = _newton(delta, start, count, region, max_iter)
        if _accept(delta, z, count, region, excluded):
            residual = float(abs(delta(z)) / max(delta.scale(z), 1e-300))
            found.append(LocatedZero(location=z, multiplicity=count, residual=residual))
            return

    # a cut through a zero raises BoundaryZero in the winding count
    for fraction in _split_fractions(region, excluded):
        first, second = region.split(fraction)
        try:
            first_count = _net_count(delta, first, excluded)
            second_count = _net_count(delta, second, excluded)
        except BoundaryZero:
            continue
        if first_count + second_count != count:
            continue
        _refine(delta, first, first_count, depth + 1, seeds, found, max_depth, max_iter, excluded)
        _refine(delta, second, second_count, depth + 1, seeds, found, max_depth, max_iter, excluded)
        return

    raise NonConvergence(
        "No admissible split line for subdivision",
        context={"rect": region.as_list(), "depth": depth, "count": count},
    )


def locate_zeros(
    delta: DeterminantFunction,
    rect: Rectangle,
    seeds: Optional[Iterable[complex]] = None,
    max_depth: Optional[int] = None,
) -> ZeroSet:
    """
    Locate all zeros of Delta in rect.

    The zero at k = 0 is reported with its known order and a small disk
    around it is kept clear of every cut. The rest of the region is
    bisected until Newton from a seed or the centroid converges inside a
    sub-rectangle and a small disk around the result winds exactly
    `count` times, which also fixes the multiplicity.

    Raises:
        BoundaryZero: If the region boundary cannot be made zero-free
        NonConvergence: If refinement fails within the depth limit
    """
    max_depth = settings.SUBDIVISION_MAX_DEPTH if max_depth is None else max_depth
    count, region = _count_with_dither(delta, rect)
    found: List[LocatedZero] = []
    excluded = _exclude_origin(delta, region)
    remaining = count
    if excluded is not None:
        found.append(
            LocatedZero(
                location=0j,
                multiplicity=excluded.order,
                residual=float(abs(delta(0j)) / delta.scale(0j)),
            )
        )
        remaining -= excluded.order
    _refine(
        delta, region, remaining, 0, list(seeds or []), found, max_depth, settings.NEWTON_MAX_ITER, excluded
    )
    found.sort(key=lambda z: (abs(z.location), z.location.real, z.location.imag))
    logger.info(
        "zeros_located",
        family=delta.family.value,
        beta=delta.beta,
        rect=region.as_list(),
        count=count,
        located=len(found),
    )
    return ZeroSet(zeros=found, region=region, count=count)


def eval_delta(delta: DeterminantFunction, k, cross_check: bool = False):
    """
    Evaluate Delta(k); optionally compare the coupled value with its split form.
    """
    value = delta(k)
    if cross_check and delta.family is DeltaFamily.COUPLED:
        other = delta.split_form(k)
        mismatch = float(np.max(np.abs(np.asarray(value) - np.asarray(other)) / np.maximum(delta.scale(k), 1.0)))
        if mismatch > 1e-10:
            logger.warning("delta_forms_disagree", mismatch=mismatch)
    return value


def predict_zero_seeds(delta: DeterminantFunction, m_range: Iterable[int]) -> List[complex]:
    """
    Asymptotic zero predictors.

    coupled:   sign(m) [(2|m| - 1/3) pi - (pi if beta < 0)] + i log|beta|, m != 0
    uncoupled: -i (2 pi / sqrt 3)(m + 1/6), m >= 1, on the negative imaginary axis
    """
    seeds = []
    for m in m_range:
        if delta.family is DeltaFamily.COUPLED:
            if m == 0:
                continue
            shift = math.pi if delta.beta < 0 else 0.0
            real = math.copysign((2 * abs(m) - 1.0 / 3.0) * math.pi - shift, m)
            imag = math.log(abs(delta.beta)) if delta.beta != 0 else 0.0
            seeds.append(complex(real, imag))
        else:
            if m < 1:
                continue
            seeds.append(complex(0.0, -(2 * math.pi / math.sqrt(3)) * (m + 1.0 / 6.0)))
    return seeds


def export_heatmap(delta: DeterminantFunction, rect: Rectangle, resolution: Tuple[int, int]) -> HeatmapGrid:
    """
    sin(arg Delta) on a (ny, nx) grid over rect.

    Args:
        resolution: (nx, ny), both at least 2
    """
    nx, ny = resolution
    if nx < 2 or ny < 2:
        raise ValueError("heatmap resolution must be at least 2 x 2")
    xs = np.linspace(rect.x_min, rect.x_max, nx)
    ys = np.linspace(rect.y_min, rect.y_max, ny)
    grid = xs[None, :] + 1j * ys[:, None]
    values = np.sin(np.angle(delta(grid)))
    return HeatmapGrid(values=values, xs=xs, ys=ys, rect=rect)


def real_zeros(delta: DeterminantFunction, x_min: float, x_max: float, samples: int = 4000) -> List[float]:
    """
    Real zeros of a coupled Delta by sign changes and Brent bisection.

    On the real line Delta(k) / i is real for beta = 1; in general the
    component with the smaller scale is tracked together with |Delta|.
    """
    def component(x: float) -> float:
        value = delta(complex(x))
        return float((value / 1j).real)

    xs = np.linspace(x_min, x_max, samples)
    values = np.array([component(x) for x in xs])
    roots = []
    for left, right, f_left, f_right in zip(xs[:-1], xs[1:], values[:-1], values[1:]):
        if f_left == 0.0:
            candidate = float(left)
        elif f_left * f_right < 0:
            candidate = float(brentq(component, left, right, xtol=1e-14, rtol=1e-15))
        else:
            continue
        if abs(delta(candidate)) <= 1e-8 * delta.scale(candidate):
            roots.append(candidate)
    return roots


def eigen_search_rect(delta: DeterminantFunction, modes: int) -> Rectangle:
    """|Re k| <= (6M + 2) pi / 3, |Im k| <= log|beta| + 2."""
    half_width = (6 * modes + 2) * math.pi / 3
    if delta.family is DeltaFamily.COUPLED and delta.beta not in (0.0, None):
        half_height = abs(math.log(abs(delta.beta))) + 2.0
    else:
        half_height = 2.0
    return Rectangle(-half_width, half_width, -half_height, half_height)
