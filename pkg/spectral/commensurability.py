"""
Rational dependence between a forcing period T and the intrinsic period 2/pi.

T and 2/pi are dependent when x = T pi / 2 is rational. Exact input is a
Fraction giving x directly; floating input is tested with the continued
fraction convergents of x up to a denominator bound, so "independent"
always means "independent up to q_max".
"""

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple, Union

import structlog

from core.config import settings

logger = structlog.get_logger(__name__)

INTRINSIC_PERIOD = 2 / math.pi


@dataclass(frozen=True)
class Commensurability:
    """
    Outcome of a commensurability test.

    Attributes:
        dependent: True when T / (2/pi) = p/q was found
        ratio: p/q in lowest terms (dependent only)
        lcm_multiple: lcm(T, 2/pi) in units of 2/pi, equal to p
        q_max: Denominator bound of the search
        residual: |x - p/q| of the accepted convergent (0 for exact input)
        exact: Input was an exact rational
    """

    dependent: bool
    ratio: Optional[Fraction]
    lcm_multiple: Optional[int]
    q_max: int
    residual: Optional[float] = None
    exact: bool = False

    @property
    def lcm_period(self) -> Optional[float]:
        if self.lcm_multiple is None:
            return None
        return self.lcm_multiple * INTRINSIC_PERIOD

    def to_dict(self) -> dict:
        return {
            "dependent": self.dependent,
            "ratio": None if self.ratio is None else [self.ratio.numerator, self.ratio.denominator],
            "lcm_multiple_of_2_over_pi": self.lcm_multiple,
            "lcm_period": self.lcm_period,
            "q_max": self.q_max,
            "residual": self.residual,
            "exact": self.exact,
        }


def convergents(value: float, q_max: int) -> Iterator[Tuple[int, int]]:
    """Continued-fraction convergents p/q of value with q <= q_max."""
    p_prev, p_curr = 1, math.floor(value)
    q_prev, q_curr = 0, 1
    remainder = value - math.floor(value)
    yield p_curr, q_curr
    while remainder > 0:
        inverse = 1.0 / remainder
        term = math.floor(inverse)
        remainder = inverse - term
        p_prev, p_curr = p_curr, term * p_curr + p_prev
        q_prev, q_curr = q_curr, term * q_curr + q_prev
        if q_curr > q_max:
            return
        yield p_curr, q_curr


def commensurability(
    period: Union[float, Fraction],
    q_max: Optional[int] = None,
    residual_tol: Optional[float] = None,
) -> Commensurability:
    """
    Decide whether T and 2/pi are rationally dependent.

    Args:
        period: T as a float, or T / (2/pi) as an exact Fraction
        q_max: Largest admissible denominator (default settings.CF_Q_MAX)
        residual_tol: Bound on q^2 |x - p/q| (default settings.CF_RESIDUAL)

    Example:
        >>> commensurability(3 / math.pi).lcm_multiple
        3
    """
    q_max = settings.CF_Q_MAX if q_max is None else q_max
    residual_tol = settings.CF_RESIDUAL if residual_tol is None else residual_tol

    if isinstance(period, Fraction):
        if period <= 0:
            raise ValueError("period must be positive")
        return Commensurability(
            dependent=True,
            ratio=period,
            lcm_multiple=period.numerator,
            q_max=q_max,
            residual=0.0,
            exact=True,
        )

    if not period > 0:
        raise ValueError("period must be positive")
    value = float(period) * math.pi / 2
    roundoff = 64 * sys.float_info.epsilon * abs(value)
    for p, q in convergents(value, q_max):
        if p <= 0:
            continue
        gap = abs(value - p / q)
        if q * q * gap <= residual_tol or gap <= roundoff:
            ratio = Fraction(p, q)
            logger.debug("commensurate", period=period, p=ratio.numerator, q=ratio.denominator, gap=gap)
            return Commensurability(
                dependent=True,
                ratio=ratio,
                lcm_multiple=ratio.numerator,
                q_max=q_max,
                residual=gap,
            )
    logger.debug("incommensurate", period=period, q_max=q_max)
    return Commensurability(dependent=False, ratio=None, lcm_multiple=None, q_max=q_max)


def resonance_set(ratio: Fraction, n_max: int) -> List[Tuple[int, int]]:
    """
    Schroedinger modes n < 0 with |n| omega = m^2 pi^2, for T = ratio (2/pi).

    omega = pi^2 / ratio, so the condition is |n| = m^2 ratio.
    """
    pairs = []
    m = 1
    while m * m * ratio <= n_max:
        count = m * m * ratio
        if count.denominator == 1:
            pairs.append((-int(count), m))
        m += 1
    return pairs


def predicted_period(report: Commensurability) -> Optional[float]:
    """(2/pi) max(1, p) for a dependent report, None otherwise."""
    if not report.dependent:
        return None
    return INTRINSIC_PERIOD * max(1, report.ratio.numerator)
