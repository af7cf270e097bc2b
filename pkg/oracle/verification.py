"""
Cross-check of the spectral decomposition u = u_1 + u_2 against the
reference stepper.

The stepper error is estimated from two resolutions. In time, Richardson
extrapolation from runs at dt and 2 dt on the same grid gives
|u_dt - u| ~ |u_dt - u_2dt| / 3 for a second-order scheme. In space, a
run at half the Chebyshev degree bounds the error of the fine grid by
|u_M - u_M/2|. The decomposition passes when its deviation from the fine
run stays within three estimates plus an absolute floor.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import structlog

from core.boundary import FourierBoundaryData
from core.symbol import DispersionMonomial
from oracle.collocation import max_abs
from oracle.stepper import Discretisation, InitialState, Trajectory, step_solve, whole_steps

logger = structlog.get_logger(__name__)

Reference = Callable[[np.ndarray, float], np.ndarray]

ABSOLUTE_FLOOR = 1e-9
SAFETY_FACTOR = 3.0


@dataclass
class TimeCheck:
    t: float
    error: float
    temporal: float
    spatial: float = 0.0

    @property
    def estimate(self) -> float:
        return self.temporal + self.spatial

    @property
    def passed(self) -> bool:
        return self.error <= SAFETY_FACTOR * self.estimate + ABSOLUTE_FLOOR


@dataclass
class DecompositionReport:
    """Per-time errors of u_1 + u_2 against the reference solution."""

    checks: List[TimeCheck] = field(default_factory=list)
    points: int = 0
    dt: float = 0.0
    spatial_points: Optional[int] = None

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def max_error(self) -> float:
        return max((c.error for c in self.checks), default=0.0)

    @property
    def max_estimate(self) -> float:
        return max((c.estimate for c in self.checks), default=0.0)

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "points": self.points,
            "dt": self.dt,
            "spatial_points": self.spatial_points,
            "max_error": self.max_error,
            "max_estimate": self.max_estimate,
            "checks": [
                {
                    "t": c.t,
                    "error": c.error,
                    "estimate": c.estimate,
                    "temporal": c.temporal,
                    "spatial": c.spatial,
                    "passed": c.passed,
                }
                for c in self.checks
            ],
        }


def richardson_estimate(fine: Trajectory, coarse: Trajectory, t: float) -> float:
    """max_x |u_dt - u_2dt| / 3 at time t."""
    return max_abs(fine.at(t) - coarse.at(t)) / 3.0


def spatial_estimate(fine: Trajectory, coarse: Trajectory, t: float) -> float:
    """max over the fine nodes of |u_M - u_M/2|, the coarse run interpolated."""
    return max_abs(fine.at(t) - coarse.at(t, fine.x))


def verify_decomposition(
    pde: DispersionMonomial,
    data: FourierBoundaryData,
    u0: InitialState,
    reference: Reference,
    times: Sequence[float],
    disc: Optional[Discretisation] = None,
) -> DecompositionReport:
    """
    Compare reference(x, t) with the stepper at each t in times.

    Every t must be a whole number of coarse steps. The spatial estimate
    is skipped when half the degree falls below MIN_SPATIAL_POINTS.
    """
    disc = disc or Discretisation()
    coarse_disc = disc.coarsened()
    for t in times:
        if not whole_steps(t, coarse_disc.dt):
            raise ValueError(f"t={t} is not a multiple of the coarse step {coarse_disc.dt}")
    t_end = max(times)
    fine = step_solve(pde, data, u0, t_end, disc)
    coarse = step_solve(pde, data, u0, t_end, coarse_disc)
    spatial_disc = disc.spatially_coarsened()
    rough = step_solve(pde, data, u0, t_end, spatial_disc) if spatial_disc is not None else None

    report = DecompositionReport(
        points=disc.points,
        dt=disc.dt,
        spatial_points=spatial_disc.points if spatial_disc is not None else None,
    )
    for t in times:
        predicted = np.asarray(reference(fine.x, t), dtype=complex)
        error = max_abs(fine.at(t) - predicted)
        temporal = richardson_estimate(fine, coarse, t)
        spatial = spatial_estimate(fine, rough, t) if rough is not None else 0.0
        report.checks.append(TimeCheck(t=float(t), error=error, temporal=temporal, spatial=spatial))
        logger.info("decomposition_checked", t=t, error=error, temporal=temporal, spatial=spatial)
    return report
