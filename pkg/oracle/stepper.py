# ============================================================================
# File: oracle/stepper.py
# Description: Crank-Nicolson Chebyshev reference solver
# ============================================================================
"""
Reference time stepper for u_t + Omega(-i d/dx) u = 0 on [0, 1].

Space is discretised by Chebyshev collocation with rectangular
projection; time by the theta scheme with theta = 1/2 (Crank-Nicolson).
The first steps are replaced by pairs of backward Euler half steps to
damp the high-frequency content of incompatible initial data.

Each step solves

    [ P (I - theta dt L) ] u^{k+1} = [ P (I + (1 - theta) dt L) u^k ]
    [ B                  ]           [ g(t_{k+1})                    ]

where L = -a (-i)^N D^N, P is the resampling onto first-kind points and
B holds the N boundary rows (prescribed traces and couplings).
"""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import structlog
from scipy.linalg import lu_factor, lu_solve

from core.boundary import FourierBoundaryData
from core.config import settings
from core.exceptions import BlowupDetected, InstabilityDetected, MalformedBoundaryConditions
from core.symbol import DispersionMonomial
from oracle.collocation import ChebyshevGrid, max_abs
from spectral.homogeneous import decay_rate

logger = structlog.get_logger(__name__)

InitialState = Union[Callable[[np.ndarray], np.ndarray], Sequence[complex], np.ndarray]

# Smallest degree used for the spatial half of the error estimate
MIN_SPATIAL_POINTS = 8


@dataclass(frozen=True)
class Discretisation:
    """
    Resolution of the reference solver.

    Attributes:
        points: Chebyshev degree M
        dt: Time step
        rannacher_steps: Leading steps taken as two backward Euler half steps
        blowup_threshold: Sup norm that aborts the run
    """

    points: int = field(default_factory=lambda: settings.ORACLE_POINTS)
    dt: float = field(default_factory=lambda: settings.ORACLE_DT)
    rannacher_steps: int = field(default_factory=lambda: settings.RANNACHER_STEPS)
    blowup_threshold: float = field(default_factory=lambda: settings.BLOWUP_THRESHOLD)

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.rannacher_steps < 0:
            raise ValueError("rannacher_steps must be non-negative")

    def coarsened(self) -> "Discretisation":
        """Same grid, doubled step."""
        return replace(self, dt=2 * self.dt)

    def spatially_coarsened(self) -> Optional["Discretisation"]:
        """Same step, halved degree; None below the smallest useful grid."""
        points = self.points // 2
        return replace(self, points=points) if points >= MIN_SPATIAL_POINTS else None

    def refined(self) -> "Discretisation":
        """Halved step and doubled degree."""
        return replace(self, dt=self.dt / 2, points=2 * self.points)


@dataclass(frozen=True)
class BoundaryRows:
    """N boundary rows and the time-dependent right-hand sides they take."""

    matrix: np.ndarray
    values: Tuple[Callable[[float], complex], ...]

    def rhs(self, t: float) -> np.ndarray:
        return np.array([complex(f(t)) for f in self.values], dtype=complex)


def boundary_rows(grid: ChebyshevGrid, data: FourierBoundaryData) -> BoundaryRows:
    """Rows for prescribed traces first, then couplings."""
    rows: List[np.ndarray] = []
    values: List[Callable[[float], complex]] = []
    for trace in sorted(data.prescribed):
        rows.append(grid.boundary_row(trace.side, trace.order).astype(complex))
        table = data.prescribed[trace]
        values.append(lambda t, table=table: table.evaluate(t, data.omega))
    for coupling in data.couplings:
        row = np.zeros(grid.points + 1, dtype=complex)
        for trace, weight in coupling.weights.items():
            row = row + weight * grid.boundary_row(trace.side, trace.order)
        rows.append(row)
        values.append(lambda t, table=coupling.rhs: table.evaluate(t, data.omega))
    if len(rows) != grid.order:
        raise MalformedBoundaryConditions(
            "Boundary rows do not match the spatial order",
            context={"rows": len(rows), "order": grid.order},
        )
    return BoundaryRows(np.vstack(rows), tuple(values))


@dataclass
class Trajectory:
    """
    Snapshots of a reference run.

    values[k] is the state on the Chebyshev grid at times[k].
    """

    times: np.ndarray
    values: np.ndarray
    grid: ChebyshevGrid
    dt: float

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def index(self, t: float) -> int:
        position = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[position] - t) > 1e-9 * max(1.0, abs(t)):
            raise KeyError(f"no snapshot at t={t}")
        return position

    def at(self, t: float, x=None) -> np.ndarray:
        state = self.values[self.index(t)]
        return state if x is None else self.grid.interpolate(state, x)

    def sup_norms(self) -> np.ndarray:
        return np.max(np.abs(self.values), axis=1)

    def periodicity_defect(self, period: float) -> Tuple[np.ndarray, np.ndarray]:
        """(t, max_x |u(x, t + period) - u(x, t)|) over the recorded window."""
        spacing = float(self.times[1] - self.times[0]) if self.times.size > 1 else self.dt
        lag = period / spacing
        shift = int(round(lag))
        if shift < 1 or abs(lag - shift) > 1e-6:
            raise ValueError("period must be a multiple of the snapshot spacing")
        if shift >= self.times.size:
            return np.array([]), np.array([])
        defect = np.max(np.abs(self.values[shift:] - self.values[:-shift]), axis=1)
        return self.times[:-shift], defect

    def decay_fit(self, period: float, t_min: float = 0.0) -> float:
        """Exponential rate of the periodicity defect beyond t_min."""
        times, defect = self.periodicity_defect(period)
        keep = (times >= t_min) & (defect > 0)
        return decay_rate(times[keep], defect[keep])

    def to_frame(self) -> pd.DataFrame:
        """Long format: one row per (t, x) with real and imaginary parts."""
        times = np.repeat(self.times, self.x.size)
        xs = np.tile(self.x, self.times.size)
        flat = self.values.reshape(-1)
        return pd.DataFrame({"t": times, "x": xs, "re": flat.real, "im": flat.imag})


def _initial_state(grid: ChebyshevGrid, u0: InitialState) -> np.ndarray:
    if callable(u0):
        state = np.asarray(u0(grid.x), dtype=complex) * np.ones(grid.x.size)
    else:
        state = np.asarray(u0, dtype=complex)
    if state.shape != grid.x.shape:
        raise ValueError(f"initial state has shape {state.shape}, expected {grid.x.shape}")
    return state


class _Stepper:
    """Factored step matrices for one theta and one step size."""

    def __init__(self, grid: ChebyshevGrid, operator: np.ndarray, rows: BoundaryRows, dt: float, theta: float):
        projection = grid.projection
        self.rows = rows
        self.explicit = projection + (1 - theta) * dt * projection @ operator
        implicit = np.vstack([projection - theta * dt * projection @ operator, rows.matrix])
        self.factors = lu_factor(implicit)

    def __call__(self, state: np.ndarray, t_next: float) -> np.ndarray:
        rhs = np.concatenate([self.explicit @ state, self.rows.rhs(t_next)])
        return lu_solve(self.factors, rhs)


def _check_state(state: np.ndarray, t: float, step: int, threshold: float) -> None:
    if not np.all(np.isfinite(state)):
        raise InstabilityDetected(
            "Non-finite values in the reference trajectory",
            context={"t": t, "step": step},
        )
    sup = max_abs(state)
    if sup > threshold:
        raise BlowupDetected(
            "Reference trajectory exceeded the blow-up threshold",
            context={"t": t, "sup_norm": sup, "threshold": threshold},
        )


def step_solve(
    pde: DispersionMonomial,
    data: FourierBoundaryData,
    u0: InitialState,
    t_end: float,
    disc: Optional[Discretisation] = None,
    record_every: int = 1,
) -> Trajectory:
    """
    Integrate from t = 0 to t_end and record every record_every steps.

    t_end is rounded to a whole number of steps.

    Raises:
        BlowupDetected: sup norm above disc.blowup_threshold
        InstabilityDetected: NaN or infinity in the state
    """
    disc = disc or Discretisation()
    if data.order != pde.order:
        raise MalformedBoundaryConditions(
            "Boundary data order differs from the equation order",
            context={"order": pde.order, "data_order": data.order},
        )
    grid = ChebyshevGrid(disc.points, pde.order)
    operator = pde.spatial_operator_coefficient() * grid.power(pde.order)
    rows = boundary_rows(grid, data)

    steps = int(round(t_end / disc.dt))
    crank_nicolson = _Stepper(grid, operator, rows, disc.dt, 0.5)
    euler_half = _Stepper(grid, operator, rows, disc.dt / 2, 1.0) if disc.rannacher_steps else None

    state = _initial_state(grid, u0)
    times: List[float] = [0.0]
    snapshots: List[np.ndarray] = [state.copy()]

    for k in range(steps):
        t_next = (k + 1) * disc.dt
        if k < disc.rannacher_steps:
            state = euler_half(state, t_next - disc.dt / 2)
            state = euler_half(state, t_next)
        else:
            state = crank_nicolson(state, t_next)
        _check_state(state, t_next, k + 1, disc.blowup_threshold)
        if (k + 1) % record_every == 0:
            times.append(t_next)
            snapshots.append(state.copy())

    logger.info(
        "reference_run_finished",
        steps=steps,
        points=disc.points,
        dt=disc.dt,
        final_sup=max_abs(state),
    )
    return Trajectory(np.array(times), np.vstack(snapshots), grid, disc.dt)


def growth_ratios(trajectory: Trajectory, period: float, periods: int) -> Dict[int, float]:
    """Sup norm at each whole period m = 1..periods."""
    return {m: float(max_abs(trajectory.at(m * period))) for m in range(1, periods + 1)}


def is_strictly_increasing(values: Sequence[float]) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


def whole_steps(t: float, dt: float) -> bool:
    ratio = t / dt
    return math.isclose(ratio, round(ratio), rel_tol=0.0, abs_tol=1e-6)
