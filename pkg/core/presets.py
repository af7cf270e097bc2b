"""
Preset equations and boundary families.

Four families are supported end to end:

    ls-dirichlet      u_t = i u_xx,  u(0,t) = g0(t),  u(1,t) = h0(t)
    heat-neumann      u_t = u_xx,    u_x(0,t) = g1(t), u_x(1,t) = h1(t)
    stokes-decoupled  u_t + u_xxx = 0, u(0,t) = g0, u(1,t) = h0, u_x(1,t) = h1
    stokes-coupled    u_t + u_xxx = 0, u(0,t) = g0, u(1,t) = h0,
                      u_x(0,t) = beta u_x(1,t)
"""

from enum import Enum
from typing import Optional

from core.boundary import LEFT, RIGHT, Coupling, FourierBoundaryData, ModeTable, Trace
from core.symbol import DispersionMonomial


class Preset(str, Enum):
    """Named equation plus boundary family"""

    LS_DIRICHLET = "ls-dirichlet"
    HEAT_NEUMANN = "heat-neumann"
    STOKES_DECOUPLED = "stokes-decoupled"
    STOKES_COUPLED = "stokes-coupled"

    @property
    def pde(self) -> DispersionMonomial:
        if self is Preset.LS_DIRICHLET:
            return linear_schrodinger()
        if self is Preset.HEAT_NEUMANN:
            return heat()
        return stokes()


def linear_schrodinger() -> DispersionMonomial:
    """Omega(k) = i k^2."""
    return DispersionMonomial(a=1j, order=2)


def heat() -> DispersionMonomial:
    """Omega(k) = k^2."""
    return DispersionMonomial(a=1.0, order=2)


def stokes() -> DispersionMonomial:
    """Omega(k) = -i k^3, i.e. u_t + u_xxx = 0."""
    return DispersionMonomial(a=-1j, order=3)


def _table(table: Optional[ModeTable]) -> ModeTable:
    return table if table is not None else ModeTable()


def ls_dirichlet_data(
    omega: float,
    g0: Optional[ModeTable] = None,
    h0: Optional[ModeTable] = None,
    real_valued: bool = False,
) -> FourierBoundaryData:
    return FourierBoundaryData(
        omega=omega,
        order=2,
        prescribed={Trace(LEFT, 0): _table(g0), Trace(RIGHT, 0): _table(h0)},
        real_valued=real_valued,
    )


def heat_neumann_data(
    omega: float,
    g1: Optional[ModeTable] = None,
    h1: Optional[ModeTable] = None,
    real_valued: bool = False,
) -> FourierBoundaryData:
    return FourierBoundaryData(
        omega=omega,
        order=2,
        prescribed={Trace(LEFT, 1): _table(g1), Trace(RIGHT, 1): _table(h1)},
        real_valued=real_valued,
    )


def stokes_decoupled_data(
    omega: float,
    g0: Optional[ModeTable] = None,
    h0: Optional[ModeTable] = None,
    h1: Optional[ModeTable] = None,
    real_valued: bool = False,
) -> FourierBoundaryData:
    return FourierBoundaryData(
        omega=omega,
        order=3,
        prescribed={
            Trace(LEFT, 0): _table(g0),
            Trace(RIGHT, 0): _table(h0),
            Trace(RIGHT, 1): _table(h1),
        },
        real_valued=real_valued,
    )


def stokes_coupled_data(
    omega: float,
    beta: float,
    g0: Optional[ModeTable] = None,
    h0: Optional[ModeTable] = None,
    real_valued: bool = False,
) -> FourierBoundaryData:
    coupling = Coupling({Trace(LEFT, 1): 1.0, Trace(RIGHT, 1): -beta})
    return FourierBoundaryData(
        omega=omega,
        order=3,
        prescribed={Trace(LEFT, 0): _table(g0), Trace(RIGHT, 0): _table(h0)},
        couplings=(coupling,),
        real_valued=real_valued,
    )


def coupling_beta(data: FourierBoundaryData) -> Optional[float]:
    """beta of a u_x(0) = beta u_x(1) coupling, if the data carries one."""
    for coupling in data.couplings:
        left = coupling.weights.get(Trace(LEFT, 1))
        right = coupling.weights.get(Trace(RIGHT, 1))
        if left is not None and right is not None and len(coupling.weights) == 2:
            return float((-right / left).real)
    return None
