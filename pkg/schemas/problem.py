"""
Pydantic schemas for problem configuration documents
"""

import re
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, validator

TRACE_LABEL = re.compile(r"^[GH]\d+$")

CoefficientRow = Tuple[int, float, float]


def _check_labels(labels) -> None:
    for label in labels:
        if not TRACE_LABEL.match(label):
            raise ValueError(f"trace label {label!r} must look like G<j> or H<j>")


class SymbolSpec(BaseModel):
    """Explicit dispersion monomial a k^N with a given as [re, im]"""

    a: Tuple[float, float]
    order: int = Field(..., ge=2)

    class Config:
        extra = "forbid"


class CouplingSpec(BaseModel):
    """sum_label weights[label] * trace = rhs, weights as [re, im]"""

    weights: Dict[str, Tuple[float, float]]
    rhs: List[CoefficientRow] = Field(default_factory=list)

    @validator("weights")
    def valid_labels(cls, v):
        _check_labels(v)
        if not v:
            raise ValueError("coupling needs at least one weight")
        return v

    class Config:
        extra = "forbid"


class InitialDatumSpec(BaseModel):
    """
    Initial datum u_0.

    kind:
        uT: the periodic datum itself
        zero: u_0 = 0
        polynomial: sum_j coefficients[j] x^j
        cosine: amplitude cos(mode pi x)
        sine: amplitude sin(mode pi x)
        samples: values [re, im] on the uniform grid x_j = j / (len - 1)

    plus_uT adds u_T to any of the explicit kinds.
    """

    kind: Literal["uT", "zero", "polynomial", "cosine", "sine", "samples"] = "uT"
    coefficients: List[float] = Field(default_factory=list)
    amplitude: float = 1.0
    mode: int = Field(default=1, ge=0)
    samples: List[Tuple[float, float]] = Field(default_factory=list)
    plus_uT: bool = False

    @validator("samples")
    def enough_samples(cls, v, values):
        if values.get("kind") == "samples" and len(v) < 2:
            raise ValueError("samples datum needs at least two values")
        return v

    class Config:
        extra = "forbid"


class OracleSpec(BaseModel):
    points: Optional[int] = Field(None, ge=4)
    dt: Optional[float] = Field(None, gt=0)
    rannacher_steps: Optional[int] = Field(None, ge=0)
    t_end: float = Field(default=1.0, gt=0)
    record_every: int = Field(default=1, ge=1)
    times: List[float] = Field(default_factory=lambda: [0.1, 0.5, 1.0])

    class Config:
        extra = "forbid"


class DeltaMapSpec(BaseModel):
    """Rectangle and resolution for delta-map"""

    family: Optional[Literal["uncoupled", "coupled"]] = None
    beta: Optional[float] = None
    x_min: float = -20.0
    x_max: float = 20.0
    y_min: float = -20.0
    y_max: float = 20.0
    nx: int = Field(default=201, ge=2)
    ny: int = Field(default=201, ge=2)
    locate: bool = True

    @validator("x_max")
    def x_ordered(cls, v, values):
        if "x_min" in values and v <= values["x_min"]:
            raise ValueError("x_max must exceed x_min")
        return v

    @validator("y_max")
    def y_ordered(cls, v, values):
        if "y_min" in values and v <= values["y_min"]:
            raise ValueError("y_max must exceed y_min")
        return v

    class Config:
        extra = "forbid"


class SamplingSpec(BaseModel):
    """Grids used by construct"""

    x_points: int = Field(default=101, ge=2)
    t_points: int = Field(default=32, ge=1)

    class Config:
        extra = "forbid"


class ProblemConfig(BaseModel):
    """
    One problem document.

    Either a preset or an explicit symbol; either omega or period (period
    may also be given exactly as period_ratio = [p, q], T = (p/q)(2/pi)).
    Boundary tables map trace labels to rows [n, re, im].
    """

    preset: Optional[Literal["ls-dirichlet", "heat-neumann", "stokes-decoupled", "stokes-coupled"]] = None
    symbol: Optional[SymbolSpec] = None
    omega: Optional[float] = Field(None, gt=0)
    period: Optional[float] = Field(None, gt=0)
    period_ratio: Optional[Tuple[int, int]] = None
    boundary: Dict[str, List[CoefficientRow]] = Field(default_factory=dict)
    couplings: List[CouplingSpec] = Field(default_factory=list)
    beta: Optional[float] = None
    real_valued: bool = False
    initial: InitialDatumSpec = Field(default_factory=InitialDatumSpec)
    n_max: Optional[int] = Field(None, ge=1)
    m_max: Optional[int] = Field(None, ge=1)
    resonance_tol: Optional[float] = Field(None, gt=0)
    q_max: Optional[int] = Field(None, ge=1)
    oracle: OracleSpec = Field(default_factory=OracleSpec)
    delta_map: DeltaMapSpec = Field(default_factory=DeltaMapSpec)
    sampling: SamplingSpec = Field(default_factory=SamplingSpec)

    @validator("symbol", always=True)
    def preset_or_symbol(cls, v, values):
        if (values.get("preset") is None) == (v is None):
            raise ValueError("give exactly one of preset and symbol")
        return v

    @validator("period_ratio", always=True)
    def one_frequency(cls, v, values):
        given = [values.get("omega") is not None, values.get("period") is not None, v is not None]
        if sum(given) != 1:
            raise ValueError("give exactly one of omega, period and period_ratio")
        if v is not None and (v[0] <= 0 or v[1] <= 0):
            raise ValueError("period_ratio entries must be positive")
        return v

    @validator("boundary")
    def boundary_labels(cls, v):
        _check_labels(v)
        return v

    @validator("beta", always=True)
    def beta_for_coupled(cls, v, values):
        if values.get("preset") == "stokes-coupled" and v is None:
            raise ValueError("stokes-coupled requires beta")
        return v

    class Config:
        extra = "forbid"
