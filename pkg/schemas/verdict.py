"""
Pydantic schemas for periodicity verdicts and their evidence
"""

from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, validator


class VerdictKind(str, Enum):
    EXACTLY_PERIODIC = "ExactlyPeriodic"
    STRONGLY_ASYMPTOTICALLY_PERIODIC = "StronglyAsymptoticallyPeriodic"
    NOT_ASYMPTOTICALLY_PERIODIC = "NotAsymptoticallyPeriodic"
    PERIODIC_IFF_COMMENSURATE = "PeriodicIffCommensurate"
    UNDETERMINED = "Undetermined"


class WitnessKind(str, Enum):
    BOUNDARY_MODE = "boundary_mode"
    FREE_MODE = "free_mode"
    MEAN_FLUX = "mean_flux"


ComplexPair = Tuple[float, float]


def pair(value: complex) -> ComplexPair:
    """Complex number as (re, im) for JSON output."""
    value = complex(value)
    return (float(value.real), float(value.imag))


class Witness(BaseModel):
    """
    Concrete obstruction behind a NotAsymptoticallyPeriodic verdict.

    kind:
        boundary_mode: resonant Fourier mode n of the boundary data
        free_mode: lowest sine mode of u_0 - u_T (incommensurate periods)
        mean_flux: zero-mode flux imbalance of Neumann data
    """

    kind: WitnessKind
    n: int
    root: Optional[ComplexPair] = None
    coefficient: ComplexPair
    description: str = ""

    @validator("coefficient")
    def nonzero_coefficient(cls, v):
        if v[0] == 0.0 and v[1] == 0.0:
            raise ValueError("witness coefficient must be nonzero")
        return v

    class Config:
        use_enum_values = True


class ModeEvidence(BaseModel):
    """Per-mode record: determinant size and the data it multiplies"""

    n: int
    status: str
    det_ratio: Optional[float] = None
    abs_delta: Optional[float] = None
    root: Optional[ComplexPair] = None
    coefficient: Optional[ComplexPair] = None
    min_norm: bool = False


class CommensurabilityReport(BaseModel):
    dependent: bool
    ratio: Optional[Tuple[int, int]] = None
    lcm_multiple_of_2_over_pi: Optional[int] = None
    lcm_period: Optional[float] = None
    q_max: int
    residual: Optional[float] = None
    exact: bool = False
    resonance_set: List[Tuple[int, int]] = Field(default_factory=list)


class PeriodInfo(BaseModel):
    """Period as a decimal and, where known, as (p, q) with period = (p/q)(2/pi)"""

    value: float = Field(..., gt=0)
    multiple_of_2_over_pi: Optional[Tuple[int, int]] = None
    formula: Optional[str] = None


class Verdict(BaseModel):
    """
    Periodicity verdict emitted by classify.

    NotAsymptoticallyPeriodic always carries a witness.
    """

    kind: VerdictKind
    preset: str
    period: Optional[PeriodInfo] = None
    witness: Optional[Witness] = None
    evidence: List[ModeEvidence] = Field(default_factory=list)
    commensurability: Optional[CommensurabilityReport] = None
    zeros_in_closure: List[ComplexPair] = Field(default_factory=list)
    decay_rate: Optional[float] = None
    caveats: List[str] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)

    @validator("witness", always=True)
    def witness_for_negative_verdict(cls, v, values):
        if values.get("kind") == VerdictKind.NOT_ASYMPTOTICALLY_PERIODIC and v is None:
            raise ValueError("NotAsymptoticallyPeriodic requires a witness")
        return v

    class Config:
        use_enum_values = True
