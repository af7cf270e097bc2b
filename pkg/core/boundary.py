# ============================================================================
# File: core/boundary.py
# Description: Fourier boundary-value tables, couplings and the mode rational
# ============================================================================
"""
Boundary data in Fourier form.

A boundary function f(t) of period T = 2 pi / omega is stored as the
finitely supported table n -> F_n with f(t) = sum_n F_n exp(i n omega t).
The left traces d^j u/dx^j (0, t) have coefficients G_n^(j) and the right
traces d^j u/dx^j (1, t) have coefficients H_n^(j).

Each problem prescribes some traces and may tie others together through
linear couplings, e.g. u_x(0, t) = beta u_x(1, t). Exactly N conditions per
mode must result, which leaves N unknown traces for the mode systems.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Mapping, NamedTuple, Optional, Tuple

import numpy as np

from core.exceptions import MalformedBoundaryConditions
from core.symbol import DispersionMonomial, SymbolPolynomials, build_symbol_polynomials

LEFT = 0
RIGHT = 1


class Trace(NamedTuple):
    """Boundary trace d^order u / dx^order at x = side."""

    side: int
    order: int

    @property
    def label(self) -> str:
        return f"{'G' if self.side == LEFT else 'H'}{self.order}"

    @classmethod
    def parse(cls, label: str) -> "Trace":
        """Parse labels such as 'G0' or 'H2'."""
        head, tail = label[0].upper(), label[1:]
        if head not in ("G", "H") or not tail.isdigit():
            raise MalformedBoundaryConditions(
                "Trace labels look like G<j> or H<j>",
                context={"label": label},
            )
        return cls(LEFT if head == "G" else RIGHT, int(tail))


@dataclass(frozen=True)
class ModeTable:
    """
    Finitely supported Fourier coefficient table n -> complex.

    Zero entries are dropped so the support is meaningful.
    """

    coefficients: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {int(n): complex(v) for n, v in dict(self.coefficients).items() if v != 0}
        object.__setattr__(self, "coefficients", cleaned)

    def __getitem__(self, n: int) -> complex:
        return self.coefficients.get(n, 0j)

    def __add__(self, other: "ModeTable") -> "ModeTable":
        merged = dict(self.coefficients)
        for n, value in other.coefficients.items():
            merged[n] = merged.get(n, 0j) + value
        return ModeTable(merged)

    def scaled(self, factor: complex) -> "ModeTable":
        return ModeTable({n: factor * v for n, v in self.coefficients.items()})

    def support(self) -> List[int]:
        return sorted(self.coefficients)

    def is_zero(self) -> bool:
        return not self.coefficients

    def norm(self) -> float:
        return float(math.sqrt(sum(abs(v) ** 2 for v in self.coefficients.values())))

    def truncated(self, n_max: int) -> "ModeTable":
        return ModeTable({n: v for n, v in self.coefficients.items() if abs(n) <= n_max})

    def is_conjugate_symmetric(self, tol: float = 1e-12) -> bool:
        scale = max([abs(v) for v in self.coefficients.values()] + [1.0])
        return all(
            abs(self[-n] - value.conjugate()) <= tol * scale
            for n, value in self.coefficients.items()
        )

    def evaluate(self, t, omega: float):
        """f(t) = sum_n F_n exp(i n omega t) for scalar or array t."""
        t_arr = np.asarray(t, dtype=float)
        total = np.zeros(t_arr.shape, dtype=complex)
        for n, value in self.coefficients.items():
            total = total + value * np.exp(1j * n * omega * t_arr)
        return total if total.shape else complex(total)

    @classmethod
    def single(cls, n: int, value: complex) -> "ModeTable":
        return cls({n: value})

    @classmethod
    def from_samples(cls, samples: Iterable[complex], n_max: int, drop: float = 1e-14) -> "ModeTable":
        """
        Coefficients from one period of equally spaced samples f(k T / S).

        Uses the FFT; modes above n_max or below drop * max are discarded.
        """
        values = np.asarray(list(samples), dtype=complex)
        count = values.size
        if count == 0:
            return cls({})
        spectrum = np.fft.fft(values) / count
        frequencies = np.fft.fftfreq(count, d=1.0 / count).astype(int)
        scale = float(np.max(np.abs(spectrum))) if count else 0.0
        table = {
            int(n): complex(c)
            for n, c in zip(frequencies, spectrum)
            if abs(n) <= n_max and abs(c) > drop * max(scale, 1e-300)
        }
        return cls(table)

    @classmethod
    def from_function(
        cls,
        func: Callable[[np.ndarray], np.ndarray],
        omega: float,
        n_max: int,
        samples: Optional[int] = None,
    ) -> "ModeTable":
        """Coefficients of a T-periodic function sampled on 4 n_max + 4 points by default."""
        count = samples or 4 * n_max + 4
        period = 2 * math.pi / omega
        times = np.arange(count) * period / count
        return cls.from_samples(func(times), n_max=n_max)


@dataclass(frozen=True)
class Coupling:
    """
    Linear condition sum_t weights[t] * trace_t = rhs, mode by mode.

    Example:
        u_x(0, t) = beta u_x(1, t) is Coupling({G1: 1, H1: -beta}, ModeTable()).
    """

    weights: Mapping[Trace, complex]
    rhs: ModeTable = field(default_factory=ModeTable)

    def __post_init__(self):
        object.__setattr__(
            self, "weights", {Trace(*t): complex(w) for t, w in dict(self.weights).items() if w != 0}
        )

    def describe(self) -> str:
        terms = " + ".join(f"({w:g})*{t.label}" for t, w in sorted(self.weights.items()))
        return f"{terms} = rhs"


@dataclass(frozen=True)
class FourierBoundaryData:
    """
    Prescribed boundary data for an order-N problem at frequency omega.

    Attributes:
        omega: Angular frequency (period T = 2 pi / omega)
        order: Spatial order N
        prescribed: Trace -> coefficient table
        couplings: Linear conditions among traces
        real_valued: Declares real boundary functions (tables must be
            conjugate symmetric)
    """

    omega: float
    order: int
    prescribed: Mapping[Trace, ModeTable]
    couplings: Tuple[Coupling, ...] = ()
    real_valued: bool = False

    def __post_init__(self):
        object.__setattr__(self, "prescribed", {Trace(*t): v for t, v in dict(self.prescribed).items()})
        object.__setattr__(self, "couplings", tuple(self.couplings))
        context = {
            "order": self.order,
            "prescribed": [t.label for t in sorted(self.prescribed)],
            "couplings": len(self.couplings),
        }
        if not self.omega > 0:
            raise MalformedBoundaryConditions(
                "omega must be positive", context={**context, "omega": self.omega}
            )
        for trace in list(self.prescribed) + [t for c in self.couplings for t in c.weights]:
            if trace.side not in (LEFT, RIGHT) or not 0 <= trace.order < self.order:
                raise MalformedBoundaryConditions(
                    "Trace outside the admissible range",
                    context={**context, "trace": trace, "reason": "side in {0,1}, order < N"},
                )
        if len(self.prescribed) + len(self.couplings) != self.order:
            raise MalformedBoundaryConditions(
                "Exactly N conditions per mode are required",
                context={**context, "reason": "prescription count"},
            )
        for coupling in self.couplings:
            if not any(t not in self.prescribed for t in coupling.weights):
                raise MalformedBoundaryConditions(
                    "Each coupling must involve an unprescribed trace",
                    context={**context, "reason": coupling.describe()},
                )
        if self.real_valued:
            tables = list(self.prescribed.values()) + [c.rhs for c in self.couplings]
            if not all(table.is_conjugate_symmetric() for table in tables):
                raise MalformedBoundaryConditions(
                    "Real-valued data requires conjugate-symmetric tables",
                    context={**context, "reason": "conjugate symmetry"},
                )

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega

    def unknown_traces(self) -> List[Trace]:
        return [
            Trace(side, j)
            for side in (LEFT, RIGHT)
            for j in range(self.order)
            if Trace(side, j) not in self.prescribed
        ]

    def value(self, trace: Trace, n: int) -> complex:
        table = self.prescribed.get(trace)
        return table[n] if table is not None else 0j

    def support(self, n_max: Optional[int] = None) -> List[int]:
        modes = set()
        for table in self.prescribed.values():
            modes.update(table.support())
        for coupling in self.couplings:
            modes.update(coupling.rhs.support())
        if n_max is not None:
            modes = {n for n in modes if abs(n) <= n_max}
        return sorted(modes)

    def scaled(self, factor: complex) -> "FourierBoundaryData":
        return FourierBoundaryData(
            omega=self.omega,
            order=self.order,
            prescribed={t: table.scaled(factor) for t, table in self.prescribed.items()},
            couplings=tuple(Coupling(c.weights, c.rhs.scaled(factor)) for c in self.couplings),
            real_valued=self.real_valued,
        )

    def combined(self, other: "FourierBoundaryData") -> "FourierBoundaryData":
        """Sum of two data sets with the same structure."""
        if set(self.prescribed) != set(other.prescribed) or len(self.couplings) != len(other.couplings):
            raise MalformedBoundaryConditions(
                "Only structurally identical data can be added",
                context={"order": self.order},
            )
        return FourierBoundaryData(
            omega=self.omega,
            order=self.order,
            prescribed={t: self.prescribed[t] + other.prescribed[t] for t in self.prescribed},
            couplings=tuple(
                Coupling(a.weights, a.rhs + b.rhs) for a, b in zip(self.couplings, other.couplings)
            ),
            real_valued=self.real_valued and other.real_valued,
        )

    def evaluate(self, trace: Trace, t) -> complex:
        table = self.prescribed.get(trace, ModeTable())
        return table.evaluate(t, self.omega)


@dataclass(frozen=True)
class ModeRational:
    """
    q_n(k) = numerator(k) / (i n omega + Omega(k)) for one mode.

    numerator(k) = sum_j c_j(k) (G_n^(j) - exp(-i k) H_n^(j)).
    """

    pde: DispersionMonomial
    n: int
    omega: float
    left: Tuple[complex, ...]
    right: Tuple[complex, ...]

    @property
    def symbol(self) -> SymbolPolynomials:
        return build_symbol_polynomials(self.pde)

    def numerator(self, k: complex) -> complex:
        c = self.symbol.evaluate_all(k)
        g = np.asarray(self.left, dtype=complex)
        h = np.asarray(self.right, dtype=complex)
        return complex(np.dot(c, g) - np.exp(-1j * k) * np.dot(c, h))

    def numerator_scale(self, k: complex) -> float:
        c = np.abs(self.symbol.evaluate_all(k))
        g = np.abs(np.asarray(self.left, dtype=complex))
        h = np.abs(np.asarray(self.right, dtype=complex))
        return float(np.dot(c, g) + abs(np.exp(-1j * k)) * np.dot(c, h))

    def denominator(self, k: complex) -> complex:
        return complex(1j * self.n * self.omega + self.pde.omega(k))

    def __call__(self, k: complex) -> complex:
        return self.numerator(k) / self.denominator(k)

    def entirety_residuals(self, roots: Iterable[complex]) -> List[float]:
        """|numerator(kappa)| / numerator scale at each denominator root."""
        residuals = []
        for kappa in roots:
            scale = self.numerator_scale(kappa)
            residuals.append(abs(self.numerator(kappa)) / scale if scale > 0 else 0.0)
        return residuals
