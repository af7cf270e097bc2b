# ============================================================================
# File: core/symbol.py
# Description: Dispersion monomial, symbol polynomials and denominator roots
# ============================================================================
"""
Symbol-level ingredients shared by every spectral module.

The equation u_t + Omega(-i d/dx) u = 0 is fixed by the monomial
Omega(k) = a k^N. From it we derive

- the polynomials c_j(k) = i a (-i)^j k^(N-1-j), j = 0..N-1, which weigh
  the boundary traces d^j u/dx^j in the spectral numerator, and
- the N roots of i n omega + Omega(k) for a Fourier mode n != 0.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from core.exceptions import InvalidSymbolError

ComplexLike = Union[complex, float, np.ndarray]

# arg(a) may sit on the admissible boundary up to roundoff
_ARG_SLACK = 1e-12


@dataclass(frozen=True)
class DispersionMonomial:
    """
    Dispersion symbol Omega(k) = a k^N.

    Attributes:
        a: Complex coefficient with arg(a) in [-pi/2, pi/2]
        order: Spatial order N >= 2
    """

    a: complex
    order: int

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        if not isinstance(self.order, (int, np.integer)) or self.order < 2:
            raise InvalidSymbolError(
                "Spatial order must be an integer N >= 2",
                context={"a": self.a, "order": self.order},
            )
        if self.a == 0:
            raise InvalidSymbolError(
                "Monomial coefficient must be nonzero",
                context={"a": self.a, "order": self.order},
            )
        arg_a = cmath.phase(self.a)
        if abs(arg_a) > math.pi / 2 + _ARG_SLACK:
            raise InvalidSymbolError(
                "arg(a) must lie in [-pi/2, pi/2]",
                context={"a": self.a, "order": self.order, "arg_a": arg_a},
            )

    @property
    def root_of_unity(self) -> complex:
        """alpha = exp(2 pi i / N)."""
        return cmath.exp(2j * math.pi / self.order)

    def omega(self, k: ComplexLike) -> ComplexLike:
        """Evaluate Omega(k) = a k^N."""
        return self.a * np.power(k, self.order)

    def time_factor(self, k: ComplexLike, t: float) -> ComplexLike:
        """Evolution factor exp(-Omega(k) t) of the mode exp(i k x)."""
        return np.exp(-self.omega(k) * t)

    def spatial_operator_coefficient(self) -> complex:
        """Coefficient L with u_t = L d^N u / dx^N."""
        return -self.a * (-1j) ** self.order


@dataclass(frozen=True)
class SymbolPolynomials:
    """
    The monomials c_j(k) = coefficients[j] * k^(N-1-j).

    Attributes:
        coefficients: Leading coefficient of each c_j, j = 0..N-1
    """

    coefficients: Tuple[complex, ...]

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def degree(self, j: int) -> int:
        return self.order - 1 - j

    def evaluate(self, j: int, k: ComplexLike) -> ComplexLike:
        """c_j(k)."""
        return self.coefficients[j] * np.power(k, self.degree(j))

    def evaluate_all(self, k: complex) -> np.ndarray:
        """Vector (c_0(k), ..., c_{N-1}(k)) at a scalar k."""
        return np.array([self.evaluate(j, k) for j in range(self.order)], dtype=complex)

    def derivative_at_zero(self, j: int, r: int) -> complex:
        """r-th derivative of c_j at k = 0."""
        degree = self.degree(j)
        if r != degree:
            return 0j
        return self.coefficients[j] * math.factorial(degree)

    def pairing(self, k: complex, ell: complex) -> complex:
        """Sum_j c_j(k) (i ell)^j, the form that reproduces the divided difference of Omega."""
        return complex(sum(self.evaluate(j, k) * (1j * ell) ** j for j in range(self.order)))


@dataclass(frozen=True)
class ModeSpectrum:
    """
    Roots of i n omega + Omega(k) = 0 for one nonzero mode.

    Attributes:
        n: Mode index
        omega: Angular frequency
        roots: kappa_r = alpha^r * principal root, r = 0..N-1
    """

    n: int
    omega: float
    roots: Tuple[complex, ...]

    def as_array(self) -> np.ndarray:
        return np.array(self.roots, dtype=complex)

    def real_root(self) -> complex:
        """Root of smallest imaginary magnitude (the real root k_n for odd N)."""
        return min(self.roots, key=lambda kappa: abs(kappa.imag))

    def residuals(self, pde: DispersionMonomial) -> np.ndarray:
        """Relative residuals |i n omega + Omega(kappa)| / max(1, |n omega|)."""
        values = 1j * self.n * self.omega + pde.omega(self.as_array())
        return np.abs(values) / max(1.0, abs(self.n * self.omega))


def build_symbol_polynomials(pde: DispersionMonomial) -> SymbolPolynomials:
    """
    Build c_j(k) = i a (-i)^j k^(N-1-j) for j = 0..N-1.

    Example:
        >>> build_symbol_polynomials(DispersionMonomial(1j, 2)).coefficients
        ((-1+0j), 1j)
    """
    coefficients = tuple(
        complex(1j * pde.a * (-1j) ** j) for j in range(pde.order)
    )
    return SymbolPolynomials(coefficients=coefficients)


def principal_root(value_modulus: float, value_arg: float, order: int) -> complex:
    """N-th root with argument in (-pi/N, pi/N] from a modulus/argument pair."""
    theta = math.remainder(value_arg, 2 * math.pi)
    if theta <= -math.pi:
        theta = math.pi
    return cmath.rect(value_modulus ** (1.0 / order), theta / order)


def denominator_roots(pde: DispersionMonomial, omega: float, n: int) -> ModeSpectrum:
    """
    Solve i n omega + a k^N = 0.

    The N-th roots of -i n omega / a are returned as alpha^r times the
    principal root, whose argument lies in (-pi/N, pi/N]. The argument of
    -i n omega / a is assembled from its factors so that signed zeros never
    flip the branch.
    """
    if n == 0:
        raise ValueError("denominator_roots requires a nonzero mode index")
    if omega <= 0:
        raise ValueError("omega must be positive")

    modulus = abs(n) * omega / abs(pde.a)
    argument = -math.pi / 2 + (0.0 if n > 0 else math.pi) - cmath.phase(pde.a)
    principal = principal_root(modulus, argument, pde.order)
    alpha = pde.root_of_unity
    roots = tuple(principal * alpha ** r for r in range(pde.order))
    return ModeSpectrum(n=n, omega=omega, roots=roots)
