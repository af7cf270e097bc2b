"""
Unit tests for symbols, boundary tables, presets and exceptions
"""

import math

import numpy as np
import pytest

from core.boundary import LEFT, RIGHT, Coupling, FourierBoundaryData, ModeTable, Trace
from core.exceptions import (
    BoundaryZero,
    ConfigurationError,
    IllPosed,
    InvalidSymbolError,
    MalformedBoundaryConditions,
    NumericalError,
    PosednessError,
    RetryableError,
)
from core.presets import Preset, coupling_beta, stokes_coupled_data
from core.symbol import DispersionMonomial, build_symbol_polynomials, denominator_roots


class TestDispersionMonomial:
    """Test the monomial symbol and its admissibility rules"""

    def test_rejects_unstable_coefficient(self):
        """Test arg(a) outside [-pi/2, pi/2] is refused"""
        with pytest.raises(InvalidSymbolError):
            DispersionMonomial(a=-1.0, order=2)

    def test_rejects_low_order_and_zero(self):
        """Test N < 2 and a = 0 are refused"""
        with pytest.raises(InvalidSymbolError):
            DispersionMonomial(a=1.0, order=1)
        with pytest.raises(InvalidSymbolError):
            DispersionMonomial(a=0.0, order=2)

    def test_preset_operators(self):
        """Test u_t = L d^N u for the three equations"""
        # Assertions
        assert Preset.LS_DIRICHLET.pde.spatial_operator_coefficient() == pytest.approx(1j)
        assert Preset.HEAT_NEUMANN.pde.spatial_operator_coefficient() == pytest.approx(1.0)
        assert Preset.STOKES_COUPLED.pde.spatial_operator_coefficient() == pytest.approx(-1.0)

    def test_time_factor(self):
        """Test exp(-Omega(k) t) for the heat symbol"""
        pde = Preset.HEAT_NEUMANN.pde

        # Assertions
        assert pde.time_factor(2.0, 0.5) == pytest.approx(math.exp(-2.0))


class TestSymbolPolynomials:
    """Test c_j(k) = i a (-i)^j k^(N-1-j)"""

    def test_schroedinger_coefficients(self):
        """Test LS coefficients (-1, i)"""
        symbol = build_symbol_polynomials(Preset.LS_DIRICHLET.pde)

        # Assertions
        assert symbol.coefficients == pytest.approx((-1, 1j))

    def test_stokes_coefficients(self):
        """Test Stokes coefficients (1, -i, -1)"""
        symbol = build_symbol_polynomials(Preset.STOKES_DECOUPLED.pde)

        # Assertions
        assert symbol.coefficients == pytest.approx((1, -1j, -1))

    @pytest.mark.parametrize("preset", list(Preset))
    def test_pairing_is_divided_difference(self, preset):
        """Test sum_j c_j(k) (i l)^j = i (Omega(k) - Omega(l)) / (k - l)"""
        pde = preset.pde
        symbol = build_symbol_polynomials(pde)
        k, ell = 1.3 - 0.4j, -0.7 + 2.1j

        expected = 1j * (pde.omega(k) - pde.omega(ell)) / (k - ell)

        # Assertions
        assert symbol.pairing(k, ell) == pytest.approx(expected, rel=1e-12)

    def test_derivative_at_zero(self):
        """Test only the r = degree derivative survives"""
        symbol = build_symbol_polynomials(Preset.STOKES_DECOUPLED.pde)

        # Assertions
        assert symbol.derivative_at_zero(0, 2) == pytest.approx(2.0)
        assert symbol.derivative_at_zero(0, 1) == 0
        assert symbol.derivative_at_zero(2, 0) == pytest.approx(-1.0)


class TestDenominatorRoots:
    """Test the roots of i n omega + Omega(k)"""

    @pytest.mark.parametrize("preset", list(Preset))
    @pytest.mark.parametrize("n", [-3, -1, 1, 2])
    def test_roots_solve_the_denominator(self, preset, n):
        """Test every root annihilates i n omega + Omega"""
        pde = preset.pde
        spectrum = denominator_roots(pde, 2.5, n)

        # Assertions
        assert len(spectrum.roots) == pde.order
        assert np.max(spectrum.residuals(pde)) < 1e-12

    def test_schroedinger_resonant_root(self):
        """Test omega = pi^2, n = -1 gives the real root pi"""
        spectrum = denominator_roots(Preset.LS_DIRICHLET.pde, math.pi ** 2, -1)

        # Assertions
        assert abs(spectrum.real_root()) == pytest.approx(math.pi, rel=1e-12)
        assert abs(spectrum.real_root().imag) < 1e-12

    def test_stokes_has_real_root(self):
        """Test odd order keeps one real root k_n with k_n^3 = n omega"""
        spectrum = denominator_roots(Preset.STOKES_DECOUPLED.pde, 1.0, 8)
        k = spectrum.real_root()

        # Assertions
        assert abs(k.imag) < 1e-12
        assert k.real ** 3 == pytest.approx(8.0, rel=1e-12)

    def test_zero_mode_rejected(self):
        """Test n = 0 has no root set"""
        with pytest.raises(ValueError):
            denominator_roots(Preset.HEAT_NEUMANN.pde, 1.0, 0)


class TestModeTable:
    """Test Fourier coefficient tables"""

    def test_from_function_recovers_sine(self):
        """Test FFT coefficients of sin(omega t)"""
        omega = 3.0
        table = ModeTable.from_function(lambda t: np.sin(omega * t), omega, n_max=4)

        # Assertions
        assert table.support() == [-1, 1]
        assert table[1] == pytest.approx(-0.5j, abs=1e-14)
        assert table[-1] == pytest.approx(0.5j, abs=1e-14)
        assert table.is_conjugate_symmetric()

    def test_evaluate(self):
        """Test f(t) = sum F_n exp(i n omega t)"""
        table = ModeTable({1: 0.5, -1: 0.5})

        # Assertions
        assert table.evaluate(0.3, 2.0) == pytest.approx(math.cos(0.6))
        assert np.allclose(table.evaluate(np.array([0.0, 0.5]), 2.0), np.cos([0.0, 1.0]))

    def test_zero_entries_dropped(self):
        """Test zero coefficients leave no support"""
        table = ModeTable({0: 0.0, 2: 1.0})

        # Assertions
        assert table.support() == [2]
        assert ModeTable().is_zero()

    def test_addition_and_truncation(self):
        """Test merged tables and |n| <= n_max truncation"""
        table = ModeTable({1: 1.0, 5: 2.0}) + ModeTable({1: 1.0})

        # Assertions
        assert table[1] == 2.0
        assert table.truncated(3).support() == [1]


class TestTrace:
    """Test trace labels"""

    def test_parse_and_label(self):
        """Test G<j>/H<j> round trip"""
        trace = Trace.parse("H2")

        # Assertions
        assert trace == Trace(RIGHT, 2)
        assert trace.label == "H2"
        assert Trace.parse("g0") == Trace(LEFT, 0)

    def test_parse_rejects_garbage(self):
        """Test malformed labels"""
        with pytest.raises(MalformedBoundaryConditions):
            Trace.parse("X1")


class TestFourierBoundaryData:
    """Test structural validation of boundary data"""

    def test_condition_count(self):
        """Test exactly N conditions are required"""
        with pytest.raises(MalformedBoundaryConditions):
            FourierBoundaryData(omega=1.0, order=2, prescribed={Trace(LEFT, 0): ModeTable()})

    def test_trace_order_range(self):
        """Test traces of order >= N are refused"""
        with pytest.raises(MalformedBoundaryConditions):
            FourierBoundaryData(
                omega=1.0,
                order=2,
                prescribed={Trace(LEFT, 0): ModeTable(), Trace(RIGHT, 2): ModeTable()},
            )

    def test_nonpositive_omega(self):
        """Test omega must be positive"""
        with pytest.raises(MalformedBoundaryConditions):
            FourierBoundaryData(
                omega=0.0,
                order=2,
                prescribed={Trace(LEFT, 0): ModeTable(), Trace(RIGHT, 0): ModeTable()},
            )

    def test_real_valued_requires_symmetry(self):
        """Test real data must be conjugate symmetric"""
        with pytest.raises(MalformedBoundaryConditions):
            FourierBoundaryData(
                omega=1.0,
                order=2,
                prescribed={Trace(LEFT, 0): ModeTable({1: 1.0}), Trace(RIGHT, 0): ModeTable()},
                real_valued=True,
            )

    def test_unknown_traces_and_support(self, stokes_coupled_beta10):
        """Test the coupled Stokes data leaves G1, G2, H1, H2 unknown"""
        data = stokes_coupled_beta10

        # Assertions
        assert [t.label for t in data.unknown_traces()] == ["G1", "G2", "H1", "H2"]
        assert data.support() == [-1, 1]
        assert data.period == pytest.approx(1.0)

    def test_coupling_needs_unknown_trace(self):
        """Test a coupling among prescribed traces only is refused"""
        with pytest.raises(MalformedBoundaryConditions):
            FourierBoundaryData(
                omega=1.0,
                order=2,
                prescribed={Trace(LEFT, 0): ModeTable()},
                couplings=(Coupling({Trace(LEFT, 0): 1.0}),),
            )

    def test_scaled_and_combined(self, ls_nonresonant_data):
        """Test linear operations keep structure"""
        doubled = ls_nonresonant_data.combined(ls_nonresonant_data)
        scaled = ls_nonresonant_data.scaled(2.0)

        # Assertions
        assert doubled.value(Trace(LEFT, 0), 1) == pytest.approx(scaled.value(Trace(LEFT, 0), 1))


class TestPresets:
    """Test preset factories"""

    def test_coupling_beta(self):
        """Test beta is read back from the coupling"""
        data = stokes_coupled_data(1.0, -3.0)

        # Assertions
        assert coupling_beta(data) == pytest.approx(-3.0)

    def test_preset_values(self):
        """Test CLI names"""
        # Assertions
        assert Preset("ls-dirichlet") is Preset.LS_DIRICHLET
        assert Preset.STOKES_COUPLED.pde.order == 3


class TestExceptions:
    """Test the exception hierarchy and its serialisation"""

    def test_exit_codes(self):
        """Test exit codes per branch"""
        # Assertions
        assert MalformedBoundaryConditions("x").exit_code == 2
        assert IllPosed("x").exit_code == 3
        assert BoundaryZero("x").exit_code == 4
        assert isinstance(IllPosed("x"), PosednessError)
        assert isinstance(MalformedBoundaryConditions("x"), ConfigurationError)
        assert isinstance(BoundaryZero("x"), RetryableError)
        assert isinstance(BoundaryZero("x"), NumericalError)

    def test_to_dict_serialises_complex(self):
        """Test complex context values become [re, im]"""
        error = IllPosed("bad", context={"root": 1 + 2j, "beta": 0.5})
        payload = error.to_dict()

        # Assertions
        assert payload["error_type"] == "IllPosed"
        assert payload["context"]["root"] == [1.0, 2.0]
        assert payload["exit_code"] == 3
        assert "error_timestamp" in payload["context"]

    def test_str_includes_cause(self):
        """Test the original exception is chained"""
        cause = ValueError("inner")
        error = BoundaryZero("outer", context={"rect": [0, 1, 0, 1]}, original_exception=cause)

        # Assertions
        assert error.__cause__ is cause
        assert "Caused by: ValueError: inner" in str(error)
