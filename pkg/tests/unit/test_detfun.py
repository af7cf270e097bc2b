"""
Unit tests for the Stokes boundary determinants and the zero search
"""

import math

import numpy as np
import pytest

from core.exceptions import BoundaryZero
from spectral.detfun import (
    ALPHA,
    DeterminantFunction,
    Rectangle,
    count_zeros,
    disk_winding,
    eigen_search_rect,
    eval_delta,
    export_heatmap,
    locate_zeros,
    predict_zero_seeds,
    real_zeros,
    winding_number,
)


def _distance_to_lines(z: complex, offset: float) -> float:
    """Distance from z to the nearest line alpha^j (i offset + R)."""
    return min(abs((z / ALPHA ** j).imag - offset) for j in range(3))


class TestDeterminantFunction:
    """Test evaluation of Delta"""

    @pytest.mark.parametrize("delta", [DeterminantFunction.uncoupled(), DeterminantFunction.coupled(10.0)])
    def test_rotation_symmetry(self, delta):
        """Test Delta(alpha k) = Delta(k) / alpha"""
        k = 2.3 - 0.7j

        # Assertions
        assert delta(ALPHA * k) == pytest.approx(delta(k) / ALPHA, rel=1e-12)

    @pytest.mark.parametrize("beta", [1.0, 10.0, -0.5])
    def test_split_form_agrees(self, beta):
        """Test the sin/cos/exp form of the coupled determinant"""
        delta = DeterminantFunction.coupled(beta)
        ks = np.array([0.3, 2.0 + 1.0j, -4.5 + 0.2j, 7.1])

        # Assertions
        assert np.allclose(delta(ks), delta.split_form(ks), rtol=0, atol=1e-10 * np.max(delta.scale(ks)))

    def test_derivative(self):
        """Test the analytic derivative against a central difference"""
        delta = DeterminantFunction.coupled(3.0)
        k, h = 1.7 + 0.4j, 1e-6
        numeric = (delta(k + h) - delta(k - h)) / (2 * h)

        # Assertions
        assert delta.derivative(k) == pytest.approx(numeric, rel=1e-7)

    def test_coupled_requires_beta(self):
        """Test the coupled family needs beta"""
        with pytest.raises(ValueError):
            DeterminantFunction("coupled")

    def test_split_form_only_for_coupled(self):
        """Test the uncoupled family has no split form"""
        with pytest.raises(ValueError):
            DeterminantFunction.uncoupled().split_form(1.0)

    def test_eval_delta_cross_check(self):
        """Test cross-checked evaluation returns the direct value"""
        delta = DeterminantFunction.coupled(10.0)

        # Assertions
        assert eval_delta(delta, 1.0 + 1.0j, cross_check=True) == delta(1.0 + 1.0j)


class TestWindingNumber:
    """Test the argument principle on simple functions"""

    def test_polynomial(self):
        """Test z^2 winds twice around the unit square"""
        rect = Rectangle(-1, 1, -1, 1)
        count = winding_number(lambda z: z ** 2, lambda z: np.abs(z) ** 2 + 1.0, rect.vertices())

        # Assertions
        assert count == 2

    def test_zero_on_contour(self):
        """Test a zero on the boundary raises BoundaryZero"""
        rect = Rectangle(0, 1, -1, 1)

        with pytest.raises(BoundaryZero):
            winding_number(lambda z: z, lambda z: np.ones_like(np.abs(z)), rect.vertices())


class TestOrigin:
    """Test the multiple zero at k = 0"""

    @pytest.mark.parametrize("delta", [DeterminantFunction.uncoupled(), DeterminantFunction.coupled(10.0)])
    def test_double_zero(self, delta):
        """Test the origin counts two"""
        # Assertions
        assert count_zeros(delta, Rectangle(-0.5, 0.5, -0.5, 0.5)) == 2

    def test_fifth_order_for_beta_minus_one(self):
        """Test beta = -1 raises the order to five"""
        delta = DeterminantFunction.coupled(-1.0)

        # Assertions
        assert count_zeros(delta, Rectangle(-0.5, 0.5, -0.5, 0.5)) == 5

    @pytest.mark.parametrize(
        "delta, order",
        [(DeterminantFunction.uncoupled(), 2), (DeterminantFunction.coupled(10.0), 2), (DeterminantFunction.coupled(-1.0), 5)],
    )
    def test_origin_order(self, delta, order):
        """Test the known order matches a small disk"""
        # Assertions
        assert delta.origin_order == order
        assert disk_winding(delta, 0j, 0.05) == order

    @pytest.mark.parametrize(
        "rect",
        [Rectangle(-0.5, 0.5, -0.5, 0.5), Rectangle(-0.4, 0.6, -0.45, 0.55)],
    )
    def test_locate_around_origin(self, rect):
        """Test the double zero is reported once with its order"""
        zeros = locate_zeros(DeterminantFunction.uncoupled(), rect)

        # Assertions
        assert zeros.count == 2
        assert len(zeros.zeros) == 1
        assert zeros.zeros[0].location == 0
        assert zeros.zeros[0].multiplicity == 2

    def test_locate_fifth_order(self):
        """Test beta = -1 reports a fifth-order zero at the origin"""
        zeros = locate_zeros(DeterminantFunction.coupled(-1.0), Rectangle(-0.5, 0.5, -0.5, 0.5))

        # Assertions
        assert [(z.location, z.multiplicity) for z in zeros.zeros] == [(0j, 5)]

    @pytest.mark.slow
    def test_locate_wide_symmetric_region(self):
        """Test a region centred on the origin with many other zeros"""
        zeros = locate_zeros(DeterminantFunction.coupled(10.0), Rectangle(-20.0, 20.0, -20.0, 20.0))

        # Assertions
        assert zeros.total_multiplicity() == zeros.count
        assert zeros.zeros[0].location == 0 and zeros.zeros[0].multiplicity == 2
        assert all(z.multiplicity == 1 for z in zeros.zeros[1:])
        assert all(z.residual < 1e-8 for z in zeros.zeros)


class TestUncoupledSpectrum:
    """Test the decoupled Stokes spectral bound"""

    def test_smallest_imaginary_axis_zero(self):
        """Test the first nonzero zero on the negative imaginary axis has i lambda^3 < -64"""
        delta = DeterminantFunction.uncoupled()
        seeds = predict_zero_seeds(delta, range(1, 3))
        zeros = locate_zeros(delta, Rectangle(-1.0, 1.0, -6.0, -0.5), seeds=seeds)

        # Assertions
        assert zeros.count == 1
        lam = zeros.locations()[0]
        assert abs(lam.real) < 1e-8
        assert lam.imag < 0
        assert (1j * lam ** 3).real < -64
        assert abs(lam - seeds[0]) < 0.05

    def test_seeds(self):
        """Test predictors on the negative imaginary axis"""
        seeds = predict_zero_seeds(DeterminantFunction.uncoupled(), range(0, 3))

        # Assertions
        assert len(seeds) == 2
        assert seeds[0] == pytest.approx(-1j * (2 * math.pi / math.sqrt(3)) * (7 / 6))


class TestCoupledSpectrum:
    """Test the coupled Stokes zero asymptotics"""

    def test_beta_one_real_zeros(self):
        """Test the m-th positive real zero lies within 0.05 of (2m - 1/3) pi, m = 5..15"""
        delta = DeterminantFunction.coupled(1.0)
        lower, upper = (2 * 5 - 4 / 3) * math.pi, (2 * 15 + 2 / 3) * math.pi
        roots = real_zeros(delta, lower, upper)

        # Assertions
        assert len(roots) == 11
        for m, root in zip(range(5, 16), roots):
            assert abs(root - (2 * m - 1 / 3) * math.pi) < 0.05

    def test_beta_ten_zeros_near_lines(self):
        """Test located zeros with 10 <= |k| <= 40 lie within 0.5 of the rotated lines"""
        delta = DeterminantFunction.coupled(10.0)
        offset = math.log(10.0)
        seeds = predict_zero_seeds(delta, range(-8, 9))
        zeros = locate_zeros(delta, Rectangle(10.0, 40.0, offset - 2.0, offset + 2.0), seeds=seeds)
        in_band = [z for z in zeros.locations() if 10 <= abs(z) <= 40]

        # Assertions
        assert len(in_band) >= 4
        for z in in_band:
            assert _distance_to_lines(z, offset) < 0.5

    def test_negative_beta_seed_shift(self):
        """Test negative beta shifts predictors by pi"""
        seeds = predict_zero_seeds(DeterminantFunction.coupled(-2.0), [1])

        # Assertions
        assert seeds[0].real == pytest.approx((2 - 1 / 3) * math.pi - math.pi)
        assert seeds[0].imag == pytest.approx(math.log(2.0))

    def test_no_real_zeros_for_large_beta(self):
        """Test |beta| > 1 leaves no real zero besides k = 0"""
        delta = DeterminantFunction.coupled(10.0)

        # Assertions
        assert real_zeros(delta, 0.5, 40.0) == []
        assert real_zeros(delta, -40.0, -0.5) == []

    @pytest.mark.slow
    def test_reflection_symmetry(self):
        """Test the zero set is invariant under z -> -conj(z) for real beta"""
        delta = DeterminantFunction.coupled(10.0)
        zeros = locate_zeros(delta, eigen_search_rect(delta, 2))
        region = zeros.region
        locations = zeros.locations()
        interior = [
            z for z in locations
            if abs(z) > 1e-8
            and abs(z.real) <= region.x_max - 0.5
            and region.y_min + 0.5 <= z.imag <= region.y_max - 0.5
        ]

        # Assertions
        assert zeros.total_multiplicity() == zeros.count
        assert interior
        for z in interior:
            assert min(abs(w + z.conjugate()) for w in locations) < 1e-6

    def test_search_rect(self):
        """Test the eigenvalue search rectangle"""
        rect = eigen_search_rect(DeterminantFunction.coupled(10.0), 2)

        # Assertions
        assert rect.x_max == pytest.approx(14 * math.pi / 3)
        assert rect.y_max == pytest.approx(math.log(10.0) + 2.0)


class TestCountVersusLocate:
    """Test argument-principle counts agree with located zeros"""

    def test_counts_add_over_abutting_rectangles(self):
        """Test count(R) = count(left) + count(right) across a shared side"""
        delta = DeterminantFunction.coupled(10.0)
        whole = count_zeros(delta, Rectangle(1.0, 13.0, 0.5, 4.5))
        left = count_zeros(delta, Rectangle(1.0, 7.3, 0.5, 4.5))
        right = count_zeros(delta, Rectangle(7.3, 13.0, 0.5, 4.5))

        # Assertions
        assert whole >= 1
        assert whole == left + right

    @pytest.mark.slow
    @pytest.mark.parametrize("delta", [DeterminantFunction.uncoupled(), DeterminantFunction.coupled(10.0)])
    def test_random_rectangles(self, delta):
        """Test 20 random rectangles per family"""
        rng = np.random.default_rng(2024)
        for _ in range(20):
            center = complex(*rng.uniform(-12.0, 12.0, size=2))
            half_width, half_height = rng.uniform(1.5, 3.0, size=2)
            rect = Rectangle.around(center, float(half_width), float(half_height))
            zeros = locate_zeros(delta, rect, seeds=predict_zero_seeds(delta, range(-6, 7)))

            # Assertions
            assert zeros.total_multiplicity() == zeros.count
            assert count_zeros(delta, zeros.region) == zeros.count
            assert all(zeros.region.contains(z) for z in zeros.locations())
            assert all(z.residual < 1e-8 for z in zeros.zeros)


class TestRectangleAndHeatmap:
    """Test region helpers and heatmap export"""

    def test_split_longer_side(self):
        """Test splitting cuts across the longer side"""
        left, right = Rectangle(0, 4, 0, 1).split(0.5)

        # Assertions
        assert left.x_max == right.x_min == 2
        assert left.height == 1

    def test_degenerate(self):
        """Test empty rectangles are refused"""
        with pytest.raises(ValueError):
            Rectangle(1, 1, 0, 1)

    def test_heatmap_shape(self):
        """Test rows follow y and columns follow x"""
        grid = export_heatmap(DeterminantFunction.uncoupled(), Rectangle(-2, 2, -1, 1), (5, 3))

        # Assertions
        assert grid.values.shape == (3, 5)
        assert np.all(np.abs(grid.values) <= 1.0)
        assert grid.xs[0] == -2 and grid.ys[-1] == 1

    def test_heatmap_resolution(self):
        """Test the resolution lower bound"""
        with pytest.raises(ValueError):
            export_heatmap(DeterminantFunction.uncoupled(), Rectangle(-2, 2, -1, 1), (1, 3))
