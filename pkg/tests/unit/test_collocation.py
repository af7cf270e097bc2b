"""
Unit tests for Chebyshev collocation
"""

import numpy as np
import pytest

from oracle.collocation import (
    ChebyshevGrid,
    chebyshev_points,
    differentiation_matrix,
    first_kind_points,
    l2_norm,
    max_abs,
)


class TestPoints:
    """Test node sets on [0, 1]"""

    def test_second_kind_endpoints(self):
        """Test x_0 = 0, x_M = 1 and ascending order"""
        x = chebyshev_points(10)

        # Assertions
        assert x[0] == pytest.approx(0.0, abs=1e-15)
        assert x[-1] == pytest.approx(1.0)
        assert np.all(np.diff(x) > 0)

    def test_first_kind_interior(self):
        """Test first-kind points avoid the endpoints"""
        y = first_kind_points(7)

        # Assertions
        assert y.size == 7
        assert np.all((y > 0) & (y < 1))


class TestDifferentiation:
    """Test the differentiation matrix"""

    @pytest.mark.parametrize("points", [4, 9, 16])
    def test_exact_on_low_degree(self, points):
        """Test D 1 = 0, D x = 1 and D^2 x^2 = 2"""
        x = chebyshev_points(points)
        D = differentiation_matrix(points)

        # Assertions
        assert np.max(np.abs(D @ np.ones_like(x))) < 1e-10
        assert np.max(np.abs(D @ x - 1)) < 1e-10
        assert np.max(np.abs(D @ D @ x ** 2 - 2)) < 1e-9

    def test_degree_too_small(self):
        """Test a single node is refused"""
        with pytest.raises(ValueError):
            differentiation_matrix(0)


class TestGrid:
    """Test ChebyshevGrid"""

    def test_projection_shape(self):
        """Test (M + 1 - N) x (M + 1) rows that reproduce constants"""
        grid = ChebyshevGrid(16, 3)

        # Assertions
        assert grid.projection.shape == (14, 17)
        assert np.allclose(grid.projection.sum(axis=1), 1.0, atol=1e-13)

    def test_interpolation_exact_for_polynomials(self):
        """Test x^3 - x is reproduced off the grid"""
        grid = ChebyshevGrid(12, 2)
        targets = np.array([0.013, 0.37, 0.5, 0.991])

        # Assertions
        assert np.allclose(grid.interpolate(grid.x ** 3 - grid.x, targets), targets ** 3 - targets, atol=1e-12)

    def test_boundary_rows(self):
        """Test trace and slope rows on x^2"""
        grid = ChebyshevGrid(8, 2)
        values = grid.x ** 2

        # Assertions
        assert grid.boundary_row(0, 0) @ values == pytest.approx(0.0, abs=1e-15)
        assert grid.boundary_row(1, 0) @ values == pytest.approx(1.0)
        assert grid.boundary_row(1, 1) @ values == pytest.approx(2.0, abs=1e-10)

    @pytest.mark.parametrize("points", [10, 11])
    def test_quadrature(self, points):
        """Test Clenshaw-Curtis weights on even and odd degrees"""
        grid = ChebyshevGrid(points, 2)
        weights = grid.quadrature_weights()

        # Assertions
        assert weights.sum() == pytest.approx(1.0, abs=1e-13)
        assert weights @ grid.x ** 2 == pytest.approx(1 / 3, abs=1e-13)

    def test_degree_must_exceed_order(self):
        """Test M <= N is refused"""
        with pytest.raises(ValueError):
            ChebyshevGrid(2, 2)


class TestNorms:
    """Test norm helpers"""

    def test_norms(self):
        """Test sup and L2 norms of a constant"""
        grid = ChebyshevGrid(8, 2)
        values = 2.0 * np.ones(grid.x.size)

        # Assertions
        assert max_abs(values) == 2.0
        assert max_abs(np.array([])) == 0.0
        assert l2_norm(grid, values) == pytest.approx(2.0, abs=1e-12)
