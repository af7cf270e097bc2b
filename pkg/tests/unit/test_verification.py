"""
Unit tests for the decomposition error budget
"""

import math

import numpy as np
import pytest

from core.presets import Preset, heat_neumann_data
from oracle.stepper import Discretisation, step_solve
from oracle.verification import ABSOLUTE_FLOOR, SAFETY_FACTOR, TimeCheck, spatial_estimate


class TestTimeCheck:
    """Test the combined temporal and spatial estimate"""

    def test_estimate_sums_parts(self):
        """Test the spatial part widens the tolerance"""
        check = TimeCheck(t=0.1, error=1.5e-6, temporal=1e-7, spatial=5e-7)

        # Assertions
        assert check.estimate == pytest.approx(6e-7)
        assert check.passed
        assert not TimeCheck(t=0.1, error=1.5e-6, temporal=1e-7).passed

    def test_floor(self):
        """Test a vanishing estimate still admits the absolute floor"""
        # Assertions
        assert TimeCheck(t=0.1, error=ABSOLUTE_FLOOR, temporal=0.0).passed
        assert not TimeCheck(t=0.1, error=2 * ABSOLUTE_FLOOR, temporal=0.0).passed
        assert SAFETY_FACTOR == 3.0


class TestSpatialEstimate:
    """Test the half-degree comparison"""

    def test_resolved_mode(self):
        """Test cos(pi x) is resolved on both grids at the same step"""
        data = heat_neumann_data(2 * math.pi)
        disc = Discretisation(points=24, dt=1e-3)
        fine = step_solve(Preset.HEAT_NEUMANN.pde, data, lambda x: np.cos(math.pi * x), 0.1, disc)
        rough = step_solve(
            Preset.HEAT_NEUMANN.pde, data, lambda x: np.cos(math.pi * x), 0.1, disc.spatially_coarsened()
        )

        # Assertions
        assert spatial_estimate(fine, rough, 0.1) < 1e-6
