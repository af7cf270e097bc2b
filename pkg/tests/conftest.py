"""
Pytest configuration and fixtures
"""

import math

import numpy as np
import pytest

from core.boundary import ModeTable
from core.presets import (
    Preset,
    heat_neumann_data,
    ls_dirichlet_data,
    stokes_coupled_data,
    stokes_decoupled_data,
)

PI2 = math.pi ** 2


def sine_table(amplitude: float = 1.0) -> ModeTable:
    """sin(omega t) = (e^{i omega t} - e^{-i omega t}) / 2i."""
    return ModeTable({1: -0.5j * amplitude, -1: 0.5j * amplitude})


def cosine_table(amplitude: float = 1.0) -> ModeTable:
    return ModeTable({1: 0.5 * amplitude, -1: 0.5 * amplitude})


@pytest.fixture
def ls_worked_data():
    """omega = pi^2, g0 = sin(pi^2 t), h0 = 0"""
    return ls_dirichlet_data(PI2, g0=sine_table())


@pytest.fixture
def ls_nonresonant_data():
    """omega = 2, g0 = sin(2t), h0 = 0.3 cos(2t)"""
    return ls_dirichlet_data(2.0, g0=sine_table(), h0=cosine_table(0.3))


@pytest.fixture
def heat_data():
    """T = 1, g1 = cos(2 pi t), h1 = 0"""
    return heat_neumann_data(2 * math.pi, g1=cosine_table())


@pytest.fixture
def stokes_decoupled_sine():
    """omega = 1, g0 = sin t, h0 = h1 = 0"""
    return stokes_decoupled_data(1.0, g0=sine_table())


@pytest.fixture
def stokes_coupled_beta10():
    """T = 1, beta = 10, g0 = cos(2 pi t), h0 = 0"""
    return stokes_coupled_data(2 * math.pi, 10.0, g0=cosine_table())


@pytest.fixture
def presets():
    return list(Preset)


@pytest.fixture
def smooth_datum():
    """w0 = x (1 - x)^2, vanishing at both ends"""
    return lambda x: np.asarray(x, dtype=float) * (1 - np.asarray(x, dtype=float)) ** 2 + 0j


@pytest.fixture
def output_dir(tmp_path):
    target = tmp_path / "output"
    target.mkdir()
    return target


@pytest.fixture
def write_config(tmp_path):
    """Write a problem document and return its path."""
    import json

    def _write(document, name="problem.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    return _write
