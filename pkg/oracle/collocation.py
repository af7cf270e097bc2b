"""
Chebyshev collocation on [0, 1].

Grid points x_j = (1 - cos(pi j / M)) / 2, j = 0..M, run from 0 to 1. The
differentiation matrix is the classical Chebyshev matrix on [-1, 1]
rescaled by the affine map. Boundary conditions are imposed by
rectangular projection: the M + 1 - N rows of the PDE are collocated at
first-kind Chebyshev points through a barycentric resampling matrix and
the N boundary rows complete the square system.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np


def chebyshev_points(points: int) -> np.ndarray:
    """Second-kind points on [0, 1] in ascending order."""
    j = np.arange(points + 1)
    return (1 - np.cos(np.pi * j / points)) / 2


def first_kind_points(count: int) -> np.ndarray:
    """First-kind points (1 - cos(pi (2i + 1) / 2K)) / 2 on [0, 1]."""
    i = np.arange(count)
    return (1 - np.cos(np.pi * (2 * i + 1) / (2 * count))) / 2


def barycentric_weights(points: int) -> np.ndarray:
    """(-1)^j with halved end weights; sign is irrelevant for the ratio."""
    weights = (-1.0) ** np.arange(points + 1)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return weights


def differentiation_matrix(points: int) -> np.ndarray:
    """
    First-derivative matrix on chebyshev_points(points).

    On [-1, 1] with x~_j = cos(pi j / M) the off-diagonal entries are
    c_i / c_j (-1)^(i+j) / (x~_i - x~_j) and the diagonal follows from
    rows summing to zero. x = (1 - x~) / 2 gives d/dx = -2 d/dx~.
    """
    if points < 1:
        raise ValueError("need at least two collocation points")
    n = np.arange(points + 1)
    x_ref = np.cos(np.pi * n / points)
    c = np.hstack((2.0, np.ones(points - 1), 2.0)) * (-1.0) ** n
    gap = x_ref[:, None] - x_ref[None, :]
    matrix = np.outer(c, 1.0 / c) / (gap + np.eye(points + 1))
    matrix = matrix - np.diag(np.sum(matrix, axis=1))
    return -2.0 * matrix


def resampling_matrix(source: np.ndarray, weights: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Barycentric interpolation from source nodes to target points."""
    rows = np.zeros((targets.size, source.size))
    for row, y in enumerate(targets):
        gap = y - source
        hit = np.nonzero(np.abs(gap) < 1e-15)[0]
        if hit.size:
            rows[row, hit[0]] = 1.0
            continue
        ratios = weights / gap
        rows[row] = ratios / ratios.sum()
    return rows


@dataclass(frozen=True)
class ChebyshevGrid:
    """
    Collocation grid of degree M for an order-N operator.

    Attributes:
        points: Polynomial degree M (M + 1 nodes)
        order: Spatial order N, the number of boundary rows
    """

    points: int
    order: int

    def __post_init__(self):
        if self.points <= self.order:
            raise ValueError("collocation degree must exceed the spatial order")

    @cached_property
    def x(self) -> np.ndarray:
        return chebyshev_points(self.points)

    @cached_property
    def derivative(self) -> np.ndarray:
        return differentiation_matrix(self.points)

    def power(self, j: int) -> np.ndarray:
        return np.linalg.matrix_power(self.derivative, j)

    @cached_property
    def projection(self) -> np.ndarray:
        """(M + 1 - N) x (M + 1) resampling onto first-kind points."""
        targets = first_kind_points(self.points + 1 - self.order)
        return resampling_matrix(self.x, barycentric_weights(self.points), targets)

    def boundary_row(self, side: int, order: int) -> np.ndarray:
        index = 0 if side == 0 else self.points
        if order == 0:
            row = np.zeros(self.points + 1)
            row[index] = 1.0
            return row
        return self.power(order)[index]

    def interpolate(self, values: np.ndarray, targets) -> np.ndarray:
        """Evaluate the grid interpolant at arbitrary points in [0, 1]."""
        targets = np.atleast_1d(np.asarray(targets, dtype=float))
        matrix = resampling_matrix(self.x, barycentric_weights(self.points), targets)
        return matrix @ values

    def quadrature_weights(self) -> np.ndarray:
        """Clenshaw-Curtis weights on [0, 1]."""
        m = self.points
        theta = np.pi * np.arange(m + 1) / m
        weights = np.zeros(m + 1)
        interior = np.arange(1, m)
        v = np.ones(m - 1)
        if m % 2 == 0:
            weights[0] = weights[m] = 1.0 / (m ** 2 - 1)
            for k in range(1, m // 2):
                v -= 2 * np.cos(2 * k * theta[interior]) / (4 * k ** 2 - 1)
            v -= np.cos(m * theta[interior]) / (m ** 2 - 1)
        else:
            weights[0] = weights[m] = 1.0 / m ** 2
            for k in range(1, (m - 1) // 2 + 1):
                v -= 2 * np.cos(2 * k * theta[interior]) / (4 * k ** 2 - 1)
        weights[interior] = 2 * v / m
        return weights / 2


def max_abs(values: np.ndarray) -> float:
    return float(np.max(np.abs(values))) if np.size(values) else 0.0


def l2_norm(grid: ChebyshevGrid, values: np.ndarray) -> float:
    return math.sqrt(float(np.dot(grid.quadrature_weights(), np.abs(values) ** 2)))
