"""Periodic uniform grid, fields, and the discrete differential calculus.

The domain is the unit torus [0,1)^dim sampled with N points per axis, so the
total cell volume N^dim * h^dim is exactly 1.  All operators are second-order
centered differences on the collocated grid; integration is the plain
cell-sum (trapezoid rule on the torus, spectrally accurate for band-limited
periodic integrands).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PositivityError
from .kernels import numpy_backend as _ops


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform discretization of the unit torus T^dim."""

    dim: int
    n: int

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.n < 8:
            raise ValueError(f"points_per_axis must be >= 8, got {self.n}")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    @property
    def num_cells(self) -> int:
        return self.n**self.dim

    def axis_coords(self) -> np.ndarray:
        """Cell coordinates along one axis: 0, h, 2h, ..., 1-h."""
        return np.arange(self.n) * self.h

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        x = self.axis_coords()
        return np.meshgrid(*([x] * self.dim), indexing="ij")


def _check_values(grid: PeriodicGrid, values: np.ndarray, rank: int) -> np.ndarray:
    expected = (grid.dim,) * rank + grid.shape
    values = np.ascontiguousarray(values, dtype=np.float64)
    if values.shape != expected:
        raise ValueError(f"field shape {values.shape} does not match grid shape {expected}")
    return values


@dataclass
class ScalarField:
    grid: PeriodicGrid
    values: np.ndarray
    tag: str | None = None

    def __post_init__(self):
        self.values = _check_values(self.grid, self.values, 0)

    @classmethod
    def from_function(cls, grid: PeriodicGrid, fn, tag: str | None = None) -> "ScalarField":
        return cls(grid, np.asarray(fn(*grid.meshgrid()), dtype=np.float64), tag=tag)

    @classmethod
    def constant(cls, grid: PeriodicGrid, c: float, tag: str | None = None) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(c)), tag=tag)

    def require_finite(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"field {self.tag or ''} contains non-finite values")

    def require_nonnegative(self, t: float | None = None):
        """On-demand nonnegativity check for density-tagged fields."""
        m = self.values.min()
        if m < 0.0:
            cell = np.unravel_index(int(self.values.argmin()), self.values.shape)
            raise PositivityError(self.tag or "scalar field", cell, t=t, value=m)


@dataclass
class VectorField:
    grid: PeriodicGrid
    values: np.ndarray  # shape (dim,) + grid.shape

    def __post_init__(self):
        self.values = _check_values(self.grid, self.values, 1)

    @classmethod
    def zero(cls, grid: PeriodicGrid) -> "VectorField":
        return cls(grid, np.zeros((grid.dim,) + grid.shape))

    def component(self, i: int) -> ScalarField:
        return ScalarField(self.grid, self.values[i])

    def magnitude_squared(self) -> ScalarField:
        return ScalarField(self.grid, np.sum(self.values * self.values, axis=0))


@dataclass
class TensorField:
    grid: PeriodicGrid
    values: np.ndarray  # shape (dim, dim) + grid.shape
    symmetric: bool = False

    def __post_init__(self):
        self.values = _check_values(self.grid, self.values, 2)

    def check_symmetry(self, atol: float = 0.0):
        if self.symmetric:
            swapped = np.swapaxes(self.values, 0, 1)
            if not np.allclose(self.values, swapped, rtol=0.0, atol=atol):
                raise ValueError("tensor flagged symmetric has asymmetric components")


def gradient(f: ScalarField) -> VectorField:
    g = f.grid
    return VectorField(g, _ops.grad(f.values, g.h, g.dim))


def divergence(F: VectorField) -> ScalarField:
    g = F.grid
    return ScalarField(g, _ops.div(F.values, g.h, g.dim))


def laplacian(f: ScalarField) -> ScalarField:
    g = f.grid
    return ScalarField(g, _ops.lap(f.values, g.h, g.dim))


def deformation(v: VectorField) -> TensorField:
    """Symmetric part of the velocity Jacobian, D(v)_ij = (d_i v_j + d_j v_i)/2."""
    g = v.grid
    out = np.empty((g.dim, g.dim) + g.shape)
    for i in range(g.dim):
        out[i, i] = _ops.diff(v.values[i], i, g.h)
        for j in range(i + 1, g.dim):
            out[i, j] = 0.5 * (_ops.diff(v.values[j], i, g.h) + _ops.diff(v.values[i], j, g.h))
            out[j, i] = out[i, j]
    return TensorField(g, out, symmetric=True)


def antisym(v: VectorField) -> TensorField:
    """Antisymmetric part of the velocity Jacobian, A(v)_ij = (d_i v_j - d_j v_i)/2."""
    g = v.grid
    out = np.zeros((g.dim, g.dim) + g.shape)
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            out[i, j] = 0.5 * (_ops.diff(v.values[j], i, g.h) - _ops.diff(v.values[i], j, g.h))
            out[j, i] = -out[i, j]
    return TensorField(g, out, symmetric=False)


def integrate(f: ScalarField | np.ndarray, grid: PeriodicGrid | None = None) -> float:
    """Cell-sum quadrature over the torus; exact for grid-constant fields."""
    if isinstance(f, ScalarField):
        return float(f.values.sum() * f.grid.cell_volume)
    if grid is None:
        raise TypeError("integrate of a raw array needs the grid")
    return float(np.asarray(f).sum() * grid.cell_volume)
