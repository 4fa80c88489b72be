"""Field snapshot files and state checkpoints.

One file holds one scalar field.  Layout (documented contract, plain text):

    line 1:   dim N t name
    line 2..: N**dim cell values in C order, one per line, printed with
              17 significant digits (float64 round-trips exactly).

Vector fields are stored componentwise as ``<name>_0 .. <name>_{dim-1}``.
A state checkpoint is a directory holding ``n``, ``v_*``, ``rho``, ``u_*``;
raw initial data uses the names ``n0``, ``m0_*``, ``rho0``, ``m0t_*``.
"""

from __future__ import annotations

import os

import numpy as np

from .grid import PeriodicGrid, ScalarField, VectorField
from .initdata import RawInitialData
from .model import State

_FMT = "%.17e"


def write_field(path, f: ScalarField, name: str, t: float = 0.0):
    g = f.grid
    with open(path, "w") as fh:
        fh.write(f"{g.dim} {g.n} {_FMT % t} {name}\n")
        np.savetxt(fh, f.values.reshape(-1), fmt=_FMT)


def read_field(path) -> tuple[ScalarField, str, float]:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4:
            raise ValueError(f"malformed snapshot header in {path}: expected 'dim N t name'")
        dim, n, t, name = int(header[0]), int(header[1]), float(header[2]), header[3]
        vals = np.loadtxt(fh, dtype=np.float64, ndmin=1)
    grid = PeriodicGrid(dim, n)
    if vals.size != grid.num_cells:
        raise ValueError(f"snapshot {path} holds {vals.size} values, grid needs {grid.num_cells}")
    return ScalarField(grid, vals.reshape(grid.shape)), name, t


def _write_vector(directory, base: str, F: VectorField, t: float):
    for i in range(F.grid.dim):
        write_field(os.path.join(directory, f"{base}_{i}.dat"), F.component(i), f"{base}_{i}", t)


def _read_vector(directory, base: str, grid: PeriodicGrid) -> VectorField:
    comps = np.empty((grid.dim,) + grid.shape)
    for i in range(grid.dim):
        f, _, _ = read_field(os.path.join(directory, f"{base}_{i}.dat"))
        if f.grid != grid:
            raise ValueError(f"component {base}_{i} grid mismatch")
        comps[i] = f.values
    return VectorField(grid, comps)


def write_state(directory, s: State):
    os.makedirs(directory, exist_ok=True)
    write_field(os.path.join(directory, "n.dat"), s.n, "n", s.t)
    write_field(os.path.join(directory, "rho.dat"), s.rho, "rho", s.t)
    _write_vector(directory, "v", s.v, s.t)
    _write_vector(directory, "u", s.u, s.t)


def read_state(directory) -> State:
    n, _, t = read_field(os.path.join(directory, "n.dat"))
    rho, _, _ = read_field(os.path.join(directory, "rho.dat"))
    g = n.grid
    return State(ScalarField(g, n.values, tag="n"),
                 _read_vector(directory, "v", g),
                 ScalarField(g, rho.values, tag="rho"),
                 _read_vector(directory, "u", g), t)


def write_raw(directory, raw: RawInitialData):
    os.makedirs(directory, exist_ok=True)
    write_field(os.path.join(directory, "n0.dat"), raw.n0, "n0", 0.0)
    write_field(os.path.join(directory, "rho0.dat"), raw.rho0, "rho0", 0.0)
    _write_vector(directory, "m0", raw.m0, 0.0)
    _write_vector(directory, "m0t", raw.m0_tilde, 0.0)


def read_raw(directory) -> RawInitialData:
    n0, _, _ = read_field(os.path.join(directory, "n0.dat"))
    rho0, _, _ = read_field(os.path.join(directory, "rho0.dat"))
    g = n0.grid
    return RawInitialData(ScalarField(g, n0.values, tag="n0"),
                          _read_vector(directory, "m0", g),
                          ScalarField(g, rho0.values, tag="rho0"),
                          _read_vector(directory, "m0t", g))


def is_state_dir(directory) -> bool:
    return os.path.exists(os.path.join(directory, "n.dat"))


def is_raw_dir(directory) -> bool:
    return os.path.exists(os.path.join(directory, "n0.dat"))
