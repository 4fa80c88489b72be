"""Built-in initial-data generators.

Each generator returns :class:`RawInitialData` (densities and momenta); use
:func:`raw_to_state` to obtain the primitive-variable state evolved by the
integrator.  All generators are deterministic for a fixed parameter set (and
seed, where one applies).
"""

from __future__ import annotations

import numpy as np

from .errors import ZeroMass
from .grid import PeriodicGrid, ScalarField, VectorField
from .initdata import RawInitialData, RegularizedInitialData
from .model import State


def raw_to_state(raw: RawInitialData, t: float = 0.0) -> State:
    """Primitive state v = m0/n0, u = m0_tilde/rho0 (strictly positive data)."""
    if raw.n0.values.min() <= 0 or raw.rho0.values.min() <= 0:
        raise ZeroMass("direct primitive conversion needs strictly positive densities; "
                       "mollify the data instead")
    return State(
        ScalarField(raw.grid, raw.n0.values.copy(), tag="n"),
        VectorField(raw.grid, raw.m0.values / raw.n0.values),
        ScalarField(raw.grid, raw.rho0.values.copy(), tag="rho"),
        VectorField(raw.grid, raw.m0_tilde.values / raw.rho0.values),
        t,
    )


def regularized_to_state(reg: RegularizedInitialData, t: float = 0.0) -> State:
    return State(
        ScalarField(reg.grid, reg.n0d.values.copy(), tag="n"),
        VectorField(reg.grid, reg.v0d.values.copy()),
        ScalarField(reg.grid, reg.rho0d.values.copy(), tag="rho"),
        VectorField(reg.grid, reg.u0d.values.copy()),
        t,
    )


def _raw(grid, n0, v0, rho0, u0, eta0=None) -> RawInitialData:
    kw = {} if eta0 is None else {"eta0": eta0}
    return RawInitialData(
        ScalarField(grid, n0, tag="n0"),
        VectorField(grid, n0 * v0),
        ScalarField(grid, rho0, tag="rho0"),
        VectorField(grid, rho0 * u0),
        **kw,
    )


def equilibrium(grid: PeriodicGrid, n_const: float = 1.0, rho_const: float = 1.0,
                u_const: float | list[float] = 0.0) -> RawInitialData:
    """Constant state with both phase velocities equal (a discrete steady state)."""
    uc = np.broadcast_to(np.atleast_1d(np.asarray(u_const, dtype=np.float64)), (grid.dim,))
    vel = np.empty((grid.dim,) + grid.shape)
    for i in range(grid.dim):
        vel[i] = uc[i]
    return _raw(grid, np.full(grid.shape, float(n_const)), vel,
                np.full(grid.shape, float(rho_const)), vel.copy())


def sine_perturbation(grid: PeriodicGrid, amplitude: float = 0.1, mode: int = 1) -> RawInitialData:
    """Counter-phased sinusoidal perturbation of both phases along axis 0.

    n0 = 1 + a sin(2 pi m x),  v0 = a cos(2 pi m x) e1,
    rho0 = 1 - a sin(2 pi m x), u0 = -a cos(2 pi m x) e1.

    The drag force is active from t = 0 and the total initial momentum is 0.
    """
    if not 0.0 <= amplitude < 1.0:
        raise ValueError(f"amplitude must lie in [0, 1) to keep densities positive, got {amplitude}")
    x = grid.meshgrid()[0]
    s = np.sin(2.0 * np.pi * mode * x)
    c = np.cos(2.0 * np.pi * mode * x)
    v0 = np.zeros((grid.dim,) + grid.shape)
    u0 = np.zeros((grid.dim,) + grid.shape)
    v0[0] = amplitude * c
    u0[0] = -amplitude * c
    return _raw(grid, 1.0 + amplitude * s, v0, 1.0 - amplitude * s, u0)


def _bump(r2: np.ndarray, width: float) -> np.ndarray:
    """Compactly supported C^3 bump of unit height and radius ``width``."""
    q = 1.0 - r2 / (width * width)
    return np.where(q > 0.0, q, 0.0) ** 4


def _periodic_r2(grid: PeriodicGrid, center: tuple[float, ...]) -> np.ndarray:
    r2 = np.zeros(grid.shape)
    for a, x in enumerate(grid.meshgrid()):
        d = np.abs(x - center[a])
        d = np.minimum(d, 1.0 - d)
        r2 += d * d
    return r2


def two_bump(grid: PeriodicGrid, vacuum: bool = False, width: float = 0.18,
             height: float = 1.0, floor: float = 0.5) -> RawInitialData:
    """Two separated density bumps per phase, at rest.

    With ``vacuum=True`` the background is exactly zero between the bumps
    (admissible raw data for the mollification pipeline only).
    """
    base = 0.0 if vacuum else floor
    c1 = (0.25,) * grid.dim
    c2 = (0.75,) * grid.dim
    n0 = base + height * (_bump(_periodic_r2(grid, c1), width)
                          + _bump(_periodic_r2(grid, c2), width))
    c3 = (0.5,) * grid.dim
    c4 = ((0.0,) * grid.dim)
    rho0 = base + height * (_bump(_periodic_r2(grid, c3), width)
                            + _bump(_periodic_r2(grid, c4), width))
    zero = np.zeros((grid.dim,) + grid.shape)
    return _raw(grid, n0, zero, rho0, zero.copy())


def random_smooth(grid: PeriodicGrid, seed: int = 0, cutoff_mode: int = 3,
                  amplitude: float = 0.1) -> RawInitialData:
    """Band-limited random perturbation of the unit constant state.

    Four independent smooth fields (n, rho, and one per velocity component of
    each phase) built from modes with max-norm wavenumber <= cutoff_mode;
    deterministic for a fixed seed.
    """
    if not 0.0 <= amplitude < 0.5:
        raise ValueError(f"amplitude must lie in [0, 0.5), got {amplitude}")
    rng = np.random.default_rng(seed)
    mesh = grid.meshgrid()

    def band_limited() -> np.ndarray:
        out = np.zeros(grid.shape)
        ranges = [range(-cutoff_mode, cutoff_mode + 1)] * grid.dim
        for k in np.ndindex(*[2 * cutoff_mode + 1] * grid.dim):
            kvec = [kk - cutoff_mode for kk in k]
            if all(kk == 0 for kk in kvec):
                continue
            phase = 2.0 * np.pi * sum(kv * x for kv, x in zip(kvec, mesh))
            out += rng.normal() * np.cos(phase + 2.0 * np.pi * rng.random())
        m = np.abs(out).max()
        return out / m if m > 0 else out

    n0 = 1.0 + amplitude * band_limited()
    rho0 = 1.0 + amplitude * band_limited()
    v0 = np.empty((grid.dim,) + grid.shape)
    u0 = np.empty((grid.dim,) + grid.shape)
    for i in range(grid.dim):
        v0[i] = amplitude * band_limited()
        u0[i] = amplitude * band_limited()
    return _raw(grid, n0, v0, rho0, u0)


GENERATORS = {
    "equilibrium": equilibrium,
    "sine-perturbation": sine_perturbation,
    "two-bump": two_bump,
    "random-smooth": random_smooth,
}


def make_raw(grid: PeriodicGrid, kind: str, **params) -> RawInitialData:
    try:
        gen = GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown generator {kind!r}; choose from {sorted(GENERATORS)}") from None
    return gen(grid, **params)
