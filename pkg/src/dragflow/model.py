"""Physical parameters and the semi-discrete right-hand sides.

The system couples a degenerate-viscosity compressible phase (n, v) to a
constant-viscosity compressible phase (rho, u) through the drag force
kappa*n*(v-u); the regularized variant adds artificial viscosity (eps) and
artificial pressure (delta) terms that vanish in the reduced case.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateDensity, NumericalBlowup, PositivityError
from .grid import PeriodicGrid, ScalarField, VectorField
from .kernels import get_backend

DEFAULT_DENSITY_GUARD = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """All physical and regularization constants.

    kappa: drag coefficient; eta: density-weighted (degenerate) viscosity;
    mu, lam: shear / bulk-related viscosities of the fluid phase; A, gamma:
    pressure law P = A*rho**gamma; gamma0, eps, delta: artificial exponent,
    viscosity and pressure.  eps = delta = 0 selects the original system.
    """

    kappa: float
    eta: float
    mu: float
    lam: float
    A: float = 1.0
    gamma: float = 2.0
    gamma0: float = 7.0
    eps: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        # kappa = 0 is admitted here so the decoupled single-phase oracle can
        # run; experiment configurations reject it (the coupled model needs
        # kappa > 0).
        if not self.kappa >= 0:
            raise ValueError(f"drag coefficient must satisfy kappa > 0, got {self.kappa}")
        if not self.eta > 0:
            raise ValueError(f"degenerate viscosity must satisfy eta > 0, got {self.eta}")
        if not self.mu > 0:
            raise ValueError(f"shear viscosity must satisfy mu > 0, got {self.mu}")
        if not 2 * self.mu + self.lam > 0:
            raise ValueError(f"viscosities must satisfy 2*mu + lambda > 0, got {2 * self.mu + self.lam}")
        if not self.A > 0:
            raise ValueError(f"pressure constant must satisfy A > 0, got {self.A}")
        if not self.gamma > 1.5:
            raise ValueError(f"adiabatic exponent must satisfy gamma > 3/2, got {self.gamma}")
        if not 0.0 <= self.eps < 0.25:
            raise ValueError(f"artificial viscosity must satisfy 0 <= eps < 1/4, got {self.eps}")
        if not 0.0 <= self.delta < 1.0:
            raise ValueError(f"artificial pressure must satisfy 0 <= delta < 1, got {self.delta}")
        if self.delta > 0 and not self.gamma0 > self.gamma + 4:
            raise ValueError(
                f"artificial exponent must satisfy gamma0 > gamma + 4, got gamma0={self.gamma0}"
            )

    @property
    def regularized(self) -> bool:
        return self.eps > 0 or self.delta > 0

    def with_(self, **kw) -> "ModelParams":
        return replace(self, **kw)


@dataclass
class State:
    """The four evolved fields plus the simulation clock."""

    n: ScalarField
    v: VectorField
    rho: ScalarField
    u: VectorField
    t: float = 0.0

    def __post_init__(self):
        g = self.grid
        for f in (self.v, self.rho, self.u):
            if f.grid != g:
                raise ValueError("all state fields must share one grid")
        self.n.tag = self.n.tag or "n"
        self.rho.tag = self.rho.tag or "rho"

    @property
    def grid(self) -> PeriodicGrid:
        return self.n.grid

    @classmethod
    def from_arrays(cls, grid: PeriodicGrid, n, v, rho, u, t: float = 0.0) -> "State":
        return cls(
            ScalarField(grid, n, tag="n"),
            VectorField(grid, v),
            ScalarField(grid, rho, tag="rho"),
            VectorField(grid, u),
            t,
        )

    @classmethod
    def constant(cls, grid: PeriodicGrid, n: float, rho: float,
                 vel: float | np.ndarray = 0.0, t: float = 0.0) -> "State":
        vel = np.broadcast_to(np.atleast_1d(np.asarray(vel, dtype=np.float64)), (grid.dim,))
        vv = np.empty((grid.dim,) + grid.shape)
        for i in range(grid.dim):
            vv[i] = vel[i]
        return cls.from_arrays(grid, np.full(grid.shape, float(n)), vv,
                               np.full(grid.shape, float(rho)), vv.copy(), t)

    def require_finite(self):
        for arr in (self.n.values, self.v.values, self.rho.values, self.u.values):
            if not np.all(np.isfinite(arr)):
                raise NumericalBlowup(f"non-finite state value at t={self.t:.9g}")


@dataclass
class StateDerivative:
    dn: ScalarField
    dv: VectorField
    drho: ScalarField
    du: VectorField


def pressure(rho: ScalarField, p: ModelParams, t: float | None = None) -> ScalarField:
    """Cellwise A*rho**gamma (+ delta*rho**gamma0 when delta > 0)."""
    rho.require_nonnegative(t=t)
    out = p.A * rho.values**p.gamma
    if p.delta > 0:
        out = out + p.delta * rho.values**p.gamma0
    return ScalarField(rho.grid, out)


def sound_speed_max(rho: ScalarField, p: ModelParams) -> float:
    """max over cells of sqrt(P'(rho)) for the acoustic CFL bound."""
    rmax = float(rho.values.max())
    if rmax <= 0.0:
        return 0.0
    c2 = p.A * p.gamma * rmax ** (p.gamma - 1.0)
    if p.delta > 0:
        c2 += p.delta * p.gamma0 * rmax ** (p.gamma0 - 1.0)
    return float(np.sqrt(c2))


def drag(n: ScalarField, v: VectorField, u: VectorField, kappa: float) -> VectorField:
    """Momentum exchange kappa*n*(v-u).

    The v-equation receives its negation and the u-equation the value itself,
    from the same array, so the two momentum sources cancel cellwise exactly.
    """
    n.require_nonnegative()
    return VectorField(n.grid, kappa * (n.values * (v.values - u.values)))


def _canon3(arr: np.ndarray, dim: int) -> np.ndarray:
    """View a field array as 3-d by appending size-1 axes (free for C order)."""
    return arr.reshape(arr.shape + (1,) * (3 - dim))


def rhs_arrays(n3, v3, rho3, u3, t, h, dim, p: ModelParams, eps, delta,
               linear_diffusion, density_guard):
    """Hot-path RHS on 3-d canonicalized arrays; shared by the integrator.

    Validates strict positivity of both densities (and the floor guarding
    n**-12 when eps > 0), then dispatches to the active kernel backend, then
    screens the output for non-finite values.
    """
    for name, arr in (("n", n3), ("rho", rho3)):
        m = arr.min()
        if not m > 0.0:
            cell = np.unravel_index(int(arr.argmin()), arr.shape)[:dim]
            raise PositivityError(name, cell, t=t, value=float(m))
    if eps > 0:
        mn = float(n3.min())
        if mn < density_guard:
            raise DegenerateDensity(mn, density_guard, t=t)
    dn, dv, drho, du = get_backend().rhs(
        n3, v3, rho3, u3, h, dim,
        float(p.kappa), float(p.eta), float(p.mu), float(p.lam),
        float(p.A), float(p.gamma), float(p.gamma0),
        float(eps), float(delta), bool(linear_diffusion),
    )
    # a NaN/inf anywhere poisons these four cheap reductions
    probe = dn.sum() + dv.sum() + drho.sum() + du.sum()
    if not np.isfinite(probe):
        raise NumericalBlowup(f"non-finite derivative at t={t:.9g}")
    return dn, dv, drho, du


def _eval_rhs(s: State, p: ModelParams, eps: float, delta: float,
              linear_diffusion: bool, density_guard: float) -> StateDerivative:
    g = s.grid
    dn, dv, drho, du = rhs_arrays(
        _canon3(s.n.values, g.dim),
        _canon3(s.v.values, g.dim),
        _canon3(s.rho.values, g.dim),
        _canon3(s.u.values, g.dim),
        s.t, g.h, g.dim, p, eps, delta, linear_diffusion, density_guard,
    )
    return StateDerivative(
        ScalarField(g, dn.reshape(g.shape)),
        VectorField(g, dv.reshape((g.dim,) + g.shape)),
        ScalarField(g, drho.reshape(g.shape)),
        VectorField(g, du.reshape((g.dim,) + g.shape)),
    )


def rhs_original(s: State, p: ModelParams, *, linear_diffusion: bool = True,
                 density_guard: float = DEFAULT_DENSITY_GUARD) -> StateDerivative:
    """Primitive-form time derivatives of the bare drag-coupled system."""
    if p.regularized:
        raise ValueError("rhs_original requires eps = delta = 0; use rhs_regularized")
    return _eval_rhs(s, p, 0.0, 0.0, linear_diffusion, density_guard)


def rhs_regularized(s: State, p: ModelParams, *, linear_diffusion: bool = True,
                    density_guard: float = DEFAULT_DENSITY_GUARD) -> StateDerivative:
    """Time derivatives including the eps/delta regularization terms.

    With eps = delta = 0 the kernel runs the identical arithmetic as
    rhs_original (the regularization blocks are skipped), so the reduction is
    bitwise.
    """
    return _eval_rhs(s, p, p.eps, p.delta, linear_diffusion, density_guard)
