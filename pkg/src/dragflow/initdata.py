"""Constrained mollifier family and regularized initial data.

The smoothing kernel is a periodized Gaussian of width

    sigma = 0.5 * max(delta**(1/(2*gamma0*dim)), delta**(1/16))

renormalized to unit mass on the grid, obeying the three construction bounds

    integral j = 1,   0 <= j <= delta**(-1/(2*gamma0)),
    |grad j| <= C * delta**(-1/8) * j   cellwise,

with the witnessed constant C reported on the kernel (analytically C is at
most 2*sqrt(dim) with this width).  All three bounds are re-verified on the
actual grid at construction time.

The 0.5 width factor keeps the kernel localized enough that shrinking delta
visibly sharpens the smoothed data; the bare max(...) width leaves the
kernel nearly flat on the unit torus for delta down to 1e-3, which buries
the delta -> 0 convergence of the kinetic moments under the density-lift
effect.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolation, VacuumMismatch
from .functionals import entropy_density
from .grid import PeriodicGrid, ScalarField, VectorField, integrate
from .kernels import numpy_backend as _ops
from .model import ModelParams

MOLLIFIER_WIDTH_SCALE = 0.5
GRADIENT_BOUND_CONST = 4.0  # cap on the witnessed constant in the |grad j| bound
DENSITY_LIFT_EXPONENT = 1.0 / 100.0  # additive lift delta**(1/100) on the particle density
DEFAULT_ETA0 = 0.01  # exponent eta0 in the momentum regularization (any small constant > 0)


@dataclass
class MollifierKernel:
    delta: float
    gamma0: float
    width: float
    values: ScalarField
    gradient_const: float  # witnessed C in |grad j| <= C * delta**(-1/8) * j

    @property
    def grid(self) -> PeriodicGrid:
        return self.values.grid


@dataclass
class RawInitialData:
    """Initial data in conserved variables (densities and momenta)."""

    n0: ScalarField
    m0: VectorField
    rho0: ScalarField
    m0_tilde: VectorField
    eta0: float = DEFAULT_ETA0

    def __post_init__(self):
        g = self.n0.grid
        for f in (self.m0, self.rho0, self.m0_tilde):
            if f.grid != g:
                raise ValueError("raw initial data fields must share one grid")
        if not self.eta0 > 0:
            raise ValueError(f"eta0 must be a small positive constant, got {self.eta0}")
        self.n0.tag = self.n0.tag or "n0"
        self.rho0.tag = self.rho0.tag or "rho0"

    @property
    def grid(self) -> PeriodicGrid:
        return self.n0.grid

    def validate_vacuum(self):
        """Momentum must vanish wherever its density vanishes."""
        for dens, mom, names in ((self.n0, self.m0, ("n0", "m0")),
                                 (self.rho0, self.m0_tilde, ("rho0", "m0_tilde"))):
            vac = dens.values <= 0.0
            if np.any(vac) and np.any(mom.values[:, vac] != 0.0):
                raise VacuumMismatch(
                    f"{names[1]} is nonzero on the vacuum set of {names[0]}")


@dataclass
class RegularizedInitialData:
    n0d: ScalarField
    rho0d: ScalarField
    v0d: VectorField
    u0d: VectorField
    delta: float = 0.0

    @property
    def grid(self) -> PeriodicGrid:
        return self.n0d.grid


def _periodized_gaussian(grid: PeriodicGrid, sigma: float) -> np.ndarray:
    """Separable sum over the image lattice, renormalized to unit mass."""
    x = grid.axis_coords()
    images = max(1, int(np.ceil(5.0 * sigma + 1.0)))
    theta = np.zeros(grid.n)
    for k in range(-images, images + 1):
        theta += np.exp(-((x + k) ** 2) / (2.0 * sigma * sigma))
    vals = theta
    for _ in range(grid.dim - 1):
        vals = np.multiply.outer(vals, theta)
    return vals / (vals.sum() * grid.cell_volume)


def build_mollifier(delta: float, grid: PeriodicGrid, gamma0: float) -> MollifierKernel:
    """Periodized Gaussian kernel verifying the three construction bounds."""
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    sigma = MOLLIFIER_WIDTH_SCALE * max(delta ** (1.0 / (2.0 * gamma0 * grid.dim)),
                                        delta ** (1.0 / 16.0))
    vals = _periodized_gaussian(grid, sigma)

    mass = vals.sum() * grid.cell_volume
    if abs(mass - 1.0) > 1e-12:
        raise ConstraintViolation(f"kernel mass {mass!r} not renormalized to 1")
    sup_bound = delta ** (-1.0 / (2.0 * gamma0))
    sup = float(vals.max())
    if vals.min() < 0.0 or sup > sup_bound:
        raise ConstraintViolation(
            f"kernel range [{vals.min():.3g}, {sup:.6g}] violates "
            f"0 <= j <= {sup_bound:.6g} (delta={delta}, N={grid.n})")
    gmag2 = np.zeros_like(vals)
    for a in range(grid.dim):
        d = _ops.diff(vals, a, grid.h)
        gmag2 += d * d
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.sqrt(gmag2) / (delta ** (-0.125) * vals)
    witnessed = float(np.nanmax(np.where(vals > 0, ratio, np.inf)))
    if not witnessed <= GRADIENT_BOUND_CONST:
        raise ConstraintViolation(
            f"gradient bound fails: witnessed constant {witnessed:.4g} exceeds "
            f"{GRADIENT_BOUND_CONST} (grid too coarse for sigma={sigma:.4g})")
    return MollifierKernel(delta, gamma0, sigma, ScalarField(grid, vals), witnessed)


def convolve(f: ScalarField, j: MollifierKernel) -> ScalarField:
    """Periodic discrete convolution (f * j) via FFT; preserves the mean.

    Nonnegative inputs stay nonnegative (FFT roundoff of order 1e-16 is
    clipped).
    """
    if f.grid != j.grid:
        raise ValueError("field and kernel must share one grid")
    g = f.grid
    axes = tuple(range(g.dim))
    out = np.fft.irfftn(np.fft.rfftn(f.values) * np.fft.rfftn(j.values.values),
                        s=g.shape, axes=axes) * g.cell_volume
    if f.values.min() >= 0.0:
        np.maximum(out, 0.0, out=out)
    return ScalarField(g, out)


def _convolve_components(arr: np.ndarray, j: MollifierKernel) -> np.ndarray:
    g = j.grid
    axes = tuple(range(g.dim))
    jhat = np.fft.rfftn(j.values.values)
    out = np.empty_like(arr)
    for i in range(arr.shape[0]):
        out[i] = np.fft.irfftn(np.fft.rfftn(arr[i]) * jhat, s=g.shape,
                               axes=axes) * g.cell_volume
    return out


def regularize(raw: RawInitialData, delta: float, j: MollifierKernel) -> RegularizedInitialData:
    """Mollify raw data and lift it off vacuum.

    n0d  = (sqrt(n0) * j)^2 + delta**(1/100)
    v0d  = [(n0^{-(1+eta0)/(2+eta0)} m0) * j] / n0d^{1/(2+eta0)}
    rho0d = rho0 * j + delta
    u0d  = [(m0_tilde / sqrt(rho0)) * j] / sqrt(rho0d)

    with the 0/0 -> 0 convention inside the pre-convolution factors on the
    respective vacuum sets (the raw data keeps momenta zero there).
    """
    raw.n0.require_nonnegative()
    raw.rho0.require_nonnegative()
    raw.validate_vacuum()
    g = raw.grid

    n0d = convolve(ScalarField(g, np.sqrt(raw.n0.values)), j).values ** 2 \
        + delta**DENSITY_LIFT_EXPONENT

    beta = (1.0 + raw.eta0) / (2.0 + raw.eta0)
    pos_n = raw.n0.values > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.where(pos_n, raw.n0.values, 1.0) ** (-beta)
    mom_n = np.where(pos_n, factor, 0.0) * raw.m0.values
    v0d = _convolve_components(mom_n, j) / n0d ** (1.0 / (2.0 + raw.eta0))

    rho0d = convolve(raw.rho0, j).values + delta

    pos_r = raw.rho0.values > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_sqrt = np.where(pos_r, 1.0 / np.sqrt(np.where(pos_r, raw.rho0.values, 1.0)), 0.0)
    u0d = _convolve_components(inv_sqrt * raw.m0_tilde.values, j) / np.sqrt(rho0d)

    return RegularizedInitialData(
        ScalarField(g, n0d, tag="n"),
        ScalarField(g, rho0d, tag="rho"),
        VectorField(g, v0d),
        VectorField(g, u0d),
        delta=delta,
    )


def initial_energy(reg: RegularizedInitialData, p: ModelParams) -> float:
    """Total energy of the regularized data, including the delta-pressure and
    the eps * n**-12 well when those coefficients are active."""
    g = reg.grid
    for f in (reg.n0d, reg.rho0d):
        if not f.values.min() > 0:
            raise ValueError(f"regularized data must be strictly positive ({f.tag})")
    n, rho = reg.n0d.values, reg.rho0d.values
    v2 = np.sum(reg.v0d.values**2, axis=0)
    u2 = np.sum(reg.u0d.values**2, axis=0)
    e = 0.5 * n * v2 + entropy_density(n) + 0.5 * rho * u2 \
        + p.A * rho**p.gamma / (p.gamma - 1.0)
    if p.delta > 0:
        e += p.delta * rho**p.gamma0 / (p.gamma0 - 1.0)
    if p.eps > 0:
        e += p.eps * n**-12.0
    return integrate(ScalarField(g, e))


def consistency_distances(raw: RawInitialData, reg: RegularizedInitialData,
                          gamma: float) -> dict[str, float]:
    """Lp distances between the regularized and raw data.

    Returns the five tracked quantities expected to shrink as delta -> 0 for
    smooth positive data, plus the reported-only 2+eta0 moment distance.
    """
    g = raw.grid
    vol = g.cell_volume

    def lp(arr, pexp):
        return float((np.abs(arr) ** pexp).sum() * vol) ** (1.0 / pexp)

    pos_n = raw.n0.values > 0.0
    pos_r = raw.rho0.values > 0.0
    m0_2 = np.sum(raw.m0.values**2, axis=0)
    mt_2 = np.sum(raw.m0_tilde.values**2, axis=0)
    kin_n_raw = np.where(pos_n, m0_2 / np.where(pos_n, raw.n0.values, 1.0), 0.0)
    kin_r_raw = np.where(pos_r, mt_2 / np.where(pos_r, raw.rho0.values, 1.0), 0.0)

    sqrt_n0d = np.sqrt(reg.n0d.values)
    sqrt_n0 = np.sqrt(raw.n0.values)
    grad_err = 0.0
    for a in range(g.dim):
        d = _ops.diff(sqrt_n0d, a, g.h) - _ops.diff(sqrt_n0, a, g.h)
        grad_err += float((d * d).sum() * vol)

    v0d2 = np.sum(reg.v0d.values**2, axis=0)
    u0d2 = np.sum(reg.u0d.values**2, axis=0)
    speed_raw = np.where(pos_n, np.sqrt(m0_2) / np.where(pos_n, raw.n0.values, 1.0), 0.0)
    mom_hi_raw = np.where(pos_n, raw.n0.values * speed_raw ** (2.0 + raw.eta0), 0.0)
    mom_hi_reg = reg.n0d.values * v0d2 ** (0.5 * (2.0 + raw.eta0))

    return {
        "n_l1": lp(reg.n0d.values - raw.n0.values, 1.0),
        "grad_sqrt_n_l2": np.sqrt(grad_err),
        "kinetic_n_l1": lp(reg.n0d.values * v0d2 - kin_n_raw, 1.0),
        "rho_lgamma": lp(reg.rho0d.values - raw.rho0.values, gamma),
        "kinetic_rho_l1": lp(reg.rho0d.values * u0d2 - kin_r_raw, 1.0),
        "mom_moment_l1": lp(mom_hi_reg - mom_hi_raw, 1.0),
    }
