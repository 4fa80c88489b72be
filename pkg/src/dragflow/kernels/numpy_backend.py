"""Pure-numpy stencil kernels (reference backend).

All derivative operators are second-order centered differences with periodic
wraparound, realized through ``np.roll``.  The centered difference matrix is
antisymmetric under the plain cell-sum inner product, so discrete integration
by parts holds exactly; the whole energy/mass bookkeeping of the solver leans
on that property.

Arrays may have any shape; only axes ``< dim`` are differentiated.  The numba
backend mirrors these functions one-for-one on 3-d views.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"


def diff(f: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Centered first difference along ``axis``: (f[i+1] - f[i-1]) / (2h)."""
    inv2h = 0.5 / h
    return (np.roll(f, -1, axis=axis) - np.roll(f, 1, axis=axis)) * inv2h


def diff2(f: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Composition diff(diff(f)) collapsed to one wide stencil.

    (f[i+2] - 2 f[i] + f[i-2]) / (2h)^2 -- keeping the exact identity
    laplacian == divergence(gradient(.)).
    """
    inv4h2 = 0.25 / (h * h)
    return (np.roll(f, -2, axis=axis) - 2.0 * f + np.roll(f, 2, axis=axis)) * inv4h2


def grad(f: np.ndarray, h: float, dim: int) -> np.ndarray:
    out = np.empty((dim,) + f.shape, dtype=f.dtype)
    for a in range(dim):
        out[a] = diff(f, a, h)
    return out


def div(F: np.ndarray, h: float, dim: int) -> np.ndarray:
    out = diff(F[0], 0, h)
    for a in range(1, dim):
        out += diff(F[a], a, h)
    return out


def lap(f: np.ndarray, h: float, dim: int) -> np.ndarray:
    out = diff2(f, 0, h)
    for a in range(1, dim):
        out += diff2(f, a, h)
    return out


def rhs(
    n: np.ndarray,
    v: np.ndarray,
    rho: np.ndarray,
    u: np.ndarray,
    h: float,
    dim: int,
    kappa: float,
    eta: float,
    mu: float,
    lam: float,
    A: float,
    gamma: float,
    gamma0: float,
    eps: float,
    delta: float,
    linear_diffusion: bool,
):
    """Time derivatives of (n, v, rho, u) in primitive variables.

    With ``eps == delta == 0`` this is the bare drag-coupled system; the
    regularization terms are added only when their coefficients are nonzero,
    so the reduced case runs the identical arithmetic.  Densities evolve in
    conservative flux form (their integrals telescope to exact invariants);
    velocities evolve as (momentum source)/density.

    ``linear_diffusion=False`` omits the constant-coefficient diffusion
    (mu*lap u, (mu+lam)*grad div u, eps*lap rho) for IMEX splitting.
    """
    # densities: conservative fluxes
    dn = -div(n * v, h, dim)
    drho = -div(rho * u, h, dim)

    # Jacobians: jac_v[a, i] = d v_i / d x_a
    jac_v = np.empty((dim,) + v.shape, dtype=v.dtype)
    jac_u = np.empty((dim,) + u.shape, dtype=u.dtype)
    for a in range(dim):
        for i in range(dim):
            jac_v[a, i] = diff(v[i], a, h)
            jac_u[a, i] = diff(u[i], a, h)

    drag = np.empty_like(v)
    for i in range(dim):
        drag[i] = kappa * (n * (v[i] - u[i]))

    # particle-phase momentum source
    Fv = np.empty_like(v)
    for i in range(dim):
        adv = v[0] * jac_v[0, i]
        for a in range(1, dim):
            adv += v[a] * jac_v[a, i]
        visc = diff(n * 0.5 * (jac_v[i, 0] + jac_v[0, i]), 0, h)
        for j in range(1, dim):
            visc += diff(n * 0.5 * (jac_v[i, j] + jac_v[j, i]), j, h)
        Fv[i] = -n * adv - diff(n, i, h) - drag[i] + eta * visc

    # fluid-phase momentum source
    P = A * rho**gamma
    if delta > 0.0:
        P = P + delta * rho**gamma0
    divu = div(u, h, dim)
    Fu = np.empty_like(u)
    for i in range(dim):
        adv = u[0] * jac_u[0, i]
        for a in range(1, dim):
            adv += u[a] * jac_u[a, i]
        Fu[i] = -rho * adv - diff(P, i, h) + drag[i]
        if linear_diffusion:
            Fu[i] += mu * lap(u[i], h, dim) + (mu + lam) * diff(divu, i, h)

    if eps > 0.0:
        s = np.sqrt(n)
        gs = grad(s, h, dim)
        w2 = gs[0] * gs[0]
        for a in range(1, dim):
            w2 += gs[a] * gs[a]
        n_m12 = n**-12.0
        dn += eps * (s * lap(s, h, dim) + s * div(w2 * gs, h, dim) + n_m12)

        v2 = v[0] * v[0]
        u2 = u[0] * u[0]
        for a in range(1, dim):
            v2 += v[a] * v[a]
            u2 += u[a] * u[a]
        vcubed = v2**1.5
        u8 = u2**4.0
        sqrt_eps = np.sqrt(eps)
        for i in range(dim):
            gv = gs[0] * jac_v[0, i]
            nvisc = diff(n * jac_v[0, i], 0, h)
            for j in range(1, dim):
                gv += gs[j] * jac_v[j, i]
                nvisc += diff(n * jac_v[j, i], j, h)
            Fv[i] += (
                -eps * (n * (vcubed * v[i]) + n_m12 * v[i])
                + sqrt_eps * nvisc
                + eps * (s * w2) * gv
            )

        grho = grad(rho, h, dim)
        for i in range(dim):
            cross = jac_u[0, i] * grho[0]
            for j in range(1, dim):
                cross += jac_u[j, i] * grho[j]
            Fu[i] += -eps * (u8 * u[i]) + eps * cross
        if linear_diffusion:
            drho += eps * lap(rho, h, dim)

    dv = Fv / n
    du = Fu / rho
    return dn, dv, drho, du


def helmholtz_u(w: np.ndarray, rho: np.ndarray, dt: float, mu: float, lam: float,
                h: float, dim: int) -> np.ndarray:
    """Matvec of the rho-weighted implicit operator for the u diffusion solve.

    (rho I - dt*(mu lap + (mu+lam) grad div)) w -- symmetric positive
    definite, so conjugate gradients apply.
    """
    divw = div(w, h, dim)
    out = np.empty_like(w)
    for i in range(dim):
        out[i] = rho * w[i] - dt * (mu * lap(w[i], h, dim) + (mu + lam) * diff(divw, i, h))
    return out


def helmholtz_rho(r: np.ndarray, dt: float, eps: float, h: float, dim: int) -> np.ndarray:
    """Matvec of (I - dt*eps*lap) for the implicit rho diffusion solve."""
    return r - (dt * eps) * lap(r, h, dim)
