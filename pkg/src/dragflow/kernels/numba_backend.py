"""Numba-jitted stencil kernels (hot path).

Mirrors :mod:`dragflow.kernels.numpy_backend` function-for-function, but
expects arrays canonicalized to 3-d shape ``(N1, N2, N3)`` (unused trailing
axes of size 1) so one set of loops serves dim = 1, 2, 3.  Vector fields are
``(dim, N1, N2, N3)``.  Formulas are kept literally parallel to the numpy
backend; the cross-backend agreement test pins that.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NAME = "numba"

_JIT = dict(cache=True, fastmath=False)


@njit(**_JIT)
def diff(f, axis, h):
    n0, n1, n2 = f.shape
    out = np.empty_like(f)
    inv2h = 0.5 / h
    if axis == 0:
        for i in range(n0):
            ip = i + 1 if i + 1 < n0 else 0
            im = i - 1 if i >= 1 else n0 - 1
            for j in range(n1):
                for k in range(n2):
                    out[i, j, k] = (f[ip, j, k] - f[im, j, k]) * inv2h
    elif axis == 1:
        for j in range(n1):
            jp = j + 1 if j + 1 < n1 else 0
            jm = j - 1 if j >= 1 else n1 - 1
            for i in range(n0):
                for k in range(n2):
                    out[i, j, k] = (f[i, jp, k] - f[i, jm, k]) * inv2h
    else:
        for k in range(n2):
            kp = k + 1 if k + 1 < n2 else 0
            km = k - 1 if k >= 1 else n2 - 1
            for i in range(n0):
                for j in range(n1):
                    out[i, j, k] = (f[i, j, kp] - f[i, j, km]) * inv2h
    return out


@njit(**_JIT)
def diff2(f, axis, h):
    n0, n1, n2 = f.shape
    out = np.empty_like(f)
    inv4h2 = 0.25 / (h * h)
    if axis == 0:
        for i in range(n0):
            ip = (i + 2) % n0
            im = (i - 2) % n0
            for j in range(n1):
                for k in range(n2):
                    out[i, j, k] = (f[ip, j, k] - 2.0 * f[i, j, k] + f[im, j, k]) * inv4h2
    elif axis == 1:
        for j in range(n1):
            jp = (j + 2) % n1
            jm = (j - 2) % n1
            for i in range(n0):
                for k in range(n2):
                    out[i, j, k] = (f[i, jp, k] - 2.0 * f[i, j, k] + f[i, jm, k]) * inv4h2
    else:
        for k in range(n2):
            kp = (k + 2) % n2
            km = (k - 2) % n2
            for i in range(n0):
                for j in range(n1):
                    out[i, j, k] = (f[i, j, kp] - 2.0 * f[i, j, k] + f[i, j, km]) * inv4h2
    return out


@njit(**_JIT)
def grad(f, h, dim):
    out = np.empty((dim,) + f.shape, dtype=f.dtype)
    for a in range(dim):
        out[a] = diff(f, a, h)
    return out


@njit(**_JIT)
def div(F, h, dim):
    out = diff(F[0], 0, h)
    for a in range(1, dim):
        out += diff(F[a], a, h)
    return out


@njit(**_JIT)
def lap(f, h, dim):
    out = diff2(f, 0, h)
    for a in range(1, dim):
        out += diff2(f, a, h)
    return out


@njit(**_JIT)
def rhs(n, v, rho, u, h, dim, kappa, eta, mu, lam, A, gamma, gamma0, eps, delta,
        linear_diffusion):
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


@njit(**_JIT)
def helmholtz_u(w, rho, dt, mu, lam, h, dim):
    divw = div(w, h, dim)
    out = np.empty_like(w)
    for i in range(dim):
        out[i] = rho * w[i] - dt * (mu * lap(w[i], h, dim) + (mu + lam) * diff(divw, i, h))
    return out


@njit(**_JIT)
def helmholtz_rho(r, dt, eps, h, dim):
    return r - (dt * eps) * lap(r, h, dim)
