"""Time integration with stability control and positivity safeguards.

Schemes: explicit-rk2 (Heun, the default), explicit-rk4, and a first-order
IMEX split where the constant-coefficient diffusion (mu lap u,
(mu+lam) grad div u, eps lap rho) is advanced implicitly by a conjugate
gradient solve to a fixed tolerance and everything else explicitly.

The run loop works on 3-d canonicalized raw arrays and only materializes
:class:`State` objects at sample times, keeping the hot path lean.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .diagnostics import AuxRecord, DiagnosticsRecord, DiagnosticsSuite
from .errors import (DegenerateDensity, NumericalBlowup, PositivityError,
                     PositivityLost)
from .grid import PeriodicGrid, ScalarField, VectorField
from .kernels import get_backend
from .model import (DEFAULT_DENSITY_GUARD, ModelParams, State, _canon3,
                    rhs_arrays)
from .snapshot import write_state

SCHEMES = ("explicit-rk2", "explicit-rk4", "imex")

#: documented tolerance of the fixed-iteration implicit diffusion solve
IMEX_SOLVE_TOL = 1e-10


@dataclass(frozen=True)
class StepConfig:
    scheme: str = "explicit-rk2"
    cfl: float = 0.4
    dt_max: float = 1.0
    density_floor: float = 1e-10
    t_end: float = 1.0
    sample_every: float = 0.05
    freeze: tuple[str, ...] = ()      # fields whose time derivative is zeroed
    checkpoint_every: float | None = None
    imex_max_iter: int = 2000

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not self.dt_max > 0:
            raise ValueError(f"dt_max must be positive, got {self.dt_max}")
        if self.density_floor < 0:
            raise ValueError(f"density_floor must be >= 0, got {self.density_floor}")
        if self.t_end < 0:
            raise ValueError(f"t_end must be >= 0, got {self.t_end}")
        bad = set(self.freeze) - {"n", "v", "rho", "u"}
        if bad:
            raise ValueError(f"unknown freeze fields {sorted(bad)}")


@dataclass
class RunResult:
    final: State
    records: list[DiagnosticsRecord]
    aux: list[AuxRecord]
    status: str                      # completed | blowup | positivity-lost
    message: str = ""
    n_steps: int = 0
    dt_min: float = float("inf")
    dt_max_used: float = 0.0


def _stable_dt_arrays(n, v, rho, u, h: float, dim: int, p: ModelParams,
                      c: StepConfig) -> float:
    if not np.isfinite(float(n.sum()) + float(v.sum()) + float(rho.sum()) + float(u.sum())):
        return 0.0
    vmax = float(np.sqrt(np.max(np.sum(v * v, axis=0))))
    umax = float(np.sqrt(np.max(np.sum(u * u, axis=0))))
    rmax = float(rho.max())
    c2 = p.A * p.gamma * rmax ** (p.gamma - 1.0) if rmax > 0 else 0.0
    if p.delta > 0 and rmax > 0:
        c2 += p.delta * p.gamma0 * rmax ** (p.gamma0 - 1.0)
    speed = max(vmax, umax, float(np.sqrt(c2)))
    dt = c.dt_max
    if speed > 0:
        dt = min(dt, c.cfl * h / speed)

    n_min = float(n.min())
    n_max = float(n.max())
    rho_min = float(rho.min())
    if n_min <= 0 or rho_min <= 0:
        return 0.0
    nus = [p.eta * n_max / n_min, np.sqrt(p.eps) * n_max / n_min]
    if c.scheme != "imex":
        nus += [p.mu / rho_min, (p.mu + p.lam) / rho_min, p.eps]
    nu_max = max(nus)
    if nu_max > 0:
        dt = min(dt, c.cfl * h * h / (2.0 * dim * nu_max))
    return dt


def stable_dt(s: State, p: ModelParams, c: StepConfig) -> float:
    """CFL-limited step from the advective and explicit-diffusive bounds.

    dt = cfl * min( h / max(|v|, |u|, c_s),  h^2 / (2 dim nu_max) ),
    clamped by dt_max, with sound speed c_s = sqrt(P'(rho_max)).  nu_max
    collects the explicitly treated diffusion coefficients divided by the
    density they act through; for the imex scheme the implicitly solved
    operators (mu, mu+lam, eps) drop out of the bound.  Returns 0 when the
    state holds non-finite values.
    """
    return _stable_dt_arrays(s.n.values, s.v.values, s.rho.values, s.u.values,
                             s.grid.h, s.grid.dim, p, c)


class _Raw:
    """Canonicalized working copy of a state (hot-loop representation)."""

    __slots__ = ("n", "v", "rho", "u", "t")

    def __init__(self, n, v, rho, u, t):
        self.n, self.v, self.rho, self.u, self.t = n, v, rho, u, t

    @classmethod
    def from_state(cls, s: State) -> "_Raw":
        d = s.grid.dim
        return cls(_canon3(s.n.values.copy(), d), _canon3(s.v.values.copy(), d),
                   _canon3(s.rho.values.copy(), d), _canon3(s.u.values.copy(), d), s.t)

    def to_state(self, g: PeriodicGrid) -> State:
        return State(ScalarField(g, self.n.reshape(g.shape).copy(), tag="n"),
                     VectorField(g, self.v.reshape((g.dim,) + g.shape).copy()),
                     ScalarField(g, self.rho.reshape(g.shape).copy(), tag="rho"),
                     VectorField(g, self.u.reshape((g.dim,) + g.shape).copy()),
                     self.t)


def _rhs(raw: _Raw, p: ModelParams, g: PeriodicGrid, c: StepConfig, linear_diffusion=True):
    dn, dv, drho, du = rhs_arrays(raw.n, raw.v, raw.rho, raw.u, raw.t, g.h, g.dim,
                                  p, p.eps, p.delta, linear_diffusion,
                                  DEFAULT_DENSITY_GUARD)
    if c.freeze:
        if "n" in c.freeze:
            dn[:] = 0.0
        if "v" in c.freeze:
            dv[:] = 0.0
        if "rho" in c.freeze:
            drho[:] = 0.0
        if "u" in c.freeze:
            du[:] = 0.0
    return dn, dv, drho, du


def _axpy(raw: _Raw, dt: float, k, t: float) -> _Raw:
    return _Raw(raw.n + dt * k[0], raw.v + dt * k[1],
                raw.rho + dt * k[2], raw.u + dt * k[3], t)


def _cg(matvec, b, x0, tol, max_iter):
    """Plain conjugate gradients on arrays; returns (x, achieved_residual)."""
    x = x0.copy()
    r = b - matvec(x)
    d = r.copy()
    rr = float((r * r).sum())
    bnorm = float(np.sqrt((b * b).sum()))
    stop = (tol * max(bnorm, 1e-300)) ** 2
    it = 0
    while rr > stop and it < max_iter:
        ad = matvec(d)
        alpha = rr / float((d * ad).sum())
        x += alpha * d
        r -= alpha * ad
        rr_new = float((r * r).sum())
        d = r + (rr_new / rr) * d
        rr = rr_new
        it += 1
    return x, float(np.sqrt(rr)) / max(bnorm, 1e-300)


def _step_raw(raw: _Raw, dt: float, p: ModelParams, g: PeriodicGrid, c: StepConfig) -> _Raw:
    if c.scheme == "explicit-rk2":
        k1 = _rhs(raw, p, g, c)
        y1 = _axpy(raw, dt, k1, raw.t + dt)
        k2 = _rhs(y1, p, g, c)
        out = _Raw(raw.n + 0.5 * dt * (k1[0] + k2[0]),
                   raw.v + 0.5 * dt * (k1[1] + k2[1]),
                   raw.rho + 0.5 * dt * (k1[2] + k2[2]),
                   raw.u + 0.5 * dt * (k1[3] + k2[3]), raw.t + dt)
    elif c.scheme == "explicit-rk4":
        k1 = _rhs(raw, p, g, c)
        k2 = _rhs(_axpy(raw, 0.5 * dt, k1, raw.t + 0.5 * dt), p, g, c)
        k3 = _rhs(_axpy(raw, 0.5 * dt, k2, raw.t + 0.5 * dt), p, g, c)
        k4 = _rhs(_axpy(raw, dt, k3, raw.t + dt), p, g, c)
        sixth = dt / 6.0
        out = _Raw(raw.n + sixth * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0]),
                   raw.v + sixth * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1]),
                   raw.rho + sixth * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2]),
                   raw.u + sixth * (k1[3] + 2.0 * (k2[3] + k3[3]) + k4[3]), raw.t + dt)
    else:  # imex: explicit Euler on everything but the linear diffusion
        k = _rhs(raw, p, g, c, linear_diffusion=False)
        star = _axpy(raw, dt, k, raw.t + dt)
        kern = get_backend()
        rho_new = star.rho
        if p.eps > 0 and "rho" not in c.freeze:
            rho_new, res = _cg(lambda r: kern.helmholtz_rho(r, dt, p.eps, g.h, g.dim),
                               star.rho, star.rho, IMEX_SOLVE_TOL, c.imex_max_iter)
            if res > IMEX_SOLVE_TOL:
                raise NumericalBlowup(f"implicit rho solve stalled (residual {res:.3e})")
        u_new = star.u
        if "u" not in c.freeze:
            u_new, res = _cg(lambda w: kern.helmholtz_u(w, rho_new, dt, p.mu, p.lam, g.h, g.dim),
                             rho_new * star.u, star.u, IMEX_SOLVE_TOL, c.imex_max_iter)
            if res > IMEX_SOLVE_TOL:
                raise NumericalBlowup(f"implicit u solve stalled (residual {res:.3e})")
        out = _Raw(star.n, star.v, rho_new, u_new, raw.t + dt)

    probe = out.n.sum() + out.v.sum() + out.rho.sum() + out.u.sum()
    if not np.isfinite(probe):
        raise NumericalBlowup(f"non-finite state after step to t={out.t:.9g}")
    m = min(float(out.n.min()), float(out.rho.min()))
    if m < c.density_floor:
        raise PositivityLost(
            f"density minimum {m:.6g} under floor {c.density_floor:.6g} at t={out.t:.9g}")
    return out


def step(s: State, dt: float, p: ModelParams, c: StepConfig) -> State:
    """Advance one step of the configured scheme (stage-correct)."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return _step_raw(_Raw.from_state(s), dt, p, s.grid, c).to_state(s.grid)


@dataclass
class CheckpointConfig:
    directory: str
    every: float


def run(s0: State, p: ModelParams, c: StepConfig, diag: DiagnosticsSuite,
        checkpoint: CheckpointConfig | None = None) -> RunResult:
    """Integrate to t_end (or failure), sampling diagnostics at the cadence.

    Sampling always includes t = 0 and the final time; the step is clipped so
    samples land exactly on the cadence.  Failures convert to a status with
    the partial records retained.
    """
    g = s0.grid
    raw = _Raw.from_state(s0)
    records = [diag.record(s0)]
    aux = [diag.aux(s0)] if diag.track_aux else []
    result = RunResult(final=s0, records=records, aux=aux, status="completed")

    cadence = c.sample_every if c.sample_every and c.sample_every > 0 else 0.0
    next_sample = raw.t + cadence
    next_checkpoint = raw.t + checkpoint.every if checkpoint else None
    ckpt_index = 0
    tiny = 1e-12 * max(1.0, c.t_end)

    try:
        while raw.t < c.t_end - tiny:
            dt = _stable_dt_arrays(raw.n, raw.v, raw.rho, raw.u, g.h, g.dim, p, c)
            if not dt > 0:
                raise NumericalBlowup(f"stable_dt collapsed to {dt} at t={raw.t:.9g}")
            dt = min(dt, c.t_end - raw.t)
            if cadence > 0 and raw.t + dt > next_sample - tiny:
                dt = min(dt, next_sample - raw.t)
            if next_checkpoint is not None and raw.t + dt > next_checkpoint - tiny:
                dt = min(dt, next_checkpoint - raw.t)
            if not dt > 0:
                raise NumericalBlowup(f"step size collapsed at t={raw.t:.9g}")

            raw = _step_raw(raw, dt, p, g, c)
            result.n_steps += 1
            result.dt_min = min(result.dt_min, dt)
            result.dt_max_used = max(result.dt_max_used, dt)

            hit_sample = (cadence > 0 and raw.t >= next_sample - tiny) or cadence == 0.0
            if hit_sample or raw.t >= c.t_end - tiny:
                s = raw.to_state(g)
                records.append(diag.record(s))
                if diag.track_aux:
                    aux.append(diag.aux(s))
                while cadence > 0 and next_sample <= raw.t + tiny:
                    next_sample += cadence
            if next_checkpoint is not None and raw.t >= next_checkpoint - tiny:
                write_dir = os.path.join(checkpoint.directory, f"checkpoint_{ckpt_index:05d}")
                write_state(write_dir, raw.to_state(g))
                ckpt_index += 1
                while next_checkpoint <= raw.t + tiny:
                    next_checkpoint += checkpoint.every
    except (PositivityError, PositivityLost, DegenerateDensity) as exc:
        result.status = "positivity-lost"
        result.message = str(exc)
    except NumericalBlowup as exc:
        result.status = "blowup"
        result.message = str(exc)

    result.final = raw.to_state(g)
    return result
