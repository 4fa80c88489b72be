import os

import numpy as np
import pytest

from dragflow.diagnostics import DiagnosticsSuite
from dragflow.generators import raw_to_state, sine_perturbation
from dragflow.grid import PeriodicGrid
from dragflow.integrators import (CheckpointConfig, StepConfig, run, stable_dt,
                                  step)
from dragflow.model import ModelParams, State
from dragflow.snapshot import read_state, write_state

P0 = dict(kappa=1.0, eta=0.1, mu=0.1, lam=0.0, A=1.0, gamma=2.0)


def perturbed_state(n=64, amplitude=0.1):
    return raw_to_state(sine_perturbation(PeriodicGrid(1, n), amplitude, 1))


def suite_for(s, p, aux=True):
    return DiagnosticsSuite.from_initial_state(s, p, track_aux=aux)


class TestStepConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            StepConfig(scheme="rk9")
        with pytest.raises(ValueError):
            StepConfig(cfl=0.0)
        with pytest.raises(ValueError):
            StepConfig(cfl=1.5)
        with pytest.raises(ValueError):
            StepConfig(dt_max=0.0)
        with pytest.raises(ValueError):
            StepConfig(freeze=("vorticity",))


class TestStableDt:
    def test_pure_diffusion_formula(self):
        # zero velocities, mu = 1, rho = 1, d = 1, N = 64, cfl = 0.5:
        # the diffusive bound gives dt = 0.5 * h^2 / 2 = h^2 / 4
        g = PeriodicGrid(1, 64)
        s = State.constant(g, 1.0, 1.0, 0.0)
        p = ModelParams(kappa=1.0, eta=1e-12, mu=1.0, lam=0.0, A=1e-12, gamma=2.0)
        c = StepConfig(cfl=0.5, dt_max=10.0)
        assert stable_dt(s, p, c) == pytest.approx(g.h**2 / 4.0, rel=1e-12)

    def test_doubling_n_quarters_diffusive_dt(self):
        p = ModelParams(kappa=1.0, eta=1e-12, mu=1.0, lam=0.0, A=1e-12, gamma=2.0)
        c = StepConfig(cfl=0.5, dt_max=10.0)
        dts = [stable_dt(State.constant(PeriodicGrid(1, n), 1.0, 1.0), p, c)
               for n in (64, 128)]
        assert dts[0] / dts[1] == pytest.approx(4.0, rel=1e-12)

    def test_clamped_by_dt_max(self):
        g = PeriodicGrid(1, 64)
        s = State.constant(g, 1.0, 1.0, 0.0)
        c = StepConfig(cfl=0.5, dt_max=1e-9)
        assert stable_dt(s, ModelParams(**P0), c) == 1e-9

    def test_nonfinite_state_gives_zero(self):
        g = PeriodicGrid(1, 64)
        s = State.constant(g, 1.0, 1.0, 0.0)
        s.v.values[0, 3] = np.inf
        assert stable_dt(s, ModelParams(**P0), StepConfig()) == 0.0

    def test_imex_drops_implicit_diffusion_from_bound(self):
        g = PeriodicGrid(1, 64)
        s = State.constant(g, 1.0, 1.0, 0.0)
        p = ModelParams(kappa=1.0, eta=1e-12, mu=5.0, lam=0.0, A=1e-12, gamma=2.0)
        dt_exp = stable_dt(s, p, StepConfig(scheme="explicit-rk2", dt_max=10.0))
        dt_imex = stable_dt(s, p, StepConfig(scheme="imex", dt_max=10.0))
        assert dt_imex > 50 * dt_exp


class TestStep:
    def test_equilibrium_unchanged(self):
        g = PeriodicGrid(1, 32)
        s = State.constant(g, 1.0, 1.0, 0.5)
        p = ModelParams(**P0)
        out = step(s, 1e-3, p, StepConfig())
        for a, b in ((out.n, s.n), (out.rho, s.rho)):
            assert np.abs(a.values - b.values).max() <= 1e-14
        assert np.abs(out.v.values - s.v.values).max() <= 1e-14

    @pytest.mark.parametrize("scheme", ["explicit-rk2", "imex"])
    def test_heat_decay_matches_analytic(self, scheme):
        # frozen velocities, constant n: rho obeys the heat equation
        # rho_t = eps * lap(rho); mode-1 amplitude decays by e^(-4 pi^2 eps t)
        N = 256
        g = PeriodicGrid(1, N)
        x = g.axis_coords()
        p = ModelParams(**{**P0, "eps": 0.1})
        s0 = State.from_arrays(g, np.ones(N), np.zeros((1, N)),
                               1.0 + 0.1 * np.sin(2 * np.pi * x), np.zeros((1, N)))
        c = StepConfig(scheme=scheme, cfl=0.4, t_end=0.1, sample_every=0.1,
                       freeze=("v", "u"))
        res = run(s0, p, c, suite_for(s0, p, aux=False))
        assert res.status == "completed"
        amp = 2.0 * np.sum(res.final.rho.values * np.sin(2 * np.pi * x)) * g.h
        exact = 0.1 * np.exp(-4 * np.pi**2 * p.eps * 0.1)
        assert amp == pytest.approx(exact, rel=1e-4)

    def test_rk2_vs_rk4_richardson(self):
        # the schemes differ by O(dt^2): halving dt shrinks the gap ~4x
        s0 = perturbed_state()
        p = ModelParams(**P0)
        gaps = []
        for dt in (2e-4, 1e-4, 5e-5):
            finals = []
            for scheme in ("explicit-rk2", "explicit-rk4"):
                c = StepConfig(scheme=scheme, cfl=1.0, dt_max=dt, t_end=0.05,
                               sample_every=1.0)
                finals.append(run(s0, p, c, suite_for(s0, p, aux=False)).final)
            gaps.append(max(np.abs(finals[0].n.values - finals[1].n.values).max(),
                            np.abs(finals[0].v.values - finals[1].v.values).max()))
        for a, b in zip(gaps, gaps[1:]):
            assert 3.3 <= a / b <= 4.7

    def test_step_size_robustness(self):
        # halving dt shrinks the rk2 error ~4x against a fine reference
        s0 = perturbed_state()
        p = ModelParams(**P0)

        def final_at(dt):
            c = StepConfig(cfl=1.0, dt_max=dt, t_end=0.05, sample_every=1.0)
            return run(s0, p, c, suite_for(s0, p, aux=False)).final

        ref = final_at(6.25e-6)
        errs = [np.abs(final_at(dt).v.values - ref.v.values).max()
                for dt in (2e-4, 1e-4, 5e-5)]
        for a, b in zip(errs, errs[1:]):
            assert a / b >= 3.0

    def test_positive_dt_required(self):
        s = State.constant(PeriodicGrid(1, 32), 1.0, 1.0)
        with pytest.raises(ValueError):
            step(s, 0.0, ModelParams(**P0), StepConfig())


class TestRun:
    def test_zero_t_end_yields_single_record(self):
        s0 = perturbed_state()
        p = ModelParams(**P0)
        res = run(s0, p, StepConfig(t_end=0.0), suite_for(s0, p))
        assert res.status == "completed"
        assert len(res.records) == 1 and res.records[0].t == 0.0
        assert np.array_equal(res.final.n.values, s0.n.values)

    def test_equilibrium_run_constant_diagnostics(self):
        g = PeriodicGrid(1, 64)
        s = State.constant(g, 1.0, 1.0, 0.25)
        p = ModelParams(**P0)
        res = run(s, p, StepConfig(t_end=0.5, sample_every=0.05), suite_for(s, p))
        assert res.status == "completed"
        r0 = res.records[0]
        for r in res.records:
            assert abs(r.E - r0.E) <= 1e-10
            assert abs(r.E_tilde - r0.E_tilde) <= 1e-10
            assert r.dist_eq <= 1e-10

    def test_records_strictly_increasing_in_time(self):
        s0 = perturbed_state()
        p = ModelParams(**P0)
        res = run(s0, p, StepConfig(t_end=0.3, sample_every=0.05), suite_for(s0, p))
        ts = [r.t for r in res.records]
        assert all(b > a for a, b in zip(ts, ts[1:]))
        assert ts[0] == 0.0
        assert ts[-1] == pytest.approx(0.3, abs=1e-12)

    def test_mass_exactness_over_run(self):
        s0 = perturbed_state(n=64)
        p = ModelParams(**P0)
        res = run(s0, p, StepConfig(t_end=0.5, sample_every=0.05), suite_for(s0, p))
        r0 = res.records[0]
        for r in res.records:
            assert abs(r.mass_n - r0.mass_n) / r0.mass_n <= 1e-11
            assert abs(r.mass_rho - r0.mass_rho) / r0.mass_rho <= 1e-11

    def test_regularized_mass_budget(self):
        # mass drift of n equals the time integral of the artificial source
        # minus the gradient sink, to within O(dt)
        g = PeriodicGrid(1, 64)
        p = ModelParams(**{**P0, "eps": 0.05})
        s0 = raw_to_state(sine_perturbation(g, 0.1, 1))
        res = run(s0, p, StepConfig(t_end=0.25, sample_every=0.005), suite_for(s0, p))
        assert res.status == "completed"
        ts = np.array([a.t for a in res.aux])
        src = np.array([a["eps_ninv12"] for a in res.aux])
        sink = np.array([a["eps_bd_grad"] for a in res.aux])
        budget = float(np.trapezoid(src - sink, ts))
        got = res.records[-1].mass_n - res.records[0].mass_n
        assert abs(got - budget) <= 5.0 * res.dt_max_used

    def test_determinism_bitwise(self):
        s0 = perturbed_state()
        p = ModelParams(**P0)
        c = StepConfig(t_end=0.3, sample_every=0.05)
        a = run(s0, p, c, suite_for(s0, p))
        b = run(s0, p, c, suite_for(s0, p))
        assert a.n_steps == b.n_steps
        for ra, rb in zip(a.records, b.records):
            assert ra.t == rb.t and ra.E == rb.E and ra.D == rb.D
            assert np.array_equal(ra.momentum_total, rb.momentum_total)
        for f in ("n", "v", "rho", "u"):
            assert np.array_equal(getattr(a.final, f).values, getattr(b.final, f).values)

    def test_positivity_lost_status(self):
        s0 = perturbed_state(amplitude=0.4)
        p = ModelParams(**P0)
        c = StepConfig(t_end=1.0, sample_every=0.1, density_floor=0.9)
        res = run(s0, p, c, suite_for(s0, p))
        assert res.status == "positivity-lost"
        assert len(res.records) >= 1  # partial records retained

    def test_blowup_status_on_nonfinite_state(self):
        s0 = perturbed_state()
        s0.v.values[0, 5] = np.nan
        p = ModelParams(**P0)
        res = run(s0, p, StepConfig(t_end=0.5), suite_for(s0, p))
        assert res.status == "blowup"

    def test_checkpoint_restart_is_bitwise(self, tmp_path):
        s0 = perturbed_state()
        p = ModelParams(**P0)
        full = run(s0, p, StepConfig(t_end=0.5, sample_every=0.05), suite_for(s0, p))

        half = run(s0, p, StepConfig(t_end=0.25, sample_every=0.05), suite_for(s0, p))
        ck = tmp_path / "ck"
        write_state(ck, half.final)
        resumed = read_state(ck)
        assert resumed.t == half.final.t
        rest = run(resumed, p, StepConfig(t_end=0.5, sample_every=0.05),
                   suite_for(resumed, p))
        for f in ("n", "v", "rho", "u"):
            assert np.array_equal(getattr(rest.final, f).values,
                                  getattr(full.final, f).values)

    @pytest.mark.parametrize("dim,n", [(2, 16), (3, 8)])
    def test_multidimensional_runs_keep_invariants(self, dim, n):
        from dragflow.diagnostics import evaluate_invariants
        from dragflow.generators import random_smooth

        g = PeriodicGrid(dim, n)
        p = ModelParams(**P0)
        s0 = raw_to_state(random_smooth(g, seed=5, cutoff_mode=1, amplitude=0.05))
        suite = suite_for(s0, p)
        res = run(s0, p, StepConfig(t_end=0.05, sample_every=0.01, dt_max=2e-4), suite)
        assert res.status == "completed"
        inv = evaluate_invariants(res.records, res.aux, suite, g.h, res.dt_max_used)
        assert all(v["passed"] for v in inv.values()), inv

    def test_checkpoints_written_at_cadence(self, tmp_path):
        s0 = perturbed_state()
        p = ModelParams(**P0)
        ck = CheckpointConfig(str(tmp_path), 0.1)
        res = run(s0, p, StepConfig(t_end=0.3, sample_every=0.1), suite_for(s0, p),
                  checkpoint=ck)
        assert res.status == "completed"
        dirs = sorted(d for d in os.listdir(tmp_path) if d.startswith("checkpoint_"))
        assert len(dirs) == 3
        st = read_state(tmp_path / dirs[0])
        assert st.t == pytest.approx(0.1, abs=1e-12)
