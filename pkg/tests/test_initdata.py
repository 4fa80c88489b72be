import numpy as np
import pytest
from hypothesis import given, strategies as st

from dragflow.errors import ConstraintViolation, VacuumMismatch
from dragflow.generators import random_smooth, sine_perturbation, two_bump
from dragflow.grid import PeriodicGrid, ScalarField, VectorField, integrate
from dragflow.initdata import (GRADIENT_BOUND_CONST, RawInitialData,
                               build_mollifier, consistency_distances, convolve,
                               initial_energy, regularize)
from dragflow.model import ModelParams

GAMMA0 = 7.0
P0 = dict(kappa=1.0, eta=0.1, mu=0.1, lam=0.0, A=1.0, gamma=2.0)


def smoothed_step(grid):
    x = grid.axis_coords()
    vals = 1.0 / (1.0 + np.exp(-40 * (x - 0.3))) - 1.0 / (1.0 + np.exp(-40 * (x - 0.7)))
    return ScalarField(grid, vals)


class TestMollifierConstruction:
    def test_unit_mass(self):
        j = build_mollifier(0.1, PeriodicGrid(1, 128), GAMMA0)
        assert integrate(j.values) == pytest.approx(1.0, abs=1e-12)

    def test_sup_bound_across_deltas(self):
        g = PeriodicGrid(1, 256)
        for delta in (0.5, 0.1, 0.01):
            j = build_mollifier(delta, g, GAMMA0)
            assert j.values.values.max() <= delta ** (-1.0 / (2.0 * GAMMA0))
            assert j.values.values.min() >= 0.0

    def test_gradient_bound_witnessed(self):
        for dim, n in ((1, 128), (2, 64)):
            for delta in (0.5, 0.1, 0.01, 0.001):
                j = build_mollifier(delta, PeriodicGrid(dim, n), GAMMA0)
                assert 0.0 <= j.gradient_const <= GRADIENT_BOUND_CONST

    def test_kernel_is_even(self):
        j = build_mollifier(0.05, PeriodicGrid(1, 64), GAMMA0).values.values
        reflected = np.concatenate([j[:1], j[1:][::-1]])
        assert np.allclose(j, reflected, rtol=0, atol=1e-15 * j.max())

    def test_too_coarse_grid_rejected(self):
        # for tiny delta the kernel collapses under the grid scale and the
        # cellwise gradient bound cannot hold
        with pytest.raises(ConstraintViolation):
            build_mollifier(1e-30, PeriodicGrid(1, 8), GAMMA0)

    def test_delta_range_checked(self):
        g = PeriodicGrid(1, 32)
        for bad in (0.0, 1.0, -0.5):
            with pytest.raises(ValueError):
                build_mollifier(bad, g, GAMMA0)


class TestConvolve:
    def test_constant_fixed_point(self):
        g = PeriodicGrid(1, 64)
        j = build_mollifier(0.1, g, GAMMA0)
        out = convolve(ScalarField.constant(g, 2.5), j)
        assert np.allclose(out.values, 2.5, rtol=0, atol=1e-12)

    @given(st.integers(0, 2**31 - 1))
    def test_mean_preserved(self, seed):
        g = PeriodicGrid(1, 64)
        j = build_mollifier(0.2, g, GAMMA0)
        f = ScalarField(g, np.random.default_rng(seed).normal(size=g.shape))
        assert integrate(convolve(f, j)) == pytest.approx(integrate(f), abs=1e-12)

    @given(st.integers(0, 2**31 - 1))
    def test_nonnegativity_preserved(self, seed):
        g = PeriodicGrid(1, 64)
        j = build_mollifier(0.05, g, GAMMA0)
        f = ScalarField(g, np.random.default_rng(seed).random(g.shape))
        assert convolve(f, j).values.min() >= 0.0

    def test_reflection_commutes(self):
        g = PeriodicGrid(1, 64)
        j = build_mollifier(0.1, g, GAMMA0)
        f = smoothed_step(g)

        def reflect(a):
            return np.concatenate([a[:1], a[1:][::-1]])

        a = convolve(ScalarField(g, reflect(f.values)), j).values
        b = reflect(convolve(f, j).values)
        assert np.allclose(a, b, rtol=0, atol=1e-13)

    def test_l2_error_decreases_with_delta(self):
        g = PeriodicGrid(1, 128)
        f = smoothed_step(g)
        errs = []
        for delta in (0.2, 0.1, 0.05, 0.025):
            j = build_mollifier(delta, g, GAMMA0)
            errs.append(np.sqrt(((convolve(f, j).values - f.values) ** 2).sum() * g.cell_volume))
        assert all(b < a for a, b in zip(errs, errs[1:]))


class TestRegularize:
    def test_constant_data(self):
        g = PeriodicGrid(1, 64)
        delta = 0.1
        raw = RawInitialData(ScalarField.constant(g, 1.0), VectorField.zero(g),
                             ScalarField.constant(g, 1.0), VectorField.zero(g))
        reg = regularize(raw, delta, build_mollifier(delta, g, GAMMA0))
        assert np.allclose(reg.n0d.values, 1.0 + delta ** (1.0 / 100.0), rtol=0, atol=1e-12)
        assert np.allclose(reg.rho0d.values, 1.0 + delta, rtol=0, atol=1e-12)
        assert np.all(reg.v0d.values == 0.0)
        assert np.all(reg.u0d.values == 0.0)

    def test_vacuum_data_lifted(self):
        g = PeriodicGrid(1, 128)
        raw = two_bump(g, vacuum=True)
        assert raw.n0.values.min() == 0.0  # genuine vacuum region
        delta = 0.05
        reg = regularize(raw, delta, build_mollifier(delta, g, GAMMA0))
        assert reg.rho0d.values.min() >= delta
        assert reg.n0d.values.min() >= delta ** (1.0 / 100.0)
        assert reg.n0d.values.min() > 0 and reg.rho0d.values.min() > 0

    def test_vacuum_momentum_mismatch_rejected(self):
        g = PeriodicGrid(1, 64)
        raw = two_bump(g, vacuum=True)
        bad_m = raw.m0.values.copy()
        bad_m[0, np.argmin(raw.n0.values)] = 0.1  # momentum on the vacuum set
        bad = RawInitialData(raw.n0, VectorField(g, bad_m), raw.rho0, raw.m0_tilde)
        with pytest.raises(VacuumMismatch):
            regularize(bad, 0.05, build_mollifier(0.05, g, GAMMA0))

    @given(st.integers(0, 2**31 - 1))
    def test_positivity_preserving(self, seed):
        g = PeriodicGrid(1, 64)
        raw = random_smooth(g, seed=seed, cutoff_mode=2, amplitude=0.3)
        reg = regularize(raw, 0.02, build_mollifier(0.02, g, GAMMA0))
        assert reg.n0d.values.min() > 0
        assert reg.rho0d.values.min() > 0

    def test_distances_shrink_along_halvings(self):
        g = PeriodicGrid(1, 128)
        raw = sine_perturbation(g, 0.1, 1)
        series = {}
        for delta in (0.2, 0.1, 0.05, 0.025, 0.0125):
            reg = regularize(raw, delta, build_mollifier(delta, g, GAMMA0))
            for k, v in consistency_distances(raw, reg, 2.0).items():
                series.setdefault(k, []).append(v)
        for name, vals in series.items():
            assert all(b < a for a, b in zip(vals, vals[1:])), name


class TestInitialEnergy:
    def _unit_reg(self, g):
        raw = RawInitialData(ScalarField.constant(g, 1.0), VectorField.zero(g),
                             ScalarField.constant(g, 1.0), VectorField.zero(g))
        return raw

    def test_constant_value(self):
        # n0d = rho0d = 1, zero velocities, A=1, gamma=2: entropy part 0,
        # pressure part 1/(gamma-1) = 1
        from dragflow.initdata import RegularizedInitialData

        g = PeriodicGrid(1, 32)
        reg = RegularizedInitialData(ScalarField.constant(g, 1.0, tag="n"),
                                     ScalarField.constant(g, 1.0, tag="rho"),
                                     VectorField.zero(g), VectorField.zero(g))
        p = ModelParams(**P0)
        assert initial_energy(reg, p) == pytest.approx(1.0, abs=1e-13)
        assert initial_energy(reg, p.with_(eps=0.1)) == pytest.approx(1.1, abs=1e-13)

    def test_bounded_along_delta_sequence(self):
        g = PeriodicGrid(1, 128)
        raw = random_smooth(g, seed=11, cutoff_mode=2, amplitude=0.2)
        es = []
        for delta in (0.2, 0.1, 0.05, 0.025, 0.0125):
            reg = regularize(raw, delta, build_mollifier(delta, g, GAMMA0))
            es.append(initial_energy(reg, ModelParams(**{**P0, "delta": delta})))
        assert all(np.isfinite(es))
        assert max(es) <= 10.0 * (abs(es[0]) + 1.0)

    def test_eta0_must_be_positive(self):
        g = PeriodicGrid(1, 32)
        with pytest.raises(ValueError):
            RawInitialData(ScalarField.constant(g, 1.0), VectorField.zero(g),
                           ScalarField.constant(g, 1.0), VectorField.zero(g), eta0=0.0)
