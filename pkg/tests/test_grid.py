import numpy as np
import pytest
from hypothesis import given, strategies as st

from dragflow.grid import (PeriodicGrid, ScalarField, TensorField, VectorField,
                           antisym, deformation, divergence, gradient, integrate,
                           laplacian)


def sin_field(grid, mode=1):
    x = grid.meshgrid()[0]
    return ScalarField(grid, np.sin(2 * np.pi * mode * x))


class TestGridBasics:
    def test_unit_volume(self):
        for dim in (1, 2, 3):
            g = PeriodicGrid(dim, 16)
            assert g.cell_volume * g.num_cells == pytest.approx(1.0, abs=0)

    def test_rejects_bad_dim_and_n(self):
        with pytest.raises(ValueError):
            PeriodicGrid(4, 16)
        with pytest.raises(ValueError):
            PeriodicGrid(1, 4)

    def test_field_shape_checked(self):
        g = PeriodicGrid(2, 8)
        with pytest.raises(ValueError):
            ScalarField(g, np.zeros(8))
        with pytest.raises(ValueError):
            VectorField(g, np.zeros((3, 8, 8)))


class TestGradient:
    def test_constant_gives_zero(self):
        g = PeriodicGrid(2, 16)
        out = gradient(ScalarField.constant(g, 5.0))
        assert np.all(out.values == 0.0)

    def test_sine_matches_analytic_and_order(self):
        # second-order convergence toward 2*pi*cos(2*pi*x)
        errs = {}
        for n in (64, 128, 256):
            g = PeriodicGrid(1, n)
            x = g.axis_coords()
            got = gradient(sin_field(g)).values[0]
            errs[n] = np.abs(got - 2 * np.pi * np.cos(2 * np.pi * x)).max()
        assert errs[64] == pytest.approx(2 * np.pi * (1 - np.sinc(2 / 64)), rel=1e-10)
        for n in (64, 128):
            order = np.log2(errs[n] / errs[2 * n])
            assert order >= 1.9

    def test_output_mean_is_zero(self, rng):
        g = PeriodicGrid(2, 16)
        f = ScalarField(g, rng.normal(size=g.shape))
        out = gradient(f)
        for i in range(g.dim):
            assert abs(integrate(out.component(i))) <= 1e-12


class TestDivergence:
    def test_constant_vector_gives_zero(self):
        g = PeriodicGrid(3, 8)
        F = VectorField(g, np.ones((3,) + g.shape))
        assert np.all(divergence(F).values == 0.0)

    def test_divergence_of_gradient_is_laplacian(self, rng):
        g = PeriodicGrid(2, 16)
        f = ScalarField(g, rng.normal(size=g.shape))
        got = divergence(gradient(f)).values
        want = laplacian(f).values
        assert np.abs(got - want).max() <= 1e-12

    def test_cosine_matches_analytic_at_second_order(self):
        errs = {}
        for n in (64, 128, 256):
            g = PeriodicGrid(1, n)
            x = g.axis_coords()
            F = VectorField(g, np.cos(2 * np.pi * x)[None, :])
            errs[n] = np.abs(divergence(F).values + 2 * np.pi * np.sin(2 * np.pi * x)).max()
        for n in (64, 128):
            assert np.log2(errs[n] / errs[2 * n]) >= 1.9


class TestLaplacian:
    def test_constant_gives_zero(self):
        g = PeriodicGrid(1, 32)
        assert np.all(laplacian(ScalarField.constant(g, 3.3)).values == 0.0)

    def test_sine_matches_analytic_at_second_order(self):
        errs = {}
        for n in (64, 128, 256):
            g = PeriodicGrid(1, n)
            x = g.axis_coords()
            got = laplacian(sin_field(g)).values
            errs[n] = np.abs(got + 4 * np.pi**2 * np.sin(2 * np.pi * x)).max()
        for n in (64, 128):
            assert np.log2(errs[n] / errs[2 * n]) >= 1.9

    def test_integral_vanishes(self, rng):
        g = PeriodicGrid(2, 16)
        f = ScalarField(g, rng.normal(size=g.shape))
        assert abs(integrate(laplacian(f))) <= 1e-12


class TestSummationByParts:
    @given(st.integers(0, 2**31 - 1), st.sampled_from([(1, 32), (2, 12), (3, 8)]))
    def test_ibp_residual_tiny(self, seed, dim_n):
        dim, n = dim_n
        g = PeriodicGrid(dim, n)
        r = np.random.default_rng(seed)
        f = ScalarField(g, r.normal(size=g.shape))
        F = VectorField(g, r.normal(size=(dim,) + g.shape))
        lhs = integrate(ScalarField(g, f.values * divergence(F).values))
        rhs = integrate(ScalarField(g, np.sum(gradient(f).values * F.values, axis=0)))
        scale = max(np.abs(f.values).max() * np.abs(F.values).max(), 1.0)
        assert abs(lhs + rhs) <= 1e-12 * scale


class TestTranslationEquivariance:
    @given(st.integers(0, 2**31 - 1), st.integers(1, 7))
    def test_shift_commutes_with_operators(self, seed, k):
        g = PeriodicGrid(2, 12)
        r = np.random.default_rng(seed)
        vals = r.normal(size=g.shape)
        f = ScalarField(g, vals)
        shifted = ScalarField(g, np.roll(vals, k, axis=0))
        for op in (laplacian, lambda q: gradient(q).component(0)):
            a = np.roll(op(f).values, k, axis=0)
            b = op(shifted).values
            assert np.array_equal(a, b)


class TestDeformationAntisym:
    def test_constant_velocity_gives_zero(self):
        g = PeriodicGrid(2, 12)
        v = VectorField(g, np.ones((2,) + g.shape))
        assert np.all(deformation(v).values == 0.0)
        assert np.all(antisym(v).values == 0.0)

    def test_rigid_rotation_has_zero_deformation_in_interior(self):
        # linear field v = (-(y-1/2), x-1/2); centered differences are exact
        # for linear data, so away from the wrap-around seam D(v) vanishes
        # while the antisymmetric part carries the rotation rate 1
        g = PeriodicGrid(2, 32)
        X, Y = g.meshgrid()
        v = VectorField(g, np.stack([-(Y - 0.5), X - 0.5]))
        D = deformation(v).values
        A = antisym(v).values
        interior = np.zeros(g.shape, dtype=bool)
        interior[2:-2, 2:-2] = True
        assert np.abs(D[:, :, interior]).max() <= 1e-13
        assert np.abs(A[0, 1][interior] - 1.0).max() <= 1e-13

    def test_trace_of_deformation_is_divergence(self, rng):
        g = PeriodicGrid(3, 8)
        v = VectorField(g, rng.normal(size=(3,) + g.shape))
        tr = np.trace(deformation(v).values, axis1=0, axis2=1)
        assert np.abs(tr - divergence(v).values).max() <= 1e-12

    def test_gradients_are_curl_free(self):
        g = PeriodicGrid(2, 64)
        X, Y = g.meshgrid()
        f = ScalarField(g, np.sin(2 * np.pi * X) * np.sin(2 * np.pi * Y))
        A = antisym(gradient(f)).values
        assert np.abs(A).max() <= 1e-12

    def test_antisymmetry_exact(self, rng):
        g = PeriodicGrid(2, 12)
        v = VectorField(g, rng.normal(size=(2,) + g.shape))
        A = antisym(v).values
        assert np.array_equal(A[0, 1], -A[1, 0])
        assert np.all(A[0, 0] == 0.0) and np.all(A[1, 1] == 0.0)

    @given(st.integers(0, 2**31 - 1))
    def test_jacobian_split(self, seed):
        # D + A reconstructs the discrete Jacobian (up to one rounding of the
        # half-sum/half-difference pair)
        g = PeriodicGrid(2, 12)
        r = np.random.default_rng(seed)
        v = VectorField(g, r.normal(size=(2,) + g.shape))
        D = deformation(v).values
        A = antisym(v).values
        from dragflow.kernels import numpy_backend as ops

        jac = np.empty_like(D)
        for i in range(2):
            for j in range(2):
                jac[i, j] = ops.diff(v.values[j], i, g.h)
        scale = max(1.0, np.abs(jac).max())
        assert np.abs(D + A - jac).max() <= 1e-14 * scale

    def test_symmetry_flag_checked(self):
        g = PeriodicGrid(2, 8)
        vals = np.zeros((2, 2) + g.shape)
        vals[0, 1] = 1.0
        with pytest.raises(ValueError):
            TensorField(g, vals, symmetric=True).check_symmetry()


class TestIntegrate:
    def test_constant(self):
        g = PeriodicGrid(3, 8)
        assert integrate(ScalarField.constant(g, 3.0)) == pytest.approx(3.0, abs=1e-14)

    def test_sine_cancels(self):
        g = PeriodicGrid(1, 128)
        assert abs(integrate(sin_field(g))) <= 1e-12

    def test_sine_squared(self):
        g = PeriodicGrid(1, 128)
        x = g.axis_coords()
        f = ScalarField(g, np.sin(2 * np.pi * x) ** 2)
        assert integrate(f) == pytest.approx(0.5, abs=1e-12)
