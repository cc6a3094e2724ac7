import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circle_blowup.spectral import (
    CircleFunction,
    derivative,
    dirichlet_norm,
    green_log,
    grid,
    half_laplacian,
    half_laplacian_pv,
    harmonic_extension,
    lp_norm,
    required_grid,
    wrap_angle,
)

from conftest import random_trig

N = 1024


def trig(fn, n=N):
    return CircleFunction.from_function(fn, n)


coeff_lists = st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=16)


class TestCircleFunction:
    def test_rejects_bad_sizes(self):
        with pytest.raises(ValueError):
            CircleFunction(np.zeros(100))
        with pytest.raises(ValueError):
            CircleFunction(np.zeros(32))
        with pytest.raises(ValueError):
            CircleFunction(np.full(64, np.nan))

    def test_values_read_only(self):
        f = CircleFunction.constant(1.0, 64)
        with pytest.raises(ValueError):
            f.values[0] = 2.0

    def test_round_trip(self, rng):
        f = random_trig(rng, 40)
        g = CircleFunction.from_coeffs(f.coeffs)
        assert np.max(np.abs(g.values - f.values)) < 1e-12 * np.max(np.abs(f.values))

    def test_conjugate_symmetry(self, rng):
        f = random_trig(rng, 10, n_grid=256)
        for n in range(1, 100):
            assert f.coeff(-n) == pytest.approx(np.conj(f.coeff(n)), abs=1e-15)

    def test_from_trig_coefficients(self):
        f = CircleFunction.from_trig(cos=[2.0, 0.0, 3.0], sin=[0.0, 0.0, -4.0], n_grid=64)
        assert f.coeff(0) == pytest.approx(2.0)
        assert f.coeff(2) == pytest.approx(1.5)
        assert f.coeff(3) == pytest.approx(2.0j)

    def test_evaluate_off_grid(self):
        f = trig(lambda t: np.cos(3 * t) + np.sin(t))
        t = np.array([0.1234, 2.5, -1.0])
        assert np.allclose(f.evaluate(t), np.cos(3 * t) + np.sin(t), atol=1e-12)

    def test_resample_exact_for_band_limited(self):
        f = trig(lambda t: np.cos(5 * t), 64)
        g = f.resample(512)
        assert np.allclose(g.values, np.cos(5 * grid(512)), atol=1e-13)

    def test_integral_and_parseval(self, rng):
        f = random_trig(rng, 20)
        l2sq = lp_norm(f, 2).value ** 2
        assert l2sq == pytest.approx(2 * np.pi * np.sum(np.abs(f.coeffs) ** 2), rel=1e-10)

    def test_required_grid(self):
        assert required_grid(0.5) == 1024
        assert required_grid(1e-3) == 65536


class TestHalfLaplacian:
    def test_cos(self):
        f = half_laplacian(trig(np.cos))
        assert np.allclose(f.values, np.cos(grid(N)), atol=1e-13)

    def test_constant(self):
        assert np.max(np.abs(half_laplacian(CircleFunction.constant(3.0, N)).values)) < 1e-14

    def test_cos2(self):
        f = half_laplacian(trig(lambda t: np.cos(2 * t)))
        assert np.allclose(f.values, 2 * np.cos(2 * grid(N)), atol=1e-13)

    @given(coeff_lists)
    @settings(max_examples=25, deadline=None)
    def test_zero_mean(self, cs):
        f = CircleFunction.from_trig(cos=cs, n_grid=128)
        assert abs(half_laplacian(f).coeff(0)) < 1e-13


class TestPrincipalValue:
    def test_cos_at_zero(self):
        assert half_laplacian_pv(trig(np.cos), 0.0) == pytest.approx(1.0, abs=1e-6)

    def test_constant(self):
        f = CircleFunction.constant(4.0, N)
        assert abs(half_laplacian_pv(f, grid(N)[17])) < 1e-12

    def test_cos2_at_quarter(self):
        f = trig(lambda t: np.cos(2 * t))
        assert half_laplacian_pv(f, np.pi / 2) == pytest.approx(-2.0, abs=1e-6)

    def test_matches_multiplier_on_degree_128(self, rng):
        f = random_trig(rng, N // 8, scale=1.0 / N)
        pv = half_laplacian_pv(f, grid(N)[::37])
        assert np.max(np.abs(pv - half_laplacian(f).values[::37])) < 1e-6

    def test_off_grid_rejected(self):
        with pytest.raises(ValueError):
            half_laplacian_pv(trig(np.cos), 0.001)


class TestGreenLog:
    def test_cos(self):
        assert np.allclose(green_log(trig(np.cos)).values, np.pi * np.cos(grid(N)), atol=1e-13)

    def test_constant(self):
        assert np.max(np.abs(green_log(CircleFunction.constant(2.0, N)).values)) < 1e-14

    def test_inverts_half_laplacian_up_to_mean(self):
        f = trig(lambda t: np.cos(3 * t) + 5)
        g = half_laplacian(green_log(f)) / np.pi
        assert np.allclose(g.values, np.cos(3 * grid(N)), atol=1e-12)

    def test_matches_log_kernel_quadrature(self):
        # int log(1/|z-w|) cos(w) dw evaluated with a log-singular midpoint rule
        f = trig(lambda t: np.cos(2 * t))
        m = 200000
        w = (np.arange(m) + 0.5) * 2 * np.pi / m
        direct = np.sum(-np.log(2 * np.abs(np.sin(w / 2))) * np.cos(2 * w)) * 2 * np.pi / m
        assert green_log(f).values[0] == pytest.approx(direct, abs=1e-4)

    @given(coeff_lists)
    @settings(max_examples=25, deadline=None)
    def test_round_trip_property(self, cs):
        f = CircleFunction.from_trig(cos=cs, n_grid=128)
        g = half_laplacian(green_log(f)) / np.pi
        assert np.max(np.abs(g.values - (f.values - f.mean()))) < 1e-10 * (1 + np.max(np.abs(f.values)))


class TestHarmonicExtension:
    def test_cos(self):
        assert harmonic_extension(trig(np.cos), 0.3, 1.1) == pytest.approx(0.3 * np.cos(1.1), abs=1e-14)

    def test_mean_value(self, rng):
        f = random_trig(rng, 7)
        assert harmonic_extension(f, 0.0, 2.0) == pytest.approx(f.mean(), abs=1e-13)

    def test_cos2_half(self):
        assert harmonic_extension(trig(lambda t: np.cos(2 * t)), 0.5, 0.0) == pytest.approx(0.25, abs=1e-14)

    def test_matches_poisson_integral(self, rng):
        f = random_trig(rng, 6)
        r, th = 0.6, 0.8
        t = grid(N)
        poisson = (1 - r**2) / (1 - 2 * r * np.cos(th - t) + r**2)
        assert harmonic_extension(f, r, th) == pytest.approx(np.mean(poisson * f.values), abs=1e-12)

    def test_rejects_boundary(self):
        with pytest.raises(ValueError):
            harmonic_extension(trig(np.cos), 1.0, 0.0)


class TestDerivative:
    def test_cos(self):
        assert np.allclose(derivative(trig(np.cos)).values, -np.sin(grid(N)), atol=1e-13)

    def test_constant(self):
        assert np.max(np.abs(derivative(CircleFunction.constant(1.0, N)).values)) == 0.0

    def test_sin2(self):
        f = derivative(trig(lambda t: np.sin(2 * t)))
        assert np.allclose(f.values, 2 * np.cos(2 * grid(N)), atol=1e-13)


class TestNorms:
    def test_l2_of_one(self):
        assert lp_norm(CircleFunction.constant(1.0, N), 2).value == pytest.approx(np.sqrt(2 * np.pi))

    def test_linf(self):
        assert float(lp_norm(trig(lambda t: 3 * np.sin(t)), np.inf)) == pytest.approx(3.0, abs=1e-4)

    def test_dirichlet_cos_matches_disk_integral(self):
        # |grad(r cos t)|^2 = 1 on the unit disk, so the integral is pi
        assert dirichlet_norm(trig(np.cos)) == pytest.approx(np.sqrt(np.pi), rel=1e-13)

    def test_dirichlet_constant(self):
        assert dirichlet_norm(CircleFunction.constant(7.0, N)) == 0.0

    def test_dirichlet_by_polar_quadrature(self, rng):
        f = random_trig(rng, 4)
        # int_disk |grad H|^2 = int_0^1 int |dH/dr|^2 + |dH/dt|^2 / r^2  r dr dt, Gauss in r
        xr, wr = np.polynomial.legendre.leggauss(40)
        r = 0.5 * (xr + 1)
        t = grid(256)
        R, T = np.meshgrid(r, t, indexing="ij")
        c = f.rcoeffs[:5]
        n = np.arange(5)
        wgt = np.where(n == 0, 1.0, 2.0)
        Hr = sum((wgt[k] * c[k] * k * R ** (k - 1) * np.exp(1j * k * T)).real for k in n[1:])
        Ht = sum((wgt[k] * c[k] * 1j * k * R**k * np.exp(1j * k * T)).real for k in n[1:])
        integrand = (Hr**2 + Ht**2 / R**2) * R
        total = np.sum(integrand.mean(axis=1) * 2 * np.pi * 0.5 * wr)
        assert dirichlet_norm(f) == pytest.approx(np.sqrt(total), rel=1e-10)

    def test_rejects_small_p(self):
        with pytest.raises(ValueError):
            lp_norm(trig(np.cos), 0.5)


def test_wrap_angle():
    assert wrap_angle(np.pi) == pytest.approx(np.pi)
    assert wrap_angle(-np.pi) == pytest.approx(np.pi)
    assert wrap_angle(3 * np.pi / 2) == pytest.approx(-np.pi / 2)
