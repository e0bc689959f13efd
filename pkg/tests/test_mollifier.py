import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from rpgauge.smoothing import (Disc, Polygon2D, QuadratureConfig, QuadratureConfigError,
                               alpha_constant, cap, convolve, quasi_indicator)

H = cap(0.1)
SQUARE = Polygon2D.from_vertices([[0, 0], [1, 0], [1, 1], [0, 1]])
TRIANGLE = Polygon2D.from_vertices([[0, 0], [1.3, 0.2], [0.4, 1.1]])


def radial_mass(h):
    val, _ = integrate.quad(lambda r: 2 * math.pi * r * h.radial(r), 0, h.eps,
                            epsabs=1e-15, epsrel=1e-13, limit=200)
    return val


def radial_alpha(h):
    # 1 - int max(0, c.a) h(c) dc, the angular integral of cos over a half turn is 2
    val, _ = integrate.quad(lambda r: 2 * r * r * h.radial(r), 0, h.eps,
                            epsabs=1e-15, epsrel=1e-13, limit=200)
    return 1.0 - val


def brute_convolve(K, h, x, nr=400, nt=720):
    """Plain polar sum over the cap disc, integrand evaluated through the distance."""
    r, wr = np.polynomial.legendre.leggauss(nr)
    r, wr = 0.5 * h.eps * (r + 1), 0.5 * h.eps * wr
    t = np.linspace(0, 2 * math.pi, nt, endpoint=False)
    R, Tt = np.meshgrid(r, t, indexing="ij")
    Z = np.asarray(x)[None, None, :] + np.stack([R * np.cos(Tt), R * np.sin(Tt)], axis=-1)
    vals = quasi_indicator(K, Z.reshape(-1, 2)).reshape(R.shape)
    return float(np.sum(vals * h.radial(R) * R * wr[:, None]) * (2 * math.pi / nt))


class TestCap:
    @pytest.mark.parametrize("eps, k", [(0.1, math.inf), (1.0, math.inf), (0.3, 0), (0.05, 4)])
    def test_unit_mass(self, eps, k):
        assert radial_mass(cap(eps, k)) == pytest.approx(1.0, abs=1e-10)

    def test_support(self):
        assert H.radial(H.eps) == 0.0
        assert H.radial(2 * H.eps) == 0.0
        assert H.radial(0.999 * H.eps) > 0.0

    def test_rotation_invariant(self, rng):
        x = rng.uniform(-0.07, 0.07, (50, 2))
        for a in rng.uniform(0, 2 * math.pi, 5):
            R = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
            np.testing.assert_allclose(H(x @ R.T), H(x), rtol=1e-13)

    def test_invalid(self):
        with pytest.raises(ValueError):
            cap(0.0)
        with pytest.raises(ValueError):
            cap(0.1, 1.5)

    def test_json(self):
        assert cap(0.2).to_json()["k"] is None
        assert cap(0.2, 3).to_json()["k"] == 3


class TestQuasiIndicator:
    def test_halfplane(self):
        Hp = Polygon2D.halfplane([0.6, 0.8])
        assert quasi_indicator(Hp, [0.6 * 0.3, 0.8 * 0.3]) == pytest.approx(0.7)

    def test_inside(self):
        assert quasi_indicator(SQUARE, [0.4, 0.6]) == 1.0

    def test_unit_ball(self):
        assert quasi_indicator(Disc([0, 0], 1.0), [2, 0]) == pytest.approx(0.0)

    @given(st.lists(st.tuples(st.floats(-2, 3), st.floats(-2, 3)), min_size=2, max_size=2))
    def test_concave_and_lipschitz(self, pts):
        a, b = np.array(pts, dtype=float)
        fa, fb = quasi_indicator(TRIANGLE, a), quasi_indicator(TRIANGLE, b)
        assert quasi_indicator(TRIANGLE, (a + b) / 2) >= (fa + fb) / 2 - 1e-12
        assert abs(fa - fb) <= np.linalg.norm(a - b) + 1e-12


class TestQuadratureConfig:
    def test_minimum_order(self):
        with pytest.raises(QuadratureConfigError):
            QuadratureConfig(4, 64)
        with pytest.raises(QuadratureConfigError):
            QuadratureConfig(64, 12.5)

    def test_halved(self):
        assert QuadratureConfig(64, 32).halved() == QuadratureConfig(32, 16)
        assert QuadratureConfig(8, 8).halved() == QuadratureConfig(8, 8)

    def test_needs_explicit_boundary(self):
        from rpgauge.smoothing import outer_parallel
        with pytest.raises(TypeError):
            convolve(outer_parallel(SQUARE, 0.1), H, [0, 0])


class TestConvolve:
    def test_deep_inside(self):
        assert convolve(SQUARE, H, [0.5, 0.5]) == pytest.approx(1.0, abs=1e-12)
        assert convolve(SQUARE, H, [0.15, 0.85]) == pytest.approx(1.0, abs=1e-12)

    def test_far_outside_lipschitz_bounds(self):
        x = np.array([1.7, 0.5])
        d = float(SQUARE.distance(x))
        f = convolve(SQUARE, H, x)
        assert 1 - (d + H.eps) <= f < 1 - (d - H.eps)
        # exactly linear there: the cap average of a linear function
        assert f == pytest.approx(1 - d, abs=1e-12)

    def test_halfplane_boundary_is_alpha(self, rng):
        a = alpha_constant(H)
        for _ in range(5):
            u = rng.normal(size=2)
            Hp = Polygon2D.halfplane(u)
            v = np.array([-u[1], u[0]]) / np.linalg.norm(u)
            assert convolve(Hp, H, 3.7 * v) == pytest.approx(a, abs=1e-12)

    def test_batch_matches_points(self, rng):
        X = rng.uniform(-0.2, 1.2, (40, 2))
        batch = convolve(TRIANGLE, H, X)
        single = np.array([convolve(TRIANGLE, H, x) for x in X])
        np.testing.assert_allclose(batch, single, rtol=0, atol=1e-15)

    @pytest.mark.parametrize("x", [(1.03, 0.98), (1.05, 1.05), (0.98, 0.96), (0.5, -0.04),
                                   (1.0, 1.0), (0.97, 1.06)])
    def test_against_brute_force(self, x):
        # the brute-force sum converges slowly across the kinks; 1e-6 is its own accuracy
        assert convolve(SQUARE, H, x) == pytest.approx(brute_convolve(SQUARE, H, x), abs=1e-6)

    def test_against_brute_force_disc(self):
        D = Disc([0.3, 0.2], 0.5)
        for x in [(0.8, 0.2), (0.3, 0.75), (0.83, 0.25)]:
            assert convolve(D, H, x) == pytest.approx(brute_convolve(D, H, x), abs=1e-6)

    def test_self_convergence(self, rng):
        X = np.vstack([rng.uniform(-0.1, 1.1, (60, 2)), [[1.0, 1.0], [1.05, 1.05]]])
        f64 = convolve(SQUARE, H, X)
        f128 = convolve(SQUARE, H, X, QuadratureConfig(128, 128))
        f32 = convolve(SQUARE, H, X, QuadratureConfig(32, 32))
        assert np.max(np.abs(f64 - f128)) <= 1e-12
        assert np.max(np.abs(f64 - f32)) <= 1e-8

    def test_finite_order_cap(self):
        h = cap(0.1, 2)
        assert convolve(SQUARE, h, (1.2, 0.5)) == pytest.approx(0.8, abs=1e-12)
        assert convolve(SQUARE, h, (1.0, 1.0)) == pytest.approx(
            brute_convolve(SQUARE, h, (1.0, 1.0)), abs=1e-6)

    @settings(max_examples=40)
    @given(st.tuples(st.floats(-0.15, 1.45), st.floats(-0.15, 1.25)),
           st.tuples(st.floats(-0.15, 1.45), st.floats(-0.15, 1.25)))
    def test_concave(self, a, b):
        a, b = np.array(a), np.array(b)
        fa, fb, fm = convolve(TRIANGLE, H, np.array([a, b, (a + b) / 2]))
        assert fm >= (fa + fb) / 2 - 1e-12
        assert max(fa, fb, fm) <= 1.0 + 1e-15

    def test_locally_flat_point(self):
        big = Polygon2D.from_vertices([[-5, -5], [5, -5], [5, 5], [-5, 5]])
        assert convolve(big, H, [5.0, 0.3]) == pytest.approx(alpha_constant(H), abs=1e-8)


class TestAlpha:
    def test_direction_invariance(self, rng):
        vals = [alpha_constant(H, rng.normal(size=2)) for _ in range(8)]
        assert np.ptp(vals) <= 1e-8

    def test_bounds(self):
        for eps in (0.01, 0.1, 1.0):
            a = alpha_constant(cap(eps))
            assert 1 - eps / 2 < a < 1

    @pytest.mark.parametrize("eps, k", [(0.1, math.inf), (0.4, math.inf), (0.1, 3)])
    def test_radial_oracle(self, eps, k):
        h = cap(eps, k)
        assert alpha_constant(h) == pytest.approx(radial_alpha(h), abs=1e-10)

    def test_richardson(self):
        a64 = alpha_constant(H)
        a32 = alpha_constant(H, config=QuadratureConfig(32, 32))
        assert abs(a64 - a32) <= 1e-8
