"""Quadrature engine and special-function checks."""

import numpy as np
import pytest

from felab.errors import ArityError, DomainError
from felab.quadrature import (
    DEFAULT_CONFIG,
    IntegralResult,
    QuadratureConfig,
    bessel_j,
    bessel_zeros,
    gegenbauer,
    integrate_adaptive,
    integrate_composite,
    integrate_oscillatory_tail,
    tail_power_periodic,
)

CFG = QuadratureConfig()


class TestBessel:
    def test_j0_at_zero(self):
        assert bessel_j(0, 0.0) == pytest.approx(1.0, abs=1e-15)

    def test_positive_order_at_zero(self):
        assert bessel_j(1, 0.0) == 0.0
        assert bessel_j(0.5, 0.0) == 0.0

    def test_half_order_closed_form(self):
        # J_{1/2}(x) = sqrt(2/(pi x)) sin(x); vanishes at x = pi
        assert bessel_j(0.5, np.pi) == pytest.approx(0.0, abs=1e-15)
        x = 2.7
        assert bessel_j(0.5, x) == pytest.approx(np.sqrt(2 / (np.pi * x)) * np.sin(x), abs=1e-14)
        assert bessel_j(1.5, x) == pytest.approx(
            np.sqrt(2 / (np.pi * x)) * (np.sin(x) / x - np.cos(x)), abs=1e-14)

    def test_recurrence(self):
        # J_{v-1}(x) + J_{v+1}(x) = (2v/x) J_v(x)
        x = np.linspace(0.1, 100.0, 997)
        for v in (1.0, 1.5, 2.0, 2.5):
            lhs = bessel_j(v - 1, x) + bessel_j(v + 1, x)
            rhs = 2 * v / x * bessel_j(v, x)
            scale = np.maximum(np.abs(rhs), 1e-3)
            assert np.max(np.abs(lhs - rhs) / scale) < 1e-10

    def test_nonfinite_rejected(self):
        with pytest.raises(DomainError):
            bessel_j(0, np.nan)
        with pytest.raises(DomainError):
            bessel_j(0, np.inf)
        with pytest.raises(DomainError):
            bessel_j(0.3, 1.0)  # not a half-integer order

    def test_zeros(self):
        z = bessel_zeros(0.5, 4)
        assert np.allclose(z, np.pi * np.arange(1, 5), atol=1e-12)
        z1 = bessel_zeros(1.0, 3)
        assert np.max(np.abs(bessel_j(1.0, z1))) < 1e-10


class TestGegenbauer:
    def test_degree_zero(self):
        assert gegenbauer(0, 0.7, 0.3) == 1.0

    def test_legendre_p1(self):
        assert gegenbauer(1, 0.5, 0.42) == pytest.approx(0.42, abs=1e-15)

    def test_legendre_p2(self):
        assert gegenbauer(2, 0.5, 0.5) == pytest.approx(-0.125, abs=1e-14)

    def test_chebyshev_limit(self):
        assert gegenbauer(3, 0.0, 0.4) == pytest.approx(np.cos(3 * np.arccos(0.4)), abs=1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            gegenbauer(2, 0.5, 1.5)


class TestAdaptive:
    def test_polynomial_exactness(self):
        for deg in range(0, 16):
            coeffs = np.arange(1.0, deg + 2.0)
            exact = sum(c / (k + 1) for k, c in enumerate(coeffs))
            res = integrate_adaptive(lambda x: np.polyval(coeffs[::-1], x), 0.0, 1.0, CFG)
            assert abs(res.value - exact) < 1e-13 * max(1.0, abs(exact))

    def test_quadratic(self):
        res = integrate_adaptive(lambda x: x**2, 0.0, 1.0, CFG)
        assert res.value == pytest.approx(1.0 / 3.0, abs=1e-14)
        assert res.converged

    def test_endpoint_singularity(self):
        cfg = QuadratureConfig(abs_tol=1e-9, rel_tol=1e-9, max_subdivisions=20000)
        res = integrate_adaptive(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0, cfg)
        assert res.value == pytest.approx(2.0, abs=1e-8)

    def test_sinc_against_series(self):
        # int_-5^5 sin(2 pi x)/(pi x) dx against the term-by-term series of
        # Si: 2/pi * Si(10 pi) via the power/asymptotic series oracle in scipy
        from scipy.special import sici
        exact = 2.0 / np.pi * sici(10 * np.pi)[0]

        def f(x):
            return np.where(x != 0, np.sin(2 * np.pi * x) / (np.pi * np.where(x != 0, x, 1.0)), 2.0)

        res = integrate_adaptive(f, -5.0, 5.0, CFG)
        assert res.value == pytest.approx(exact, abs=1e-10)

    def test_deterministic(self):
        def f(x):
            return np.sin(17.0 * x) / (1.0 + x * x)

        r1 = integrate_adaptive(f, 0.0, 30.0, CFG)
        r2 = integrate_adaptive(f, 0.0, 30.0, CFG)
        assert r1.value == r2.value
        assert r1.error_estimate == r2.error_estimate

    def test_invalid_interval(self):
        with pytest.raises(DomainError):
            integrate_adaptive(lambda x: x, 1.0, 0.0, CFG)

    def test_budget_exhaustion_flag(self):
        cfg = QuadratureConfig(abs_tol=1e-15, rel_tol=1e-15, max_subdivisions=3)
        res = integrate_adaptive(lambda x: 1.0 / np.sqrt(np.abs(x) + 1e-300), 0.0, 1.0, cfg)
        assert not res.converged


class TestOscillatoryTail:
    def test_sin_over_x2(self):
        zeros = np.pi * np.arange(1, 90)
        res = integrate_oscillatory_tail(lambda x: np.sin(x) / x**2, zeros, CFG)
        ref = integrate_composite(lambda x: np.sin(x) / x**2, np.pi, 1e6, 2_000_000).value
        assert res.value == pytest.approx(ref, rel=1e-9)
        assert res.converged

    def test_zero_function(self):
        res = integrate_oscillatory_tail(lambda x: np.zeros_like(x), np.arange(1.0, 40.0), CFG)
        assert res.value == 0.0
        assert res.converged

    def test_sin4_positive_decay(self):
        # needed by the d=1 boundary-derivative integral
        f = lambda x: np.sin(2 * np.pi * x) ** 4 / x**2
        zeros = 1.0 + 0.5 * np.arange(0, 257)
        res = integrate_oscillatory_tail(f, zeros, CFG)
        ref = integrate_composite(f, 1.0, 2e5, 800_000).value
        assert abs(res.value - ref) < 5.0 * max(res.error_estimate, 1e-9)
        assert abs(res.value - ref) < 2e-4

    def test_bad_zeros(self):
        with pytest.raises(DomainError):
            integrate_oscillatory_tail(lambda x: x, np.array([1.0, 0.5, 2.0]), CFG)


class TestPowerPeriodicTail:
    def test_known_power(self):
        # int_10^inf sin^2(2 pi x)/x^2 dx = (1/2) int_10^inf x^-2 (1 - cos 4 pi x);
        # brute truncation at R needs its mean tail 1/(2R) restored
        f = lambda x: np.sin(2 * np.pi * x) ** 2 / x**2
        res = tail_power_periodic(f, 10.0, 0.5, 2.0, CFG)
        big_r = 2e5
        ref = integrate_composite(f, 10.0, big_r, 800_000).value + 1.0 / (2 * big_r)
        assert res.value == pytest.approx(ref, abs=1e-9)

    def test_rejects_divergent(self):
        with pytest.raises(DomainError):
            tail_power_periodic(lambda x: 1 / x, 1.0, 0.5, 1.0, CFG)


class TestConfig:
    def test_invariants(self):
        with pytest.raises(DomainError):
            QuadratureConfig(abs_tol=0.0, rel_tol=0.0)
        with pytest.raises(DomainError):
            QuadratureConfig(max_subdivisions=0)
        with pytest.raises(DomainError):
            IntegralResult(1.0, -1.0, True)

    def test_converged_respects_tolerance(self):
        res = integrate_adaptive(lambda x: np.ones_like(x), 0.0, 1.0, CFG)
        assert res.converged
        assert res.error_estimate <= max(CFG.abs_tol, CFG.rel_tol * abs(res.value))
