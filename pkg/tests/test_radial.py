"""Radial kernels: ball transform, K/L profiles, gamma, rho, first variation."""

import numpy as np
import pytest

from felab.errors import ArityError, CapabilityError, ThresholdError
from felab.quadrature import QuadratureConfig, integrate_adaptive
from felab.radial_kernels import (
    ball_hat,
    ball_norm_q,
    default_variation_grids,
    empirical_holder_exponent,
    exact_kernel_1d,
    first_variation_check,
    gamma_1d_closed_form,
    gamma_asymptotic_fit,
    gamma_qd,
    gamma_qd_detailed,
    kernel_profile,
    kernel_values,
    omega,
    q_threshold,
    rho_d,
)


def lens_area(r):
    """Area of the intersection of two unit discs at center distance r."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    m = r < 2
    out[m] = 2.0 * (np.arccos(r[m] / 2) - (r[m] / 2) * np.sqrt(1 - r[m] ** 2 / 4))
    return out


class TestBallHat:
    def test_values_at_origin(self):
        assert ball_hat(1, 1e-14) == pytest.approx(2.0, abs=1e-12)
        assert ball_hat(2, 1e-14) == pytest.approx(np.pi, abs=1e-12)
        assert ball_hat(3, 1e-14) == pytest.approx(4 * np.pi / 3, abs=1e-12)

    def test_sinc_zero(self):
        assert ball_hat(1, 0.5) == pytest.approx(0.0, abs=1e-14)

    def test_decay_bound(self):
        r = np.linspace(0.01, 200.0, 4001)
        for d in (1, 2, 3):
            vals = np.abs(ball_hat(d, r))
            assert np.all(vals <= omega(d) + 1e-12)
            # |B^| <= C (1+r)^{-(d+1)/2} with a single constant C = 1.1 omega_d
            assert np.all(vals * (1 + r) ** ((d + 1) / 2) < 1.1 * omega(d) + 1.0)

    def test_unsupported_dimension(self):
        with pytest.raises(CapabilityError):
            ball_hat(4, 1.0)

    def test_small_r_expansion_slope(self):
        # B^(r) = omega_d (1 - pi rho_d r^2) + O(r^4)
        for d in (1, 2):
            rd = rho_d(d)
            r = np.logspace(-3, -1, 25)
            resid = np.abs(ball_hat(d, r) - omega(d) * (1 - np.pi * rd * r**2))
            slope = np.polyfit(np.log(r), np.log(resid), 1)[0]
            assert slope > 3.9


class TestRho:
    def test_d2(self):
        assert rho_d(2) == pytest.approx(np.pi / 2, abs=1e-9)

    def test_d1_convention(self):
        # omega_0 = 1 and int_-1^1 s^2 ds = 2/3
        assert rho_d(1) == pytest.approx(2 * np.pi * (1.0 / 2.0) * (2.0 / 3.0), abs=1e-12)


class TestKernel1D:
    def test_even_q_oracle_uniform(self):
        # exact piecewise-polynomial convolution oracle, q in {4, 6}
        for q in (4, 6):
            r = np.linspace(0.0, float(q), 512)
            vals, errs = kernel_values("K", 1, float(q), r)
            oracle = exact_kernel_1d("K", q)(r)
            assert np.max(np.abs(vals - oracle)) < 1e-6

    def test_triangle_profile(self):
        prof = kernel_profile("L", 1, 4.0, r_max=3.0, n_samples=301)
        tri = np.maximum(0.0, 2.0 - np.abs(prof.radii))
        assert np.max(np.abs(prof.values - tri)) < 1e-7

    def test_k4_point_values(self):
        vals, _ = kernel_values("K", 1, 4.0, np.array([0.0, 3.5]))
        assert vals[0] == pytest.approx(3.0, abs=1e-7)
        assert vals[1] == pytest.approx(0.0, abs=1e-7)

    def test_noneven_q_against_brute(self):
        # independent check of the series/tail split at q = 3.2
        from felab.quadrature import integrate_composite
        q = 3.2
        xs = np.array([0.0, 0.7, 1.3])
        vals, _ = kernel_values("K", 1, q, xs)
        for x, v in zip(xs, vals):
            def f(xi, xx=x):
                body = (np.cos(2 * np.pi * xx * xi) * np.sin(2 * np.pi * xi)
                        * np.abs(np.sin(2 * np.pi * xi)) ** (q - 2)
                        * np.abs(xi) ** (1 - q))
                return np.where(xi > 0, body, (2 * np.pi) ** (q - 1))
            b1 = integrate_composite(f, 1e-14, 2000.0, 600_000).value
            b2 = integrate_composite(f, 1e-14, 2000.0 + 0.25 / max(x, 0.125), 600_000).value
            assert v == pytest.approx(np.pi ** (1 - q) * (b1 + b2), abs=5e-8)

    def test_plancherel_l4_mass(self):
        # int L_4 over the support = 4 (triangle area), d = 1
        prof = kernel_profile("L", 1, 4.0, r_max=2.5, n_samples=2001)
        total = 2.0 * np.trapezoid(prof.values, prof.radii)
        assert total == pytest.approx(4.0, abs=1e-5)


class TestKernel2D:
    def test_l4_matches_lens(self):
        r = np.linspace(0.0, 4.0, 257)
        vals, errs = kernel_values("L", 2, 4.0, r)
        diff = np.abs(vals - lens_area(r))
        assert np.max(diff) < 5e-5
        assert np.all(diff <= 10 * errs + 1e-9)

    def test_k4_center_value(self):
        # K_4(0) = 2 pi int_0^1 L_4(s) s ds with L_4 the lens area
        cfg = QuadratureConfig(1e-14, 1e-13, 4000)
        oracle = 2 * np.pi * integrate_adaptive(lambda s: lens_area(s) * s, 0, 1, cfg).value
        vals, _ = kernel_values("K", 2, 4.0, np.array([0.0]))
        assert vals[0] == pytest.approx(oracle, abs=1e-8)

    def test_k4_outside_support(self):
        vals, _ = kernel_values("K", 2, 4.0, np.array([3.5]))
        assert abs(vals[0]) < 1e-8


class TestThresholds:
    def test_l_kernel_refuses_at_qd(self):
        with pytest.raises(ThresholdError) as exc:
            kernel_profile("L", 2, 3.0)
        assert exc.value.threshold == pytest.approx(10.0 / 3.0)

    def test_k_kernel_threshold(self):
        with pytest.raises(ThresholdError):
            kernel_profile("K", 1, 2.0)
        assert q_threshold("K", 1) == pytest.approx(2.0)
        assert q_threshold("L", 1) == pytest.approx(3.0)

    def test_gamma_needs_q_above_3(self):
        with pytest.raises(ThresholdError):
            gamma_qd(1, 2.9)


class TestGamma:
    def test_d2_q4(self):
        assert gamma_qd(2, 4.0) == pytest.approx(4.0, abs=1e-8)

    def test_d1_q4_both_ways(self):
        assert gamma_qd(1, 4.0) == pytest.approx(2.0, abs=1e-9)
        assert gamma_1d_closed_form(4.0) == pytest.approx(2.0, abs=1e-9)

    def test_d1_q6_exact_convolution_slope(self):
        oracle = -float(exact_kernel_1d("K", 6).derivative_at(1.0))
        assert gamma_qd(1, 6.0) == pytest.approx(oracle, abs=1e-8)

    def test_finite_difference_cross_check(self):
        # spectral differentiation against a centered difference of the profile
        q = 6.0
        h = 1e-4
        vals, _ = kernel_values("K", 1, q, np.array([1.0 - h, 1.0 + h]))
        fd = -(vals[1] - vals[0]) / (2 * h)
        assert gamma_qd(1, q) == pytest.approx(fd, abs=1e-5)

    def test_gamma_equals_l_gap_identity(self):
        # K = L * 1_B in d = 1 gives gamma = L(0) - L(2)
        for q in (3.6, 5.0):
            v, _ = kernel_values("L", 1, q, np.array([0.0, 2.0]))
            assert gamma_qd(1, q) == pytest.approx(v[0] - v[1], abs=1e-8)

    def test_q_continuity(self):
        qs = np.array([3.9, 3.95, 4.0, 4.05, 4.1])
        gs = np.array([gamma_qd(2, q) for q in qs])
        assert np.max(np.abs(np.diff(gs))) < 0.2
        assert gs[2] == pytest.approx(4.0, abs=1e-8)

    def test_positivity(self):
        for d, q in [(1, 3.5), (1, 4.0), (2, 3.6), (2, 4.0), (3, 4.0)]:
            assert gamma_qd(d, q) > 0


class TestFirstVariation:
    def test_d1_q4(self):
        inner, outer = default_variation_grids(1, 4.0)
        res = first_variation_check(1, 4.0, inner, outer)
        assert res.satisfied
        assert res.margin > 0

    def test_d2_q4(self):
        inner, outer = default_variation_grids(2, 4.0, n=64)
        res = first_variation_check(2, 4.0, inner, outer)
        assert res.satisfied
        assert res.margin > 0

    def test_d1_low_q_reports(self):
        # open regime 2 < q < 3: record, never hard-assert
        inner, outer = default_variation_grids(1, 3.2, n=64)
        res = first_variation_check(1, 3.2, inner, outer)
        assert isinstance(res.satisfied, bool)
        assert np.isfinite(res.margin)

    def test_empty_grid(self):
        with pytest.raises(ArityError):
            first_variation_check(1, 4.0, [], [1.5])


class TestAsymptoticFit:
    @pytest.mark.slow
    def test_slopes(self):
        fit1 = gamma_asymptotic_fit(1, [20.0, 30.0, 40.0, 60.0])
        assert abs(fit1["slope"] + 1.5) < 0.1
        fit2 = gamma_asymptotic_fit(2, [20.0, 30.0, 40.0, 60.0])
        assert abs(fit2["slope"] + 2.0) < 0.1

    def test_arity(self):
        with pytest.raises(ArityError):
            gamma_asymptotic_fit(1, [20.0])


class TestProfileObject:
    def test_csv_roundtrip(self):
        prof = kernel_profile("L", 1, 4.0, r_max=2.0, n_samples=32)
        text = prof.to_csv()
        lines = text.strip().split("\n")
        assert lines[0] == "radius,value,error"
        assert len(lines) == 33
        parsed = np.array([[float(t) for t in ln.split(",")] for ln in lines[1:]])
        assert np.array_equal(parsed[:, 0], prof.radii)
        assert np.array_equal(parsed[:, 1], prof.values)

    def test_tail_below_error_scale(self):
        # even q: compact support, the tail sits inside the error bound;
        # non-integer q: only algebraic decay ~ r^-(q-1) is available, so the
        # tail is checked against that envelope instead
        prof4 = kernel_profile("L", 1, 4.0, r_max=4.0, n_samples=128)
        assert abs(prof4.values[-1]) <= 10 * max(prof4.errors[-1], 1e-12)
        prof = kernel_profile("L", 1, 4.5, r_max=6.0, n_samples=256)
        envelope = 4.0 * abs(prof.values[0]) * (1 + prof.r_max) ** (-(prof.exponent - 1))
        assert abs(prof.values[-1]) <= max(10 * prof.errors[-1], envelope)

    def test_interpolation(self):
        prof = kernel_profile("L", 1, 4.0, r_max=3.0, n_samples=601)
        r = np.array([0.33, 1.77])
        assert np.allclose(prof(r), np.maximum(0.0, 2.0 - r), atol=1e-6)

    def test_holder_report(self):
        prof = kernel_profile("L", 1, 4.0, r_max=3.0, n_samples=257)
        expo = empirical_holder_exponent(prof)
        assert 0.5 < expo <= 1.5


class TestBallNorm:
    def test_d1_q4_triangle(self):
        # ||B^||_4^4 = ||1_B * 1_B||_2^2 = 16/3
        res = ball_norm_q(1, 4.0)
        assert res.value == pytest.approx(16.0 / 3.0, abs=1e-9)

    def test_d2_q4_lens(self):
        # = int_R2 L_4(x)^2 dx = 2 pi int_0^2 lens(r)^2 r dr
        cfg = QuadratureConfig(1e-14, 1e-13, 4000)
        oracle = 2 * np.pi * integrate_adaptive(
            lambda s: lens_area(s) ** 2 * s, 0.0, 2.0, cfg).value
        res = ball_norm_q(2, 4.0)
        assert res.value == pytest.approx(oracle, abs=1e-8)
