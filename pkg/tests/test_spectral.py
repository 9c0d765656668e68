"""Circle spectrum, Funk-Hecke eigenvalues, mode margins."""

import numpy as np
import pytest

from felab.errors import DomainError, ThresholdError
from felab.quadrature import QuadratureConfig, integrate_adaptive
from felab.radial_kernels import gamma_qd, kernel_profile, kernel_values
from felab.set_model import IntervalSet, StarSet, boundary_profile
from felab.spectral import (
    CircleProfile,
    circle_coeff,
    circle_coeff_from_profile,
    funk_hecke_eigenvalue,
    mode_margins,
    sphere_reduced_prediction,
)


def closed_form(n):
    return 2 / (np.pi * n * n) if n % 2 else 2 / (np.pi * (n * n - 1))


class TestCircleCoeff:
    def test_closed_forms(self):
        for n in range(1, 21):
            assert circle_coeff(4.0, n) == pytest.approx(closed_form(n), abs=1e-10)

    def test_mode_zero_against_double_integral(self):
        # Lhat(0) = Q(1,1)/(4 pi^2) with Q the double integral of the lens
        lens = lambda r: np.where(r < 2, 2 * (np.arccos(np.minimum(r, 2) / 2)
                                               - (r / 2) * np.sqrt(np.maximum(0, 1 - r**2 / 4))), 0.0)
        th = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
        vals = lens(np.sqrt(2 - 2 * np.cos(th)))
        oracle = float(np.mean(vals) * 2 * np.pi) * 2 * np.pi / (4 * np.pi**2)
        assert circle_coeff(4.0, 0) == pytest.approx(oracle, abs=1e-6)

    def test_threshold(self):
        with pytest.raises(ThresholdError):
            circle_coeff(3.2, 1)

    def test_profile_route_agrees(self):
        kern = kernel_profile("L", 2, 4.0, r_max=2.2, n_samples=1200)
        for n in (1, 2, 5):
            assert circle_coeff_from_profile(kern, n) == pytest.approx(
                circle_coeff(4.0, n), abs=1e-5)


class TestFunkHecke:
    def test_d2_reduction(self):
        for k in (0, 1, 4, 9):
            assert funk_hecke_eigenvalue(2, 4.0, k) == pytest.approx(
                2 * np.pi * circle_coeff(4.0, k), rel=1e-12)

    def test_closed_values(self):
        assert funk_hecke_eigenvalue(2, 4.0, 3) == pytest.approx(4 / 9, abs=1e-10)
        assert funk_hecke_eigenvalue(2, 4.0, 4) == pytest.approx(4 / 15, abs=1e-10)

    def test_d1_from_kernel_gap(self):
        vals, _ = kernel_values("L", 1, 4.0, np.array([0.0, 2.0]))
        assert funk_hecke_eigenvalue(1, 4.0, 0) == pytest.approx(vals[0] + vals[1], abs=1e-9)
        assert funk_hecke_eigenvalue(1, 4.0, 1) == pytest.approx(vals[0] - vals[1], abs=1e-9)

    @pytest.mark.slow
    def test_d3_k0_against_gegenbauer_route(self):
        # lambda_0 = 2 pi int_{-1}^1 L(sqrt(2-2t)) dt, via t = cos(u)
        lam = funk_hecke_eigenvalue(3, 4.0, 0)
        us = np.linspace(0, np.pi, 801)
        lv, _ = kernel_values("L", 3, 4.0, 2 * np.sin(us / 2))
        oracle = 2 * np.pi * np.trapezoid(lv * np.sin(us), us)
        assert lam == pytest.approx(oracle, rel=2e-4)

    def test_eigenvalues_real_positive_small_k(self):
        for d, q in ((2, 3.6), (2, 4.0), (3, 4.0)):
            for k in (0, 1, 2):
                lam = funk_hecke_eigenvalue(d, q, k)
                assert np.isfinite(lam) and lam > 0


class TestModeMargins:
    @pytest.fixture(scope="class")
    def spec42(self):
        return mode_margins(2, 4.0, 12)

    def test_affine_neutrality(self, spec42):
        m1, m2 = spec42.modes[1], spec42.modes[2]
        assert m1.combined == pytest.approx(m2.combined, abs=1e-9)
        assert m1.margin == pytest.approx(0.0, abs=1e-9)
        assert m2.margin == pytest.approx(0.0, abs=1e-9)

    def test_worst_mode_is_4(self, spec42):
        assert spec42.worst_mode == 4
        assert spec42.worst_margin == pytest.approx(32 / 5, abs=1e-8)

    def test_stability_constant(self, spec42):
        assert spec42.stability_constant == pytest.approx(8 / (5 * np.pi), abs=1e-9)

    def test_gamma_positive_across_q(self):
        for d, q in ((1, 3.5), (1, 4.0), (1, 6.0), (2, 3.6), (2, 4.0), (2, 4.4)):
            assert gamma_qd(d, q) > 0

    def test_q_sweep_margins_continuous(self):
        vals = []
        for q in (3.8, 3.9, 4.0, 4.1, 4.2):
            spec = mode_margins(2, q, 8)
            assert spec.worst_margin > 0
            vals.append(spec.stability_constant)
        assert np.max(np.abs(np.diff(vals))) < 0.2
        assert vals[2] == pytest.approx(8 / (5 * np.pi), abs=1e-9)

    def test_d3_q4_reported(self):
        # the computation the source analysis left open: record the outcome
        spec = mode_margins(3, 4.0, 10)
        print(f"d=3 q=4 worst margin: {spec.worst_margin:.6f} at n={spec.worst_mode}, "
              f"stability {spec.stability_constant:.6f}")
        assert np.isfinite(spec.worst_margin)

    def test_csv_shape(self, spec42):
        lines = spec42.to_csv().strip().split("\n")
        assert lines[0] == "n,ell_hat,combined,margin"
        assert len(lines) == 15
        assert lines[-1].startswith("gamma,")


class TestCircleProfile:
    def test_wraps_kernel(self):
        kern = kernel_profile("L", 2, 4.0, r_max=2.2, n_samples=600)
        prof = CircleProfile(kern)
        th = np.array([0.0, np.pi / 2, np.pi])
        lens = lambda r: np.where(r < 2, 2 * (np.arccos(np.minimum(r, 2) / 2)
                                               - (r / 2) * np.sqrt(np.maximum(0, 1 - r**2 / 4))), 0.0)
        # theta = pi sits at the r = 2 resonance where the sampled profile
        # carries its largest (honestly reported) error
        assert np.allclose(prof(th), lens(np.sqrt(2 - 2 * np.cos(th))), atol=5e-5)
        assert np.allclose(prof(th), prof(-th), atol=1e-12)  # even

    def test_kind_check(self):
        kern = kernel_profile("K", 2, 4.0, r_max=2.0, n_samples=64)
        with pytest.raises(DomainError):
            CircleProfile(kern)


class TestSphereReduced:
    def test_ball_zero(self):
        prof = boundary_profile(IntervalSet([(-1.0, 1.0)]))
        assert sphere_reduced_prediction(prof, 1, 4.0) == 0.0

    def test_translation_neutral_d1(self):
        prof = boundary_profile(IntervalSet([(-1 + 0.04, 1 + 0.04)]))
        val = sphere_reduced_prediction(prof, 1, 4.0)
        assert abs(val) < 1e-10  # gamma term cancels against the L terms exactly

    def test_single_mode_negative_d2(self):
        e = StarSet(1.0, a_coeffs=[0, 0, 0.02]).with_measure(np.pi)
        prof = boundary_profile(e, n_grid=1024, n_modes=16)
        val = sphere_reduced_prediction(prof, 2, 4.0)
        assert val < 0
        # magnitude should be close to the per-mode margin times ||F||^2
        f2 = float(np.mean(prof.f_vals**2) * 2 * np.pi)
        spec = mode_margins(2, 4.0, 8)
        margin3 = next(m.margin for m in spec.modes if m.n == 3)
        assert val == pytest.approx(-margin3 * f2, rel=0.2)
