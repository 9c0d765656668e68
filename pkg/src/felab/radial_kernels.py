"""The ball transform, the radial kernels, and their boundary derivative.

Conventions
-----------
Fourier transform: f^(xi) = int e^{-2 pi i x.xi} f(x) dx.  The unit-ball
transform is radial; with r = |xi|,

    d=1:  B^(r) = sin(2 pi r) / (pi r)
    d=2:  B^(r) = J_1(2 pi r) / r
    d=3:  B^(r) = (sin(2 pi r) - 2 pi r cos(2 pi r)) / (2 pi^2 r^3)

equivalently B^(r) = r^{-d/2} J_{d/2}(2 pi r).  The two kernels are the
radial inverse transforms

    K-kind:  g = B^ |B^|^{q-2}      (first-variation kernel)
    L-kind:  g = |B^|^{q-2}         (second-variation kernel)

computable for q above 3 - 2/(d+1) (K) and q_d = 4 - 2/(d+1) (L).

The boundary derivative gamma = -dK/dr at r = 1 is evaluated spectrally
(differentiating under the integral), which collapses to the nonnegative
integrand

    gamma(q, d) = 4 pi^2 int_0^inf rho^{1 - d(q-2)/2} |J_{d/2}(2 pi rho)|^q drho,

a power envelope times a pi-periodic oscillation in u = 2 pi rho; such
tails are handled exactly by ``tail_power_periodic``.  For d = 1 this is
literally 2 pi^{2-q} int |xi|^{2-q} |sin(2 pi xi)|^q dxi.

Profile evaluation
------------------
d = 1: the periodic factor of the integrand is expanded in its Fourier
series (exact and finite for even q), turning the tail into single
frequencies against int_1^inf xi^{-s} sin(c xi) dxi, which is evaluated to
near machine precision through a Laplace-type contour integral
interpolated by Chebyshev polynomials in log c.  d = 2: graded composite
head plus zero-segmented accelerated tail.  d = 3: the transform
(2/r) int g(rho) rho sin(2 pi rho r) drho decays fast enough for composite
quadrature with an analytic tail bound.

Convention: omega_0 = 1, so the d = 1 instances of the slicing formulas
match the closed forms.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special
from scipy.interpolate import CubicSpline

from ._pwpoly import nfold_indicator_convolution
from .errors import ArityError, CapabilityError, DomainError, ThresholdError
from .quadrature import (
    DEFAULT_CONFIG,
    IntegralResult,
    QuadratureConfig,
    integrate_adaptive,
    integrate_composite,
    integrate_oscillatory_tail,
    tail_power_periodic,
)

__all__ = [
    "omega",
    "q_threshold",
    "BallTransform",
    "ball_hat",
    "RadialKernel",
    "kernel_profile",
    "kernel_values",
    "exact_kernel_1d",
    "gamma_qd",
    "gamma_qd_detailed",
    "gamma_1d_closed_form",
    "rho_d",
    "ball_norm_q",
    "FirstVariationResult",
    "first_variation_check",
    "default_variation_grids",
    "gamma_asymptotic_fit",
    "empirical_holder_exponent",
]


def omega(d: int) -> float:
    """Volume of the unit ball; omega(0) = 1 by convention."""
    if d < 0:
        raise DomainError("dimension must be >= 0")
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def q_threshold(kind: str, d: int) -> float:
    """Computability threshold: q_d = 4 - 2/(d+1) for L, 3 - 2/(d+1) for K."""
    if kind == "L":
        return 4.0 - 2.0 / (d + 1)
    if kind == "K":
        return 3.0 - 2.0 / (d + 1)
    raise DomainError(f"kind must be 'K' or 'L', got {kind!r}")


def _check_exponent(kind: str, d: int, q: float) -> None:
    thr = q_threshold(kind, d)
    if not (q > thr):
        raise ThresholdError(
            f"{kind}-kind kernel needs q > {thr:.6g} in d={d} "
            f"(continuity threshold q_d = 4 - 2/(d+1)); got q = {q}",
            thr,
        )


# ---------------------------------------------------------------------------
# ball transform
# ---------------------------------------------------------------------------

def ball_hat(d: int, r):
    """Fourier transform of the unit-ball indicator at radius r >= 0."""
    if d not in (1, 2, 3):
        raise CapabilityError(f"ball_hat supports d in {{1,2,3}}, got {d}")
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    if np.any(r < 0):
        raise DomainError("radius must be >= 0")
    if d == 1:
        out = 2.0 * np.sinc(2.0 * r)
    elif d == 2:
        x = 2.0 * np.pi * r
        small = x < 1e-4
        out = np.empty_like(r)
        xs = x[small]
        out[small] = np.pi * (1.0 - xs**2 / 8.0 + xs**4 / 192.0)
        xl = x[~small]
        out[~small] = 2.0 * np.pi * special.j1(xl) / xl
    else:
        x = 2.0 * np.pi * r
        small = x < 1e-3
        out = np.empty_like(r)
        xs = x[small]
        out[small] = (4.0 * np.pi / 3.0) * (1.0 - xs**2 / 10.0 + xs**4 / 280.0)
        xl = x[~small]
        out[~small] = (np.sin(xl) - xl * np.cos(xl)) * 4.0 * np.pi / xl**3
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class BallTransform:
    """The radial profile r -> B^(r) for the unit ball in dimension d."""

    dimension: int

    def __call__(self, r):
        return ball_hat(self.dimension, r)

    @property
    def volume(self) -> float:
        return omega(self.dimension)


def _g_radial(kind: str, d: int, q: float, rho: np.ndarray) -> np.ndarray:
    """The kernel's Fourier-side profile g(rho) = B^ |B^|^{q-2} or |B^|^{q-2}."""
    bh = ball_hat(d, rho)
    mag = np.abs(bh) ** (q - 2.0)
    return bh * mag if kind == "K" else mag


# ---------------------------------------------------------------------------
# single-frequency algebraic tails (d = 1 engine)
# ---------------------------------------------------------------------------

class _PowerTail:
    """T(c) = int_1^inf xi^{-s} sin(c xi) dxi and the cosine companion U(c).

    Both come from M(c) = int_0^inf (1+iu)^{-s} e^{-cu} du via a contour
    rotation: int_1^inf xi^{-s} e^{ic xi} dxi = i e^{ic} M(c), so

        U(c) = -sin(c) Re M - cos(c) Im M
        T(c) =  cos(c) Re M - sin(c) Im M.

    M is analytic in Re c > 0; it is interpolated by Chebyshev polynomials
    in log c on [log 2, log c_max] and integrated directly for c < 2.
    """

    C_LO = 2.0

    def __init__(self, s: float, c_max: float, n_nodes: int = 160):
        if s <= 1.0:
            raise DomainError("power tail needs decay exponent s > 1")
        self.s = s
        self.c_max = max(c_max, 10.0)
        self.lo = math.log(self.C_LO)
        self.hi = math.log(self.c_max * 1.05)
        k = np.arange(n_nodes)
        w = np.cos(np.pi * (k + 0.5) / n_nodes)  # Chebyshev points in (-1, 1)
        logc = 0.5 * (self.hi + self.lo) + 0.5 * (self.hi - self.lo) * w
        vals = np.array([self._m_direct(math.exp(lc)) for lc in logc])
        self._cheb_re = np.polynomial.chebyshev.chebfit(w, vals.real, n_nodes - 1)
        self._cheb_im = np.polynomial.chebyshev.chebfit(w, vals.imag, n_nodes - 1)
        self._small_cache: dict[float, complex] = {}

    def _m_direct(self, c: float) -> complex:
        # substituted form M(c) = (1/c) int_0^inf (1 + iv/c)^{-s} e^{-v} dv
        # keeps the integrand O(1)-scaled for every c > 0
        s = self.s
        cfg = QuadratureConfig(abs_tol=1e-16, rel_tol=1e-14, max_subdivisions=4000)

        def re_part(v):
            w = v / c
            return (1.0 + w * w) ** (-s / 2.0) * np.cos(s * np.arctan(w)) * np.exp(-v)

        def im_part(v):
            w = v / c
            return -((1.0 + w * w) ** (-s / 2.0)) * np.sin(s * np.arctan(w)) * np.exp(-v)

        rr = integrate_adaptive(re_part, 0.0, 50.0, cfg).value
        ii = integrate_adaptive(im_part, 0.0, 50.0, cfg).value
        return complex(rr, ii) / c

    def _m(self, c: np.ndarray) -> np.ndarray:
        out = np.empty(len(c), dtype=complex)
        big = c >= self.C_LO
        if np.any(big):
            w = (2.0 * np.log(c[big]) - (self.hi + self.lo)) / (self.hi - self.lo)
            out[big] = (np.polynomial.chebyshev.chebval(w, self._cheb_re)
                        + 1j * np.polynomial.chebyshev.chebval(w, self._cheb_im))
        for idx in np.nonzero(~big)[0]:
            key = float(c[idx])
            if key not in self._small_cache:
                self._small_cache[key] = self._m_direct(key)
            out[idx] = self._small_cache[key]
        return out

    def sin_tail(self, c) -> np.ndarray:
        """T(c) with the odd extension T(-c) = -T(c); T(0) = 0."""
        c = np.atleast_1d(np.asarray(c, dtype=float))
        sign = np.sign(c)
        ca = np.abs(c)
        out = np.zeros_like(ca)
        nz = ca > 0
        m = self._m(ca[nz])
        out[nz] = np.cos(ca[nz]) * m.real - np.sin(ca[nz]) * m.imag
        return sign * out

    def cos_tail(self, c) -> np.ndarray:
        """U(c) with the even extension; U(0) = 1/(s-1)."""
        c = np.atleast_1d(np.asarray(c, dtype=float))
        ca = np.abs(c)
        out = np.full_like(ca, 1.0 / (self.s - 1.0))
        nz = ca > 0
        m = self._m(ca[nz])
        out[nz] = -np.sin(ca[nz]) * m.real - np.cos(ca[nz]) * m.imag
        return out


@lru_cache(maxsize=32)
def _power_tail(s: float, c_max: float) -> _PowerTail:
    return _PowerTail(s, c_max)


# Fourier expansions of the periodic factors.  K-kind: sin(u)|sin u|^{q-2}
# = sum over odd j of b_j sin(ju); L-kind: |sin u|^{q-2} = a_0 + sum a_m cos(2mu).
_EXACT_SIN_COEFFS = {
    4.0: {1: 0.75, 3: -0.25},
    6.0: {1: 0.625, 3: -0.3125, 5: 0.0625},
    8.0: {1: 35 / 64, 3: -21 / 64, 5: 7 / 64, 7: -1 / 64},
}
_EXACT_COS_COEFFS = {
    4.0: (0.5, {1: -0.5}),
    6.0: (0.375, {1: -0.5, 2: 0.125}),
    8.0: (0.3125, {1: -15 / 32, 2: 3 / 16, 3: -1 / 32}),
}


def _periodic_mesh() -> tuple:
    edges = _graded_edges(0.0, np.pi, (0.0, np.pi), base=np.pi / 2048)
    return _composite_matrix(None, edges)


@lru_cache(maxsize=64)
def _sin_coeffs(q: float) -> tuple:
    """((j, b_j), ..., tail_bound) for sin(u)|sin u|^{q-2} = sum b_j sin(ju), j odd."""
    if q in _EXACT_SIN_COEFFS:
        return (tuple(sorted(_EXACT_SIN_COEFFS[q].items())), 0.0)
    nodes, weights = _periodic_mesh()
    f = np.sin(nodes) * np.abs(np.sin(nodes)) ** (q - 2.0) * weights
    js = np.arange(1, 802, 2)
    coeffs = (2.0 / np.pi) * (np.sin(np.outer(js, nodes)) @ f)
    keep = np.abs(coeffs) > 1e-15
    # series truncated where |b_j| ~ j^-q falls below this bound's reach
    tail_bound = float(np.abs(coeffs[-1])) * js[-1] / max(q - 1.0, 0.5)
    return (tuple(zip(js[keep].tolist(), coeffs[keep].tolist())), tail_bound)


@lru_cache(maxsize=64)
def _cos_coeffs(q: float) -> tuple:
    """(a_0, ((m, a_m), ...), tail_bound) for |sin u|^{q-2} = a_0 + sum a_m cos(2mu)."""
    if q in _EXACT_COS_COEFFS:
        a0, rest = _EXACT_COS_COEFFS[q]
        return (a0, tuple(sorted(rest.items())), 0.0)
    nodes, weights = _periodic_mesh()
    f = np.abs(np.sin(nodes)) ** (q - 2.0) * weights
    a0 = float(np.sum(f)) / np.pi
    ms = np.arange(1, 401)
    coeffs = (2.0 / np.pi) * (np.cos(2.0 * np.outer(ms, nodes)) @ f)
    keep = np.abs(coeffs) > 1e-15
    tail_bound = float(np.abs(coeffs[-1])) * ms[-1] / max(q - 2.0, 0.5)
    return (a0, tuple(zip(ms[keep].tolist(), coeffs[keep].tolist())), tail_bound)


def _graded_edges(a: float, b: float, singular: tuple, base: float, levels: int = 42) -> np.ndarray:
    """Panel edges on [a, b], dyadically refined toward each singular point."""
    edges = set(np.arange(a, b, base))
    edges.add(b)
    for s in singular:
        if not (a <= s <= b):
            continue
        h = base
        for _ in range(levels):
            h *= 0.5
            for e in (s - h, s + h):
                if a < e < b:
                    edges.add(e)
    return np.array(sorted(edges))


def _composite_matrix(f_of_xi, edges: np.ndarray):
    """GK15 nodes/weights on the panel mesh, for integrands evaluated per node."""
    from .quadrature import _GK_NODES, _GK_WEIGHTS  # panel rule internals

    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GK_NODES[None, :]).ravel()
    weights = (half[:, None] * _GK_WEIGHTS[None, :]).ravel()
    return nodes, weights


def _kernel_values_1d(kind: str, q: float, radii: np.ndarray, cfg: QuadratureConfig):
    s = q - 1.0 if kind == "K" else q - 2.0
    pref = 2.0 * np.pi ** (1.0 - q) if kind == "K" else 2.0 * np.pi ** (2.0 - q)
    x = np.asarray(radii, dtype=float)

    # head: the full integrand on [0, 1], graded toward the sin zeros
    edges = _graded_edges(0.0, 1.0, (0.5, 1.0), base=1.0 / 48)
    nodes, weights = _composite_matrix(None, edges)
    sin_part = np.sin(2 * np.pi * nodes)
    if kind == "K":
        periodic = sin_part * np.abs(sin_part) ** (q - 2.0)
        envelope = nodes ** (1.0 - q)
    else:
        periodic = np.abs(sin_part) ** (q - 2.0)
        envelope = nodes ** (2.0 - q)
    base_w = weights * periodic * np.where(nodes > 0, envelope, 0.0)
    # the xi -> 0 limit of the integrand is finite; the first node is interior anyway
    head = np.cos(2 * np.pi * np.outer(x, nodes)) @ base_w

    # tail: exact frequency decomposition against power-law integrals
    c_abs_max = 2 * np.pi * (820 + float(np.max(x)) + 2)
    pt = _power_tail(s, c_abs_max)
    tail = np.zeros_like(x)
    if kind == "K":
        coeffs, trunc = _sin_coeffs(q)
        for j, bj in coeffs:
            tail += bj * 0.5 * (pt.sin_tail(2 * np.pi * (j + x)) + pt.sin_tail(2 * np.pi * (j - x)))
    else:
        a0, coeffs, trunc = _cos_coeffs(q)
        tail += a0 * pt.cos_tail(2 * np.pi * x)
        for m, am in coeffs:
            tail += am * 0.5 * (pt.cos_tail(2 * np.pi * (2 * m + x)) + pt.cos_tail(2 * np.pi * (2 * m - x)))
    values = pref * (head + tail)
    errors = np.full_like(values, pref * trunc + 1e-11 * (1.0 + np.abs(values)))
    return values, errors


def _j0_zero_segments(r: float, start: float, count: int) -> np.ndarray:
    """Segment edges at the zeros of J_0(2 pi rho r), starting past ``start``."""
    first = math.ceil(2.0 * r * start + 0.75)
    return (np.arange(first, first + count + 1) - 0.25) / (2.0 * r)


def _kernel_values_2d_K(q: float, radii: np.ndarray, cfg: QuadratureConfig):
    # K-kind integrand decays like rho^{(3-3q)/2} <= rho^{-4} for q > 11/3:
    # composite head plus a short zero-segmented tail is plenty
    x = np.asarray(radii, dtype=float)
    r0 = 40.0
    edges = np.linspace(0.0, r0, int(r0 * 24) + 1)
    nodes, weights = _composite_matrix(None, edges)
    base_w = 2.0 * np.pi * weights * _g_radial("K", 2, q, nodes) * nodes
    values = np.empty_like(x)
    errors = np.empty_like(x)
    for lo in range(0, len(x), 256):
        xi = x[lo:lo + 256]
        values[lo:lo + 256] = special.j0(2 * np.pi * np.outer(xi, nodes)) @ base_w
    n_seg = max(96, cfg.oscillatory_tail_terms)
    tail_cfg = QuadratureConfig(max(cfg.abs_tol, 1e-12), cfg.rel_tol,
                                cfg.max_subdivisions, n_seg)
    for i, r in enumerate(x):
        f = (lambda rho, rr=r: 2.0 * np.pi * _g_radial("K", 2, q, rho) * rho
             * special.j0(2 * np.pi * rho * rr))
        segs = r0 + 0.5 * np.arange(n_seg + 1) if r < 0.75 else _j0_zero_segments(r, r0, n_seg)
        res = integrate_oscillatory_tail(f, segs, tail_cfg)
        values[i] += res.value
        errors[i] = res.error_estimate + 1e-11 * (1.0 + abs(values[i]))
    return values, errors


def _kernel_values_2d_L(q: float, radii: np.ndarray, cfg: QuadratureConfig):
    """L-kind via the exact amplitude-phase split of the Bessel factor.

    With J_1 = A cos(phi), Y_1 = A sin(phi) (A, phi exact; A^2 = J_1^2+Y_1^2),

        |B^|^{q-2} rho = rho^{3-q} A(2 pi rho)^{q-2} |cos phi|^{q-2},

    and |cos phi|^{q-2} = a_0 + sum a_m cos(2 m phi).  The a_0 part has a
    smooth positive envelope and alternates exactly between J_0 zeros
    (Aitken-accelerated); the oscillatory remainder is integrated on a
    fixed mesh and its tail bounded by a van der Corput estimate.
    """
    x = np.asarray(radii, dtype=float)
    rho0, z_cut = 1.0, 160.0
    a0, coeffs, coeff_trunc = _cos_coeffs(q)

    def envelope(rho):
        xx = 2.0 * np.pi * rho
        amp = np.hypot(special.j1(xx), special.y1(xx))
        return 2.0 * np.pi * rho ** (3.0 - q) * amp ** (q - 2.0)

    # head: full integrand on [0, rho0]
    edges = np.linspace(0.0, rho0, 65)
    h_nodes, h_weights = _composite_matrix(None, edges)
    head_w = 2.0 * np.pi * h_weights * _g_radial("L", 2, q, h_nodes) * h_nodes
    values = special.j0(2 * np.pi * np.outer(x, h_nodes)) @ head_w

    # oscillatory harmonics on [rho0, z_cut], shared mesh for all radii
    edges = np.linspace(rho0, z_cut, int((z_cut - rho0) * 12) + 1)
    nodes, weights = _composite_matrix(None, edges)
    xx = 2.0 * np.pi * nodes
    amp = np.hypot(special.j1(xx), special.y1(xx))
    phi = np.unwrap(np.arctan2(special.y1(xx), special.j1(xx)))
    # stored coefficients expand |sin u|^{q-2}; here the argument is cos phi,
    # and |cos u| = |sin(u + pi/2)| flips odd harmonics: a_m -> (-1)^m a_m
    osc = np.zeros_like(nodes)
    sum_am = 0.0
    for m, am in coeffs:
        osc += am * (-1.0) ** m * np.cos(2.0 * m * phi)
        sum_am += abs(am)
    osc_w = weights * 2.0 * np.pi * nodes ** (3.0 - q) * amp ** (q - 2.0) * osc
    for lo in range(0, len(x), 256):
        xi = x[lo:lo + 256]
        values[lo:lo + 256] += special.j0(2 * np.pi * np.outer(xi, nodes)) @ osc_w

    # van der Corput tail bound for the harmonics beyond z_cut (phase rate
    # >= 2 pi per unit rho for every m >= 1), plus the truncated-series slack
    env_z = envelope(z_cut)
    damp = np.minimum(1.0, 1.0 / np.sqrt(np.pi**2 * z_cut * np.maximum(x, 1e-12)))
    osc_bound = sum_am * env_z * damp / np.pi + coeff_trunc * env_z
    # near r = 2m the difference chirp of the m-th harmonic against J_0 goes
    # stationary (the lens-kink radius for q = 4); bound that piece by its
    # un-cancelled envelope integral
    beta = (3.0 * q - 7.0) / 2.0
    for m, am in coeffs:
        res_mask = np.abs(x - 2.0 * m) < 0.5
        if np.any(res_mask):
            osc_bound = osc_bound + np.where(
                res_mask, abs(am) * env_z * damp * z_cut / max(beta - 1.0, 0.5), 0.0)

    # smooth a0 part on [rho0, inf): alternating between J_0 zeros
    errors = np.empty_like(x)
    n_seg = max(128, 2 * cfg.oscillatory_tail_terms)
    tail_cfg = QuadratureConfig(max(cfg.abs_tol, 1e-12), cfg.rel_tol,
                                cfg.max_subdivisions, n_seg)
    p_smooth = q / 2.0 - 2.0 + (q - 2.0)  # envelope decay exponent of E0
    for i, r in enumerate(x):
        f0 = (lambda rho, rr=r: a0 * envelope(rho) * special.j0(2 * np.pi * rho * rr))
        if r < 1e-9:
            res = tail_power_periodic(lambda rho: a0 * envelope(rho), rho0, 0.5,
                                      max(1.2, p_smooth), tail_cfg)
        else:
            segs = _j0_zero_segments(r, rho0, n_seg)
            if segs[0] > rho0:
                res_head = integrate_adaptive(f0, rho0, segs[0],
                                              QuadratureConfig(1e-13, 1e-12, 2000))
                values[i] += res_head.value
            res = integrate_oscillatory_tail(f0, segs, tail_cfg)
        values[i] += res.value
        errors[i] = res.error_estimate + osc_bound[i] + 1e-11 * (1.0 + abs(values[i]))
    return values, errors


def _kernel_values_2d(kind: str, q: float, radii: np.ndarray, cfg: QuadratureConfig):
    if kind == "K":
        return _kernel_values_2d_K(q, radii, cfg)
    return _kernel_values_2d_L(q, radii, cfg)


def _kernel_values_3d(kind: str, q: float, radii: np.ndarray, cfg: QuadratureConfig):
    # value(r) = (2/r) int_0^inf g(rho) rho sin(2 pi rho r) drho; integrand
    # decays like rho^{1 - 2(q-1)} (K) / rho^{1 - 2(q-2)} (L): composite + bound
    x = np.asarray(radii, dtype=float)
    decay = 2.0 * (q - 1.0) - 1.0 if kind == "K" else 2.0 * (q - 2.0) - 1.0
    r_cut = max(60.0, (1e8) ** (1.0 / decay)) if decay < 8 else 60.0
    edges = np.linspace(0.0, r_cut, int(r_cut * 24) + 1)
    nodes, weights = _composite_matrix(None, edges)
    g = _g_radial(kind, 3, q, nodes)
    base_w = weights * g * nodes
    out = np.empty_like(x)
    pos = x > 1e-12
    sin_mat = np.sin(2 * np.pi * np.outer(x[pos], nodes))
    out[pos] = (2.0 / x[pos]) * (sin_mat @ base_w)
    if np.any(~pos):
        # r -> 0 limit: 4 pi int g rho^2 drho
        out[~pos] = 4.0 * np.pi * float(np.sum(weights * g * nodes**2))
    tail_bound = abs(2.0 * np.pi * np.max(np.abs(g[-50:])) * nodes[-1]) * 2.0
    errors = np.full_like(out, tail_bound + 1e-11 * np.abs(out))
    return out, errors


def kernel_values(kind: str, d: int, q: float, radii, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Kernel values at arbitrary radii (the engine behind kernel_profile)."""
    _check_exponent(kind, d, q)
    radii = np.asarray(radii, dtype=float)
    if np.any(radii < 0):
        raise DomainError("radii must be >= 0")
    if d == 1:
        return _kernel_values_1d(kind, q, radii, cfg)
    if d == 2:
        return _kernel_values_2d(kind, q, radii, cfg)
    if d == 3:
        return _kernel_values_3d(kind, q, radii, cfg)
    raise CapabilityError(f"kernel profiles support d in {{1,2,3}}, got {d}")


@dataclass(frozen=True)
class RadialKernel:
    """Sampled radial kernel profile with cubic interpolation."""

    kind: str
    dimension: int
    exponent: float
    radii: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    interpolation_order: int = 3
    _spline: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_spline", CubicSpline(self.radii, self.values))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = self._spline(np.clip(r, self.radii[0], self.radii[-1]))
        return np.where(r > self.radii[-1], 0.0, out)

    @property
    def r_max(self) -> float:
        return float(self.radii[-1])

    def error_bound(self) -> float:
        return float(np.max(self.errors))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("radius,value,error\n")
        for r, v, e in zip(self.radii, self.values, self.errors):
            buf.write(f"{r:.17g},{v:.17g},{e:.17g}\n")
        return buf.getvalue()


def kernel_profile(kind: str, d: int, q: float, r_max: float | None = None,
                   n_samples: int = 2048, cfg: QuadratureConfig = DEFAULT_CONFIG) -> RadialKernel:
    """Sample the K- or L-kind kernel on a uniform radius grid [0, r_max]."""
    _check_exponent(kind, d, q)
    if r_max is None:
        r_max = max(q, 4.0)
    if r_max <= 0 or n_samples < 8:
        raise DomainError("need r_max > 0 and n_samples >= 8")
    radii = np.linspace(0.0, r_max, n_samples)
    values, errors = kernel_values(kind, d, q, radii, cfg)
    return RadialKernel(kind, d, q, radii, values, errors)


def exact_kernel_1d(kind: str, q: int):
    """Exact piecewise-polynomial d=1 kernel for even integer q (test oracle)."""
    if q % 2 or q < 4:
        raise DomainError("exact kernels exist for even integer q >= 4")
    n = q - 1 if kind == "K" else q - 2
    return nfold_indicator_convolution([(-1, 1)], n, exact=True)


# ---------------------------------------------------------------------------
# gamma, rho, and the first-variation condition
# ---------------------------------------------------------------------------

def gamma_qd_detailed(d: int, q: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> IntegralResult:
    """-dK_q/dr at r = 1, by differentiation under the integral sign.

    Inserting the ring factor turns the derivative into
    4 pi^2 int rho^{1-d(q-2)/2} |J_{d/2}(2 pi rho)|^q drho (nonnegative
    integrand).  Requires q > 3: below that the defining integral diverges
    and K_q is no longer differentiable at the boundary.
    """
    if not (q > 3.0):
        raise ThresholdError(f"gamma requires q > 3 (K differentiability); got q = {q}", 3.0)
    order = d / 2.0
    expo = 1.0 - d * (q - 2.0) / 2.0

    def f(rho):
        with np.errstate(invalid="ignore"):
            jj = special.jv(order, 2 * np.pi * rho)
        return np.where(rho > 0, rho**expo, 0.0) * np.abs(jj) ** q

    u0 = 20.0
    head = integrate_adaptive(f, 0.0, u0, QuadratureConfig(1e-14, 1e-13, cfg.max_subdivisions))
    p_tail = d * (q - 2.0) / 2.0 + q / 2.0 - 1.0
    tail = tail_power_periodic(f, u0, 0.5, p_tail,
                               QuadratureConfig(1e-13, 1e-12, cfg.max_subdivisions,
                                                cfg.oscillatory_tail_terms))
    value = 4.0 * np.pi**2 * (head.value + tail.value)
    err = 4.0 * np.pi**2 * (head.error_estimate + tail.error_estimate)
    return IntegralResult(value, err, converged=err <= cfg.tolerance(value))


def gamma_qd(d: int, q: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    return gamma_qd_detailed(d, q, cfg).value


def gamma_1d_closed_form(q: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """2 pi^{2-q} int_R |xi|^{2-q} |sin(2 pi xi)|^q dxi (d = 1 closed form)."""
    if not (q > 3.0):
        raise ThresholdError(f"the closed-form integral converges only for q > 3; got {q}", 3.0)

    def f(xi):
        return np.where(xi > 0, xi ** (2.0 - q), 0.0) * np.abs(np.sin(2 * np.pi * xi)) ** q

    head = integrate_adaptive(f, 0.0, 10.0, QuadratureConfig(1e-14, 1e-13, cfg.max_subdivisions))
    tail = tail_power_periodic(f, 10.0, 0.5, q - 2.0,
                               QuadratureConfig(1e-13, 1e-12, cfg.max_subdivisions,
                                                cfg.oscillatory_tail_terms))
    return 4.0 * np.pi ** (2.0 - q) * (head.value + tail.value)


def rho_d(d: int, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """2 pi omega_{d-1} / omega_d times int_-1^1 s^2 (1-s^2)^{(d-1)/2} ds."""
    if d < 1:
        raise DomainError("d must be >= 1")

    def f(t):  # s = sin t removes the endpoint singularity
        return np.sin(t) ** 2 * np.cos(t) ** d

    integral = integrate_adaptive(f, -np.pi / 2, np.pi / 2,
                                  QuadratureConfig(1e-14, 1e-13, cfg.max_subdivisions)).value
    return 2.0 * np.pi * omega(d - 1) / omega(d) * integral


def ball_norm_q(d: int, q: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> IntegralResult:
    """||B^||_q^q = d omega_d int_0^inf rho^{d-1} |B^(rho)|^q drho."""
    if q <= 2.0:
        raise DomainError("q must exceed 2")

    def f(rho):
        return np.where(rho > 0, rho, 0.0) ** (d - 1) * np.abs(ball_hat(d, rho)) ** q

    u0 = 20.0
    head = integrate_adaptive(f, 0.0, u0, QuadratureConfig(1e-15, 1e-14, cfg.max_subdivisions))
    p_tail = q * (d + 1.0) / 2.0 - (d - 1.0)
    tail = tail_power_periodic(f, u0, 0.5, p_tail,
                               QuadratureConfig(1e-14, 1e-13, cfg.max_subdivisions,
                                                cfg.oscillatory_tail_terms))
    scale = d * omega(d)
    value = scale * (head.value + tail.value)
    err = scale * (head.error_estimate + tail.error_estimate)
    return IntegralResult(value, err, converged=err <= cfg.tolerance(value))


@dataclass(frozen=True)
class FirstVariationResult:
    inner_min: float
    outer_max: float
    satisfied: bool
    margin: float
    error_bound: float


def default_variation_grids(d: int, q: float, n: int = 256, r_max: float | None = None):
    """Grids straddling r = 1 with a one-step gap (K is continuous at 1)."""
    if r_max is None:
        r_max = max(q, 4.0)
    inner = np.linspace(0.0, 1.0, n + 1)[:n]
    outer = np.linspace(1.0, r_max, n + 1)[1:]
    return inner, outer


def first_variation_check(d: int, q: float, inner_grid, outer_grid,
                          cfg: QuadratureConfig = DEFAULT_CONFIG) -> FirstVariationResult:
    """Check min K over the inside grid >= max K over the outside grid."""
    inner = np.asarray(inner_grid, dtype=float)
    outer = np.asarray(outer_grid, dtype=float)
    if len(inner) == 0 or len(outer) == 0:
        raise ArityError("grids must be nonempty")
    vi, ei = kernel_values("K", d, q, inner, cfg)
    vo, eo = kernel_values("K", d, q, outer, cfg)
    i_min = int(np.argmin(vi))
    i_max = int(np.argmax(vo))
    inner_min = float(vi[i_min])
    outer_max = float(vo[i_max])
    err = float(ei[i_min] + eo[i_max])
    margin = inner_min - outer_max
    return FirstVariationResult(inner_min, outer_max, margin >= -err, margin, err)


def gamma_asymptotic_fit(d: int, q_list, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Fit log gamma - q log omega_d against log q; slope -> -(d+2)/2."""
    q_arr = np.asarray(sorted(q_list), dtype=float)
    if len(q_arr) < 4:
        raise ArityError("need at least 4 exponents for the asymptotic fit")
    log_w = math.log(omega(d))
    ys = []
    for q in q_arr:
        g = gamma_qd(d, float(q), cfg)
        ys.append(math.log(g) - q * log_w)
    slope, intercept = np.polyfit(np.log(q_arr), ys, 1)
    return {"slope": float(slope), "kappa_estimate": float(math.exp(intercept))}


def empirical_holder_exponent(kernel: RadialKernel) -> float:
    """Fitted modulus-of-continuity exponent of a sampled profile (report only)."""
    v = kernel.values
    hs, mods = [], []
    step = 1
    for _ in range(6):
        diffs = np.abs(v[step:] - v[:-step])
        hs.append(step * (kernel.radii[1] - kernel.radii[0]))
        mods.append(float(np.max(diffs)))
        step *= 2
    hs, mods = np.array(hs), np.array(mods)
    keep = mods > 0
    if np.count_nonzero(keep) < 2:
        return 1.0
    return float(np.polyfit(np.log(hs[keep]), np.log(mods[keep]), 1)[0])
