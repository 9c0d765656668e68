"""Numerical backbone: special functions and integration engines.

Everything downstream (radial kernels, the functional, the sphere spectrum)
runs on the three engines in this module:

* ``integrate_adaptive``    -- deterministic adaptive bisection with a
  Gauss-Kronrod 15(7) panel rule.  Identical inputs and config produce
  bit-identical results: intervals are processed worst-error-first with
  insertion order as the tie-break, and sums are accumulated in a fixed
  order.
* ``integrate_oscillatory_tail`` -- sums inter-zero segment integrals of a
  slowly decaying oscillatory integrand and accelerates the segment series
  (iterated Aitken for alternating sums, Richardson for one-signed
  algebraically decaying sums, plain truncation as the fallback).
* ``tail_power_periodic``   -- tail integrator for integrands of the form
  (algebraic envelope) x (fixed-period oscillation), the shape every
  Bessel-power tail in this package reduces to.  Integrating over exact
  periods removes the oscillation to leading order; Richardson
  extrapolation in the number of periods removes the algebraic remainder.

Integrands must accept numpy arrays.  Non-finite integrand values (isolated
integrable singularities) are treated as zero and left to the adaptive
refinement.

All functions here are pure; there is no shared mutable state.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ArityError, DomainError

__all__ = [
    "QuadratureConfig",
    "IntegralResult",
    "DEFAULT_CONFIG",
    "bessel_j",
    "bessel_zeros",
    "gegenbauer",
    "integrate_adaptive",
    "integrate_composite",
    "integrate_oscillatory_tail",
    "tail_power_periodic",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budgets shared by all integration routines.

    ``oscillatory_tail_terms`` is the number of inter-zero (or per-period)
    segments summed before series acceleration kicks in.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 4000
    oscillatory_tail_terms: int = 64

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0 or self.abs_tol + self.rel_tol <= 0:
            raise DomainError("require abs_tol, rel_tol >= 0 and abs_tol + rel_tol > 0")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")
        if self.oscillatory_tail_terms < 1:
            raise DomainError("oscillatory_tail_terms must be >= 1")

    def tolerance(self, scale: float = 1.0) -> float:
        return max(self.abs_tol, self.rel_tol * abs(scale))


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    converged: bool

    def __post_init__(self):
        if self.error_estimate < 0:
            raise DomainError("error_estimate must be >= 0")


# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------

def bessel_j(order: float, x):
    """Bessel function J_order for half-integer or integer order >= 0.

    Half-integer orders go through the closed trigonometric (spherical
    Bessel) forms; integer orders are delegated to the library evaluator,
    which switches between series and asymptotics internally.
    """
    twice = round(2 * order)
    if not np.isclose(2 * order, twice) or twice < 0:
        raise DomainError(f"order must be a nonnegative half-integer, got {order}")
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("bessel_j requires finite x")
    if np.any(arr < 0):
        raise DomainError("bessel_j requires x >= 0")
    if twice % 2 == 0:
        out = special.jv(int(order), arr)
    else:
        n = (twice - 1) // 2
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.sqrt(2.0 * arr / np.pi) * special.spherical_jn(n, arr)
        out = np.where(arr == 0.0, 0.0, out)
    return out if isinstance(x, np.ndarray) else float(out)


def bessel_zeros(order: float, count: int) -> np.ndarray:
    """First ``count`` positive zeros of J_order (order half-integer or integer)."""
    if count < 1:
        raise ArityError("count must be >= 1")
    twice = round(2 * order)
    if twice % 2 == 0:
        return special.jn_zeros(int(order), count)
    if np.isclose(order, 0.5):
        return np.pi * np.arange(1, count + 1)
    # bracket the zeros around their asymptotic positions (k + order/2 - 1/4) pi
    from scipy.optimize import brentq

    zeros = []
    k = 1
    guard = 0
    while len(zeros) < count and guard < 10 * count + 100:
        guard += 1
        approx = (k + order / 2.0 - 0.25) * np.pi
        a, b = approx - 0.45 * np.pi, approx + 0.45 * np.pi
        a = max(a, order + 1e-6)
        fa, fb = bessel_j(order, a), bessel_j(order, b)
        if fa * fb < 0:
            zeros.append(brentq(lambda t: bessel_j(order, t), a, b, xtol=1e-13))
        k += 1
    if len(zeros) < count:
        raise DomainError(f"failed to bracket {count} zeros of J_{order}")
    return np.array(zeros)


def gegenbauer(k: int, lam: float, t: float) -> float:
    """Gegenbauer polynomial C_k^lam(t) by the three-term recurrence.

    For lam = 0 (the circle case) returns the Chebyshev normalization
    cos(k arccos t), which is the correct Funk-Hecke weight on S^1.
    """
    if k < 0:
        raise DomainError("k must be >= 0")
    if lam <= -0.5:
        raise DomainError("lam must exceed -1/2")
    if abs(t) > 1 + 1e-14:
        raise DomainError("t must lie in [-1, 1]")
    t = min(1.0, max(-1.0, t))
    if lam == 0.0:
        return math.cos(k * math.acos(t))
    if k == 0:
        return 1.0
    if k == 1:
        return 2.0 * lam * t
    c_prev, c_cur = 1.0, 2.0 * lam * t
    for m in range(2, k + 1):
        c_next = (2.0 * (m + lam - 1.0) * t * c_cur - (m + 2.0 * lam - 2.0) * c_prev) / m
        c_prev, c_cur = c_cur, c_next
    return c_cur


# ---------------------------------------------------------------------------
# Gauss-Kronrod 15(7) panel rule
# ---------------------------------------------------------------------------

_GK_NODES = np.array([
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])

_GK_WEIGHTS = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])

# the 7-point Gauss rule lives on the odd-indexed Kronrod nodes
_G_WEIGHTS = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
])


def _eval_clean(f, x: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        y = np.asarray(f(x), dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape).astype(float)
    return np.nan_to_num(y, nan=0.0, posinf=0.0, neginf=0.0)


def _gk15_batch(f, a: np.ndarray, b: np.ndarray):
    """Kronrod value and |K - G| error for a batch of panels (vectorized)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid[:, None] + half[:, None] * _GK_NODES[None, :]
    y = _eval_clean(f, x)
    kron = half * (y @ _GK_WEIGHTS)
    gauss = half * (y[:, 1::2] @ _G_WEIGHTS)
    return kron, np.abs(kron - gauss)


def integrate_adaptive(f, a: float, b: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> IntegralResult:
    """Adaptive bisection with the GK15 rule on [a, b].

    Deterministic: the worst interval (by error estimate, ties broken by
    creation order) is bisected until the summed error meets the tolerance
    or the subdivision budget is exhausted.
    """
    if not (a < b):
        raise DomainError(f"require a < b, got [{a}, {b}]")
    kron, err = _gk15_batch(f, np.array([a]), np.array([b]))
    counter = 0
    # heap entries: (-error, insertion counter, a, b, value, error)
    heap = [(-float(err[0]), counter, a, b, float(kron[0]), float(err[0]))]
    total_val = float(kron[0])
    total_err = float(err[0])
    n_splits = 0
    while n_splits < cfg.max_subdivisions and total_err > cfg.tolerance(total_val):
        neg_err, cnt, ia, ib, ival, ierr = heapq.heappop(heap)
        if ierr == 0.0 or ib - ia < 1e-14 * max(1.0, abs(ia), abs(ib)):
            heapq.heappush(heap, (neg_err, cnt, ia, ib, ival, ierr))
            break
        im = 0.5 * (ia + ib)
        kron2, err2 = _gk15_batch(f, np.array([ia, im]), np.array([im, ib]))
        total_val += float(kron2[0] + kron2[1]) - ival
        total_err += float(err2[0] + err2[1]) - ierr
        counter += 1
        heapq.heappush(heap, (-float(err2[0]), counter, ia, im, float(kron2[0]), float(err2[0])))
        counter += 1
        heapq.heappush(heap, (-float(err2[1]), counter, im, ib, float(kron2[1]), float(err2[1])))
        n_splits += 1
    value = math.fsum(item[4] for item in heap)
    error = math.fsum(item[5] for item in heap)
    return IntegralResult(value, error, converged=error <= cfg.tolerance(value))


def integrate_composite(f, a: float, b: float, n_panels: int) -> IntegralResult:
    """Non-adaptive composite GK15 over equal panels, one vectorized call."""
    if not (a < b):
        raise DomainError(f"require a < b, got [{a}, {b}]")
    edges = np.linspace(a, b, n_panels + 1)
    kron, err = _gk15_batch(f, edges[:-1], edges[1:])
    value = float(np.sum(kron))
    error = float(np.sum(err))
    return IntegralResult(value, error, converged=True)


# ---------------------------------------------------------------------------
# oscillatory tails
# ---------------------------------------------------------------------------

def _aitken_accelerate(partial: np.ndarray):
    """Iterated Aitken delta-squared on a partial-sum sequence."""
    s = partial.astype(float)
    best = s[-1]
    err = abs(s[-1] - s[-2]) if len(s) > 1 else abs(s[-1])
    for _ in range(12):
        if len(s) < 3:
            break
        d1 = s[1:-1] - s[:-2]
        d2 = s[2:] - 2.0 * s[1:-1] + s[:-2]
        with np.errstate(all="ignore"):
            t = s[:-2] - d1 * d1 / d2
        t = t[np.isfinite(t)]
        if len(t) == 0:
            break
        new_err = abs(t[-1] - best)
        best = t[-1]
        err = new_err
        s = t
    return float(best), float(err)


def _richardson_partial_sums(partial: np.ndarray, p_tail: float):
    """Richardson extrapolation of S_K -> S_inf for S_inf - S_K ~ C K^(-p_tail).

    Uses the partial sums at K, K/2, K/4, ... and the exponent ladder
    p_tail, p_tail+1, ... (the standard form of the Euler-Maclaurin
    remainder for algebraically decaying one-signed segment sums).
    """
    n = len(partial)
    if n < 8:
        return float(partial[-1]), abs(float(partial[-1] - partial[-2])) if n > 1 else abs(float(partial[-1]))
    # exact powers of two so the ladder factors 2^e are correct
    m_hi = int(math.floor(math.log2(n)))
    ks = [2 ** m for m in range(m_hi, 2, -1)]
    vals = [partial[k - 1] for k in ks]  # vals[j] is S at K = 2^(m_hi - j)
    table = [np.array(vals, dtype=float)]
    for i in range(len(vals) - 1):
        prev = table[-1]
        fac = 2.0 ** (p_tail + i)
        nxt = (fac * prev[:-1] - prev[1:]) / (fac - 1.0)
        table.append(nxt)
    best = float(table[-1][0])
    prev_best = float(table[-2][0])
    return best, abs(best - prev_best)


def integrate_oscillatory_tail(f, zeros, cfg: QuadratureConfig = DEFAULT_CONFIG) -> IntegralResult:
    """Integrate f over [zeros[0], infinity) by inter-zero segments.

    ``zeros`` must be an increasing sequence of segmentation points (sign
    changes of f, or period boundaries).  Alternating segment sums are
    accelerated with iterated Aitken; one-signed decaying sums with
    Richardson extrapolation; anything else falls back to plain truncation
    with the last segment as the tail bound, reflected in ``converged``.
    """
    z = np.asarray(zeros, dtype=float)
    if len(z) < 3:
        raise DomainError("need at least 3 segmentation points")
    if np.any(np.diff(z) <= 0):
        raise DomainError("segmentation points must be strictly increasing")
    kron, err = _gk15_batch(f, z[:-1], z[1:])
    quad_err = float(np.sum(err))
    partial = np.cumsum(kron)
    sums = kron[np.abs(kron) > 0]
    if len(sums) == 0:
        return IntegralResult(0.0, quad_err, converged=True)
    signs = np.sign(sums)
    alternating = len(sums) > 4 and np.all(signs[1:] * signs[:-1] < 0)
    one_signed = np.all(signs == signs[0])
    if alternating:
        value, acc_err = _aitken_accelerate(partial)
    elif one_signed and len(sums) >= 8:
        p = _estimate_decay(np.abs(kron), 0.5 * (z[:-1] + z[1:]))
        value, acc_err = _richardson_partial_sums(partial, max(0.5, p - 1.0))
        # a fitted decay exponent leaks linearly into the extrapolation;
        # widen the estimate by a slice of the removed remainder
        acc_err = max(acc_err, 0.05 * abs(value - float(partial[-1])))
    else:
        value = float(partial[-1])
        acc_err = float(np.abs(kron[-1]))
    total_err = acc_err + quad_err
    return IntegralResult(float(value), total_err, converged=total_err <= cfg.tolerance(value))


def _estimate_decay(mags: np.ndarray, abscissae: np.ndarray) -> float:
    """Fit |s_k| ~ x_k^-p on the trailing half of the segment sums.

    Snaps to the nearest quarter-integer when the fit lands close to one;
    the exact exponents of this package's integrands are all of that form.
    """
    n = len(mags)
    lo = n // 2
    m = mags[lo:]
    xx = abscissae[lo:]
    keep = m > 0
    if np.count_nonzero(keep) < 3:
        return 2.0
    slope = np.polyfit(np.log(xx[keep]), np.log(m[keep]), 1)[0]
    p = float(max(1.1, -slope))
    snapped = round(4.0 * p) / 4.0
    return snapped if abs(snapped - p) < 0.03 and snapped > 1.0 else p


def tail_power_periodic(f, start: float, period: float, decay_power: float,
                        cfg: QuadratureConfig = DEFAULT_CONFIG,
                        max_doublings: int = 6) -> IntegralResult:
    """Integrate f over [start, infinity) for f = envelope x periodic factor.

    ``decay_power`` is the algebraic decay exponent p of the integrand
    envelope (|f| ~ rho^-p up to the oscillation).  Segment integrals over
    exact periods form a smooth k^-p sequence regardless of phase, so the
    partial sums admit Richardson extrapolation with remainder exponent
    p - 1.  Doubles the segment count until two successive extrapolations
    agree within tolerance.
    """
    if period <= 0:
        raise DomainError("period must be positive")
    if decay_power <= 1.0:
        raise DomainError("decay_power must exceed 1 for a convergent tail")
    n = max(16, cfg.oscillatory_tail_terms)
    kron = np.empty(0)
    quad_err = 0.0
    prev_val = None
    for _ in range(max_doublings + 1):
        k0 = len(kron)
        edges = start + period * np.arange(k0, n + 1)
        new_kron, new_err = _gk15_batch(f, edges[:-1], edges[1:])
        kron = np.concatenate([kron, new_kron])
        quad_err += float(np.sum(new_err))
        partial = np.cumsum(kron)
        value, acc_err = _richardson_partial_sums(partial, decay_power - 1.0)
        if prev_val is not None:
            acc_err = max(acc_err, abs(value - prev_val) * 0.5)
        total = acc_err + quad_err
        if total <= cfg.tolerance(value):
            return IntegralResult(float(value), total, converged=True)
        prev_val = value
        n *= 2
    return IntegralResult(float(value), acc_err + quad_err, converged=False)
