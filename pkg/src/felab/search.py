"""Optimization drives: local ascent and randomized probes of Phi_q.

Families are capped, explicitly parameterized set classes:

* ``intervals:k`` -- unions of up to k intervals (2k sorted endpoints);
* ``star:N``      -- star-shaped bodies r(theta) = 1 + sum of N cos/sin modes.

The measure constraint is enforced by dilation after every parameter step,
never by penalty, so every evaluated candidate has exactly the ball
measure.  All randomness flows from one seeded generator; a fixed seed
reproduces the whole trajectory bit for bit (restarts may be evaluated in
parallel, aggregation is by restart index).  Every evaluation passes
through the Babenko guard inside phi_q; global claims produced here are
probes, not proofs.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidSetError
from .functional import phi_ball, phi_q
from .quadrature import DEFAULT_CONFIG, QuadratureConfig
from .set_model import IntervalSet, StarSet, dist_to_ellipsoids

__all__ = ["SearchConfig", "SearchResult", "local_ascent", "random_probe", "q_sweep"]


# probe-grade tolerances: bias << the 1e-6 comparison scale of the null tests
PROBE_QUAD = QuadratureConfig(abs_tol=3e-7, rel_tol=1e-8)


@dataclass(frozen=True)
class SearchConfig:
    exponent: float
    dimension: int
    family: str = "intervals:4"
    restarts: int = 50
    rng_seed: int = 0
    step_initial: float = 0.15
    step_decay: float = 0.5
    budget: int = 400
    threads: int = 1
    quad: QuadratureConfig = field(default_factory=lambda: PROBE_QUAD)

    def __post_init__(self):
        if self.budget < self.restarts:
            raise DomainError("budget must cover at least one evaluation per restart")
        kind, _, arg = self.family.partition(":")
        if kind not in ("intervals", "star"):
            raise DomainError(f"unknown family {self.family!r}")
        n = int(arg or (4 if kind == "intervals" else 6))
        cap = 6 if kind == "intervals" else 12
        if not (1 <= n <= cap):
            raise DomainError(f"family size must lie in [1, {cap}]")

    @property
    def family_kind(self) -> str:
        return self.family.partition(":")[0]

    @property
    def family_size(self) -> int:
        kind, _, arg = self.family.partition(":")
        return int(arg or (4 if kind == "intervals" else 6))


@dataclass(frozen=True)
class SearchResult:
    best_set: object
    best_phi: float
    phi_ball: float
    gap: float
    dist_ellipsoids: float
    trajectory: tuple
    evaluations: int

    def as_dict(self) -> dict:
        from .set_model import set_to_json
        import json
        return {
            "best_phi": self.best_phi,
            "phi_ball": self.phi_ball,
            "gap": self.gap,
            "dist_ellipsoids": self.dist_ellipsoids,
            "evaluations": self.evaluations,
            "best_set": json.loads(set_to_json(self.best_set)),
        }


def _ball_measure(d: int) -> float:
    return 2.0 if d == 1 else math.pi


def _params_to_set(params: np.ndarray, cfg: SearchConfig):
    d = cfg.dimension
    if cfg.family_kind == "intervals":
        pts = np.sort(params)
        ivs = [(pts[2 * i], pts[2 * i + 1]) for i in range(len(pts) // 2)
               if pts[2 * i + 1] - pts[2 * i] > 1e-9]
        if not ivs:
            raise InvalidSetError("degenerate interval candidate")
        e = IntervalSet(ivs)
        return e.dilate(_ball_measure(1) / e.measure)
    n = cfg.family_size
    e = StarSet(1.0, a_coeffs=params[:n], b_coeffs=params[n:])
    return e.with_measure(_ball_measure(2))


def _set_to_params(e, cfg: SearchConfig) -> np.ndarray:
    if cfg.family_kind == "intervals":
        return e.endpoints()
    n = cfg.family_size
    a = np.zeros(n)
    b = np.zeros(n)
    a[: len(e.a_coeffs)] = e.a_coeffs
    b[: len(e.b_coeffs)] = e.b_coeffs
    return np.concatenate([a, b])


def _evaluate(params: np.ndarray, cfg: SearchConfig) -> float:
    try:
        e = _params_to_set(params, cfg)
        return phi_q(e, cfg.exponent, cfg.quad).phi
    except InvalidSetError:
        return -math.inf


def local_ascent(start, cfg: SearchConfig) -> SearchResult:
    """Coordinate-wise trial steps with halving; volume fixed by dilation."""
    params = _set_to_params(start, cfg).astype(float)
    phi_b = phi_ball(cfg.dimension, cfg.exponent, cfg.quad).phi
    best = _evaluate(params, cfg)
    evals = 1
    trajectory = [(1, best)]
    step = cfg.step_initial
    while evals < cfg.budget and step >= 1e-6:
        improved = False
        for k in range(len(params)):
            if evals >= cfg.budget:
                break
            for sign in (1.0, -1.0):
                if evals >= cfg.budget:
                    break
                trial = params.copy()
                trial[k] += sign * step
                val = _evaluate(trial, cfg)
                evals += 1
                if val > best:
                    best = val
                    params = trial
                    improved = True
                trajectory.append((evals, best))
        if not improved:
            step *= cfg.step_decay
    final = _params_to_set(params, cfg)
    fit = dist_to_ellipsoids(final)
    return SearchResult(final, best, phi_b, phi_b - best, fit.distance,
                        tuple(trajectory), evals)


def _random_params(rng: np.random.Generator, cfg: SearchConfig) -> np.ndarray:
    if cfg.family_kind == "intervals":
        return rng.uniform(-2.5, 2.5, 2 * cfg.family_size)
    n = cfg.family_size
    decay = 1.0 / (1.0 + np.arange(1, n + 1)) ** 2
    return np.concatenate([rng.normal(0.0, 0.15, n) * decay,
                           rng.normal(0.0, 0.15, n) * decay])


def random_probe(cfg: SearchConfig) -> SearchResult:
    """Seeded random family members, then short ascent from the best few."""
    rng = np.random.default_rng(cfg.rng_seed)
    probes = [_random_params(rng, cfg) for _ in range(cfg.restarts)]
    threads = max(1, cfg.threads)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(lambda p: _evaluate(p, cfg), probes))
    else:
        values = [_evaluate(p, cfg) for p in probes]
    phi_b = phi_ball(cfg.dimension, cfg.exponent, cfg.quad).phi
    evals = len(probes)
    order = sorted(range(len(probes)), key=lambda i: -values[i])
    best_idx = order[0]
    best = values[best_idx]
    params = probes[best_idx]
    trajectory = []
    running = -math.inf
    for i, v in enumerate(values):
        running = max(running, v)
        trajectory.append((i + 1, running))
    # short ascent from the top few probes
    remaining = cfg.budget - evals
    tops = [i for i in order[:3] if values[i] > -math.inf]
    for rank, idx in enumerate(tops):
        share = remaining // max(1, len(tops))
        if share < 4:
            break
        sub = SearchConfig(cfg.exponent, cfg.dimension, cfg.family,
                           restarts=1, rng_seed=cfg.rng_seed,
                           step_initial=cfg.step_initial, step_decay=cfg.step_decay,
                           budget=share, threads=1, quad=cfg.quad)
        res = local_ascent(_params_to_set(probes[idx], cfg), sub)
        for j, v in res.trajectory:
            evals += 1
            running = max(running, v)
            trajectory.append((evals, running))
        if res.best_phi > best:
            best = res.best_phi
            params = _set_to_params(res.best_set, cfg)
    final = _params_to_set(params, cfg)
    fit = dist_to_ellipsoids(final)
    return SearchResult(final, best, phi_b, phi_b - best, fit.distance,
                        tuple(trajectory), evals)


def q_sweep(q_list, cfg: SearchConfig) -> list:
    """Per-exponent ball value, best probed value, and gap."""
    rows = []
    for q in q_list:
        sub = SearchConfig(float(q), cfg.dimension, cfg.family, cfg.restarts,
                           cfg.rng_seed, cfg.step_initial, cfg.step_decay,
                           cfg.budget, cfg.threads, cfg.quad)
        res = random_probe(sub)
        rows.append({"q": float(q), "phi_ball": res.phi_ball,
                     "best_phi": res.best_phi, "gap": res.gap,
                     "dist_ellipsoids": res.dist_ellipsoids})
    return rows
