"""Box-constrained L-BFGS with a strong-Wolfe line search.

The search direction comes from the usual two-loop recursion and is then
projected so it never pushes an active variable out of its box; trial points
are clipped to the box.  An *iteration* is one accepted step, the same unit
the benchmark budgets count in; line-search probes are only counted as
function evaluations.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

Objective = Callable[[np.ndarray], "tuple[float, np.ndarray]"]

C1 = 1e-4
C2 = 0.9
_CURVATURE_EPS = 1e-12
_MAX_LS_EVALS = 40


class NonFiniteObjective(ValueError):
    pass


@dataclass(frozen=True)
class OptimizerConfig:
    max_iters: int = 500
    memory: int = 10
    grad_tol: float = 1e-6
    f_tol: float = 1e-9
    # (lo, hi) applied to every coordinate, or one (lo, hi) per coordinate
    bounds: tuple | None = None

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.memory < 1:
            raise ValueError("memory must be >= 1")

    def bound_arrays(self, dim: int) -> tuple[np.ndarray, np.ndarray]:
        if self.bounds is None:
            return np.full(dim, -np.inf), np.full(dim, np.inf)
        b = np.asarray(self.bounds, dtype=np.float64)
        if b.shape == (2,):
            b = np.tile(b, (dim, 1))
        if b.shape != (dim, 2):
            raise ValueError(f"bounds must be (lo, hi) or shape ({dim}, 2)")
        lo, hi = b[:, 0].copy(), b[:, 1].copy()
        if np.any(lo > hi):
            raise ValueError("lower bound above upper bound")
        return lo, hi


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    cost: float
    grad_norm: float
    step: float


@dataclass
class OptimizerTrace:
    records: list[IterationRecord] = field(default_factory=list)
    reason: str = ""
    evaluations: int = 0

    @property
    def iterations(self) -> int:
        return len(self.records) - 1

    @property
    def costs(self) -> np.ndarray:
        return np.array([r.cost for r in self.records])


def _projected_gradient(x, g, lo, hi):
    pg = g.copy()
    pg[(x <= lo) & (g > 0)] = 0.0
    pg[(x >= hi) & (g < 0)] = 0.0
    return pg


def _two_loop(g, S, Y, rho):
    q = g.copy()
    alphas = []
    for s, y, r in zip(reversed(S), reversed(Y), reversed(rho)):
        a = r * s.dot(q)
        alphas.append(a)
        q -= a * y
    if S:
        q *= S[-1].dot(Y[-1]) / Y[-1].dot(Y[-1])
    for (s, y, r), a in zip(zip(S, Y, rho), reversed(alphas)):
        b = r * y.dot(q)
        q += (a - b) * s
    return q


def _cubic_min(a, fa, da, b, fb, db):
    """Minimiser of the cubic through two points with slopes, or None."""
    d1 = da + db - 3.0 * (fa - fb) / (a - b)
    rad = d1 * d1 - da * db
    if rad < 0:
        return None
    d2 = math.copysign(math.sqrt(rad), b - a)
    denom = db - da + 2.0 * d2
    if denom == 0:
        return None
    return b - (b - a) * (db + d2 - d1) / denom


class _LineFunction:
    """phi(alpha) = f(clip(x + alpha*d)) with memoised evaluations."""

    def __init__(self, fun, x, d, lo, hi):
        self.fun, self.x, self.d, self.lo, self.hi = fun, x, d, lo, hi
        self.evals = 0
        self.best = None  # (alpha, f, x, g) with lowest f seen

    def __call__(self, alpha):
        raw = self.x + alpha * self.d
        xt = np.clip(raw, self.lo, self.hi)
        f, g = self.fun(xt)
        self.evals += 1
        f = float(f)
        g = np.asarray(g, dtype=np.float64)
        if not math.isfinite(f) or not np.all(np.isfinite(g)):
            return math.inf, math.inf, xt, g
        moving = (raw == xt)
        dphi = float(g[moving].dot(self.d[moving]))
        if self.best is None or f < self.best[1]:
            self.best = (alpha, f, xt, g)
        return f, dphi, xt, g


def _strong_wolfe(phi, f0, d0, alpha1, alpha_max):
    """Nocedal & Wright line search; returns (alpha, f, x, g) or None."""
    a_prev, f_prev, d_prev = 0.0, f0, d0
    a = min(alpha1, alpha_max)
    for i in range(_MAX_LS_EVALS):
        fa, da, xa, ga = phi(a)
        if fa > f0 + C1 * a * d0 or (i > 0 and fa >= f_prev):
            return _zoom(phi, f0, d0, a_prev, f_prev, d_prev, a, fa, da)
        if abs(da) <= -C2 * d0:
            return a, fa, xa, ga
        if da >= 0:
            return _zoom(phi, f0, d0, a, fa, da, a_prev, f_prev, d_prev)
        if a >= alpha_max:
            # beyond alpha_max every moving coordinate is clipped: phi is flat
            return a, fa, xa, ga
        a_prev, f_prev, d_prev = a, fa, da
        a = min(2.0 * a, alpha_max)
    return None


def _zoom(phi, f0, d0, lo, flo, dlo, hi, fhi, dhi):
    for _ in range(_MAX_LS_EVALS):
        width = hi - lo
        if abs(width) < 1e-16 * max(1.0, abs(lo)):
            break
        a = None
        if math.isfinite(fhi) and math.isfinite(dhi):
            a = _cubic_min(lo, flo, dlo, hi, fhi, dhi)
        left, right = sorted((lo + 0.1 * width, hi - 0.1 * width))
        if a is None or not left <= a <= right:
            a = lo + 0.5 * width
        fa, da, xa, ga = phi(a)
        if fa > f0 + C1 * a * d0 or fa >= flo:
            hi, fhi, dhi = a, fa, da
        else:
            if abs(da) <= -C2 * d0:
                return a, fa, xa, ga
            if da * (hi - lo) >= 0:
                hi, fhi, dhi = lo, flo, dlo
            lo, flo, dlo = a, fa, da
    return None


def _max_useful_step(x, d, lo, hi):
    # past this step every coordinate with d != 0 sits on a bound
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(d > 0, (hi - x) / d, np.where(d < 0, (lo - x) / d, 0.0))
    t = t[d != 0]
    if t.size == 0 or not np.all(np.isfinite(t)):
        return math.inf
    return float(t.max())


def minimize(
    fun: Objective,
    x0: Sequence[float],
    cfg: OptimizerConfig = OptimizerConfig(),
    callback: Callable[[int, np.ndarray, float], None] | None = None,
) -> tuple[np.ndarray, OptimizerTrace]:
    """Minimise ``fun`` (returning ``(value, gradient)``) from ``x0``.

    Returns the best point seen and the per-iteration trace.  Termination
    reasons: ``grad_tol``, ``f_tol``, ``max_iters``, ``line_search_failed``.
    """
    x = np.array(x0, dtype=np.float64)
    lo, hi = cfg.bound_arrays(x.size)
    if np.any(x < lo) or np.any(x > hi):
        raise ValueError("x0 violates the bounds")
    f, g = fun(x)
    f = float(f)
    g = np.asarray(g, dtype=np.float64)
    if not math.isfinite(f) or not np.all(np.isfinite(g)):
        raise NonFiniteObjective("objective is not finite at x0")

    trace = OptimizerTrace(evaluations=1)
    pg = _projected_gradient(x, g, lo, hi)
    trace.records.append(IterationRecord(0, f, float(np.linalg.norm(pg)), 0.0))
    S: deque = deque(maxlen=cfg.memory)
    Y: deque = deque(maxlen=cfg.memory)
    rho: deque = deque(maxlen=cfg.memory)

    for it in range(1, cfg.max_iters + 1):
        if np.max(np.abs(pg), initial=0.0) <= cfg.grad_tol:
            trace.reason = "grad_tol"
            break
        d = -_two_loop(g, list(S), list(Y), list(rho))
        d[(x <= lo) & (d < 0)] = 0.0
        d[(x >= hi) & (d > 0)] = 0.0
        if d.dot(g) >= 0:
            for buf in (S, Y, rho):
                buf.clear()
            d = -pg
        alpha1 = 1.0 if S else min(1.0, 1.0 / float(np.linalg.norm(d)))
        phi = _LineFunction(fun, x, d, lo, hi)
        found = _strong_wolfe(phi, f, float(d.dot(g)), alpha1, _max_useful_step(x, d, lo, hi))
        trace.evaluations += phi.evals
        if found is None:
            # accept the best sufficient-decrease probe if there is one
            b = phi.best
            if b is None or not b[1] <= f + C1 * b[0] * float(d.dot(g)) or not b[1] < f:
                trace.reason = "line_search_failed"
                break
            found = b
        alpha, f_new, x_new, g_new = found
        s = x_new - x
        y = g_new - g
        sy = float(s.dot(y))
        if sy > _CURVATURE_EPS * np.linalg.norm(s) * np.linalg.norm(y):
            S.append(s)
            Y.append(y)
            rho.append(1.0 / sy)
        f_old = f
        x, f, g = x_new, float(f_new), g_new
        pg = _projected_gradient(x, g, lo, hi)
        trace.records.append(IterationRecord(it, min(f, trace.records[-1].cost),
                                             float(np.linalg.norm(pg)), float(alpha)))
        if callback is not None:
            callback(it, x, f)
        if f_old - f <= cfg.f_tol * max(abs(f_old), abs(f), 1.0):
            trace.reason = "f_tol"
            break
    else:
        trace.reason = "max_iters"
    return x, trace
