"""Parameter strategies for QWOA on MaxCut.

random
    All 2p angles drawn uniformly from [0, 2*pi].
pretrained
    Solve the path graph on the same vertex count to (near) optimality,
    then add target-graph phase gates initialised to the identity.
nv
    Non-variational QWOA: 2p angles generated from (beta, gamma, t) by two
    linear ramps; only the three hyperparameters are trained.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from qwoabench.graphs import QualityTable, build_quality_table, path_graph
from qwoabench.optimize import OptimizerConfig, OptimizerTrace, minimize
from qwoabench.rng import stream
from qwoabench.simulator import (
    MIXER,
    PHASE,
    CircuitSpec,
    Gate,
    apply_mixer,
    basis_state,
    gradient_adjoint,
    qwoa_circuit,
    value_and_grad,
)

TWO_PI = 2.0 * math.pi
BETA_MARGIN = 1e-3
BUNDLE_FORMAT_VERSION = 1
NAMED = "named"
LITERAL = "literal"


def angle_bounds(num_params: int) -> np.ndarray:
    return np.tile([0.0, TWO_PI], (num_params, 1))


def random_init(p: int, seed: int) -> np.ndarray:
    if p < 1:
        raise ValueError("depth must be >= 1")
    return stream(seed, "random_init", p).uniform(0.0, TWO_PI, size=2 * p)


# -- NV-QWOA ------------------------------------------------------------------


@dataclass(frozen=True)
class NVHyperparams:
    beta: float
    gamma: float
    t: float

    def __post_init__(self) -> None:
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")

    def as_array(self) -> np.ndarray:
        return np.array([self.beta, self.gamma, self.t])


NV_BOUNDS = np.array([[BETA_MARGIN, 1.0 - BETA_MARGIN], [0.0, TWO_PI], [0.0, TWO_PI]])


def nv_random_init(seed: int) -> NVHyperparams:
    rng = stream(seed, "nv_init")
    return NVHyperparams(rng.uniform(0.05, 0.95), rng.uniform(0.0, TWO_PI), rng.uniform(0.0, TWO_PI))


@dataclass(frozen=True)
class Schedule:
    gammas: np.ndarray
    times: np.ndarray


def _ramp(p: int) -> np.ndarray:
    return np.arange(p, dtype=np.float64) / (p - 1)


def nv_schedule(hp: NVHyperparams, p: int, sigma: float) -> Schedule:
    """Linear NV ramps: gammas rise from beta*gamma/sigma to gamma/sigma,
    times fall from t to beta*t."""
    if p < 2:
        raise ValueError("NV schedule needs depth >= 2")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    r = _ramp(p)
    gammas = (hp.gamma / sigma) * (hp.beta + r * (1.0 - hp.beta))
    times = hp.t * (1.0 + r * (hp.beta - 1.0))
    return Schedule(gammas, times)


def nv_circuit_params(sched: Schedule, binding: str = NAMED) -> np.ndarray:
    """Angles for :func:`qwoa_circuit` (phase block first, then mixer block).

    ``named`` drives the phase gates with the rising gamma ramp and the mixer
    with the falling time ramp; ``literal`` swaps the two.
    """
    if binding == NAMED:
        return np.concatenate([sched.gammas, sched.times])
    if binding == LITERAL:
        return np.concatenate([sched.times, sched.gammas])
    raise ValueError(f"unknown NV binding {binding!r}")


def nv_jacobian(hp: NVHyperparams, p: int, sigma: float, binding: str = NAMED) -> np.ndarray:
    """d(circuit angles)/d(beta, gamma, t), shape (2p, 3)."""
    r = _ramp(p)
    dg = np.column_stack([(hp.gamma / sigma) * (1.0 - r), (hp.beta + r * (1.0 - hp.beta)) / sigma, np.zeros(p)])
    dt = np.column_stack([hp.t * r, np.zeros(p), 1.0 + r * (hp.beta - 1.0)])
    if binding == NAMED:
        return np.vstack([dg, dt])
    if binding == LITERAL:
        return np.vstack([dt, dg])
    raise ValueError(f"unknown NV binding {binding!r}")


def nv_cost_grad(hp: NVHyperparams, table: QualityTable, p: int, binding: str = NAMED):
    """Cost (-<Q>) of the scheduled circuit and its gradient in (beta, gamma, t)."""
    sched = nv_schedule(hp, p, table.sigma)
    theta = nv_circuit_params(sched, binding)
    value, grad = gradient_adjoint(qwoa_circuit(table.n, p), theta, table, return_value=True)
    return -value, -(nv_jacobian(hp, p, table.sigma, binding).T @ grad)


def nv_objective(table: QualityTable, p: int, binding: str = NAMED):
    def fun(x):
        return nv_cost_grad(NVHyperparams(*x), table, p, binding)

    return fun


# -- Lie-algebraic pretraining -------------------------------------------------


class PretrainingFailed(RuntimeError):
    def __init__(self, msg: str, best_ratio: float):
        super().__init__(msg)
        self.best_ratio = best_ratio


@dataclass(frozen=True)
class PretrainBundle:
    aux_n: int
    depth: int
    aux_params: np.ndarray = field(repr=False)
    aux_approx_ratio: float
    seed: int = 0
    attempts: int = 1

    def __post_init__(self) -> None:
        if len(self.aux_params) != 2 * self.depth:
            raise ValueError("bundle needs 2p auxiliary parameters")

    def to_json(self) -> str:
        doc = {
            "format_version": BUNDLE_FORMAT_VERSION,
            "aux_graph": "path",
            "n": self.aux_n,
            "p": self.depth,
            "aux_approx_ratio": self.aux_approx_ratio,
            "seed": self.seed,
            "attempts": self.attempts,
            "aux_phase": [float(v) for v in self.aux_params[: self.depth]],
            "mixer": [float(v) for v in self.aux_params[self.depth :]],
        }
        return json.dumps(doc, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "PretrainBundle":
        doc = json.loads(text)
        if doc.get("format_version") != BUNDLE_FORMAT_VERSION:
            raise ValueError(f"unsupported bundle format {doc.get('format_version')!r}")
        params = np.array(doc["aux_phase"] + doc["mixer"], dtype=np.float64)
        return cls(int(doc["n"]), int(doc["p"]), params, float(doc["aux_approx_ratio"]),
                   int(doc.get("seed", 0)), int(doc.get("attempts", 1)))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path: str | Path) -> "PretrainBundle":
        return cls.from_json(Path(path).read_text())


def pretrain_path_graph(
    n: int,
    p: int,
    seed: int,
    opt: OptimizerConfig = OptimizerConfig(max_iters=2000),
    threshold: float = 0.999,
    max_restarts: int = 8,
) -> PretrainBundle:
    """Train plain QWOA on the path graph P_n until <Q>/q_max >= threshold.

    Each restart draws fresh angles from a seed derived from ``seed`` and the
    attempt number.  Raises :class:`PretrainingFailed` after ``max_restarts``
    unsuccessful attempts.
    """
    if n < 2:
        raise ValueError("path graph pretraining needs n >= 2")
    table = build_quality_table(path_graph(n))
    circuit = qwoa_circuit(n, p)
    cfg = OptimizerConfig(opt.max_iters, opt.memory, opt.grad_tol, opt.f_tol, angle_bounds(2 * p))
    best_ratio = -math.inf
    for attempt in range(1, max_restarts + 1):
        x0 = stream(seed, "pretrain", n, p, attempt).uniform(0.0, TWO_PI, size=2 * p)
        x, trace = minimize(value_and_grad(circuit, table), x0, cfg)
        ratio = -trace.records[-1].cost / table.q_max
        best_ratio = max(best_ratio, ratio)
        if ratio >= threshold:
            return PretrainBundle(n, p, x, ratio, seed, attempt)
    raise PretrainingFailed(
        f"path-graph pretraining (n={n}, p={p}) reached only {best_ratio:.6f} "
        f"after {max_restarts} attempts", best_ratio)


def augmented_circuit(aux_table: QualityTable, p: int) -> CircuitSpec:
    """Per layer: target phase, auxiliary phase, then mixer.

    Parameters: ``[aux_phase(p), mixer(p), target_phase(p)]`` so a bundle's
    2p parameters are a prefix of the 3p vector.
    """
    gates = []
    for k in range(p):
        gates.append(Gate(PHASE, 2 * p + k, label="target"))
        gates.append(Gate(PHASE, k, table=aux_table, label="aux"))
        gates.append(Gate(MIXER, p + k, label="mixer"))
    return CircuitSpec(aux_table.n, p, tuple(gates))


def build_augmented(bundle: PretrainBundle, target_table: QualityTable) -> tuple[CircuitSpec, np.ndarray]:
    if target_table.n != bundle.aux_n:
        raise ValueError(f"bundle is for n={bundle.aux_n}, target has n={target_table.n}")
    aux_table = build_quality_table(path_graph(bundle.aux_n))
    circuit = augmented_circuit(aux_table, bundle.depth)
    params = np.concatenate([np.asarray(bundle.aux_params, dtype=np.float64), np.zeros(bundle.depth)])
    return circuit, params


# -- NV mixer conditions -------------------------------------------------------


@dataclass(frozen=True)
class MixerDiagnostics:
    diameter: int
    sphere_sizes: np.ndarray
    # sphere_means[d, x]: mean quality over the Hamming sphere of radius d around x
    sphere_means: np.ndarray = field(repr=False)
    mu: float
    alphas: np.ndarray
    fit_residuals: np.ndarray
    phase_residual: float
    monotone: bool


def fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along the last axis."""
    out = np.array(a, dtype=np.float64)
    size = out.shape[-1]
    h = 1
    while h < size:
        v = out.reshape(*out.shape[:-1], -1, 2, h)
        lo = v[..., 0, :].copy()
        v[..., 0, :] += v[..., 1, :]
        v[..., 1, :] = lo - v[..., 1, :]
        h *= 2
    return out


def krawtchouk(n: int) -> np.ndarray:
    """K[d, w] = sum over |z| = d of (-1)**(w.z) for any w of weight w."""
    K = np.zeros((n + 1, n + 1))
    for d in range(n + 1):
        for w in range(n + 1):
            K[d, w] = sum((-1) ** j * math.comb(w, j) * math.comb(n - w, d - j) for j in range(d + 1))
    return K


def _popcount(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.int64)
    c = np.zeros_like(x)
    while np.any(x):
        c += x & 1
        x >>= 1
    return c


def mixer_diagnostics(table: QualityTable, t_small: float, max_n: int = 14) -> MixerDiagnostics:
    """Check both NV-QWOA mixer conditions for the binary mixer.

    ``phase_residual`` is the largest deviation, over every basis state y and
    every x, of the amplitude <x|exp(-iMt)|y> from
    exp(-i*d*pi/2) * cos(t)**(n-d) * sin(t)**d with d the Hamming distance;
    it is measured on amplitudes rather than angles because moduli near
    sin(t)**n make the bare phase numerically meaningless.  The alphas are the
    least-squares slopes of mu_{d,x} - q(x) against -(q(x) - mu).
    """
    n = table.n
    if n > max_n:
        raise ValueError(f"mixer diagnostics are exhaustive; n={n} exceeds {max_n}")
    if not 0.0 < t_small < math.pi / 2:
        raise ValueError("t_small must lie in (0, pi/2)")
    size = 1 << n
    dist = _popcount(np.arange(size))
    c, s = math.cos(t_small), math.sin(t_small)
    template = np.exp(-0.5j * math.pi * dist) * c ** (n - dist) * s**dist
    residual = 0.0
    for y in range(size):
        amps = apply_mixer(basis_state(n, y), t_small).amps
        residual = max(residual, float(np.max(np.abs(amps - template[np.arange(size) ^ y]))))

    sizes = np.array([math.comb(n, d) for d in range(n + 1)])
    spectrum = fwht(table.values)
    K = krawtchouk(n)
    sums = fwht(spectrum[None, :] * K[:, dist]) / size
    means = sums / sizes[:, None]

    q = table.values
    dev = q - table.mu
    denom = float(dev @ dev)
    alphas = np.full(n + 1, np.nan)
    fit = np.full(n + 1, np.nan)
    if denom > 0:
        for d in range(n + 1):
            lhs = means[d] - q
            alphas[d] = -float(lhs @ dev) / denom
            fit[d] = float(np.sqrt(np.mean((lhs + alphas[d] * dev) ** 2)))
    head = alphas[: n // 2 + 1]
    monotone = bool(denom > 0 and np.all(np.diff(head) >= -1e-12))
    return MixerDiagnostics(n, sizes, means, table.mu, alphas, fit, residual, monotone)


def trace_ratios(trace: OptimizerTrace, q_max: float) -> np.ndarray:
    return -trace.costs / q_max
