"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]`` / ``[FAIL]`` line with the measured
numbers before asserting, so ``pytest -s tests/test_acceptance.py`` gives a
readable scorecard.  Criterion 8 is the multi-hour full-scale preset and only
runs with ``QWOABENCH_FULL_SCALE=1``.
"""

import math
import os
import time

import numpy as np
import pytest

from oracles import central_difference, dense_circuit_state
from qwoabench.bench.config import BenchConfig, GraphClass, desk_preset, full_scale_preset
from qwoabench.bench.report import emit
from qwoabench.bench.runner import iterations_to_converge, run_suite
from qwoabench.bench.stats import proportion_ci, summarize
from qwoabench.graphs import build_quality_table, gen_er, path_graph
from qwoabench.liealg import (
    AlgebraElement,
    DlaBasis,
    gsim_expectation,
    gsim_setup,
    jacobi_residual,
    lie_closure,
    quality_operator,
    qwoa_generators,
    structure_constants,
)
from qwoabench.rng import stream
from qwoabench.simulator import cost, expectation, gradient_adjoint, qwoa_circuit, run_pqc
from qwoabench.strategies import (
    NVHyperparams,
    augmented_circuit,
    nv_cost_grad,
    pretrain_path_graph,
)

FULL_SCALE = os.environ.get("QWOABENCH_FULL_SCALE") == "1"


def verdict(number, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    assert ok, detail


def random_graph(rng, n):
    g = gen_er(n, 0.6, int(rng.integers(1 << 30)))
    return g if g.m else path_graph(n)


def test_criterion_1_simulator_correctness():
    start = time.perf_counter()
    rng = stream(101, "acceptance-1")
    worst = 0.0
    for _ in range(50):
        n, p = int(rng.integers(2, 5)), int(rng.integers(1, 4))
        t = build_quality_table(random_graph(rng, n))
        c = qwoa_circuit(n, p)
        x = rng.uniform(0, 2 * np.pi, 2 * p)
        worst = max(worst, float(np.max(np.abs(run_pqc(c, x, t).amps - dense_circuit_state(c, x, {"phase": t})))))
    t10 = build_quality_table(gen_er(10, 0.3, 5))
    drift = abs(run_pqc(qwoa_circuit(10, 256), rng.uniform(0, 2 * np.pi, 512), t10).norm() - 1.0)
    elapsed = time.perf_counter() - start
    verdict(1, worst < 1e-8 and drift < 1e-10 and elapsed < 60,
            f"max |dense - simulator| = {worst:.2e} (< 1e-8), depth-256 norm drift = {drift:.2e} (< 1e-10), "
            f"{elapsed:.1f}s")


def test_criterion_2_gradient_correctness():
    start = time.perf_counter()
    rng = stream(102, "acceptance-2")
    worst = {"qwoa": 0.0, "augmented": 0.0, "nv": 0.0}

    def rel(g, fd):
        return float(np.max(np.abs(g - fd)) / max(np.max(np.abs(fd)), 1e-300))

    for _ in range(100):
        n, p = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        t = build_quality_table(random_graph(rng, n))
        c = qwoa_circuit(n, p)
        x = rng.uniform(0, 2 * np.pi, 2 * p)
        worst["qwoa"] = max(worst["qwoa"], rel(gradient_adjoint(c, x, t),
                                                central_difference(lambda y: -cost(c, y, t), x)))
        ca = augmented_circuit(build_quality_table(path_graph(n)), p)
        xa = rng.uniform(0, 2 * np.pi, 3 * p)
        worst["augmented"] = max(worst["augmented"], rel(gradient_adjoint(ca, xa, t),
                                                          central_difference(lambda y: -cost(ca, y, t), xa)))
        h = np.array([rng.uniform(0.1, 0.9), rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi)])
        _, g = nv_cost_grad(NVHyperparams(*h), t, p)
        worst["nv"] = max(worst["nv"], rel(g, central_difference(lambda y: nv_cost_grad(NVHyperparams(*y), t, p)[0], h)))
    elapsed = time.perf_counter() - start
    verdict(2, max(worst.values()) < 1e-6 and elapsed < 120,
            "worst relative error vs central differences: "
            + ", ".join(f"{k} {v:.2e}" for k, v in worst.items()) + f" (< 1e-6), {elapsed:.1f}s")


def test_criterion_3_lie_algebraic_simulation():
    start = time.perf_counter()
    dims, worst = {}, 0.0
    for n in (2, 3, 4):
        g = path_graph(n)
        basis, f, e, gens = gsim_setup(g, max_dim=64)
        dims[n] = basis.dim
        table, obs = build_quality_table(g), quality_operator(g)
        c = qwoa_circuit(n, 3)
        rng = stream(103, "acceptance-3", n)
        for _ in range(20):
            x = rng.uniform(0, 2 * np.pi, 6)
            worst = max(worst, abs(gsim_expectation(c, x, obs, basis, f, e, gens)
                                   - expectation(run_pqc(c, x, table), table)))
    elapsed = time.perf_counter() - start
    verdict(3, dims[2] == 4 and max(dims.values()) <= 64 and worst < 1e-8 and elapsed < 120,
            f"path-graph DLA dims {dims} (n=2 must be 4, all <= 64), max |gsim - statevector| = {worst:.2e} "
            f"(< 1e-8), {elapsed:.1f}s")


def test_criterion_4_structure_constants():
    s = 1 / math.sqrt(2)
    su2 = DlaBasis(1, tuple(AlgebraElement.from_labels([(c, s)]) for c in "XYZ"))
    f2 = structure_constants(su2)
    err = max(abs(f2[2, 0, 1] - math.sqrt(2)), abs(f2[1, 0, 2] + math.sqrt(2)))
    f = structure_constants(lie_closure(qwoa_generators(path_graph(3))))
    anti = float(np.max(np.abs(f + f.transpose(0, 2, 1))))
    jac = jacobi_residual(f)
    verdict(4, err < 1e-12 and anti < 1e-8 and jac < 1e-8,
            f"su(2) f^Z_XY, f^Y_XZ error {err:.1e} (< 1e-12); n=3 path DLA antisymmetry {anti:.1e}, "
            f"Jacobi {jac:.1e} (< 1e-8)")


def test_criterion_5_pretraining():
    start = time.perf_counter()
    bundle = pretrain_path_graph(8, 64, seed=105)
    elapsed = time.perf_counter() - start
    verdict(5, bundle.aux_approx_ratio >= 0.999 and elapsed < 600,
            f"P_8, p=64 pretrained to approx ratio {bundle.aux_approx_ratio:.10f} (>= 0.999) in "
            f"{bundle.attempts} attempt(s), {elapsed:.1f}s")


@pytest.mark.fullscale
@pytest.mark.skipif(not FULL_SCALE, reason="set QWOABENCH_FULL_SCALE=1 for the n=16, p=256 pretraining")
def test_criterion_5_pretraining_full_scale():
    bundle = pretrain_path_graph(16, 256, seed=105)
    verdict("5 (full scale)", bundle.aux_approx_ratio >= 0.9999,
            f"P_16, p=256 pretrained to approx ratio {bundle.aux_approx_ratio:.10f} (>= 0.9999)")


@pytest.fixture(scope="module")
def desk_suite(tmp_path_factory):
    out = tmp_path_factory.mktemp("desk")
    cfg = desk_preset(str(out))
    start = time.perf_counter()
    res = run_suite(cfg)
    elapsed = time.perf_counter() - start
    emit(summarize(res.records, horizon=cfg.max_iters + 1), res.records, out)
    return cfg, res, elapsed


@pytest.mark.slow
def test_criterion_6_desk_benchmark_ordering(desk_suite):
    cfg, res, elapsed = desk_suite
    mean = {s: float(np.mean([r.final_ratio for r in res.records if r.strategy == s])) for s in cfg.strategies}
    conv = float(np.median([iterations_to_converge(r.ratios) for r in res.records if r.strategy == "nv"]))
    ok = (not res.failures and mean["nv"] >= mean["pretrained"] and mean["nv"] >= mean["random"]
          and mean["nv"] >= 0.95 and conv <= 100 and elapsed < 1800)
    verdict(6, ok, "mean final ratio " + ", ".join(f"{s} {v:.4f}" for s, v in mean.items())
            + f" (need NV >= others and NV >= 0.95); NV median iterations to 0.1% of final {conv:.0f} (<= 100); "
            f"{len(res.failures)} failed runs; {elapsed:.0f}s")


def test_criterion_7_statistics():
    errs = []
    for k, lo, hi in ((134, 60.48, 73.52), (99, 42.57, 56.43)):
        _, a, b = proportion_ci(k, 200)
        errs.append(max(abs(100 * a - lo), abs(100 * b - hi)))
    verdict(7, max(errs) < 0.01,
            f"z-interval endpoints for 67% and 49.5% of 200 off by at most {max(errs):.4f} percentage points (< 0.01)")


@pytest.mark.fullscale
@pytest.mark.skipif(not FULL_SCALE, reason="set QWOABENCH_FULL_SCALE=1 for the multi-hour n=16, p=256 preset")
def test_criterion_8_full_scale(tmp_path):
    cfg = full_scale_preset(str(tmp_path), instances=20)
    res = run_suite(cfg)
    summary = summarize(res.records, horizon=cfg.max_iters + 1)
    emit(summary, res.records, tmp_path)
    nv = [r.final_ratio for r in res.records if r.strategy == "nv"]
    mean = {s: float(np.mean([r.final_ratio for r in res.records
                              if r.strategy == s and r.graph_class == "regular3"])) for s in cfg.strategies}
    gw = float(np.mean(np.array(nv) > 0.8786))
    ok = np.mean(nv) >= 0.97 and gw >= 0.9 and mean["pretrained"] - mean["random"] >= 0.10
    verdict(8, ok, f"NV mean {np.mean(nv):.4f} (>= 0.97), NV GW fraction {gw:.3f} (>= 0.9), "
            f"3-regular pretrained - random = {mean['pretrained'] - mean['random']:.4f} (>= 0.10)")


def test_criterion_9_determinism(tmp_path):
    def config(name):
        return BenchConfig(classes=(GraphClass("regular3", "regular"), GraphClass("er0.3", "er")), n=6,
                           instances=4, depth=16, max_iters=60, master_seed=109, out_dir=str(tmp_path / name))

    run_suite(config("one"), workers=1)
    run_suite(config("eight"), workers=8)
    a = (tmp_path / "one" / "records.jsonl").read_bytes()
    b = (tmp_path / "eight" / "records.jsonl").read_bytes()
    records = len(a.splitlines())
    verdict(9, a == b and records > 0,
            f"records.jsonl from 1 and 8 workers byte-identical: {a == b} ({len(a)} bytes, {records} records)")
