"""Single runs and whole suites.

Seeds are derived from (master seed, class, index[, strategy]) so a record
does not depend on which worker produced it or in what order.  Records are
written by the parent process in task order.
"""

from __future__ import annotations

import json
import logging
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from qwoabench.bench.config import BenchConfig
from qwoabench.graphs import Graph, brute_force_maxcut, build_quality_table, write_graph
from qwoabench.optimize import OptimizerConfig, minimize
from qwoabench.rng import derive_seed
from qwoabench.simulator import qwoa_circuit, value_and_grad
from qwoabench.strategies import (
    NV_BOUNDS,
    PretrainBundle,
    angle_bounds,
    build_augmented,
    nv_objective,
    nv_random_init,
    pretrain_path_graph,
    random_init,
)

log = logging.getLogger(__name__)

STUCK_MAX_STEPS = 20
STUCK_MAX_GAIN = 0.05


@dataclass
class RunRecord:
    graph_id: str
    graph_class: str
    strategy: str
    seed: int
    n: int
    m: int
    connected: bool
    q_max: float
    ratios: list[float]
    final_ratio: float
    iterations: int
    reason: str
    stuck: bool
    evaluations: int
    # excluded from the JSONL so suite output is byte-reproducible
    wall_time: float = field(default=0.0, compare=False)

    def to_json(self) -> str:
        d = asdict(self)
        d.pop("wall_time")
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        return cls(**json.loads(line))


def run_instance(
    g: Graph,
    strategy: str,
    *,
    depth: int,
    opt: OptimizerConfig,
    seed: int,
    bundle: PretrainBundle | None = None,
    nv_binding: str = "named",
    graph_id: str = "",
    graph_class: str = "",
) -> RunRecord:
    """Train one strategy on one graph and record its approximation-ratio trace."""
    if g.m == 0:
        raise ValueError("edgeless graph: q_max = 0, approximation ratio undefined")
    start = time.perf_counter()
    table = build_quality_table(g)
    q_max = brute_force_maxcut(g).q_max
    if strategy == "random":
        circuit = qwoa_circuit(g.n, depth)
        fun, x0, bounds = value_and_grad(circuit, table), random_init(depth, seed), angle_bounds(2 * depth)
    elif strategy == "pretrained":
        if bundle is None:
            raise ValueError("pretrained strategy needs a PretrainBundle")
        if bundle.depth != depth:
            raise ValueError(f"bundle depth {bundle.depth} != requested depth {depth}")
        circuit, x0 = build_augmented(bundle, table)
        fun, bounds = value_and_grad(circuit, table), angle_bounds(3 * depth)
    elif strategy == "nv":
        fun, x0, bounds = nv_objective(table, depth, nv_binding), nv_random_init(seed).as_array(), NV_BOUNDS
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    cfg = OptimizerConfig(opt.max_iters, opt.memory, opt.grad_tol, opt.f_tol, bounds)
    _, trace = minimize(fun, x0, cfg)
    ratios = [-c / q_max for c in trace.costs.tolist()]
    stuck = trace.iterations < STUCK_MAX_STEPS and ratios[-1] - ratios[0] < STUCK_MAX_GAIN
    return RunRecord(
        graph_id=graph_id, graph_class=graph_class, strategy=strategy, seed=int(seed),
        n=g.n, m=g.m, connected=g.is_connected(), q_max=q_max, ratios=ratios,
        final_ratio=ratios[-1], iterations=trace.iterations, reason=trace.reason,
        stuck=bool(stuck), evaluations=trace.evaluations,
        wall_time=time.perf_counter() - start,
    )


@dataclass
class SuiteResult:
    records: list[RunRecord]
    failures: list[dict]
    bundle: PretrainBundle | None = None

    @property
    def partial(self) -> bool:
        return bool(self.failures)


def _bundle_for(cfg: BenchConfig, out: Path) -> PretrainBundle:
    if cfg.bundle:
        bundle = PretrainBundle.load(cfg.bundle)
    else:
        path = out / f"bundle_n{cfg.n}_p{cfg.depth}.json"
        if path.exists():
            bundle = PretrainBundle.load(path)
        else:
            log.info("pretraining path graph n=%d p=%d", cfg.n, cfg.depth)
            opt = OptimizerConfig(cfg.pretrain.max_iters, cfg.memory, cfg.grad_tol, cfg.f_tol)
            bundle = pretrain_path_graph(cfg.n, cfg.depth, derive_seed(cfg.master_seed, "pretrain"), opt,
                                         cfg.pretrain.threshold, cfg.pretrain.max_restarts)
            bundle.save(path)
    if (bundle.aux_n, bundle.depth) != (cfg.n, cfg.depth):
        raise ValueError(f"bundle is for (n={bundle.aux_n}, p={bundle.depth}), suite wants (n={cfg.n}, p={cfg.depth})")
    return bundle


def _task(args):
    g, strategy, kwargs = args
    try:
        return run_instance(g, strategy, **kwargs), None
    except Exception as exc:  # recorded, the suite carries on
        return None, {"graph_id": kwargs["graph_id"], "strategy": strategy,
                      "error": f"{type(exc).__name__}: {exc}", "traceback": traceback.format_exc()}


def suite_tasks(cfg: BenchConfig, bundle: PretrainBundle | None):
    for gc in cfg.classes:
        for i in range(cfg.instances):
            g = gc.generate(cfg.n, derive_seed(cfg.master_seed, "graph", gc.name, i))
            gid = f"{gc.name}-{i:03d}"
            for strategy in cfg.strategies:
                kwargs = dict(depth=cfg.depth, opt=cfg.optimizer,
                              seed=derive_seed(cfg.master_seed, "init", gc.name, i, strategy),
                              bundle=bundle if strategy == "pretrained" else None,
                              nv_binding=cfg.nv_binding, graph_id=gid, graph_class=gc.name)
                yield g, strategy, kwargs


def run_suite(cfg: BenchConfig, workers: int | None = None, write: bool = True) -> SuiteResult:
    """Run every (class, instance, strategy) triple of ``cfg``.

    Output in ``cfg.out_dir``: ``records.jsonl`` (task order), ``timing.jsonl``,
    ``graphs/`` and, when something failed, ``failures.json``.
    """
    workers = cfg.workers if workers is None else workers
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    bundle = _bundle_for(cfg, out) if "pretrained" in cfg.strategies else None
    tasks = list(suite_tasks(cfg, bundle))
    if write:
        gdir = out / "graphs"
        gdir.mkdir(exist_ok=True)
        seen = set()
        for g, _, kw in tasks:
            if kw["graph_id"] not in seen:
                seen.add(kw["graph_id"])
                write_graph(g, gdir / f"{kw['graph_id']}.txt", [f"class {kw['graph_class']}",
                                                                 f"connected {g.is_connected()}"])
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_task, tasks, chunksize=1))
    else:
        results = [_task(t) for t in tasks]
    records = [r for r, _ in results if r is not None]
    failures = [f for _, f in results if f is not None]
    if write:
        with open(out / "records.jsonl", "w") as fh:
            for r in records:
                fh.write(r.to_json() + "\n")
        with open(out / "timing.jsonl", "w") as fh:
            for r in records:
                fh.write(json.dumps({"graph_id": r.graph_id, "strategy": r.strategy,
                                     "wall_time": r.wall_time}) + "\n")
        fpath = out / "failures.json"
        if failures:
            fpath.write_text(json.dumps(failures, indent=1) + "\n")
        elif fpath.exists():
            fpath.unlink()
    return SuiteResult(records, failures, bundle)


def read_records(path: str | Path) -> list[RunRecord]:
    path = Path(path)
    if path.is_dir():
        path = path / "records.jsonl"
    with open(path) as fh:
        return [RunRecord.from_json(line) for line in fh if line.strip()]


def iterations_to_converge(ratios, rel_tol: float = 1e-3) -> int:
    """First iteration whose ratio is within ``rel_tol`` (relative) of the final one."""
    r = np.asarray(ratios)
    return int(np.argmax(r >= r[-1] * (1.0 - rel_tol)))
