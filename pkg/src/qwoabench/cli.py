"""Command-line entry point: ``qwoabench <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 runtime failure, 3 partial suite
failure (some runs of a ``bench`` suite raised).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from qwoabench.graphs import brute_force_maxcut, build_quality_table, gen_er, gen_regular, read_graph, write_graph
from qwoabench.optimize import OptimizerConfig

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME, EXIT_PARTIAL = 0, 1, 2, 3

log = logging.getLogger("qwoabench")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def cmd_gen(a) -> int:
    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(a.count):
        seed = a.seed + i
        if a.graph_class == "er":
            g, info = gen_er(a.n, a.p_edge, seed), f"er n={a.n} p={a.p_edge} seed={seed}"
        else:
            g, info = gen_regular(a.n, a.degree, seed), f"regular n={a.n} d={a.degree} seed={seed}"
        write_graph(g, out / f"{a.graph_class}_n{a.n}_{i:03d}.txt", [info, f"connected {g.is_connected()}"])
    print(f"wrote {a.count} graphs to {out}")
    return EXIT_OK


def cmd_solve(a) -> int:
    g = read_graph(a.graph)
    sol = brute_force_maxcut(g)
    print(f"q_max {sol.q_max:g}")
    print("witness " + "".join(map(str, sol.witness)))
    return EXIT_OK


def cmd_pretrain(a) -> int:
    from qwoabench.strategies import pretrain_path_graph

    bundle = pretrain_path_graph(a.n, a.depth, a.seed, OptimizerConfig(max_iters=a.max_iters))
    bundle.save(a.out)
    print(f"approx ratio {bundle.aux_approx_ratio:.10f} after {bundle.attempts} attempt(s); wrote {a.out}")
    return EXIT_OK


def cmd_run(a) -> int:
    from qwoabench.bench.runner import run_instance
    from qwoabench.strategies import PretrainBundle

    if a.strategy == "pretrained" and not a.bundle:
        raise UsageError("--strategy pretrained requires --bundle")
    bundle = PretrainBundle.load(a.bundle) if a.bundle else None
    g = read_graph(a.graph)
    rec = run_instance(g, a.strategy, depth=a.depth, opt=OptimizerConfig(max_iters=a.max_iters), seed=a.seed,
                       bundle=bundle, nv_binding=a.nv_binding, graph_id=Path(a.graph).stem)
    Path(a.out).write_text(rec.to_json() + "\n")
    print(f"{a.strategy}: approx ratio {rec.final_ratio:.6f} after {rec.iterations} iterations ({rec.reason})")
    return EXIT_OK


def cmd_bench(a) -> int:
    from qwoabench.bench.config import BenchConfig
    from qwoabench.bench.report import emit
    from qwoabench.bench.runner import run_suite
    from qwoabench.bench.stats import summarize

    try:
        cfg = BenchConfig.load(a.config)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad config {a.config}: {exc}") from exc
    res = run_suite(cfg, workers=a.workers)
    if res.records:
        emit(summarize(res.records, horizon=cfg.max_iters + 1), res.records, cfg.out_dir)
    print(f"{len(res.records)} runs, {len(res.failures)} failures; output in {cfg.out_dir}")
    if res.failures:
        for f in res.failures:
            log.error("%s/%s: %s", f["graph_id"], f["strategy"], f["error"])
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_stats(a) -> int:
    from qwoabench.bench.report import write_summary_csv
    from qwoabench.bench.runner import read_records
    from qwoabench.bench.stats import summarize

    records = read_records(a.input)
    trace, gw = write_summary_csv(summarize(records), a.out)
    print(f"wrote {trace} and {gw}")
    return EXIT_OK


def cmd_plot(a) -> int:
    from qwoabench.bench.report import plot_csv

    for p in plot_csv(a.input, a.out):
        print(f"wrote {p}")
    return EXIT_OK


def cmd_dla(a) -> int:
    from qwoabench.liealg import jacobi_residual, lie_closure, qwoa_generators, structure_constants

    g = read_graph(a.graph)
    basis = lie_closure(qwoa_generators(g), max_dim=a.max_dim)
    print(f"dim {basis.dim}")
    print("rounds " + " ".join(map(str, basis.round_sizes)))
    if a.structure_constants:
        f = structure_constants(basis)
        print(f"antisymmetry {np.max(np.abs(f + f.transpose(0, 2, 1))):.3e}")
        print(f"jacobi {jacobi_residual(f):.3e}")
    return EXIT_OK


def cmd_gsim_check(a) -> int:
    from qwoabench.liealg import gsim_expectation, gsim_setup, quality_operator
    from qwoabench.rng import stream
    from qwoabench.simulator import expectation, qwoa_circuit, run_pqc

    g = read_graph(a.graph)
    table = build_quality_table(g)
    basis, f, e, gens = gsim_setup(g)
    circuit = qwoa_circuit(g.n, a.depth)
    obs = quality_operator(g)
    rng = stream(a.seed, "gsim-check")
    worst = 0.0
    for _ in range(a.trials):
        x = rng.uniform(0.0, 2 * np.pi, circuit.num_params)
        diff = abs(gsim_expectation(circuit, x, obs, basis, f, e, gens) - expectation(run_pqc(circuit, x, table), table))
        worst = max(worst, diff)
    print(f"dim {basis.dim} trials {a.trials} max |gsim - statevector| {worst:.3e}")
    return EXIT_OK if worst <= a.tol else EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qwoabench", description="QWOA / NV-QWOA MaxCut simulator and benchmark harness")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate random graphs")
    p.add_argument("--class", dest="graph_class", choices=("er", "regular"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--p-edge", type=float, default=0.3)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="brute-force MaxCut")
    p.add_argument("--graph", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("pretrain", help="train QWOA on the path graph and save a bundle")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pretrain)

    p = sub.add_parser("run", help="train one strategy on one graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--strategy", choices=("random", "pretrained", "nv"), required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--max-iters", type=int, required=True)
    p.add_argument("--bundle")
    p.add_argument("--nv-binding", choices=("named", "literal"), default="named")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="run a benchmark suite from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("stats", help="summarise a records directory into CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("plot", help="render a summary CSV as SVG")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("dla", help="dynamical Lie algebra of QWOA on a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--max-dim", type=int, required=True)
    p.add_argument("--structure-constants", action="store_true")
    p.set_defaults(func=cmd_dla)

    p = sub.add_parser("gsim-check", help="compare Lie-algebraic and statevector expectations")
    p.add_argument("--graph", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_gsim_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "workers", 1) < 1:
        print("qwoabench: error: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qwoabench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"qwoabench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        log.debug("failure", exc_info=True)
        print(f"qwoabench: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
