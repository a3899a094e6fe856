"""Benchmark orchestration: suites of runs, statistics and reports."""

from qwoabench.bench.config import BenchConfig, GraphClass, desk_preset, full_scale_preset
from qwoabench.bench.runner import RunRecord, SuiteResult, run_instance, run_suite
from qwoabench.bench.stats import GroupSummary, SummaryStats, proportion_ci, summarize
from qwoabench.bench.report import emit

__all__ = [
    "BenchConfig",
    "GraphClass",
    "GroupSummary",
    "RunRecord",
    "SuiteResult",
    "SummaryStats",
    "desk_preset",
    "emit",
    "full_scale_preset",
    "proportion_ci",
    "run_instance",
    "run_suite",
    "summarize",
]
