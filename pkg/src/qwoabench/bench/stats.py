"""Ensemble statistics over run records.

Confidence intervals use the normal approximation with z = 1.96: for a mean
trace, ``mean +- 1.96 s / sqrt(N)`` per iteration; for a proportion,
``p +- 1.96 sqrt(p (1 - p) / N)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from qwoabench.graphs import GW_THRESHOLD

Z95 = 1.96
NEAR_OPTIMAL = 0.9999


def proportion_ci(successes: int, n: int, z: float = Z95) -> tuple[float, float, float]:
    """(p_hat, lo, hi) with the normal-approximation interval clipped to [0, 1]."""
    if n <= 0:
        raise ValueError("proportion needs n >= 1")
    p = successes / n
    half = z * math.sqrt(p * (1.0 - p) / n)
    return p, max(0.0, p - half), min(1.0, p + half)


def pad_traces(traces: Sequence[Sequence[float]], length: int) -> np.ndarray:
    """Stack traces, carrying each final value forward to ``length`` entries."""
    out = np.empty((len(traces), length))
    for i, t in enumerate(traces):
        t = np.asarray(t, dtype=np.float64)[:length]
        out[i, : t.size] = t
        out[i, t.size :] = t[-1]
    return out


@dataclass(frozen=True)
class GroupSummary:
    graph_class: str
    strategy: str
    n_runs: int
    mean: np.ndarray
    ci_lo: np.ndarray
    ci_hi: np.ndarray
    final_mean: float
    gw_fraction: float
    gw_ci_lo: float
    gw_ci_hi: float
    frac_9999: float
    stuck_count: int


@dataclass(frozen=True)
class SummaryStats:
    groups: dict[tuple[str, str], GroupSummary]

    def __getitem__(self, key: tuple[str, str]) -> GroupSummary:
        return self.groups[key]

    def classes(self) -> list[str]:
        return sorted({c for c, _ in self.groups})


def summarize(records: Iterable, horizon: int | None = None, threshold: float = GW_THRESHOLD) -> SummaryStats:
    """Per (class, strategy) mean traces, GW-exceed fractions and counts.

    Traces are padded to ``horizon`` entries (default: longest in the group)
    by repeating their final value.
    """
    groups: dict[tuple[str, str], list] = {}
    for r in records:
        groups.setdefault((r.graph_class, r.strategy), []).append(r)
    if not groups:
        raise ValueError("no records to summarise")
    out = {}
    for key in sorted(groups):
        rs = groups[key]
        length = horizon or max(len(r.ratios) for r in rs)
        mat = pad_traces([r.ratios for r in rs], length)
        n = len(rs)
        mean = mat.mean(axis=0)
        if n > 1:
            half = Z95 * mat.std(axis=0, ddof=1) / math.sqrt(n)
        else:
            half = np.zeros(length)
        finals = np.array([r.final_ratio for r in rs])
        p, lo, hi = proportion_ci(int(np.sum(finals > threshold)), n)
        out[key] = GroupSummary(
            graph_class=key[0], strategy=key[1], n_runs=n, mean=mean,
            ci_lo=mean - half, ci_hi=mean + half, final_mean=float(finals.mean()),
            gw_fraction=p, gw_ci_lo=lo, gw_ci_hi=hi,
            frac_9999=float(np.mean(finals >= NEAR_OPTIMAL)),
            stuck_count=int(sum(r.stuck for r in rs)),
        )
    return SummaryStats(out)
