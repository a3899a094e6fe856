"""CSV tables and SVG figures for suite results.

Two CSV tables are produced per summary: the per-iteration trace table at
the requested path and the per-group GW table next to it
(``<stem>.gw.csv``).
"""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from qwoabench.bench.stats import SummaryStats  # noqa: E402
from qwoabench.graphs import GW_THRESHOLD  # noqa: E402

TRACE_COLUMNS = ("class", "strategy", "iteration", "mean_ar", "ci_lo", "ci_hi", "n_runs")
GW_COLUMNS = ("class", "strategy", "gw_fraction", "gw_ci_lo", "gw_ci_hi", "frac_9999", "stuck_count")

STYLE = {
    "figure.figsize": (6.0, 3.8),
    "savefig.bbox": "tight",
    "font.size": 10,
    "axes.spines.right": False,
    "axes.spines.top": False,
    "legend.frameon": False,
    "lines.linewidth": 1.6,
    "svg.hashsalt": "qwoabench",
}
COLORS = {"random": "#7f7f7f", "pretrained": "#d62728", "nv": "#1f77b4"}
LABELS = {"random": "QWOA (random init)", "pretrained": "QWOA (path-graph pretrained)", "nv": "NV-QWOA"}


def gw_table_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".gw.csv")


def write_summary_csv(summary: SummaryStats, path: str | Path) -> tuple[Path, Path]:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for g in summary.groups.values():
            for i, (m, lo, hi) in enumerate(zip(g.mean, g.ci_lo, g.ci_hi)):
                w.writerow([g.graph_class, g.strategy, i, repr(float(m)), repr(float(lo)), repr(float(hi)), g.n_runs])
    gw_path = gw_table_path(path)
    with open(gw_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(GW_COLUMNS)
        for g in summary.groups.values():
            w.writerow([g.graph_class, g.strategy, repr(g.gw_fraction), repr(g.gw_ci_lo), repr(g.gw_ci_hi),
                        repr(g.frac_9999), g.stuck_count])
    return path, gw_path


def read_trace_csv(path: str | Path) -> dict[str, dict[str, dict[str, list[float]]]]:
    """``{class: {strategy: {"iteration", "mean_ar", "ci_lo", "ci_hi"}}}``."""
    data: dict = defaultdict(lambda: defaultdict(lambda: defaultdict(list)))
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TRACE_COLUMNS:
            raise ValueError(f"{path}: expected columns {','.join(TRACE_COLUMNS)}")
        for row in reader:
            cols = data[row["class"]][row["strategy"]]
            for k in ("iteration", "mean_ar", "ci_lo", "ci_hi"):
                cols[k].append(float(row[k]))
    return data


def plot_mean_traces(series: dict[str, dict[str, list[float]]], path: str | Path, title: str = "") -> Path:
    """One curve (with CI band) per strategy plus the GW threshold line."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for strategy, cols in series.items():
            color = COLORS.get(strategy)
            ax.plot(cols["iteration"], cols["mean_ar"], color=color, label=LABELS.get(strategy, strategy))
            ax.fill_between(cols["iteration"], cols["ci_lo"], cols["ci_hi"], color=color, alpha=0.25, lw=0)
        ax.axhline(GW_THRESHOLD, color="k", ls="--", lw=1.0, label=f"GW threshold ({GW_THRESHOLD})")
        ax.set_xlabel("iteration")
        ax.set_ylabel("mean approximation ratio")
        if title:
            ax.set_title(title)
        ax.legend(loc="lower right")
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return Path(path)


def plot_csv(csv_path: str | Path, out: str | Path) -> list[Path]:
    """Render a trace CSV: ``out`` itself for one class, ``<stem>_<class>.svg`` otherwise."""
    data = read_trace_csv(csv_path)
    out = Path(out)
    if len(data) == 1:
        (cls, series), = data.items()
        return [plot_mean_traces(series, out, cls)]
    return [plot_mean_traces(series, out.with_name(f"{out.stem}_{cls}{out.suffix}"), cls)
            for cls, series in sorted(data.items())]


def emit(summary: SummaryStats, records, outdir: str | Path) -> list[Path]:
    """Write ``records.jsonl``, ``summary.csv`` (+ ``summary.gw.csv``) and one
    ``mean_<class>.svg`` per graph class."""
    records = list(records)
    if not records:
        raise ValueError("no records to emit")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = [outdir / "records.jsonl"]
    with open(written[0], "w") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")
    written.extend(write_summary_csv(summary, outdir / "summary.csv"))
    for cls in summary.classes():
        series = {}
        for (c, strategy), g in summary.groups.items():
            if c == cls:
                series[strategy] = {"iteration": list(range(len(g.mean))), "mean_ar": g.mean.tolist(),
                                    "ci_lo": g.ci_lo.tolist(), "ci_hi": g.ci_hi.tolist()}
        written.append(plot_mean_traces(series, outdir / f"mean_{cls}.svg", cls))
    return written
