"""Rebuild the experiment figures from harness CSVs.

Four kinds: error-vs-rank curves (real patterns), weighted error vs m per
flatness level, weighted error vs regularity per graph-product kind, and
the two-plateau weight-vector entries.  Mean lines carry a shaded band of
one standard deviation.  Rendering is deterministic given the CSV and the
spec: fixed style, no timestamps.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

RANK_CURVES = "rank_curves"
SAMPLE_W_CURVES = "sample_w_curves"
SPECTRAL_GAP_CURVES = "spectral_gap_curves"
WEIGHT_ENTRIES = "weight_entries"
KINDS = (RANK_CURVES, SAMPLE_W_CURVES, SPECTRAL_GAP_CURVES, WEIGHT_ENTRIES)

_METHOD_LABELS = {"standard": "standard proj.", "debiased": "debiased proj."}

_REQUIRED = {
    RANK_CURVES: ("rank", "method"),
    SAMPLE_W_CURVES: ("m_target", "y", "method"),
    SPECTRAL_GAP_CURVES: ("rho", "graph_kind", "method"),
    WEIGHT_ENTRIES: ("d1", "y", "m_target"),
}

_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.fontsize": 8,
    "axes.labelsize": 10,
}


class SchemaError(ValueError):
    """The CSV lacks columns the figure kind needs (names attached)."""

    def __init__(self, missing):
        self.missing = sorted(missing)
        super().__init__(f"CSV is missing required columns: {', '.join(self.missing)}")


@dataclass
class FigureSpec:
    csv_path: str
    kind: str
    out_path: str
    metric: str = "weighted"  # weighted | unweighted
    title: str | None = None
    log_x: bool = False
    log_y: bool = False
    m_value: float | None = None  # weight_entries: which m column to draw

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if self.metric not in ("weighted", "unweighted"):
            raise ValueError("metric must be 'weighted' or 'unweighted'")


def read_rows(csv_path):
    """Parse a harness CSV; '#' comment lines are skipped, blanks -> None."""
    with open(csv_path, "r", encoding="ascii") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    rows = []
    for raw in reader:
        row = {}
        for key, val in raw.items():
            if val is None or val == "":
                row[key] = None
            else:
                try:
                    row[key] = float(val)
                except ValueError:
                    row[key] = val
        rows.append(row)
    return rows, list(reader.fieldnames or [])


def _check_columns(spec, columns, rows):
    need = list(_REQUIRED[spec.kind])
    if spec.kind != WEIGHT_ENTRIES:
        need += [f"{spec.metric}_mean", f"{spec.metric}_std"]
    missing = [c for c in need if c not in columns]
    if missing:
        raise SchemaError(missing)
    if spec.kind != WEIGHT_ENTRIES:
        methods = {r["method"] for r in rows}
        if not {"debiased", "standard"} <= methods:
            raise SchemaError([f"method rows for both estimators (got {sorted(methods)})"])


def _series(rows, x_col, mean_col, std_col):
    pts = sorted((r[x_col], r[mean_col], r[std_col] or 0.0) for r in rows)
    x = np.array([p[0] for p in pts])
    mean = np.array([p[1] for p in pts])
    std = np.array([p[2] for p in pts])
    return x, mean, std


def _line_groups(spec, rows):
    """Yield (label, x, mean, std) per curve, deterministically ordered."""
    mean_col = f"{spec.metric}_mean"
    std_col = f"{spec.metric}_std"
    if spec.kind == RANK_CURVES:
        for method in ("standard", "debiased"):
            sub = [r for r in rows if r["method"] == method]
            if sub:
                yield _METHOD_LABELS[method], *_series(sub, "rank", mean_col, std_col)
    elif spec.kind == SAMPLE_W_CURVES:
        ys = sorted({r["y"] for r in rows})
        for method in ("standard", "debiased"):
            for y in ys:
                sub = [r for r in rows if r["method"] == method and r["y"] == y]
                if sub:
                    yield (f"{_METHOD_LABELS[method]}, y = {y:g}",
                           *_series(sub, "m_target", mean_col, std_col))
    elif spec.kind == SPECTRAL_GAP_CURVES:
        kinds = sorted({r["graph_kind"] for r in rows})
        for method in ("standard", "debiased"):
            for gk in kinds:
                sub = [r for r in rows if r["method"] == method and r["graph_kind"] == gk]
                if sub:
                    yield (f"{_METHOD_LABELS[method]}, {gk}",
                           *_series(sub, "rho", mean_col, std_col))


_X_LABELS = {
    RANK_CURVES: "rank",
    SAMPLE_W_CURVES: "m = E|Omega|",
    SPECTRAL_GAP_CURVES: "regularity rho",
}


def build_figure(spec: FigureSpec):
    """Build (figure, axis) for the spec; the caller owns closing it."""
    rows, columns = read_rows(spec.csv_path)
    _check_columns(spec, columns, rows)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        if spec.kind == WEIGHT_ENTRIES:
            _draw_weight_entries(spec, rows, ax)
        else:
            for label, x, mean, std in _line_groups(spec, rows):
                dashed = label.startswith("standard")
                ax.plot(x, mean, linestyle="--" if dashed else "-",
                        marker="o", markersize=3, label=label)
                if (std > 0).any():
                    ax.fill_between(x, mean - std, mean + std, alpha=0.2)
            ax.set_xlabel(_X_LABELS[spec.kind])
            ax.set_ylabel(f"{spec.metric} error")
            if spec.log_x:
                ax.set_xscale("log")
            if spec.log_y:
                ax.set_yscale("log")
        ax.legend()
        if spec.title:
            ax.set_title(spec.title)
        fig.tight_layout()
    return fig, ax


def _draw_weight_entries(spec, rows, ax):
    d = int(rows[0]["d1"])
    m = spec.m_value if spec.m_value is not None else max(r["m_target"] for r in rows)
    for y in sorted({r["y"] for r in rows}):
        f = 2.0 * math.sqrt(m) / d - y
        w = np.concatenate([np.full(d // 2, f), np.full(d // 2, y)])
        ax.plot(np.arange(d), w, drawstyle="steps-post", label=f"y = {y:g}")
    ax.set_xlabel("i")
    ax.set_ylabel("w_i")
    ax.set_title(spec.title or f"weight entries, m = {m:g}")


def render(spec: FigureSpec) -> str:
    """Render the figure to spec.out_path; returns the path."""
    fig, _ = build_figure(spec)
    try:
        fig.savefig(spec.out_path, dpi=150)
    finally:
        plt.close(fig)
    return spec.out_path
