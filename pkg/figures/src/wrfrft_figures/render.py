"""Deterministic figure rendering from toolkit exports.

Figure kinds
------------
heatmap     one matrix container rendered as an image map
curve       one two-column CSV as a line, optionally with the maximum marked
multi-curve Monte-Carlo rows CSV, one labeled line per method

Rendering is pure plotting: no quantity is recomputed.  Output bytes are
reproducible: fixed backend, fixed size and dpi, no timestamps or version
strings embedded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .readers import InputError, read_curve_csv, read_matrix, read_rows_csv

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

KINDS = ("heatmap", "curve", "multi-curve")
_FIGSIZE = (6.4, 4.8)
_DPI = 110


@dataclass
class FigureSpec:
    kind: str
    inputs: list
    output: str
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    metric: str = ""          # multi-curve: which rows to plot
    log_y: bool = False
    mark_max: bool = False
    db_scale: bool = False    # heatmap: 20*log10 amplitude
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")
        if not self.inputs:
            raise InputError("figure spec needs at least one input file")
        if self.kind == "multi-curve" and not self.metric:
            raise InputError("multi-curve figures need a metric name")


def parse_spec(text: str) -> FigureSpec:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise InputError(f"spec does not parse: {exc}") from exc
    fig = doc.get("figure", doc)
    known = {"kind", "inputs", "output", "title", "xlabel", "ylabel",
             "metric", "log_y", "mark_max", "db_scale"}
    unknown = set(fig) - known
    if unknown:
        raise InputError(f"spec has unknown keys: {sorted(unknown)}")
    try:
        return FigureSpec(
            kind=fig["kind"], inputs=list(fig["inputs"]), output=fig["output"],
            title=fig.get("title", ""), xlabel=fig.get("xlabel", ""),
            ylabel=fig.get("ylabel", ""), metric=fig.get("metric", ""),
            log_y=bool(fig.get("log_y", False)),
            mark_max=bool(fig.get("mark_max", False)),
            db_scale=bool(fig.get("db_scale", False)))
    except KeyError as exc:
        raise InputError(f"spec missing required key {exc}") from exc


def _new_axes():
    fig, ax = plt.subplots(figsize=_FIGSIZE, dpi=_DPI)
    return fig, ax


def _render_heatmap(spec: FigureSpec, ax):
    data, axes, labels = read_matrix(spec.inputs[0])
    img = np.abs(data).astype(float)
    if spec.db_scale:
        floor = img[img > 0].min() if np.any(img > 0) else 1.0
        img = 20.0 * np.log10(np.maximum(img, 1e-6 * floor))
    names = list(axes)
    extent = None
    if len(names) == 2:
        a0, a1 = axes[names[0]], axes[names[1]]
        extent = (a1[0], a1[-1], a0[0], a0[-1])
    im = ax.imshow(img, aspect="auto", origin="lower", extent=extent,
                   cmap="viridis", interpolation="nearest")
    ax.figure.colorbar(im, ax=ax)
    if not spec.xlabel and len(names) == 2:
        ax.set_xlabel(names[1])
    if not spec.ylabel and len(names) == 2:
        ax.set_ylabel(names[0])


def _render_curve(spec: FigureSpec, ax):
    xname, x, yname, y = read_curve_csv(spec.inputs[0])
    ax.plot(x, y, color="tab:blue", lw=1.5)
    if spec.mark_max:
        k = int(np.argmax(y))
        ax.plot([x[k]], [y[k]], marker="v", color="tab:red", ms=9)
        ax.annotate(f"max @ {x[k]:g}", (x[k], y[k]),
                    textcoords="offset points", xytext=(6, -12))
    if not spec.xlabel:
        ax.set_xlabel(xname)
    if not spec.ylabel:
        ax.set_ylabel(yname)
    ax.grid(True, alpha=0.3)


_METHOD_STYLE = {
    "wrfrft": dict(color="tab:red", marker="o"),
    "rfrft": dict(color="tab:blue", marker="s"),
    "grft": dict(color="tab:green", marker="^"),
    "rft": dict(color="tab:purple", marker="d"),
    "mtd": dict(color="tab:gray", marker="x"),
}


def _render_multi_curve(spec: FigureSpec, ax):
    series = read_rows_csv(spec.inputs[0], spec.metric)
    for method in sorted(series):
        pts = series[method]
        x = [p[0] for p in pts]
        y = [p[1] for p in pts]
        style = _METHOD_STYLE.get(method, {})
        ax.plot(x, y, lw=1.5, ms=5, label=method, **style)
    if spec.log_y:
        ax.set_yscale("log")
    if spec.metric == "pd":
        ax.set_ylim(-0.02, 1.02)
    ax.legend()
    ax.grid(True, alpha=0.3)
    if not spec.xlabel:
        ax.set_xlabel("snr_db")
    if not spec.ylabel:
        ax.set_ylabel(spec.metric)


def render(spec: FigureSpec) -> Path:
    """Render one figure; returns the output path."""
    fig, ax = _new_axes()
    try:
        if spec.kind == "heatmap":
            _render_heatmap(spec, ax)
        elif spec.kind == "curve":
            _render_curve(spec, ax)
        else:
            _render_multi_curve(spec, ax)
        if spec.title:
            ax.set_title(spec.title)
        if spec.xlabel:
            ax.set_xlabel(spec.xlabel)
        if spec.ylabel:
            ax.set_ylabel(spec.ylabel)
        out = Path(spec.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        # strip embedded metadata so identical inputs give identical bytes
        fig.savefig(out, format="png",
                    metadata={"Software": None, "CreationDate": None})
        return out
    finally:
        plt.close(fig)
