"""Figure rendering from magicbias data files.

This layer computes no physics: every plotted quantity is a column emitted
by the simulation CLI's `figures` subcommand.  Infinite-bias rows are drawn
at a capped sentinel position with an axis annotation; depolarizing-marker
rows get the distinguished triangle marker.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

KINDS = ("infidelity-vs-p", "bias-vs-bias", "ablation-pair")

REQUIRED_COLUMNS = {
    "infidelity-vs-p": {"eta", "p", "r_proc"},
    "bias-vs-bias": {"set", "eta2", "depol_marker"},
    "ablation-pair": {"set", "eta2", "depol_marker"},
}

INF_CAP_FACTOR = 10.0  # sentinel position for eta = inf, relative to the data


class RenderError(Exception):
    pass


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str
    value_column: str = ""
    logx: bool = True
    logy: bool = True
    title: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RenderError(f"unknown figure kind {self.kind!r}")
        want = 2 if self.kind == "ablation-pair" else 1
        if len(self.inputs) != want:
            raise RenderError(f"{self.kind} takes exactly {want} input file(s)")

    @staticmethod
    def from_dict(raw: dict) -> "FigureSpec":
        inputs = raw.get("input")
        if isinstance(inputs, str):
            inputs = (inputs,)
        elif isinstance(inputs, list):
            inputs = tuple(inputs)
        else:
            raise RenderError("spec needs an 'input' file or list of files")
        return FigureSpec(
            kind=raw.get("kind", ""),
            inputs=inputs,
            output=raw.get("output", ""),
            value_column=raw.get("value_column", ""),
            logx=bool(raw.get("logx", True)),
            logy=bool(raw.get("logy", True)),
            title=raw.get("title", ""),
        )


def _load_rows(path: str, kind: str) -> list[dict]:
    p = Path(path)
    if not p.exists():
        raise RenderError(f"missing data file {path}")
    with p.open() as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise RenderError(f"{path} holds no data rows")
    missing = REQUIRED_COLUMNS[kind] - set(rows[0])
    if missing:
        raise RenderError(f"{path} lacks columns {sorted(missing)} for kind {kind}")
    return rows


def _value_column(rows: list[dict], requested: str) -> str:
    if requested:
        if requested not in rows[0]:
            raise RenderError(f"value column {requested!r} not in data")
        return requested
    for candidate in ("eta1_ZL", "eta1_XL"):
        if candidate in rows[0]:
            return candidate
    raise RenderError("no bias value column found")


def _plot_infidelity(ax, rows: list[dict]):
    by_eta: dict[str, list[tuple[float, float]]] = {}
    for r in rows:
        by_eta.setdefault(r["eta"], []).append((float(r["p"]), float(r["r_proc"])))
    for eta, pts in sorted(by_eta.items(), key=lambda kv: kv[0]):
        pts.sort()
        label = "eta = inf" if eta == "inf" else f"eta = {float(eta):g}"
        ax.plot([x for x, _ in pts], [y for _, y in pts], "o-", label=label)
    ax.set_xlabel("physical error rate p")
    ax.set_ylabel("logical process infidelity")
    ax.legend()


def _plot_bias(ax, rows: list[dict], column: str):
    finite_max = 0.0
    for r in rows:
        if r["eta2"] != "inf":
            finite_max = max(finite_max, float(r["eta2"]))
    sentinel = finite_max * INF_CAP_FACTOR if finite_max else INF_CAP_FACTOR
    drew_sentinel = False
    by_set: dict[str, list[dict]] = {}
    for r in rows:
        by_set.setdefault(r["set"], []).append(r)
    for set_name, group in sorted(by_set.items()):
        xs, ys, mx, my = [], [], [], []
        sx, sy = [], []
        for r in group:
            y = float(r[column]) if r[column] not in ("inf", "nan") else math.nan
            if math.isnan(y):
                continue
            if r["eta2"] == "inf":
                sx.append(sentinel)
                sy.append(y)
                drew_sentinel = True
            elif r["depol_marker"] == "1":
                mx.append(float(r["eta2"]))
                my.append(y)
            else:
                xs.append(float(r["eta2"]))
                ys.append(y)
        order = sorted(range(len(xs)), key=lambda i: xs[i])
        line, = ax.plot([xs[i] for i in order], [ys[i] for i in order], "o-",
                        label=f"set {set_name}")
        if mx:
            ax.plot(mx, my, "^", markersize=11, color=line.get_color(),
                    label=f"set {set_name} (depolarizing)")
        if sx:
            ax.plot(sx, sy, "s", color=line.get_color())
    if drew_sentinel:
        ax.axvline(sentinel / 1.5, linestyle=":", linewidth=0.8, color="gray")
        ax.annotate("axis break: eta = inf", xy=(sentinel, ax.get_ylim()[0]),
                    fontsize=7, ha="right")
    ax.set_xlabel("physical bias")
    ax.set_ylabel(column)
    ax.legend(fontsize=8)


def render(spec: FigureSpec) -> str:
    """Render the figure and return the output path."""
    if spec.kind == "ablation-pair":
        fig, axes = plt.subplots(1, 2, figsize=(9, 4))
        for ax, path, tag in zip(axes, spec.inputs, ("(a)", "(b)")):
            rows = _load_rows(path, spec.kind)
            _plot_bias(ax, rows, _value_column(rows, spec.value_column))
            ax.set_title(tag)
            if spec.logx:
                ax.set_xscale("log")
            if spec.logy:
                ax.set_yscale("log")
    else:
        fig, ax = plt.subplots(figsize=(5.2, 4))
        rows = _load_rows(spec.inputs[0], spec.kind)
        if spec.kind == "infidelity-vs-p":
            _plot_infidelity(ax, rows)
        else:
            _plot_bias(ax, rows, _value_column(rows, spec.value_column))
        if spec.logx:
            ax.set_xscale("log")
        if spec.logy:
            ax.set_yscale("log")
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    # fixed metadata keeps repeated renders byte-stable
    fig.savefig(out, dpi=150, metadata={"Software": "magicbias-plots"})
    plt.close(fig)
    return str(out)
