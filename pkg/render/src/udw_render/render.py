"""Rendering of harvester CSV grids: heatmaps with grey zero-negativity
masks and line plots with optional dotted reference curves."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["RenderJob", "RenderError", "render", "read_table"]

DATA_COLUMNS = ("p", "abs_m", "negativity", "err_p", "err_m", "converged")

AXIS_LABELS = {
    "omega": r"$\Omega\sigma$",
    "separation": r"$S/(c\sigma)$",
    "width": r"$L/(c\sigma)$",
    "mass": r"$Mc\sigma$",
    "speed_ratio": r"$c_s/c$",
    "gamma": r"$\gamma$",
}

# recipe id -> (default style, y columns for line plots, dotted references)
RECIPE_STYLES = {
    "fig1_top": ("heatmap", ("negativity",), ()),
    "fig1_bottom": ("heatmap", ("negativity",), ()),
    "fig2": ("lines", ("p",), ("p_pointlike",)),
    "fig3": ("lines", ("abs_m",), ("abs_m_pointlike",)),
    "fig5_top": ("lines", ("p", "abs_m", "negativity"), ()),
    "fig5_bottom": ("heatmap", ("negativity",), ()),
    "fig6": ("lines", ("p", "abs_m", "negativity"), ()),
}
for _i in range(1, 7):
    RECIPE_STYLES[f"fig4_panel{_i}"] = ("heatmap", ("negativity",), ())


class RenderError(ValueError):
    pass


@dataclass(frozen=True)
class RenderJob:
    recipe: str
    input_csv: str
    output_png: str
    style: str | None = None  # "heatmap" | "lines"; default per recipe
    zero_mask_color: str = "0.6"


def read_table(path: str) -> tuple[list[str], dict[str, np.ndarray]]:
    """Read a harvester CSV: returns (param_columns, columns dict)."""
    with open(path, encoding="ascii") as fh:
        rows = [
            row
            for row in csv.reader(
                line for line in fh if line.strip() and not line.startswith("#")
            )
        ]
    if not rows:
        raise RenderError("empty file: no header row")
    header = rows[0]
    if "negativity" not in header:
        raise RenderError("missing column: negativity")
    if len(rows) == 1:
        raise RenderError("empty grid: header only, no data rows")
    first_data = header.index("p") if "p" in header else None
    if first_data is None or first_data == 0:
        raise RenderError("missing column: p (or no parameter columns before it)")
    params = header[:first_data]
    table: dict[str, np.ndarray] = {}
    for j, name in enumerate(header):
        col = [row[j] for row in rows[1:]]
        if name == "converged":
            table[name] = np.array([v == "true" for v in col])
        else:
            table[name] = np.array([float(v) for v in col])
    return params, table


def _style_for(job: RenderJob):
    default_style, ycols, refs = RECIPE_STYLES.get(
        job.recipe, ("heatmap", ("negativity",), ())
    )
    return job.style or default_style, ycols, refs


def _render_heatmap(job: RenderJob, params, table, ax):
    n = table["negativity"]
    if len(params) >= 2:
        xs = np.unique(table[params[0]])
        ys = np.unique(table[params[1]])
        if xs.size * ys.size != n.size:
            raise RenderError(
                f"grid is not a full {params[0]} x {params[1]} product"
            )
        z = n.reshape(xs.size, ys.size)
        ylabel = AXIS_LABELS.get(params[1], params[1])
        extent = (xs[0], xs[-1], ys[0], ys[-1])
        img = np.ma.masked_where(z == 0.0, z).T
    else:
        xs = table[params[0]]
        ys = np.array([0.0, 1.0])
        z = n.reshape(xs.size, 1)
        ylabel = ""
        extent = (xs[0], xs[-1], 0.0, 1.0)
        img = np.ma.masked_where(z == 0.0, z).T
    cmap = plt.get_cmap("viridis").copy()
    cmap.set_bad(job.zero_mask_color)
    im = ax.imshow(
        img, origin="lower", aspect="auto", extent=extent, cmap=cmap,
        interpolation="nearest",
    )
    ax.set_xlabel(AXIS_LABELS.get(params[0], params[0]))
    if ylabel:
        ax.set_ylabel(ylabel)
    else:
        ax.set_yticks([])
    plt.colorbar(im, ax=ax, label=r"$\mathcal{N}\,/\,\lambda^2$")


def _render_lines(job: RenderJob, params, table, ax, ycols, refs):
    for col in ycols:
        if col not in table:
            raise RenderError(f"missing column: {col}")
    x_name = params[-1]
    group_names = params[:-1]
    x_all = table[x_name]
    if group_names:
        keys = np.stack([table[g] for g in group_names], axis=1)
        groups = np.unique(keys, axis=0)
    else:
        groups = [None]
    for g in groups:
        if g is None:
            sel = np.ones(len(x_all), dtype=bool)
            suffix = ""
        else:
            sel = np.all(
                np.isclose(np.stack([table[n] for n in group_names], axis=1), g),
                axis=1,
            )
            suffix = " (" + ", ".join(
                f"{n}={v:g}" for n, v in zip(group_names, g)
            ) + ")"
        order = np.argsort(x_all[sel])
        x = x_all[sel][order]
        for col in ycols:
            ax.plot(x, table[col][sel][order], label=col + suffix)
        for col in refs:
            if col in table:
                ax.plot(
                    x, table[col][sel][order], linestyle=":", color="0.3",
                    label=col + suffix,
                )
    ax.set_xlabel(AXIS_LABELS.get(x_name, x_name))
    if x_name == "mass":
        ax.set_xscale("log")
    ax.legend(fontsize=7)


def render(job: RenderJob) -> str:
    """Render one CSV to one PNG; returns the output path.

    Deterministic: fixed figure geometry, no timestamps, pinned PNG
    metadata, so re-rendering the same CSV is byte-identical.
    """
    params, table = read_table(job.input_csv)
    style, ycols, refs = _style_for(job)
    fig, ax = plt.subplots(figsize=(5.2, 3.6), dpi=150)
    try:
        if style == "heatmap":
            _render_heatmap(job, params, table, ax)
        elif style == "lines":
            _render_lines(job, params, table, ax, ycols, refs)
        else:
            raise RenderError(f"unknown style {style!r}")
        ax.set_title(job.recipe)
        fig.tight_layout()
        buf = io.BytesIO()
        fig.savefig(buf, format="png", metadata={"Software": "udw-render"})
    finally:
        plt.close(fig)
    with open(job.output_png, "wb") as fh:
        fh.write(buf.getvalue())
    return job.output_png
