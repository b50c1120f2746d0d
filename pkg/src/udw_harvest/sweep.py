"""Parameter sweeps over (omega, separation, width, mass, speed_ratio)
grids with deterministic CSV output.

The excitation probability does not depend on the separation, so P is
computed once per distinct (omega, model) and shared across the row;
cells are evaluated concurrently when jobs > 1 and reassembled by cell
index, so the output is independent of completion order.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from . import __version__
from .compute import harvest_cell
from .quadrature import IntegralValue, NonConvergenceError, QuadratureSpec
from .scenario import (
    Delocalized,
    HarvestResult,
    ModelVariant,
    Pointlike,
    ScenarioConfig,
    Smeared,
)

__all__ = ["SweepGrid", "run_sweep", "write_csv", "AXIS_NAMES", "format_number"]

AXIS_NAMES = ("omega", "separation", "width", "mass", "speed_ratio")

MAX_CELLS = 10**6


@dataclass(frozen=True)
class SweepGrid:
    x_axis: tuple[str, tuple[float, ...]]
    y_axis: tuple[str, tuple[float, ...]] | None
    fixed: dict
    results: tuple  # row-major tuples of (HarvestResult, converged)
    metadata: dict = field(default_factory=dict)

    @property
    def shape(self):
        nx = len(self.x_axis[1])
        return (nx, len(self.y_axis[1])) if self.y_axis else (nx,)

    def cells(self):
        """Yield (axis_values, HarvestResult, converged) row-major."""
        xs = self.x_axis[1]
        if self.y_axis is None:
            for i, x in enumerate(xs):
                res, ok = self.results[i]
                yield (x,), res, ok
        else:
            ys = self.y_axis[1]
            for i, x in enumerate(xs):
                for j, y in enumerate(ys):
                    res, ok = self.results[i * len(ys) + j]
                    yield (x, y), res, ok


def _build_config(params: dict) -> ScenarioConfig:
    name = params.get("model", "pointlike")
    required = {"omega", "separation"}
    if name == "smeared":
        required |= {"width"}
    elif name == "delocalized":
        required |= {"width", "mass"}
    missing = sorted(required - params.keys())
    if missing:
        raise ValueError(f"missing required parameter(s): {', '.join(missing)}")
    if name == "pointlike":
        model: ModelVariant = Pointlike()
    elif name == "smeared":
        model = Smeared(width=params["width"])
    elif name == "delocalized":
        model = Delocalized(
            width=params["width"],
            mass=params["mass"],
            speed_ratio=params.get("speed_ratio", 1.0),
            path=params.get("path", "exact"),
        )
    else:
        raise ValueError(f"unknown model {name!r}")
    return ScenarioConfig(params["omega"], params["separation"], model)


def _cell_params(fixed: dict, axes_named: list[tuple[str, float]]) -> dict:
    params = dict(fixed)
    for name, value in axes_named:
        params[name] = value
    return params


def _p_key(params: dict):
    # P is independent of the separation
    return tuple(
        params.get(k) for k in ("omega", "model", "width", "mass", "speed_ratio", "path")
    )


def _eval_p(task):
    params, path, spec = task
    cfg = _build_config(params)
    from .classical import excitation_classical_iv
    from .delocalized import excitation_delocalized_iv

    try:
        if isinstance(cfg.model, Delocalized):
            return excitation_delocalized_iv(cfg, path, spec), True
        return excitation_classical_iv(cfg, spec), True
    except NonConvergenceError as exc:
        return IntegralValue(exc.estimate, exc.err_estimate, exc.evaluations), False


def _eval_cell(task):
    params, path, spec, p_iv, p_ok = task
    cfg = _build_config(params)
    res, ok = harvest_cell(cfg, path, spec, p_precomputed=p_iv)
    return res, ok and p_ok


def run_sweep(
    axes: list[tuple[str, list[float]]],
    fixed: dict,
    path: str | None = None,
    spec: QuadratureSpec | None = None,
    jobs: int | None = None,
) -> SweepGrid:
    if not 1 <= len(axes) <= 2:
        raise ValueError("one or two axes required")
    for name, _ in axes:
        if name not in AXIS_NAMES:
            raise ValueError(f"unknown axis {name!r}; choose from {AXIS_NAMES}")
    n_cells = 1
    for _, values in axes:
        n_cells *= len(values)
    if n_cells > MAX_CELLS:
        raise ValueError(f"grid too large ({n_cells} cells > {MAX_CELLS})")
    jobs = jobs or os.cpu_count() or 1

    x_axis = (axes[0][0], tuple(float(v) for v in axes[0][1]))
    y_axis = (axes[1][0], tuple(float(v) for v in axes[1][1])) if len(axes) == 2 else None

    cell_params = []
    if y_axis is None:
        for x in x_axis[1]:
            cell_params.append(_cell_params(fixed, [(x_axis[0], x)]))
    else:
        for x in x_axis[1]:
            for y in y_axis[1]:
                cell_params.append(
                    _cell_params(fixed, [(x_axis[0], x), (y_axis[0], y)])
                )

    # stage 1: distinct P evaluations
    p_keys = {}
    for params in cell_params:
        p_keys.setdefault(_p_key(params), params)
    p_tasks = [(params, path, spec) for params in p_keys.values()]
    if jobs > 1 and len(p_tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            p_results = list(ex.map(_eval_p, p_tasks, chunksize=1))
    else:
        p_results = [_eval_p(t) for t in p_tasks]
    p_cache = dict(zip(p_keys.keys(), p_results))

    # stage 2: per-cell M evaluations
    m_tasks = [
        (params, path, spec, *p_cache[_p_key(params)]) for params in cell_params
    ]
    if jobs > 1 and len(m_tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_eval_cell, m_tasks, chunksize=4))
    else:
        results = [_eval_cell(t) for t in m_tasks]

    used = spec or QuadratureSpec()
    metadata = {
        "tool": f"udw-harvest {__version__}",
        "rel_tol": used.rel_tol,
        "abs_tol": used.abs_tol,
        "path": path or "default",
    }
    return SweepGrid(x_axis, y_axis, dict(fixed), tuple(results), metadata)


def format_number(v: float) -> str:
    return format(float(v), ".12g")


def write_csv(grid: SweepGrid, out_path, extra_columns: dict | None = None) -> int:
    """Write the grid; returns the number of non-converged cells.

    ``extra_columns`` maps column name -> list of per-cell values
    (row-major), appended after the standard columns.
    """
    import datetime

    axis_names = [grid.x_axis[0]] + ([grid.y_axis[0]] if grid.y_axis else [])
    header = axis_names + ["p", "abs_m", "negativity", "err_p", "err_m", "converged"]
    extras = list(extra_columns.items()) if extra_columns else []
    header += [name for name, _ in extras]
    lines = [
        f"# {grid.metadata.get('tool', 'udw-harvest')}",
        "# spec: rel_tol=%s abs_tol=%s path=%s"
        % (
            grid.metadata.get("rel_tol"),
            grid.metadata.get("abs_tol"),
            grid.metadata.get("path"),
        ),
        "# fixed: "
        + " ".join(f"{k}={v}" for k, v in sorted(grid.fixed.items())),
        f"# generated: {datetime.datetime.now(datetime.timezone.utc).isoformat()}",
        ",".join(header),
    ]
    bad = 0
    for idx, (axis_vals, res, ok) in enumerate(grid.cells()):
        if not ok:
            bad += 1
        row = [format_number(v) for v in axis_vals]
        row += [
            format_number(res.p_a),
            format_number(abs(res.m)),
            format_number(res.negativity),
            format_number(res.err_p),
            format_number(res.err_m),
            "true" if ok else "false",
        ]
        row += [format_number(vals[idx]) for _, vals in extras]
        lines.append(",".join(row))
    with open(out_path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return bad
