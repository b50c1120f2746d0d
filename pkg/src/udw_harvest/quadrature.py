"""Adaptive quadrature engine for the integrand family of this package.

Handles three recurring shapes: finite intervals with removable
singularities (caller supplies the analytic limit), Gaussian-damped
semi-infinite integrals, and undamped oscillatory tails that only
converge conditionally (summed over half-period panels and accelerated
with Wynn's epsilon algorithm).

The core rule is a nested Gauss7/Kronrod15 pair evaluated in bulk:
integrand callables are expected to accept numpy arrays unless
``vectorized=False`` is passed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "QuadratureSpec",
    "GaussianDamped",
    "OscillatoryPartition",
    "IntegralValue",
    "NonConvergenceError",
    "integrate_finite",
    "integrate_semi_infinite",
    "integrate_decaying",
    "integrate_panels",
    "integrate_2d",
    "wynn_epsilon",
]


# ----------------------------------------------------------------------
# Types
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianDamped:
    """Tail mode: integrand carries an exp(-(k/scale)^2) envelope."""

    scale: float


@dataclass(frozen=True)
class OscillatoryPartition:
    """Tail mode: undamped oscillation with asymptotic period ``period_hint``."""

    period_hint: float


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000
    tail_mode: GaussianDamped | OscillatoryPartition | None = None
    singularity_radius: float = 1e-4

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.singularity_radius <= 0:
            raise ValueError("singularity_radius must be positive")

    def with_(self, **kw) -> "QuadratureSpec":
        d = dict(
            rel_tol=self.rel_tol,
            abs_tol=self.abs_tol,
            max_subdivisions=self.max_subdivisions,
            tail_mode=self.tail_mode,
            singularity_radius=self.singularity_radius,
        )
        d.update(kw)
        return QuadratureSpec(**d)


@dataclass(frozen=True)
class IntegralValue:
    value: complex | float
    err_estimate: float
    evaluations: int = 0

    def __post_init__(self):
        if self.err_estimate < 0:
            raise ValueError("err_estimate must be non-negative")


class NonConvergenceError(RuntimeError):
    """Subdivision / panel budget exhausted; carries the best estimate."""

    def __init__(self, message, estimate, err_estimate, evaluations=0):
        super().__init__(message)
        self.estimate = estimate
        self.err_estimate = err_estimate
        self.evaluations = evaluations


# ----------------------------------------------------------------------
# Gauss-Kronrod 7/15 nodes (on [-1, 1]); standard QUADPACK values.
# ----------------------------------------------------------------------

_XK = np.array([
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])

_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])

# Gauss-7 weights sit on the odd Kronrod nodes (index 1, 3, ..., 13).
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
])

_GAUSS_IDX = np.arange(1, 15, 2)


def _ensure_vectorized(f, vectorized):
    if vectorized:
        return f

    def fv(x):
        return np.array([f(float(xi)) for xi in np.atleast_1d(x)])

    return fv


class _EvalCounter:
    __slots__ = ("n",)

    def __init__(self):
        self.n = 0


def _gk_batch(f, lo, hi, counter):
    """Gauss-Kronrod 7/15 on a batch of intervals. Returns (I, err)."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * _XK[None, :]
    y = np.asarray(f(x.ravel()))
    counter.n += x.size
    y = y.reshape(x.shape)
    ik = (y * _WK[None, :]).sum(axis=1) * half
    ig = (y[:, _GAUSS_IDX] * _WG[None, :]).sum(axis=1) * half
    return ik, np.abs(ik - ig)


def _adaptive(f, segments, tol_abs, tol_rel, max_subdivisions, counter):
    """Globally adaptive bisection over an initial segment list."""
    lo = np.array([s[0] for s in segments], dtype=float)
    hi = np.array([s[1] for s in segments], dtype=float)
    keep = hi > lo
    lo, hi = lo[keep], hi[keep]
    if lo.size == 0:
        return 0.0, 0.0
    vals, errs = _gk_batch(f, lo, hi, counter)
    splits = 0
    while True:
        total = vals.sum()
        tot_err = errs.sum()
        tol = max(tol_abs, tol_rel * abs(total))
        if tot_err <= tol:
            return total, tot_err
        # split the intervals carrying the top half of the error budget
        width_ok = (hi - lo) > 64 * np.finfo(float).eps * np.maximum(
            1.0, np.maximum(np.abs(lo), np.abs(hi))
        )
        candidates = np.where(width_ok & (errs > tol / max(len(errs), 1) * 0.25))[0]
        if candidates.size == 0:
            # error concentrated on intervals at machine width
            if tot_err <= 10 * tol:
                return total, tot_err
            raise NonConvergenceError(
                "refinement stalled at machine width", total, tot_err, counter.n
            )
        order = candidates[np.argsort(errs[candidates])[::-1]]
        cum = np.cumsum(errs[order])
        n_split = int(np.searchsorted(cum, 0.5 * tot_err)) + 1
        n_split = min(n_split, order.size, max(1, max_subdivisions - splits))
        if splits >= max_subdivisions:
            raise NonConvergenceError(
                "subdivision budget exhausted", total, tot_err, counter.n
            )
        pick = order[:n_split]
        splits += n_split
        mid = 0.5 * (lo[pick] + hi[pick])
        new_lo = np.concatenate([lo[pick], mid])
        new_hi = np.concatenate([mid, hi[pick]])
        nv, ne = _gk_batch(f, new_lo, new_hi, counter)
        mask = np.ones(len(lo), dtype=bool)
        mask[pick] = False
        lo = np.concatenate([lo[mask], new_lo])
        hi = np.concatenate([hi[mask], new_hi])
        vals = np.concatenate([vals[mask], nv])
        errs = np.concatenate([errs[mask], ne])


# ----------------------------------------------------------------------
# Public entry points
# ----------------------------------------------------------------------

def integrate_finite(
    f: Callable,
    a: float,
    b: float,
    spec: QuadratureSpec | None = None,
    exclusions: Sequence[tuple[float, complex]] = (),
    vectorized: bool = True,
    breakpoints: Sequence[float] = (),
) -> IntegralValue:
    """Adaptive integral of ``f`` over [a, b].

    ``exclusions`` is a list of (center, series_limit) pairs marking
    removable singularities: within ``spec.singularity_radius`` of a
    center the integrand is replaced by the linear interpolation between
    f(center +- radius) and the supplied limit.
    """
    spec = spec or QuadratureSpec()
    if not (a < b):
        raise ValueError("need a < b")
    fv = _ensure_vectorized(f, vectorized)
    counter = _EvalCounter()
    eps = spec.singularity_radius

    total = 0.0
    window_err = 0.0
    cuts = [a, b]
    centers = sorted((c, lim) for c, lim in exclusions if a <= c <= b)
    for c, lim in centers:
        wl = min(eps, c - a)
        wr = min(eps, b - c)
        edge = []
        if wl > 0:
            edge.append(c - wl)
        if wr > 0:
            edge.append(c + wr)
        fe = np.asarray(fv(np.array(edge)))
        counter.n += len(edge)
        i = 0
        contrib = 0.0
        curvature = 0.0
        if wl > 0:
            contrib += wl * (fe[i] + lim) / 2.0
            curvature += abs(fe[i] - lim)
            i += 1
        if wr > 0:
            contrib += wr * (lim + fe[i]) / 2.0
            curvature += abs(fe[i] - lim)
        total = total + contrib
        window_err += (wl + wr) * curvature / 6.0
        if wl > 0:
            cuts.append(c - wl)
        if wr > 0:
            cuts.append(c + wr)

    cuts.extend(p for p in breakpoints if a < p < b)
    cuts = sorted(set(cuts))
    segments = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        hole = any(c - eps <= lo and hi <= c + eps for c, _ in centers)
        if not hole and hi > lo:
            segments.append((lo, hi))

    if segments:
        val, err = _adaptive(
            fv, segments, spec.abs_tol, spec.rel_tol, spec.max_subdivisions, counter
        )
        total = total + val
        window_err += err
    return IntegralValue(total, window_err, counter.n)


def integrate_semi_infinite(
    f: Callable,
    spec: QuadratureSpec,
    exclusions: Sequence[tuple[float, complex]] = (),
    vectorized: bool = True,
) -> IntegralValue:
    """Integral of f over [0, inf) using the tail strategy in ``spec``."""
    mode = spec.tail_mode
    if isinstance(mode, GaussianDamped):
        k_max = mode.scale * math.sqrt(math.log(100.0 / spec.abs_tol))
        if exclusions:
            k_max = max(k_max, max(c for c, _ in exclusions) + 1.0)
        return integrate_finite(f, 0.0, k_max, spec, exclusions, vectorized)
    if isinstance(mode, OscillatoryPartition):
        period = mode.period_hint
        head_end = max(4.0 * period, 20.0)
        if exclusions:
            head_end = max(head_end, max(c for c, _ in exclusions) + 1.0)
        head = integrate_finite(
            f, 0.0, head_end, spec.with_(rel_tol=spec.rel_tol / 2), exclusions, vectorized
        )
        tail = integrate_panels(f, head_end, period / 2.0, spec, vectorized)
        return IntegralValue(
            head.value + tail.value,
            head.err_estimate + tail.err_estimate,
            head.evaluations + tail.evaluations,
        )
    raise ValueError("spec.tail_mode must be GaussianDamped or OscillatoryPartition")


def integrate_panels(
    f: Callable,
    start: float,
    half_period: float,
    spec: QuadratureSpec,
    vectorized: bool = True,
    max_panels: int = 600,
) -> IntegralValue:
    """Sum integrals over consecutive half-period panels from ``start``.

    Partial sums are accelerated with Wynn's epsilon algorithm, so the
    series may converge only conditionally (alternating panel signs), or
    even be Abel-summable with non-decaying panel magnitudes.
    """
    fv = _ensure_vectorized(f, vectorized)
    counter = _EvalCounter()
    sums = []
    total = 0.0
    quad_err = 0.0
    scale = 0.0
    best = None
    best_err = math.inf
    stable_rounds = 0
    for n in range(max_panels):
        lo = start + n * half_period
        hi = lo + half_period
        # panel tolerance anchored to the running magnitude so that
        # late tiny panels are not over-refined relative to themselves
        abs_eff = max(spec.abs_tol, spec.rel_tol * scale) / 10.0
        rel_eff = spec.rel_tol / 10.0 if n == 0 else 0.0
        val, err = _adaptive(
            fv, [(lo, hi)], abs_eff, rel_eff, spec.max_subdivisions, counter,
        )
        scale = max(scale, abs(val), abs(total + val))
        total = total + val
        quad_err += err
        sums.append(total)
        scale = max(abs(total), abs(val), 1e-300)
        tol = max(spec.abs_tol, spec.rel_tol * scale)
        if abs(val) < tol and n >= 3:
            # absolutely convergent tail; plain sum suffices
            remaining = abs(val) * 2
            if remaining < tol:
                return IntegralValue(total, quad_err + remaining, counter.n)
        if n >= 5:
            est, aerr = wynn_epsilon(sums)
            if aerr < best_err:
                best, best_err = est, aerr
            if aerr < tol:
                stable_rounds += 1
                if stable_rounds >= 2:
                    return IntegralValue(est, aerr + quad_err, counter.n)
            else:
                stable_rounds = 0
    if best is not None and best_err < 1e3 * max(spec.abs_tol, spec.rel_tol * abs(best)):
        return IntegralValue(best, best_err + quad_err, counter.n)
    raise NonConvergenceError(
        "oscillatory tail did not converge", best if best is not None else total,
        best_err if best is not None else math.inf, counter.n,
    )


def integrate_decaying(
    f: Callable,
    k0: float,
    spec: QuadratureSpec,
    vectorized: bool = True,
    max_doublings: int = 40,
) -> IntegralValue:
    """Integral over [k0, inf) of an absolutely convergent integrand.

    Panels [k0*2^j, k0*2^(j+1)] are added until a panel falls below
    tolerance; suited to algebraic decay faster than 1/k^2.
    """
    if k0 <= 0:
        raise ValueError("k0 must be positive")
    fv = _ensure_vectorized(f, vectorized)
    counter = _EvalCounter()
    total = 0.0
    err = 0.0
    scale = 0.0
    lo = k0
    for i in range(max_doublings):
        hi = 2.0 * lo
        abs_eff = max(spec.abs_tol, spec.rel_tol * scale) / 4.0
        rel_eff = spec.rel_tol / 4.0 if i == 0 else 0.0
        val, e = _adaptive(
            fv, [(lo, hi)], abs_eff, rel_eff, spec.max_subdivisions, counter,
        )
        total = total + val
        err += e
        scale = max(scale, abs(val), abs(total))
        tol = max(spec.abs_tol, spec.rel_tol * abs(total))
        if abs(val) < 0.25 * tol:
            # geometric-ish decay: remaining tail bounded by ~|last panel|
            return IntegralValue(total, err + abs(val), counter.n)
        lo = hi
    raise NonConvergenceError("decaying tail did not converge", total, err, counter.n)


def integrate_2d(
    f: Callable,
    xdom: tuple[float, float],
    ydom: tuple[float, float],
    spec: QuadratureSpec | None = None,
) -> IntegralValue:
    """Iterated adaptive integral of f(x, y) over a rectangle.

    The inner (y) integral is evaluated vectorized per outer node;
    f must broadcast over a y-array for scalar x.
    """
    spec = spec or QuadratureSpec()
    ax, bx = xdom
    ay, by = ydom
    inner_spec = spec.with_(rel_tol=spec.rel_tol / 4, abs_tol=spec.abs_tol / 4)
    counter = _EvalCounter()

    def outer(x):
        iv = integrate_finite(lambda y: f(x, y), ay, by, inner_spec)
        counter.n += iv.evaluations
        return iv.value

    iv = integrate_finite(outer, ax, bx, spec, vectorized=False)
    return IntegralValue(iv.value, iv.err_estimate, counter.n)


# ----------------------------------------------------------------------
# Sequence acceleration
# ----------------------------------------------------------------------

def wynn_epsilon(sums: Sequence[complex], depth: int = 40):
    """Wynn's epsilon extrapolation of a partial-sum sequence.

    Returns (estimate, error_guess); error_guess is the spread of the
    last even-column entries.
    """
    s = list(sums[-depth:])
    n = len(s)
    if n == 0:
        raise ValueError("empty sequence")
    if n == 1:
        return s[0], math.inf
    e_prev = [0.0] * (n + 1)          # epsilon_{-1}
    e_curr = list(s)                  # epsilon_0
    even_estimates = [s[-1]]
    tiny = 1e-300
    for _ in range(n - 1):
        e_next = []
        for i in range(len(e_curr) - 1):
            diff = e_curr[i + 1] - e_curr[i]
            if abs(diff) < tiny:
                # column collapsed: sequence converged to machine level
                return even_estimates[-1], abs(diff)
            e_next.append(e_prev[i + 1] + 1.0 / diff)
        e_prev = e_curr
        e_curr = e_next
        if (n - len(e_curr)) % 2 == 0 and e_curr:
            even_estimates.append(e_curr[-1])
        if len(e_curr) <= 1:
            break
    if len(even_estimates) >= 2:
        est = even_estimates[-1]
        err = abs(even_estimates[-1] - even_estimates[-2])
    else:
        est = even_estimates[-1]
        err = math.inf
    return est, err
