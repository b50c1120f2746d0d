"""Template functions and excitation/entangling terms for coherently
delocalized detector pairs, in vacuum or in a medium (speed ratio r).

Two evaluation paths are kept deliberately independent:

* ``taylor`` expands the templates to second order in the recoil
  momenta; the correction terms use the closed-form curvature kernel.
* ``exact`` folds the full Gaussian momentum distribution into the
  templates.  For the excitation probability the angular and radial
  momentum integrals reduce analytically to a Gaussian smoothing of the
  window response (same integral, two orders of magnitude cheaper than
  the literal radial form, which is kept for cross-checks); the
  entangling term is a genuine iterated 3D quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .quadrature import (
    GaussianDamped,
    IntegralValue,
    QuadratureSpec,
    integrate_decaying,
    integrate_finite,
    integrate_panels,
    integrate_semi_infinite,
)
from .scenario import Delocalized, RegimeRejectedError, ScenarioConfig, regime_check

__all__ = [
    "TemplateArgs",
    "template_U",
    "template_V",
    "d2_template_U",
    "d2_template_V",
    "excitation_delocalized",
    "entangling_delocalized",
    "negativity_delocalized",
    "excitation_delocalized_iv",
    "entangling_delocalized_iv",
]

_PI = np.pi

DEFAULT_SPEC = QuadratureSpec(rel_tol=1e-9, abs_tol=1e-13, max_subdivisions=60000)

EXACT_M_SPEC = QuadratureSpec(rel_tol=2e-6, abs_tol=1e-12, max_subdivisions=60000)


@dataclass(frozen=True)
class TemplateArgs:
    """Shared dimensionless parameters of the template functions."""

    a: float            # gap * switching time
    mass: float         # M c sigma
    speed_ratio: float = 1.0

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if not (0.0 < self.speed_ratio <= 1.0):
            raise ValueError("speed_ratio must be in (0, 1]")


def _as_args(cfg: ScenarioConfig) -> tuple[TemplateArgs, Delocalized]:
    model = cfg.model
    if not isinstance(model, Delocalized):
        raise TypeError("delocalized operations require the Delocalized model")
    return TemplateArgs(cfg.omega, model.mass, model.speed_ratio), model


def _g0(k, args: TemplateArgs):
    return args.a + args.speed_ratio * k + k * k / (2.0 * args.mass)


def _k_of_u(u, args: TemplateArgs):
    """Inverse of u = G0(k); cancellation-free for huge masses."""
    x = 2.0 * (u - args.a) / args.mass
    r = args.speed_ratio
    return args.mass * x / (np.sqrt(r * r + x) + r)


def _g0_slope_of_u(u, args: TemplateArgs):
    x = 2.0 * (u - args.a) / args.mass
    return np.sqrt(args.speed_ratio**2 + x)


# ----------------------------------------------------------------------
# Semi-infinite integrals of weight(u) * A^{(order)}(u) from u = a.
# Head region adaptive; tail split into a smooth part (geometric
# panels) and strictly alternating cos/sin parts (epsilon-accelerated
# unit panels; the oscillation has exact period 2 in u).
# ----------------------------------------------------------------------

def _kernel_integral(weight, a: float, order: int, spec: QuadratureSpec) -> IntegralValue:
    u0 = a + 40.0
    if order == 0:
        head_f = lambda u: weight(u) * kernels.window_response(u)
        smooth = lambda u: weight(u) / (u * u - 1.0) ** 2
        osc = [
            (lambda u: weight(u) * np.cos(_PI * u) / (u * u - 1.0) ** 2),
        ]
    elif order == 2:
        head_f = lambda u: weight(u) * kernels.window_response_d2(u)

        def smooth(u):
            D = u * u - 1.0
            return weight(u) * (-4.0 / D**3 + 24.0 * u * u / D**4)

        def osc_cos(u):
            D = u * u - 1.0
            return (
                weight(u)
                * np.cos(_PI * u)
                * (-(_PI**2) / D**2 - 4.0 / D**3 + 24.0 * u * u / D**4)
            )

        def osc_sin(u):
            D = u * u - 1.0
            return weight(u) * np.sin(_PI * u) * 8.0 * _PI * u / D**3

        osc = [osc_cos, osc_sin]
    else:
        raise ValueError("order must be 0 or 2")

    head = integrate_finite(head_f, a, u0, spec)
    total = head.value
    err = head.err_estimate
    evals = head.evaluations
    sm = integrate_decaying(smooth, u0, spec)
    total += sm.value
    err += sm.err_estimate
    evals += sm.evaluations
    for f in osc:
        part = integrate_panels(f, u0, 1.0, spec)
        total += part.value
        err += part.err_estimate
        evals += part.evaluations
    return IntegralValue(total, err, evals)


# ----------------------------------------------------------------------
# Template U and its second derivative at zero recoil
# ----------------------------------------------------------------------

def _u0_iv(args: TemplateArgs, spec: QuadratureSpec) -> IntegralValue:
    """U(0) = 2 * integral over k of k A(G0(k)), via the u = G0 substitution."""

    def weight(u):
        return 2.0 * _k_of_u(u, args) / _g0_slope_of_u(u, args)

    return _kernel_integral(weight, args.a, 0, spec)


def _d2u_iv(args: TemplateArgs, spec: QuadratureSpec) -> IntegralValue:
    """d^2 U / dp^2 at p = 0 = (2/(3 M^2)) * integral k^3 A''(G0(k)).

    Differentiation under the integral sign; the z-moment integral is
    2/3 and the remaining k-integral is mapped to u = G0(k).
    """

    def weight(u):
        k = _k_of_u(u, args)
        return k**3 / _g0_slope_of_u(u, args)

    iv = _kernel_integral(weight, args.a, 2, spec)
    c = 2.0 / (3.0 * args.mass**2)
    return IntegralValue(c * iv.value, c * iv.err_estimate, iv.evaluations)


def d2_template_U(args: TemplateArgs, spec: QuadratureSpec | None = None) -> float:
    return float(_d2u_iv(args, spec or DEFAULT_SPEC).value)


@lru_cache(maxsize=32)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def _gl_order(osc_halfwidth: float) -> int:
    # resolve cos over a window of half-width omega (period 2 in u)
    return int(min(220, max(16, 3.2 * osc_halfwidth + 14)))


def template_U(p: float, args: TemplateArgs, spec: QuadratureSpec | None = None) -> float:
    """Double integral over the field mode and the recoil angle cosine.

    The integrand k [1 + cos(pi G)] / (G^2 - 1)^2 with
    G = a + r k + k^2/(2M) - k p z / M is non-negative and total (the
    G = 1 shell is removable); the z-integral is done with a
    Gauss-Legendre rule sized to the oscillation across the window.
    """
    spec = spec or DEFAULT_SPEC
    p = abs(float(p))  # even in p
    if p == 0.0:
        return float(_u0_iv(args, spec).value)
    m = args.mass

    def f(k):
        k = np.atleast_1d(np.asarray(k, dtype=float))
        g0 = _g0(k, args)
        om = k * p / m
        out = np.empty_like(k)
        order = np.array([_gl_order(o) for o in om])
        for n in np.unique(order):
            sel = order == n
            z, w = _leggauss(int(n))
            u = g0[sel, None] - om[sel, None] * z[None, :]
            out[sel] = kernels.window_response(u) @ w
        return k * out

    # head region ends where the window-minimum detuning is large
    rho = args.speed_ratio - p / m
    disc = rho * rho + 2.0 * (30.0 + abs(args.a)) / m
    k_head = max(10.0, m * (-rho + math.sqrt(disc)))
    head = integrate_finite(f, 0.0, k_head, spec)
    tail = integrate_decaying(f, k_head, spec)
    return float(head.value + tail.value)


# ----------------------------------------------------------------------
# Template V and its second derivatives at zero recoil
# ----------------------------------------------------------------------

def template_V(k, p1: float, p2: float, args: TemplateArgs):
    """Sum over the two recoil branches of e^{i pi alpha} E(alpha, beta_j),
    with alpha = a - k(p1-p2)/(2M), beta_j = r k + (-1)^j k(p1+p2)/(2M).

    Total in all arguments (every shell of E is removable).
    """
    k = np.asarray(k, dtype=float)
    m = args.mass
    al = args.a - k * (p1 - p2) / (2.0 * m)
    shift = k * (p1 + p2) / (2.0 * m)
    base = args.speed_ratio * k
    phase = np.exp(1j * _PI * al)
    total = phase * (
        kernels.entangling_ratio(al, base + shift)
        + kernels.entangling_ratio(al, base - shift)
    )
    if np.ndim(total) == 0:
        return complex(total)
    return total


def d2_template_V(k, args: TemplateArgs):
    """(d^2 V/dp1^2, d^2 V/dp2^2) at (k, 0, 0): both equal
    (k^2/(2M^2)) e^{i pi a} Y(a, r k) with the curvature kernel Y."""
    k = np.asarray(k, dtype=float)
    val = (
        (k * k / (2.0 * args.mass**2))
        * np.exp(1j * _PI * args.a)
        * kernels.curvature_kernel(args.a, args.speed_ratio * k)
    )
    if np.ndim(val) == 0:
        return complex(val), complex(val)
    return val, val


def d2_template_V_fd(k: float, args: TemplateArgs, step_scale: float = 0.02):
    """Richardson finite-difference check of d2_template_V.

    The step is chosen so the recoil argument k h / (2M) moves by
    ~step_scale (the template varies on unit scale in that variable).
    """
    h = 2.0 * args.mass * step_scale / max(k, 1e-6)

    def second(fplus, f0, fminus, hh):
        return (fplus - 2.0 * f0 + fminus) / (hh * hh)

    out = []
    for slot in (0, 1):
        def v(p):
            return template_V(k, p if slot == 0 else 0.0, p if slot == 1 else 0.0, args)

        f0 = v(0.0)
        d_h = second(v(h), f0, v(-h), h)
        d_h2 = second(v(h / 2), f0, v(-h / 2), h / 2)
        out.append((4.0 * d_h2 - d_h) / 3.0)
    return tuple(out)


# ----------------------------------------------------------------------
# Excitation probability
# ----------------------------------------------------------------------

@lru_cache(maxsize=8)
def _hermgauss(n: int):
    return np.polynomial.hermite.hermgauss(n)


def _gh_order(sigma: float) -> int:
    b = _PI * math.sqrt(2.0) * sigma + 4.0
    return int(min(220, max(24, b * b / 4.0 + 16)))


def _smoothed_window(mu, sig):
    """Gaussian average of the window response: mean mu, std sig (arrays)."""
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    sig = np.atleast_1d(np.asarray(sig, dtype=float))
    out = np.empty_like(mu)
    tiny = sig < 1e-7
    if tiny.any():
        out[tiny] = kernels.window_response(mu[tiny]) + 0.5 * sig[
            tiny
        ] ** 2 * kernels.window_response_d2(mu[tiny])
    rest = ~tiny
    if rest.any():
        orders = np.array([_gh_order(s) for s in sig[rest]])
        idx = np.where(rest)[0]
        for n in np.unique(orders):
            sel = idx[orders == n]
            x, w = _hermgauss(int(n))
            u = mu[sel, None] + math.sqrt(2.0) * sig[sel, None] * x[None, :]
            out[sel] = (kernels.window_response(u) @ w) / math.sqrt(_PI)
    return out


def _p_exact_iv(cfg: ScenarioConfig, spec: QuadratureSpec) -> IntegralValue:
    """Exact-path P: (1/(2 pi^2 r)) * integral k <A>(G0(k), k/(l M)) dk.

    The 3D momentum integral against the Gaussian packet reduces exactly
    to this Gaussian smoothing of the window response (the projection of
    an isotropic normal onto the mode axis is a 1D normal).
    """
    args, model = _as_args(cfg)
    lm = model.width * model.mass
    m = args.mass

    def f(k):
        k = np.atleast_1d(np.asarray(k, dtype=float))
        return k * _smoothed_window(_g0(k, args), k / lm)

    rho = args.speed_ratio - 4.0 / lm
    disc = rho * rho + 2.0 * (30.0 + abs(args.a)) / m
    k_head = max(10.0, m * (-rho + math.sqrt(disc)))
    head = integrate_finite(f, 0.0, k_head, spec)
    tail = integrate_decaying(f, k_head, spec)
    c = 1.0 / (2.0 * _PI**2 * args.speed_ratio)
    return IntegralValue(
        c * (head.value + tail.value),
        c * (head.err_estimate + tail.err_estimate),
        head.evaluations + tail.evaluations,
    )


def _p_exact_radial(cfg: ScenarioConfig, rel_tol: float = 1e-6) -> float:
    """Literal radial form (1/(pi r)) int p^2 |phi(p)|^2 U(p) dp.

    Slow; kept as an independent oracle for the reduced form above.
    """
    args, model = _as_args(cfg)
    w = model.width
    norm = w**3 / (2.0 * _PI) ** 1.5
    spec = QuadratureSpec(rel_tol=rel_tol, abs_tol=1e-14, max_subdivisions=60000)

    def f(p):
        return (
            p * p * norm * math.exp(-(p * p) * w * w / 2.0) * template_U(p, args, spec)
        )

    iv = integrate_finite(
        f, 0.0, 6.0 / w, QuadratureSpec(rel_tol=rel_tol * 10, abs_tol=1e-12),
        vectorized=False,
    )
    return float(iv.value) / (_PI * args.speed_ratio)


def _p_taylor_iv(cfg: ScenarioConfig, spec: QuadratureSpec) -> IntegralValue:
    args, model = _as_args(cfg)
    u0 = _u0_iv(args, spec)
    d2 = _d2u_iv(args, spec)
    w = model.width
    c = 1.0 / (4.0 * _PI**2 * args.speed_ratio)
    val = c * (u0.value + 1.5 / (w * w) * d2.value)
    err = c * (u0.err_estimate + 1.5 / (w * w) * d2.err_estimate)
    return IntegralValue(val, err, u0.evaluations + d2.evaluations)


def excitation_delocalized_iv(
    cfg: ScenarioConfig, path: str | None = None, spec: QuadratureSpec | None = None
) -> IntegralValue:
    _, model = _as_args(cfg)
    verdict = regime_check(model)
    if verdict.rejected:
        raise RegimeRejectedError(verdict)
    path = path or model.path
    spec = spec or DEFAULT_SPEC
    if path == "taylor":
        return _p_taylor_iv(cfg, spec)
    if path == "exact":
        return _p_exact_iv(cfg, spec)
    raise ValueError("path must be 'exact' or 'taylor'")


def excitation_delocalized(
    cfg: ScenarioConfig, path: str | None = None, spec: QuadratureSpec | None = None
) -> float:
    return float(excitation_delocalized_iv(cfg, path, spec).value)


# ----------------------------------------------------------------------
# Entangling term
# ----------------------------------------------------------------------

def _m_taylor_iv(cfg: ScenarioConfig, spec: QuadratureSpec) -> IntegralValue:
    args, model = _as_args(cfg)
    a, s = args.a, cfg.separation
    if s <= 0:
        raise ValueError("entangling term requires separation > 0")
    w = model.width
    r = args.speed_ratio
    m = args.mass

    def integrand(k):
        k = np.asarray(k, dtype=float)
        lead = 2.0 * kernels.entangling_ratio(a, r * k)
        corr = (k * k / (2.0 * w * w * m * m)) * kernels.curvature_kernel(a, r * k)
        return np.sin(k * s) / s * np.exp(-(w * w) * k * k / 4.0) * (lead + corr)

    exclusions = []
    k0 = (1.0 - a) / r
    if k0 > 1e-12:
        exclusions.append((k0, complex(integrand(np.array([k0]))[0])))

    iv = integrate_semi_infinite(
        integrand, spec.with_(tail_mode=GaussianDamped(scale=2.0 / w)), exclusions
    )
    c = np.exp(1j * _PI * a) / (4.0 * _PI**2 * r)
    return IntegralValue(c * iv.value, abs(c) * iv.err_estimate, iv.evaluations)


def _m_exact_iv(cfg: ScenarioConfig, spec: QuadratureSpec) -> IntegralValue:
    args, model = _as_args(cfg)
    a, s = args.a, cfg.separation
    if s <= 0:
        raise ValueError("entangling term requires separation > 0")
    w = model.width
    r = args.speed_ratio
    bound = 6.0 / w
    k_max = (2.0 / w) * math.sqrt(math.log(100.0 / spec.abs_tol))
    inner_spec = spec.with_(rel_tol=max(spec.rel_tol / 20, 1e-9), abs_tol=spec.abs_tol)
    mid_spec = spec.with_(rel_tol=spec.rel_tol / 4)
    evals = [0]

    def inner(p1: float, p2: float) -> complex:
        def f(k):
            return (
                np.sin(k * s)
                / s
                * np.exp(-(w * w) * k * k / 4.0)
                * template_V(k, p1, p2, args)
            )

        iv = integrate_finite(f, 0.0, k_max, inner_spec)
        evals[0] += iv.evaluations
        return iv.value

    def mid(p1: float) -> complex:
        iv = integrate_finite(
            lambda p2: math.exp(-(w * w) * p2 * p2 / 2.0) * inner(p1, p2),
            -bound,
            bound,
            mid_spec,
            vectorized=False,
        )
        return iv.value

    outer = integrate_finite(
        lambda p1: math.exp(-(w * w) * p1 * p1 / 2.0) * mid(p1),
        -bound,
        bound,
        spec,
        vectorized=False,
    )
    c = w * w / (8.0 * _PI**3 * r)
    return IntegralValue(c * outer.value, abs(c) * outer.err_estimate, evals[0])


def entangling_delocalized_iv(
    cfg: ScenarioConfig, path: str | None = None, spec: QuadratureSpec | None = None
) -> IntegralValue:
    _, model = _as_args(cfg)
    verdict = regime_check(model)
    if verdict.rejected:
        raise RegimeRejectedError(verdict)
    path = path or model.path
    if path == "taylor":
        return _m_taylor_iv(cfg, spec or DEFAULT_SPEC)
    if path == "exact":
        return _m_exact_iv(cfg, spec or EXACT_M_SPEC)
    raise ValueError("path must be 'exact' or 'taylor'")


def entangling_delocalized(
    cfg: ScenarioConfig, path: str | None = None, spec: QuadratureSpec | None = None
) -> complex:
    return complex(entangling_delocalized_iv(cfg, path, spec).value)


def negativity_delocalized(
    cfg: ScenarioConfig, path: str | None = None, spec: QuadratureSpec | None = None
) -> float:
    p = excitation_delocalized(cfg, path, spec)
    m = entangling_delocalized(cfg, path, spec)
    return max(0.0, abs(m) - p)
