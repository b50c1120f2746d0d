"""Classical-center-of-mass quantities: switching profile, spectral
functions A and B, excitation probability and entangling term for
pointlike and Gaussian-smeared detectors.

All integrals are dimensionless (sigma = c = 1) and reported per
coupling^2.  The pointlike entangling integrand decays only like an
oscillation over k, so its tail is partitioned at half the sin(ks)
period and the alternating panel sums are accelerated; the absolutely
convergent remainder is summed over geometric panels.
"""

from __future__ import annotations

import math

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
from .scenario import Pointlike, ScenarioConfig, Smeared

__all__ = [
    "switching",
    "spectral_A",
    "spectral_B",
    "SpectralPoint",
    "spectral_point",
    "excitation_classical",
    "entangling_classical",
    "negativity_classical",
    "excitation_classical_iv",
    "entangling_classical_iv",
]

_TWO_PI_SQ = 2.0 * np.pi**2

DEFAULT_SPEC = QuadratureSpec(rel_tol=1e-9, abs_tol=1e-12, max_subdivisions=60000)


def switching(t, sigma: float = 1.0):
    """Compactly supported sine window: sin(t/sigma) on [0, pi*sigma]."""
    t = np.asarray(t, dtype=float)
    out = np.where((t >= 0.0) & (t <= np.pi * sigma), np.sin(t / sigma), 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def spectral_A(k, a: float):
    """A(k) = [1 + cos(pi(a+k))] / [((a+k)^2 - 1)^2], total at a+k = 1."""
    return kernels.window_response(a + np.asarray(k, dtype=float))


def _sine_gap_factor(a: float) -> float:
    """sin(pi a) / (2a (1 - a^2)), stable at a = 0 and a = 1."""
    if abs(a) <= 0.35:
        return (np.pi / 2.0) * float(np.sinc(a)) / (1.0 - a * a)
    if abs(a - 1.0) <= 0.35:
        return np.pi * float(np.sinc(1.0 - a)) / (2.0 * a * (1.0 + a))
    return math.sin(np.pi * a) / (2.0 * a * (1.0 - a * a))


def spectral_B(k, a: float):
    """B(k) = i(2a+k) sin(pi a)/(2a(1-a^2))
    + (e^{-i pi a} + e^{-i pi k})/(1 - (a-k)^2).

    The a = 1 and |a - k| = 1 points are removable; both are evaluated
    through series-equivalent forms so the function is total.
    """
    k = np.asarray(k, dtype=float)
    first = 1j * (2.0 * a + k) * _sine_gap_factor(a)

    d = a - k
    near_p = np.abs(d - 1.0) < 1e-3
    near_m = np.abs(d + 1.0) < 1e-3
    safe = np.where(near_p | near_m, 0.0, d)
    second = (np.exp(-1j * np.pi * a) + np.exp(-1j * np.pi * k)) / (
        1.0 - safe * safe
    )
    second = np.asarray(second, dtype=complex)
    # e^{-i pi a}(1 + e^{i pi d})/(1 - d^2) with expm1-style small-delta forms
    if near_p.any():
        dl = np.where(near_p, d - 1.0, 0.0)
        ratio = (
            -(np.pi**2) * dl / 2.0 * np.sinc(dl / 2.0) ** 2 + 1j * np.pi * np.sinc(dl)
        )
        np.copyto(second, np.exp(-1j * np.pi * a) * ratio / (2.0 + dl), where=near_p)
    if near_m.any():
        dl = np.where(near_m, d + 1.0, 0.0)
        ratio = (
            -(np.pi**2) * dl / 2.0 * np.sinc(dl / 2.0) ** 2 + 1j * np.pi * np.sinc(dl)
        )
        np.copyto(second, -np.exp(-1j * np.pi * a) * ratio / (2.0 - dl), where=near_m)
    out = first + second
    if out.ndim == 0:
        return complex(out)
    return out


from dataclasses import dataclass


@dataclass(frozen=True)
class SpectralPoint:
    k: float
    a_val: float
    b_val: complex

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if self.a_val < 0:
            raise ValueError("A(k) is non-negative by construction")


def spectral_point(k: float, a: float) -> SpectralPoint:
    return SpectralPoint(k=k, a_val=float(spectral_A(k, a)), b_val=spectral_B(k, a))


# ----------------------------------------------------------------------
# Shell limit of the entangling integrand at a + k = 1
# ----------------------------------------------------------------------

def _b_prime_at_shell(a: float) -> complex:
    """dB/dk at k = 1 - a (closed form; B vanishes there)."""
    k0 = 1.0 - a
    den = 4.0 * a * (1.0 - a)  # 1 - (a - k0)^2
    e_ia = np.exp(1j * np.pi * a)
    term1 = 1j * _sine_gap_factor(a)
    term2 = 1j * np.pi * e_ia / den
    num = np.exp(-1j * np.pi * a) + np.exp(-1j * np.pi * k0)
    term3 = -num * 2.0 * (a - k0) / den**2
    return complex(term1 + term2 + term3)


def _m_integrand_limit(a: float, s: float, width: float) -> complex:
    """Series limit of sin(ks) e^{-w^2 k^2/4} B(k)/(1-(a+k)^2) at k = 1-a."""
    k0 = 1.0 - a
    damp = math.exp(-(width**2) * k0 * k0 / 4.0) if width > 0 else 1.0
    return math.sin(k0 * s) * damp * (-_b_prime_at_shell(a) / 2.0)


# ----------------------------------------------------------------------
# Excitation probability
# ----------------------------------------------------------------------

def _pointlike_p_integral(a: float, spec: QuadratureSpec) -> IntegralValue:
    """integral over u in [a, inf) of (u - a) A(u), via head + split tail.

    The smooth tail part has the exact antiderivative below; the
    oscillatory part alternates over unit panels (cos has period 2).
    """
    u0 = a + 40.0
    head = integrate_finite(
        lambda u: (u - a) * kernels.window_response(u), a, u0, spec
    )

    def smooth_tail_antideriv(u):
        return (
            (a / 4.0) * math.log((u - 1.0) / (u + 1.0))
            - (1.0 - a) / (4.0 * (u - 1.0))
            + (1.0 + a) / (4.0 * (u + 1.0))
        )

    tail_smooth = -smooth_tail_antideriv(u0)

    def f_cos(u):
        return (u - a) * np.cos(np.pi * u) / (u * u - 1.0) ** 2

    tail_cos = integrate_panels(f_cos, u0, 1.0, spec)
    return IntegralValue(
        head.value + tail_smooth + tail_cos.value,
        head.err_estimate + tail_cos.err_estimate + 1e-16 * abs(tail_smooth),
        head.evaluations + tail_cos.evaluations,
    )


def excitation_classical_iv(
    cfg: ScenarioConfig, spec: QuadratureSpec | None = None
) -> IntegralValue:
    spec = spec or DEFAULT_SPEC
    a = cfg.omega
    model = cfg.model
    if isinstance(model, Pointlike):
        iv = _pointlike_p_integral(a, spec)
    elif isinstance(model, Smeared):
        w = model.width

        def f(k):
            return k * np.exp(-(w * w) * k * k / 4.0) * kernels.window_response(a + k)

        iv = integrate_semi_infinite(
            f, spec.with_(tail_mode=GaussianDamped(scale=2.0 / w))
        )
    else:
        raise TypeError("excitation_classical applies to Pointlike/Smeared models")
    return IntegralValue(iv.value / _TWO_PI_SQ, iv.err_estimate / _TWO_PI_SQ, iv.evaluations)


def excitation_classical(cfg: ScenarioConfig, spec: QuadratureSpec | None = None) -> float:
    return float(excitation_classical_iv(cfg, spec).value)


# ----------------------------------------------------------------------
# Entangling term
# ----------------------------------------------------------------------

def _m_exclusions(a: float, s: float, width: float):
    k0 = 1.0 - a
    # at a = 1 the shell degenerates to the k = 0 endpoint, where the
    # integrand tends to 0 smoothly; no exclusion needed
    if k0 > 1e-12:
        return [(k0, _m_integrand_limit(a, s, width))]
    return []


def entangling_classical_iv(
    cfg: ScenarioConfig, spec: QuadratureSpec | None = None
) -> IntegralValue:
    spec = spec or DEFAULT_SPEC
    a, s = cfg.omega, cfg.separation
    if s <= 0:
        raise ValueError("entangling term requires separation > 0")
    model = cfg.model
    if isinstance(model, Pointlike):
        width = 0.0
    elif isinstance(model, Smeared):
        width = model.width
    else:
        raise TypeError("entangling_classical applies to Pointlike/Smeared models")

    def g(k):
        t = a + k
        den = (1.0 - t) * (1.0 + t)
        val = np.sin(k * s) * spectral_B(k, a) / den
        if width > 0:
            val = val * np.exp(-(width**2) * k * k / 4.0)
        return val

    exclusions = _m_exclusions(a, s, width)

    if width > 0:
        iv = integrate_semi_infinite(
            g, spec.with_(tail_mode=GaussianDamped(scale=2.0 / width)), exclusions
        )
    else:
        k_head = max(8.0, a + 3.0)
        head = integrate_finite(g, 0.0, k_head, spec, exclusions)
        wa = _sine_gap_factor(a)

        def tail_linear(k):
            # the linear-in-k part of B drives the conditionally
            # convergent sin(ks)/k tail
            return np.sin(k * s) * 1j * (2.0 * a + k) * wa / (1.0 - (a + k) ** 2)

        def tail_rest(k):
            num = np.exp(-1j * np.pi * a) + np.exp(-1j * np.pi * k)
            return (
                np.sin(k * s)
                * num
                / ((1.0 - (a - k) ** 2) * (1.0 - (a + k) ** 2))
            )

        t1 = integrate_panels(tail_linear, k_head, np.pi / s, spec)
        t2 = integrate_decaying(tail_rest, k_head, spec)
        iv = IntegralValue(
            head.value + t1.value + t2.value,
            head.err_estimate + t1.err_estimate + t2.err_estimate,
            head.evaluations + t1.evaluations + t2.evaluations,
        )

    pref = -np.exp(1j * np.pi * a) / (_TWO_PI_SQ * s)
    return IntegralValue(pref * iv.value, abs(pref) * iv.err_estimate, iv.evaluations)


def entangling_classical(cfg: ScenarioConfig, spec: QuadratureSpec | None = None) -> complex:
    return complex(entangling_classical_iv(cfg, spec).value)


def negativity_classical(cfg: ScenarioConfig, spec: QuadratureSpec | None = None) -> float:
    p = excitation_classical(cfg, spec)
    m = entangling_classical(cfg, spec)
    return max(0.0, abs(m) - p)
