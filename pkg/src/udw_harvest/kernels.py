"""Stable closed-form kernels shared by the compute modules.

Every function here is a *total* function of real arguments: each
removable 0/0 point of the raw formulas (the a+k = 1 shell of the
response kernel, the alpha = 0, +-1 and alpha -+ beta = +-1 shells of
the entangling kernel) is evaluated through an algebraically
equivalent form built on sinc-type primitives, so callers may evaluate
anywhere on the real line without guards.  All functions broadcast
over numpy arrays.

Notation (sigma = c = 1 internally): the detuning variable u enters the
window response A(u) = (1 + cos(pi u)) / (u^2 - 1)^2; the entangling
kernel B(alpha, beta) generalizes the classical B(k) by replacing the
gap with alpha and the mode frequency with beta.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "window_response",
    "window_response_d1",
    "window_response_d2",
    "b_kernel",
    "entangling_ratio",
    "entangling_ratio_limit",
    "curvature_kernel",
]

_PI = np.pi


# ----------------------------------------------------------------------
# sinc family: s0 = sin(pi x)/(pi x) and its first two derivatives
# ----------------------------------------------------------------------

def _s0(x):
    return np.sinc(x)


def _s1(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 0.1
    xs = np.where(small, 1.0, x)  # avoid 0/0 in the direct branch
    direct = (np.cos(_PI * xs) - np.sinc(xs)) / xs
    x2 = x * x
    series = x * (
        -(_PI**2) / 3.0
        + x2 * (_PI**4 / 30.0 + x2 * (-(_PI**6) / 840.0 + x2 * (_PI**8 / 45360.0)))
    )
    return np.where(small, series, direct)


def _s2(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 0.1
    xs = np.where(small, 1.0, x)
    direct = -(_PI**2) * np.sinc(xs) - 2.0 * _s1(xs) / xs
    x2 = x * x
    series = (
        -(_PI**2) / 3.0
        + x2
        * (
            _PI**4 / 10.0
            + x2
            * (-(_PI**6) / 168.0 + x2 * (_PI**8 / 6480.0 - x2 * _PI**10 / 443520.0))
        )
    )
    return np.where(small, series, direct)


# ----------------------------------------------------------------------
# Window response A(u) and derivatives, total on the real line.
# A(u) = (1 + cos(pi u)) / (u^2 - 1)^2 = (pi^2/2) s0(y)^2 / (1+|u|)^2
# with y = (|u| - 1)/2; the sinc form removes both u = +-1 shells.
# ----------------------------------------------------------------------

def window_response(u):
    w = np.abs(np.asarray(u, dtype=float))
    y = (w - 1.0) / 2.0
    s = _s0(y)
    return (_PI**2 / 2.0) * s * s / (1.0 + w) ** 2


def window_response_d1(u):
    u = np.asarray(u, dtype=float)
    w = np.abs(u)
    y = (w - 1.0) / 2.0
    s, sp = _s0(y), _s1(y)
    g = 1.0 + w
    dAdw = (_PI**2 / 2.0) * (s * sp / g**2 - 2.0 * s * s / g**3)
    return np.sign(u) * dAdw


def window_response_d2(u):
    w = np.abs(np.asarray(u, dtype=float))
    y = (w - 1.0) / 2.0
    s, sp, spp = _s0(y), _s1(y), _s2(y)
    g = 1.0 + w
    return (_PI**2 / 2.0) * (
        (sp * sp + s * spp) / (2.0 * g**2) - 4.0 * s * sp / g**3 + 6.0 * s * s / g**4
    )


# ----------------------------------------------------------------------
# W(alpha) = sin(pi alpha) / (2 alpha (1 - alpha^2)) and derivatives.
# Zone forms remove the alpha = 0, +1, -1 singularities.
# ----------------------------------------------------------------------

def _zones(al):
    al = np.atleast_1d(np.asarray(al, dtype=float))
    zc = np.abs(al) <= 0.35
    zp = np.abs(al - 1.0) <= 0.35
    zm = np.abs(al + 1.0) <= 0.35
    dz = ~(zc | zp | zm)
    return al, zc, zp, zm, dz


def _unwrap(out, ref):
    if np.ndim(ref) == 0:
        return out[0]
    return out


def _W(al):
    ref = al
    al, zc, zp, zm, dz = _zones(al)
    safe = np.where(dz, al, 0.5)
    out = np.empty_like(al)
    out[...] = np.sin(_PI * safe) / (2.0 * safe * (1.0 - safe * safe))
    if zc.any():
        a = np.where(zc, al, 0.0)
        np.copyto(out, (_PI / 2.0) * _s0(a) / (1.0 - a * a), where=zc)
    if zp.any():
        a = np.where(zp, al, 1.0)
        np.copyto(out, _PI * _s0(1.0 - a) / (2.0 * a * (1.0 + a)), where=zp)
    if zm.any():
        a = np.where(zm, al, -1.0)
        np.copyto(out, -_PI * _s0(1.0 + a) / (2.0 * a * (1.0 - a)), where=zm)
    return _unwrap(out, ref)


def _Wp(al):
    ref = al
    al, zc, zp, zm, dz = _zones(al)
    safe = np.where(dz, al, 0.5)
    u = np.sin(_PI * safe)
    up = _PI * np.cos(_PI * safe)
    v = 2.0 * (safe - safe**3)
    vp = 2.0 * (1.0 - 3.0 * safe * safe)
    out = np.asarray((up * v - u * vp) / (v * v))
    if zc.any():
        a = np.where(zc, al, 0.0)
        g = 1.0 / (1.0 - a * a)
        gp = 2.0 * a * g * g
        np.copyto(out, (_PI / 2.0) * (_s1(a) * g + _s0(a) * gp), where=zc)
    if zp.any():
        a = np.where(zp, al, 1.0)
        h = 1.0 / (2.0 * a + 2.0 * a * a)
        hp = -(2.0 + 4.0 * a) * h * h
        np.copyto(out, _PI * (-_s1(1.0 - a) * h + _s0(1.0 - a) * hp), where=zp)
    if zm.any():
        a = np.where(zm, al, -1.0)
        q = 1.0 / (2.0 * a - 2.0 * a * a)
        qp = -(2.0 - 4.0 * a) * q * q
        np.copyto(out, -_PI * (_s1(1.0 + a) * q + _s0(1.0 + a) * qp), where=zm)
    return _unwrap(out, ref)


def _Wpp(al):
    ref = al
    al, zc, zp, zm, dz = _zones(al)
    safe = np.where(dz, al, 0.5)
    u = np.sin(_PI * safe)
    up = _PI * np.cos(_PI * safe)
    upp = -(_PI**2) * u
    v = 2.0 * (safe - safe**3)
    vp = 2.0 * (1.0 - 3.0 * safe * safe)
    vpp = -12.0 * safe
    out = np.asarray(
        upp / v - 2.0 * up * vp / v**2 - u * vpp / v**2 + 2.0 * u * vp * vp / v**3
    )
    if zc.any():
        a = np.where(zc, al, 0.0)
        g = 1.0 / (1.0 - a * a)
        gp = 2.0 * a * g * g
        gpp = (2.0 + 6.0 * a * a) * g**3
        np.copyto(
            out,
            (_PI / 2.0) * (_s2(a) * g + 2.0 * _s1(a) * gp + _s0(a) * gpp),
            where=zc,
        )
    if zp.any():
        a = np.where(zp, al, 1.0)
        h = 1.0 / (2.0 * a + 2.0 * a * a)
        hp = -(2.0 + 4.0 * a) * h * h
        hpp = -4.0 * h * h + 2.0 * (2.0 + 4.0 * a) ** 2 * h**3
        y = 1.0 - a
        np.copyto(
            out, _PI * (_s2(y) * h - 2.0 * _s1(y) * hp + _s0(y) * hpp), where=zp
        )
    if zm.any():
        a = np.where(zm, al, -1.0)
        q = 1.0 / (2.0 * a - 2.0 * a * a)
        qp = -(2.0 - 4.0 * a) * q * q
        qpp = 4.0 * q * q + 2.0 * (2.0 - 4.0 * a) ** 2 * q**3
        y = 1.0 + a
        np.copyto(
            out, -_PI * (_s2(y) * q + 2.0 * _s1(y) * qp + _s0(y) * qpp), where=zm
        )
    return _unwrap(out, ref)


# ----------------------------------------------------------------------
# C2(d) = cos(pi d / 2) / (1 - d^2) and derivatives, total at d = +-1.
# ----------------------------------------------------------------------

def _c2_zones(d):
    d = np.atleast_1d(np.asarray(d, dtype=float))
    zp = np.abs(d - 1.0) <= 0.5
    zm = np.abs(d + 1.0) <= 0.5
    dz = ~(zp | zm)
    return d, zp, zm, dz


def _C2(d):
    ref = d
    d, zp, zm, dz = _c2_zones(d)
    safe = np.where(dz, d, 0.0)
    out = np.asarray(np.cos(_PI * safe / 2.0) / (1.0 - safe * safe))
    if zp.any():
        dd = np.where(zp, d, 1.0)
        np.copyto(out, (_PI / 2.0) * _s0((dd - 1.0) / 2.0) / (1.0 + dd), where=zp)
    if zm.any():
        dd = np.where(zm, d, -1.0)
        np.copyto(out, (_PI / 2.0) * _s0((dd + 1.0) / 2.0) / (1.0 - dd), where=zm)
    return _unwrap(out, ref)


def _C2p(d):
    ref = d
    d, zp, zm, dz = _c2_zones(d)
    safe = np.where(dz, d, 0.0)
    G = 1.0 / (1.0 - safe * safe)
    phi = _PI * safe / 2.0
    out = np.asarray(-(_PI / 2.0) * np.sin(phi) * G + 2.0 * safe * np.cos(phi) * G * G)
    if zp.any():
        dd = np.where(zp, d, 1.0)
        y = (dd - 1.0) / 2.0
        gp = 1.0 / (1.0 + dd)
        np.copyto(
            out, (_PI / 4.0) * _s1(y) * gp - (_PI / 2.0) * _s0(y) * gp * gp, where=zp
        )
    if zm.any():
        dd = np.where(zm, d, -1.0)
        y = (dd + 1.0) / 2.0
        gm = 1.0 / (1.0 - dd)
        np.copyto(
            out, (_PI / 4.0) * _s1(y) * gm + (_PI / 2.0) * _s0(y) * gm * gm, where=zm
        )
    return _unwrap(out, ref)


def _C2pp(d):
    ref = d
    d, zp, zm, dz = _c2_zones(d)
    safe = np.where(dz, d, 0.0)
    G = 1.0 / (1.0 - safe * safe)
    phi = _PI * safe / 2.0
    c, s = np.cos(phi), np.sin(phi)
    out = np.asarray(
        -(_PI**2 / 4.0) * c * G
        - 2.0 * _PI * safe * s * G * G
        + 2.0 * c * G * G
        + 8.0 * safe * safe * c * G**3
    )
    if zp.any():
        dd = np.where(zp, d, 1.0)
        y = (dd - 1.0) / 2.0
        gp = 1.0 / (1.0 + dd)
        np.copyto(
            out,
            (_PI / 8.0) * _s2(y) * gp
            - (_PI / 2.0) * _s1(y) * gp * gp
            + _PI * _s0(y) * gp**3,
            where=zp,
        )
    if zm.any():
        dd = np.where(zm, d, -1.0)
        y = (dd + 1.0) / 2.0
        gm = 1.0 / (1.0 - dd)
        np.copyto(
            out,
            (_PI / 8.0) * _s2(y) * gm
            + (_PI / 2.0) * _s1(y) * gm * gm
            + _PI * _s0(y) * gm**3,
            where=zm,
        )
    return _unwrap(out, ref)


# ----------------------------------------------------------------------
# Entangling kernel B(alpha, beta) and the pole-reduced ratio
# E = B / (1 - (alpha + beta)^2), total across all shells.
# ----------------------------------------------------------------------

def b_kernel(alpha, beta):
    """B(alpha, beta) = i(2a+b) sin(pi a)/(2a(1-a^2))
    + (e^{-i pi a} + e^{-i pi b})/(1 - (a-b)^2), stable at all shells."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    t = alpha + beta
    d = alpha - beta
    return 1j * (2.0 * alpha + beta) * _W(alpha) + 2.0 * np.exp(
        -0.5j * _PI * t
    ) * _C2(d)


def entangling_ratio_limit(alpha, shell_sign=+1):
    """Limit of B/(1 - (alpha+beta)^2) on the shell alpha + beta = +-1.

    B vanishes identically on both shells, so the ratio extends
    continuously; the value is the normal-derivative quotient.
    """
    alpha = np.asarray(alpha, dtype=float)
    if shell_sign > 0:
        return -0.25 * (
            3j * _W(alpha)
            + 1j * (1.0 + alpha) * _Wp(alpha)
            - 2.0 * _PI * _C2(2.0 * alpha - 1.0)
        )
    return 0.25 * (
        3j * _W(alpha)
        + 1j * (alpha - 1.0) * _Wp(alpha)
        + 2.0 * _PI * _C2(2.0 * alpha + 1.0)
    )


_SHELL_WINDOW = 1e-9


def entangling_ratio(alpha, beta):
    """E(alpha, beta) = B(alpha, beta) / (1 - (alpha+beta)^2), total.

    Within 1e-9 of the alpha+beta = +-1 shells the on-shell limit is
    substituted; elsewhere the cancellation in B is numerically benign
    (relative error ~1e-16/distance).
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    t = alpha + beta
    near_p = np.abs(t - 1.0) < _SHELL_WINDOW
    near_m = np.abs(t + 1.0) < _SHELL_WINDOW
    den = np.where(near_p | near_m, 1.0, (1.0 - t) * (1.0 + t))
    out = b_kernel(alpha, beta) / den
    out = np.asarray(out, dtype=complex)
    if near_p.any():
        al = np.broadcast_to(alpha, out.shape)
        np.copyto(out, entangling_ratio_limit(al, +1), where=near_p)
    if near_m.any():
        al = np.broadcast_to(alpha, out.shape)
        np.copyto(out, entangling_ratio_limit(al, -1), where=near_m)
    if out.ndim == 0:
        return complex(out)
    return out


# ----------------------------------------------------------------------
# Curvature kernel for the momentum-Taylor correction of the
# entangling term: Y = E_aa + E_bb + 2 i pi E_a - pi^2 E evaluated at
# (alpha, beta); the p1/p2 second derivatives of the template V at zero
# recoil are (k^2 / (2 M^2)) e^{i pi alpha} Y.
# ----------------------------------------------------------------------

def _curvature_raw(alpha, beta):
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    t = alpha + beta
    d = alpha - beta
    e = np.exp(-0.5j * _PI * t)
    W, Wp, Wpp = _W(alpha), _Wp(alpha), _Wpp(alpha)
    C, Cp, Cpp = _C2(d), _C2p(d), _C2pp(d)
    B = 1j * (2.0 * alpha + beta) * W + 2.0 * e * C
    B_a = 2j * W + 1j * (2.0 * alpha + beta) * Wp + e * (-1j * _PI * C + 2.0 * Cp)
    B_b = 1j * W + e * (-1j * _PI * C - 2.0 * Cp)
    B_aa = (
        4j * Wp
        + 1j * (2.0 * alpha + beta) * Wpp
        + e * (-(_PI**2 / 2.0) * C - 2j * _PI * Cp + 2.0 * Cpp)
    )
    B_bb = e * (-(_PI**2 / 2.0) * C + 2j * _PI * Cp + 2.0 * Cpp)
    D = 1.0 - t * t
    E = B / D
    E_a = B_a / D + 2.0 * t * B / D**2
    E_aa = B_aa / D + 4.0 * t * B_a / D**2 + 2.0 * B / D**2 + 8.0 * t * t * B / D**3
    E_bb = B_bb / D + 4.0 * t * B_b / D**2 + 2.0 * B / D**2 + 8.0 * t * t * B / D**3
    return E_aa + E_bb + 2j * _PI * E_a - _PI**2 * E


_CURV_WINDOW = 2e-3


def curvature_kernel(alpha, beta):
    """Y(alpha, beta), total across the alpha+beta = +-1 shells.

    The raw quotient forms lose accuracy within ~2e-3 of the shells
    (higher-order 0/0); those points are filled by cubic interpolation
    through probes at t_shell +- {1,2} windows, valid because Y is
    analytic across the shell.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    t = alpha + beta
    scalar = t.ndim == 0 if isinstance(t, np.ndarray) else True
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    shape = tt.shape
    aa = np.broadcast_to(np.asarray(alpha, dtype=float), shape)
    bb = np.broadcast_to(np.asarray(beta, dtype=float), shape)
    near = (np.abs(tt - 1.0) < _CURV_WINDOW) | (np.abs(tt + 1.0) < _CURV_WINDOW)
    # keep the raw pass off the shells entirely (avoids 1/0 noise)
    bb_safe = np.where(near, bb + 4.0 * _CURV_WINDOW, bb)
    out = np.atleast_1d(np.asarray(_curvature_raw(aa, bb_safe), dtype=complex))
    for shell in (1.0, -1.0):
        mask = np.abs(tt - shell) < _CURV_WINDOW
        if not mask.any():
            continue
        am = aa[mask]
        tm = tt[mask]
        w = _CURV_WINDOW
        nodes = np.array([-2.0 * w, -w, w, 2.0 * w])  # offsets from the shell
        vals = [
            _curvature_raw(am, shell + off - am) for off in nodes
        ]  # beta = t - alpha
        x = tm - shell
        interp = np.zeros_like(am, dtype=complex)
        for i, off in enumerate(nodes):
            li = np.ones_like(am)
            for j, offj in enumerate(nodes):
                if j != i:
                    li = li * (x - offj) / (off - offj)
            interp = interp + li * vals[i]
        out[mask] = interp
    if scalar:
        return complex(out[0])
    return out
