"""Cross-checks of the closed-form kernels against high-precision mpmath."""

import mpmath as mp
import numpy as np
import pytest

from udw_harvest import kernels as K

mp.mp.dps = 40


def mp_window(u):
    if abs(abs(u) - 1) < mp.mpf("1e-20"):
        u = mp.mpf(1)
        d = (abs(u) - 1) / 2
        return (mp.pi**2 / 2) * mp.sincpi(d) ** 2 / (1 + abs(u)) ** 2
    return (1 + mp.cos(mp.pi * u)) / (u**2 - 1) ** 2


def mp_W(a):
    return mp.sin(mp.pi * a) / (2 * a * (1 - a**2))


def mp_C2(d):
    return mp.cos(mp.pi * d / 2) / (1 - d**2)


def mp_B(a, b):
    return 1j * (2 * a + b) * mp_W(a) + (
        mp.e ** (-1j * mp.pi * a) + mp.e ** (-1j * mp.pi * b)
    ) / (1 - (a - b) ** 2)


# points straddling every zone boundary plus generic values
ALPHAS = [-1.3, -1.0, -0.9, -0.66, -0.35, -0.2, 0.0, 0.17, 0.35, 0.36,
          0.64, 0.66, 0.9, 1.0, 1.1, 1.34, 1.36, 2.5, 4.7]
DS = [-3.2, -1.5, -1.49, -1.0, -0.51, -0.49, 0.0, 0.49, 0.51, 1.0, 1.5, 2.7]


def test_window_response_matches_mpmath():
    for u in [0.0, 0.3, 0.999, 1.0, 1.001, 1.7, 2.0, 3.0, 7.3, -0.4, -1.0]:
        want = float(mp_window(mp.mpf(repr(u))))
        got = float(K.window_response(u))
        assert got == pytest.approx(want, rel=1e-12, abs=1e-14), u


def test_window_response_shell_value():
    assert float(K.window_response(1.0)) == pytest.approx(np.pi**2 / 8, rel=1e-14)


def test_window_response_derivatives_match_mpmath():
    h = mp.mpf("1e-8")
    for u in [0.2, 0.95, 1.0, 1.05, 1.8, 2.4, 5.5]:
        uu = mp.mpf(repr(u))
        d1 = float(mp.diff(mp_window, uu, h=h))
        d2 = float(mp.diff(mp_window, uu, 2, h=h))
        assert float(K.window_response_d1(u)) == pytest.approx(d1, rel=1e-9, abs=1e-12)
        assert float(K.window_response_d2(u)) == pytest.approx(d2, rel=1e-9, abs=1e-12)


def test_window_response_d2_shell_value():
    want = (3 * np.pi**2 - np.pi**4 / 3) / 16
    assert float(K.window_response_d2(1.0)) == pytest.approx(want, rel=1e-13)


@pytest.mark.parametrize("al", [a for a in ALPHAS if a != 0.0])
def test_W_family_matches_mpmath(al):
    # at removable points compare both sides a hair off the shell, where
    # the raw mpmath formula is still well conditioned at dps 40
    off = 1e-6 if (abs(abs(al) - 1) < 1e-12 or abs(al) < 1e-12) else 0.0
    aa = mp.mpf(repr(al)) + mp.mpf(repr(off))
    for fn, order in ((K._W, 0), (K._Wp, 1), (K._Wpp, 2)):
        want = float(mp.diff(mp_W, aa, order, h=mp.mpf("1e-9")))
        got = float(fn(al + off))
        assert got == pytest.approx(want, rel=1e-8, abs=1e-11), (al, order)


def test_W_at_exact_removable_points():
    # series values: W(0) = pi/2, W(1) = pi/4, W(-1) = pi/4
    assert float(K._W(0.0)) == pytest.approx(np.pi / 2, rel=1e-13)
    assert float(K._W(1.0)) == pytest.approx(np.pi / 4, rel=1e-13)
    assert float(K._W(-1.0)) == pytest.approx(np.pi / 4, rel=1e-13)


@pytest.mark.parametrize("d", DS)
def test_C2_family_matches_mpmath(d):
    off = 1e-6 if abs(abs(d) - 1) < 1e-12 else 0.0
    dd = mp.mpf(repr(d)) + mp.mpf(repr(off))
    for fn, order in ((K._C2, 0), (K._C2p, 1), (K._C2pp, 2)):
        want = float(mp.diff(mp_C2, dd, order, h=mp.mpf("1e-9")))
        assert float(fn(d + off)) == pytest.approx(want, rel=1e-8, abs=1e-11), (d, order)


def test_C2_at_exact_removable_points():
    assert float(K._C2(1.0)) == pytest.approx(np.pi / 4, rel=1e-13)
    assert float(K._C2(-1.0)) == pytest.approx(np.pi / 4, rel=1e-13)


def test_b_kernel_matches_mpmath():
    rng = np.random.default_rng(7)
    for _ in range(40):
        a = float(rng.uniform(0.05, 4.0))
        b = float(rng.uniform(-2.0, 6.0))
        if min(abs(a - 1), abs(a), abs(abs(a - b) - 1)) < 1e-3:
            continue
        want = complex(mp_B(mp.mpf(repr(a)), mp.mpf(repr(b))))
        got = complex(K.b_kernel(a, b))
        assert got == pytest.approx(want, rel=1e-11), (a, b)


def test_b_kernel_vanishes_on_both_shells():
    for al in [0.2, 0.37, 0.8, 1.3, 2.6]:
        assert abs(K.b_kernel(al, 1.0 - al)) < 1e-12
        assert abs(K.b_kernel(al, -1.0 - al)) < 1e-12


def test_entangling_ratio_limit_matches_normal_derivative():
    # 1 + 1e-6 rather than 1: the raw mpmath reference is 0/0 at alpha = 1
    for al in [0.15, 0.37, 0.8, 1.0 + 1e-6, 1.45, 2.2]:
        aa = mp.mpf(repr(al))
        for sign in (+1, -1):
            be0 = sign * 1 - aa
            dB = mp.diff(lambda b: mp_B(aa, b), be0, h=mp.mpf("1e-8"))
            want = complex(-dB / (2 * sign))
            got = complex(K.entangling_ratio_limit(al, sign))
            assert got == pytest.approx(want, rel=1e-8), (al, sign)


def test_entangling_ratio_near_shell_consistency():
    # value at shell +- 1e-6 stays within 1e-4 relative of the limit
    for al in [0.3, 0.8, 1.6]:
        for sign in (+1, -1):
            lim = complex(K.entangling_ratio_limit(al, sign))
            for off in (1e-6, -1e-6):
                val = complex(K.entangling_ratio(al, sign * 1.0 - al + off))
                assert abs(val - lim) / abs(lim) < 1e-4


def test_entangling_ratio_total_at_random_points():
    rng = np.random.default_rng(3)
    al = rng.uniform(0.05, 3.0, size=10**6)
    be = rng.uniform(-2.0, 8.0, size=10**6)
    # pepper each singular family with near-shell points
    al[:100] = 0.4
    be[:100] = 0.6 + rng.uniform(-1e-6, 1e-6, 100)          # t = 1 shell
    al[100:200] = 0.4
    be[100:200] = -1.4 + rng.uniform(-1e-6, 1e-6, 100)       # t = -1 shell
    al[200:300] = 1.0 + rng.uniform(-1e-6, 1e-6, 100)        # alpha = 1
    be[200:300] = 3.0
    al[300:400] = rng.uniform(0.1, 2.0, 100)
    be[300:400] = al[300:400] - 1.0 + rng.uniform(-1e-6, 1e-6, 100)  # d = 1
    vals = K.entangling_ratio(al, be)
    assert np.all(np.isfinite(vals))


def test_curvature_kernel_matches_mpmath_second_derivatives():
    def mp_E(a, b):
        return mp_B(a, b) / (1 - (a + b) ** 2)

    def mp_Y(a, b):
        E = mp_E(a, b)
        E_a = mp.diff(lambda x: mp_E(x, b), a, h=mp.mpf("1e-8"))
        E_aa = mp.diff(lambda x: mp_E(x, b), a, 2, h=mp.mpf("1e-8"))
        E_bb = mp.diff(lambda x: mp_E(a, x), b, 2, h=mp.mpf("1e-8"))
        return E_aa + E_bb + 2j * mp.pi * E_a - mp.pi**2 * E

    for a, b in [(0.4, 0.9), (1.0 + 1e-6, 2.3), (0.7, 4.0), (2.2, 0.4), (0.25, 1.9)]:
        want = complex(mp_Y(mp.mpf(repr(a)), mp.mpf(repr(b))))
        got = complex(K.curvature_kernel(a, b))
        assert got == pytest.approx(want, rel=1e-7), (a, b)


def test_curvature_kernel_interpolates_across_shell():
    # continuity through t = 1: compare the filled window against mpmath
    a = 0.4

    def mp_Y(b):
        bb = mp.mpf(repr(b))
        aa = mp.mpf(repr(a))
        E = lambda x, y: mp_B(x, y) / (1 - (x + y) ** 2)
        E_a = mp.diff(lambda x: E(x, bb), aa, h=mp.mpf("1e-8"))
        E_aa = mp.diff(lambda x: E(x, bb), aa, 2, h=mp.mpf("1e-8"))
        E_bb = mp.diff(lambda y: E(aa, y), bb, 2, h=mp.mpf("1e-8"))
        return complex(E_aa + E_bb + 2j * mp.pi * E_a - mp.pi**2 * E(aa, bb))

    for off in (3e-4, -3e-4, 1e-5):
        b = 0.6 + off
        got = complex(K.curvature_kernel(a, b))
        want = mp_Y(b)
        assert got == pytest.approx(want, rel=1e-5), off
