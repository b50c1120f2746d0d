import numpy as np
import pytest

from udw_harvest import kernels
from udw_harvest.classical import (
    _b_prime_at_shell,
    _m_integrand_limit,
    entangling_classical,
    excitation_classical,
    negativity_classical,
    spectral_A,
    spectral_B,
    spectral_point,
    switching,
)
from udw_harvest.quadrature import QuadratureSpec
from udw_harvest.scenario import Pointlike, ScenarioConfig, Smeared


def cfg(a, s, model=Pointlike()):
    return ScenarioConfig(omega=a, separation=s, model=model)


# ---------------------------------------------------------------- switching

def test_switching_peak():
    assert switching(np.pi / 2) == pytest.approx(1.0)


def test_switching_outside_support():
    assert switching(-0.1) == 0.0
    assert switching(np.pi + 1e-12) == 0.0


def test_switching_endpoint():
    assert switching(np.pi) == pytest.approx(0.0, abs=1e-15)


def test_switching_respects_sigma():
    assert switching(np.pi, sigma=2.0) == pytest.approx(1.0)


# ---------------------------------------------------------------- spectral A

def test_spectral_A_shell_limit():
    assert spectral_A(0.5, 0.5) == pytest.approx(np.pi**2 / 8, rel=1e-10)
    assert spectral_A(0.0, 1.0) == pytest.approx(np.pi**2 / 8, rel=1e-10)


def test_spectral_A_direct_value():
    assert spectral_A(1.0, 3.0) == pytest.approx(2.0 / 225.0, rel=1e-12)


def test_spectral_A_nonnegative():
    k = np.linspace(0.0, 30.0, 10001)
    assert np.all(spectral_A(k, 0.7) >= 0.0)


# ---------------------------------------------------------------- spectral B

def test_spectral_B_gap_limit():
    # as a -> 1 the first term tends to i pi (2+k)/4
    k = 0.7
    want = spectral_B(k, 1.0)
    via_offset = spectral_B(k, 1.0 + 1e-9)
    assert complex(via_offset) == pytest.approx(complex(want), rel=1e-6)
    first_term_limit = 1j * np.pi * (2 + k) / 4
    second = (np.exp(-1j * np.pi * 1.0) + np.exp(-1j * np.pi * k)) / (1 - (1 - k) ** 2)
    assert complex(want) == pytest.approx(first_term_limit + second, rel=1e-10)


def test_spectral_B_difference_shell():
    # numerator of the second term vanishes at a - k = 1
    a, k = 1.5, 0.5
    assert abs(np.exp(-1j * np.pi * a) + np.exp(-1j * np.pi * k)) < 1e-15
    lim = 1j * np.pi * np.exp(-1j * np.pi * a) / 2
    first = 1j * (2 * a + k) * np.sin(np.pi * a) / (2 * a * (1 - a**2))
    assert complex(spectral_B(k, a)) == pytest.approx(complex(first + lim), rel=1e-10)
    # consistency against a point just off the shell
    off = spectral_B(k + 1e-7, a)
    assert complex(off) == pytest.approx(complex(spectral_B(k, a)), rel=1e-5)


def test_spectral_B_direct_arithmetic_zero():
    assert abs(spectral_B(0.5, 0.5)) < 1e-14


def test_spectral_B_matches_generalized_kernel():
    rng = np.random.default_rng(11)
    for _ in range(25):
        a = float(rng.uniform(0.05, 3.0))
        k = float(rng.uniform(0.0, 8.0))
        got = complex(spectral_B(k, a))
        want = complex(kernels.b_kernel(a, k))
        assert got == pytest.approx(want, rel=1e-10), (a, k)


def test_spectral_point_invariant():
    pt = spectral_point(2.0, 0.7)
    assert pt.a_val >= 0


# -------------------------------------------------- entangling shell limit

def test_bracket_cancellation_at_shell():
    # integrand at a+k = 1 +- 1e-6 within 1e-4 relative of the series limit
    for a in (0.3, 0.62, 0.9):
        k0 = 1.0 - a
        lim = _m_integrand_limit(a, 1.0, 0.0)
        for off in (1e-6, -1e-6):
            k = k0 + off
            val = np.sin(k * 1.0) * spectral_B(k, a) / (1.0 - (a + k) ** 2)
            assert abs(val - lim) / abs(lim) < 1e-4


def test_shell_limit_cross_module_identity():
    # classical dB/dk route against the generalized kernel's shell limit
    for a in (0.15, 0.4, 0.85):
        classical = -_b_prime_at_shell(a) / 2.0
        general = complex(kernels.entangling_ratio_limit(a, +1))
        assert classical == pytest.approx(general, rel=1e-11)


# ---------------------------------------------------------------- P values

# frozen from mpmath (dps 30): head by quad over split points, smooth tail
# by exact antiderivative, cosine tail by contour rotation to the upper
# quadrant; a 4e7-node midpoint rule agrees to ~1e-7
P0_A01 = 0.0847180878282669166
P0_A1 = 0.0187261575843249299


def test_pointlike_P_against_independent_oracle():
    assert excitation_classical(cfg(0.1, 1.0)) == pytest.approx(P0_A01, rel=1e-9)
    assert excitation_classical(cfg(1.0, 1.0)) == pytest.approx(P0_A1, rel=1e-9)


def test_wide_smearing_suppresses_P():
    a = 1.0
    p_point = excitation_classical(cfg(a, 1.0))
    p_wide = excitation_classical(cfg(a, 1.0, Smeared(width=1e3)))
    assert p_wide < p_point


def test_tiny_smearing_recovers_pointlike_P():
    a = 1.0
    p0 = excitation_classical(cfg(a, 1.0))
    pl = excitation_classical(cfg(a, 1.0, Smeared(width=1e-3)))
    assert abs(pl - p0) / p0 < 1e-3


def test_P_monotone_in_gap():
    assert excitation_classical(cfg(50.0, 1.0)) < excitation_classical(cfg(0.1, 1.0))


def test_P_strictly_decreasing_in_width():
    a = 0.7
    widths = [0.2, 0.5, 1.0, 2.0, 4.0]
    vals = [excitation_classical(cfg(a, 1.0, Smeared(width=w))) for w in widths]
    assert all(x > y for x, y in zip(vals, vals[1:]))


# ---------------------------------------------------------------- M values

def test_M_brute_force_oracle_small_s():
    # fine-panel midpoint on [0, 400] with 1e6 nodes, same truncation
    a, s = 0.1, 0.1
    n = 1_000_000
    h = 400.0 / n
    k = (np.arange(n) + 0.5) * h
    g = np.sin(k * s) * np.asarray(spectral_B(k, a)) / (1.0 - (a + k) ** 2)
    brute = -(np.exp(1j * np.pi * a) / (2 * np.pi**2 * s)) * np.sum(g) * h

    from udw_harvest.classical import entangling_classical_iv
    from udw_harvest.quadrature import integrate_finite
    from udw_harvest.classical import _m_exclusions

    spec = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-13, max_subdivisions=60000)
    iv = integrate_finite(
        lambda kk: np.sin(kk * s) * np.asarray(spectral_B(kk, a)) / (1.0 - (a + kk) ** 2),
        0.0,
        400.0,
        spec,
        exclusions=_m_exclusions(a, s, 0.0),
    )
    engine = -(np.exp(1j * np.pi * a) / (2 * np.pi**2 * s)) * iv.value
    assert abs(engine - brute) / abs(brute) < 1e-5


def test_M_cluster_decomposition():
    a = 1.0
    m_far = entangling_classical(cfg(a, 1e3))
    m_near = entangling_classical(cfg(a, 0.1))
    assert abs(m_far) < 1e-6 * abs(m_near)


def test_smearing_suppresses_M():
    a, s = 0.5, 0.7
    m0 = entangling_classical(cfg(a, s))
    m1 = entangling_classical(cfg(a, s, Smeared(width=1.0)))
    assert abs(m1) < abs(m0)


def test_M_envelope_decreasing_in_s():
    a = 0.1
    svals = np.linspace(0.05, 5.0, 12)
    mags = [abs(entangling_classical(cfg(a, s))) for s in svals]
    assert all(m <= mags[0] for m in mags[1:])


def test_M_independent_of_detector_labels():
    # identical packets: M depends on the scalar separation only
    a, s = 0.4, 0.8
    assert entangling_classical(cfg(a, s)) == entangling_classical(cfg(a, s))


# ---------------------------------------------------------------- negativity

def test_negativity_clamps_to_zero():
    # far-separated detectors: |M| << P
    assert negativity_classical(cfg(1.0, 50.0)) == 0.0


def test_negativity_positive_near_origin():
    assert negativity_classical(cfg(0.1, 0.1)) > 0.0


def test_pointlike_negativity_dominates_smeared():
    a, s = 0.3, 0.3
    n_point = negativity_classical(cfg(a, s))
    n_smear = negativity_classical(cfg(a, s, Smeared(width=1.0)))
    assert n_point >= n_smear
