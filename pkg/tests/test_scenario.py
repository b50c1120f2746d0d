import numpy as np
import pytest

from udw_harvest.scenario import (
    Delocalized,
    HarvestResult,
    Pointlike,
    ScenarioConfig,
    Smeared,
    config_from_text,
    config_to_text,
    regime_check,
)


def test_regime_ok_at_fig5_parameters():
    v = regime_check(Delocalized(width=4 / 9, mass=900.0))
    assert v.status == "ok"
    assert v.lmc == pytest.approx(400.0)
    assert not v.supersonic


def test_regime_ok_with_supersonic_flag():
    v = regime_check(Delocalized(width=4 / 9, mass=900.0, speed_ratio=0.01))
    assert v.status == "ok"
    assert v.supersonic
    assert v.lms == pytest.approx(4.0)
    assert "supersonic" in v.message


def test_regime_no_supersonic_flag_at_r026():
    v = regime_check(Delocalized(width=4 / 9, mass=900.0, speed_ratio=0.26))
    assert not v.supersonic


def test_regime_reject_far_below_bound():
    v = regime_check(Delocalized(width=1.0, mass=10.0))
    assert v.status == "reject"


def test_regime_warn_band():
    v = regime_check(Delocalized(width=1.0, mass=100.0))
    assert v.status == "warn"


def test_regime_check_requires_delocalized():
    with pytest.raises(TypeError):
        regime_check(Pointlike())


def test_validation_rejects_bad_parameters():
    with pytest.raises(ValueError):
        ScenarioConfig(omega=-1.0, separation=1.0, model=Pointlike())
    with pytest.raises(ValueError):
        ScenarioConfig(omega=1.0, separation=-0.5, model=Pointlike())
    with pytest.raises(ValueError):
        Smeared(width=0.0)
    with pytest.raises(ValueError):
        Delocalized(width=1.0, mass=1.0, speed_ratio=1.5)
    with pytest.raises(ValueError):
        Delocalized(width=1.0, mass=1.0, path="euler")


@pytest.mark.parametrize(
    "cfg",
    [
        ScenarioConfig(0.1, 0.30000000000000004, Pointlike()),
        ScenarioConfig(1.0, 1e-3, Smeared(width=0.1 + 0.2)),
        ScenarioConfig(
            np.nextafter(2.0, 3.0), 5.0,
            Delocalized(width=4 / 9, mass=900.0, speed_ratio=0.26, path="taylor"),
        ),
    ],
)
def test_config_round_trip_bit_exact(cfg):
    assert config_from_text(config_to_text(cfg)) == cfg


def test_config_rejects_unknown_key():
    with pytest.raises(ValueError, match="omeg"):
        config_from_text("omeg=1\nseparation=1\nmodel=pointlike\n")


def test_config_comments_and_blank_lines():
    text = "# scenario\n\nomega=1.0\nseparation=2.0\nmodel=pointlike\n"
    cfg = config_from_text(text)
    assert cfg.omega == 1.0 and cfg.separation == 2.0


def test_config_missing_required():
    with pytest.raises(ValueError, match="model"):
        config_from_text("omega=1\nseparation=1\n")


def test_harvest_result_negativity_identity():
    rng = np.random.default_rng(0)
    for _ in range(200):
        pa, pb = rng.uniform(0, 1e-2, 2)
        m = complex(rng.normal(), rng.normal()) * 1e-2
        gap = np.sqrt((pa - pb) ** 2 / 4 + abs(m) ** 2)
        n = max(0.0, gap - (pa + pb) / 2)
        res = HarvestResult(pa, pb, m, n, 0.0, 0.0)
        assert res.recomputed_negativity() == pytest.approx(res.negativity, abs=1e-15)
