import io
import contextlib
import json
import re

import pytest

from udw_harvest.cli import main


def run_cli(argv):
    buf = io.StringIO()
    err = io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, buf.getvalue(), err.getvalue()


def test_compute_pointlike_json_keys():
    code, out, _ = run_cli(
        ["compute", "--model", "pointlike", "--omega", "0.1", "--separation", "0.1"]
    )
    assert code == 0
    d = json.loads(out)
    assert set(d) == {
        "p_a", "p_b", "re_m", "im_m", "abs_m", "negativity", "err_p", "err_m", "regime",
    }
    assert d["negativity"] > 0
    assert d["p_a"] == d["p_b"]


def test_compute_slow_medium_negativity_zero():
    code, out, _ = run_cli(
        ["compute", "--model", "delocalized", "--omega", "1.0", "--separation", "0.1",
         "--width", str(4 / 9), "--mass", "900", "--speed-ratio", "0.01",
         "--path", "taylor"]
    )
    assert code == 0
    assert json.loads(out)["negativity"] == 0.0


def test_compute_regime_rejection_exit_code():
    code, _, err = run_cli(
        ["compute", "--model", "delocalized", "--omega", "1.0", "--separation", "1.0",
         "--width", "1.0", "--mass", "10"]
    )
    assert code == 3
    assert "regime" in err


def test_malformed_config_names_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("omeg=1\nseparation=1\nmodel=pointlike\n")
    code, _, err = run_cli(["compute", "--config", str(cfg)])
    assert code == 1
    assert "omeg" in err


def test_config_file_plus_flag_override(tmp_path):
    cfg = tmp_path / "ok.cfg"
    cfg.write_text("omega=1.0\nseparation=9.9\nmodel=pointlike\n")
    code, out, _ = run_cli(["compute", "--config", str(cfg), "--separation", "0.1"])
    assert code == 0
    assert json.loads(out)["negativity"] > 0


def test_sweep_shape_and_format(tmp_path):
    out = tmp_path / "grid.csv"
    code, _, _ = run_cli(
        ["sweep", "--model", "pointlike", "--axis", "omega=0.1,0.5",
         "--axis", "separation=0.1,0.5", "--out", str(out), "--jobs", "1"]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    data = [ln for ln in lines if not ln.startswith("#")]
    assert data[0] == "omega,separation,p,abs_m,negativity,err_p,err_m,converged"
    assert len(data) == 5  # header + 4 cells
    # ASCII numerics, decimal points, no locale separators
    for ln in data[1:]:
        assert re.fullmatch(r"[0-9eE+\-.,truefals]+", ln)
        assert ln.endswith("true")


def test_sweep_deterministic_modulo_timestamp(tmp_path):
    args = ["sweep", "--model", "pointlike", "--axis", "omega=0.2,0.4",
            "--axis", "separation=0.2,0.4", "--jobs", "1"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(args + ["--out", str(a)])[0] == 0
    assert run_cli(args + ["--out", str(b)])[0] == 0
    strip = lambda p: [ln for ln in p.read_text().splitlines() if not ln.startswith("#")]
    assert strip(a) == strip(b)


def test_sweep_rejects_unknown_axis(tmp_path):
    code, _, err = run_cli(
        ["sweep", "--model", "pointlike", "--axis", "bogus=1,2",
         "--out", str(tmp_path / "x.csv"), "--jobs", "1"]
    )
    assert code == 1
    assert "bogus" in err


def test_sweep_io_error_exit_code():
    code, _, _ = run_cli(
        ["sweep", "--model", "pointlike", "--separation", "1.0",
         "--axis", "omega=0.2,0.4",
         "--out", "/nonexistent-dir/x.csv", "--jobs", "1"]
    )
    assert code == 4


def test_sweep_missing_parameter_is_config_error(tmp_path):
    code, _, err = run_cli(
        ["sweep", "--model", "pointlike", "--axis", "omega=0.2,0.4",
         "--out", str(tmp_path / "x.csv"), "--jobs", "1"]
    )
    assert code == 1
    assert "separation" in err


def test_limits_gamma_single_point_has_empty_rates():
    code, out, _ = run_cli(
        ["limits", "--kind", "gamma", "--omega", "0.5", "--separation", "1.0",
         "--lmc", "400", "--gammas", "0.1"]
    )
    assert code == 0
    d = json.loads(out)
    assert len(d["rows"]) == 1
    assert d["rates"]["P"] == []


def test_limits_requires_kind_arguments():
    code, _, err = run_cli(
        ["limits", "--kind", "gamma", "--omega", "0.5", "--separation", "1.0"]
    )
    assert code == 1
    assert "lmc" in err


def test_bad_usage_exit_code_is_one():
    code, _, _ = run_cli(["compute", "--model", "nosuch"])
    assert code == 1


def test_figure_unknown_recipe():
    code, _, err = run_cli(["figure", "--recipe", "fig99", "--out", "/tmp/x"])
    assert code == 1
    assert "fig99" in err


def test_figure_fig6_assertion_passes(tmp_path):
    code, out, _ = run_cli(
        ["figure", "--recipe", "fig6", "--out", str(tmp_path), "--jobs", "1"]
    )
    assert code == 0
    d = json.loads(out)
    assert d["failed_assertions"] == []
    sidecar = json.loads((tmp_path / "fig6_sidecar.json").read_text())
    srcs = sidecar["parameters"]
    assert srcs["speed_ratio"]["source"] == "paper"
    assert srcs["omega_range"]["source"] == "artifact"
    rows = [
        ln for ln in (tmp_path / "fig6.csv").read_text().splitlines()
        if ln and not ln.startswith("#")
    ]
    assert len(rows) == 26  # header + 25 omega points
