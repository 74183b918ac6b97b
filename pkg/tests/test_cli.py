import json

import numpy as np
import pytest

from mzdephase.cli import (
    build_config,
    load_config,
    main,
    parse_grid,
    preset_path,
)
from mzdephase.errors import ConfigError

BASELINE = {
    "distribution": {"mu_over_sigma": 400.0},
    "arm0": {"n_h": 1.553, "n_v": 1.544, "t_start": 0.0, "t_stop": 50.0},
    "arm1": {"n_h": 1.553, "n_v": 1.544, "t_start": 0.0, "t_stop": 60.0},
    "output": {"n_h": 1.553, "n_v": 1.544, "t_start": 60.0, "t_stop": None},
    "polarization": {
        "ch_re": 0.7071067811865476,
        "ch_im": 0.0,
        "cv_re": 0.7071067811865476,
        "cv_im": 0.0,
        "theta": 0.0,
    },
}


def write_config(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


# ---------------------------------------------------------------------------
# config loading and validation
# ---------------------------------------------------------------------------

def test_preset_shorthand(capsys):
    assert main(["estimate", "--config", "preset:dtau10"]) == 0
    assert "interaction_time_difference" in capsys.readouterr().out


def test_load_baseline_preset():
    cfg, run = load_config(preset_path("dtau10"))
    assert cfg.window0.n_h == 1.553
    assert cfg.window0.n_v == 1.544
    assert cfg.dist.mu / cfg.dist.sigma == 400.0
    assert (cfg.window0.t_start, cfg.window0.t_stop) == (0.0, 50.0)
    assert (cfg.window1.t_start, cfg.window1.t_stop) == (0.0, 60.0)
    assert cfg.window_out.t_start == 60.0
    assert run == {}


def test_missing_distribution_field_is_named():
    doc = json.loads(json.dumps(BASELINE))
    del doc["distribution"]["mu_over_sigma"]
    with pytest.raises(ConfigError) as err:
        build_config(doc)
    assert any("distribution.mu_over_sigma" in p for p in err.value.problems)


def test_output_window_before_arms_close_rejected():
    doc = json.loads(json.dumps(BASELINE))
    doc["output"]["t_start"] = 55.0
    with pytest.raises(ConfigError) as err:
        build_config(doc)
    assert any("output.t_start" in p for p in err.value.problems)


def test_all_errors_reported_at_once():
    doc = json.loads(json.dumps(BASELINE))
    del doc["distribution"]["mu_over_sigma"]
    doc["arm0"]["n_h"] = "not-a-number"
    doc["arm1"]["t_stop"] = -5.0
    doc["bogus"] = {}
    with pytest.raises(ConfigError) as err:
        build_config(doc)
    text = "\n".join(err.value.problems)
    assert "distribution.mu_over_sigma" in text
    assert "arm0.n_h" in text
    assert "arm1" in text
    assert "bogus" in text


def test_negative_window_start_rejected():
    doc = json.loads(json.dumps(BASELINE))
    doc["arm0"]["t_start"] = -1.0
    with pytest.raises(ConfigError) as err:
        build_config(doc)
    assert any("arm0.t_start" in p for p in err.value.problems)


def test_polarization_defaults_to_balanced_superposition():
    doc = json.loads(json.dumps(BASELINE))
    del doc["polarization"]
    cfg, _ = build_config(doc)
    assert abs(cfg.pol.c_h) == pytest.approx(np.sqrt(0.5))
    assert cfg.pol.theta == 0.0


def test_parse_grid():
    grid = parse_grid("0:60:0.5")
    assert len(grid) == 121
    assert grid[0] == 0.0
    assert grid[-1] == 60.0
    for bad in ("10:0:1", "0:10:0", "1:2", "a:b:c"):
        with pytest.raises(ConfigError):
            parse_grid(bad)


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def test_inside_sweep_columns_and_determinism(tmp_path, capsys):
    cfg_path = write_config(tmp_path, BASELINE)
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    args = [
        "sweep", "--config", cfg_path, "--grid", "0:60:0.1",
        "--locations", "path0,path1,joint_inside", "--out",
    ]
    assert main(args + [str(out1)]) == 0
    assert main(args + [str(out2)]) == 0
    data1 = out1.read_bytes()
    assert data1 == out2.read_bytes()
    header = data1.decode().splitlines()[0]
    assert header == "tau,D_path0,D_path1,D_joint_inside,p_out0,p_out1,popH_out0,popH_out1"


def test_inside_sweep_shape(tmp_path):
    cfg_path = write_config(tmp_path, BASELINE)
    out = tmp_path / "inside.csv"
    main([
        "sweep", "--config", cfg_path, "--grid", "0:60:0.02",
        "--locations", "path0,path1,joint_inside", "--out", str(out),
    ])
    rows = np.genfromtxt(out, delimiter=",", names=True)
    # path-wise curves are monotone, the joint one oscillates after one arm closes
    assert np.all(np.diff(rows["D_path0"]) <= 1e-9)
    assert np.all(np.diff(rows["D_path1"]) <= 1e-9)
    joint = rows["D_joint_inside"]
    late = rows["tau"] > 50.0
    assert np.max(np.diff(joint[late])) > 0.01
    assert np.all(np.diff(joint[~late]) <= 1e-9)


def test_full_interference_sweep_constant_port(tmp_path, capsys):
    out = tmp_path / "d0.csv"
    code = main([
        "sweep", "--config", str(preset_path("dtau0")), "--grid", "60:400:1",
        "--locations", "path0_out,path1_out,joint_out", "--out", str(out),
    ])
    assert code == 0
    err = capsys.readouterr().err
    assert "dark port" in err
    lines = out.read_text().splitlines()
    head = lines[0].split(",")
    p0_col = head.index("p_out0")
    dark_col = head.index("D_path1_out")
    for line in lines[1:]:
        cells = line.split(",")
        assert cells[p0_col] == "1"
        assert cells[dark_col] == ""


def test_sweep_rejects_inside_location_beyond_validity(tmp_path):
    cfg_path = write_config(tmp_path, BASELINE)
    code = main([
        "sweep", "--config", cfg_path, "--grid", "0:100:1",
        "--locations", "path0", "--out", "-",
    ])
    assert code == 2


def test_sweep_requires_grid(tmp_path):
    cfg_path = write_config(tmp_path, BASELINE)
    assert main(["sweep", "--config", cfg_path, "--out", "-"]) == 2


# ---------------------------------------------------------------------------
# estimate
# ---------------------------------------------------------------------------

def test_estimate_baseline(capsys):
    code = main(["estimate", "--config", str(preset_path("dtau10"))])
    assert code == 0
    out = capsys.readouterr().out
    fields = dict(line.split(": ") for line in out.strip().splitlines())
    assert fields["estimated_quantity"] == "interaction_time_difference"
    assert float(fields["ground_truth"]) == 10.0
    assert float(fields["relative_error"]) <= 0.05


def test_estimate_full_interference_exits_3(capsys):
    code = main(["estimate", "--config", str(preset_path("dtau0"))])
    assert code == 3
    assert "out of regime" in capsys.readouterr().err


def test_estimate_index_mode(tmp_path, capsys):
    doc = json.loads(json.dumps(BASELINE))
    doc["arm0"].update({"n_h": 1.553, "n_v": 1.553, "t_stop": 3000.0})
    doc["arm1"].update({"n_h": 1.551, "n_v": 1.551, "t_stop": 3000.0})
    doc["output"]["t_start"] = 3000.0
    cfg_path = write_config(tmp_path, doc)
    code = main(["estimate", "--config", cfg_path])
    assert code == 0
    out = capsys.readouterr().out
    fields = dict(line.split(": ") for line in out.strip().splitlines())
    assert fields["estimated_quantity"] == "index_difference"
    assert float(fields["index_difference_estimate"]) == pytest.approx(0.002, rel=0.05)
    assert float(fields["relative_error"]) <= 0.05


# ---------------------------------------------------------------------------
# divisibility
# ---------------------------------------------------------------------------

def test_divisibility_baseline(capsys):
    code = main([
        "divisibility", "--config", str(preset_path("dtau10")), "--grid", "60:3000:1",
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "consistency: OK" in out
    assert out.count("non_cp_divisible:") == 2  # one interval per port


def test_divisibility_asymmetric(capsys):
    code = main([
        "divisibility", "--config", str(preset_path("dtau1p5")), "--grid", "60:1200:0.5",
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "port 0: 1 non-CP-divisible interval(s)" in out
    assert "port 1: 0 non-CP-divisible interval(s)" in out


def test_divisibility_full_interference(capsys):
    code = main([
        "divisibility", "--config", str(preset_path("dtau0")), "--grid", "60:800:1",
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "port 0: 0 non-CP-divisible interval(s)" in out
    assert "dark port" in out


# ---------------------------------------------------------------------------
# oracle-check
# ---------------------------------------------------------------------------

def test_oracle_check_passes(capsys):
    code = main([
        "oracle-check", "--config", str(preset_path("dtau10")),
        "--grid", "0:2400:200", "--n-freq", "2001",
    ])
    assert code == 0
    assert "verdict: PASS" in capsys.readouterr().out


def test_oracle_check_bundled_presets_pass(capsys):
    for name in ("dtau10", "dtau1p5", "dtau0"):
        code = main([
            "oracle-check", "--config", str(preset_path(name)),
            "--grid", "0:2400:300", "--n-freq", "2001",
        ])
        assert code == 0, name
        assert "verdict: PASS" in capsys.readouterr().out


def test_oracle_check_coarse_grid_degrades(capsys):
    code = main([
        "oracle-check", "--config", str(preset_path("dtau10")),
        "--grid", "0:2400:200", "--n-freq", "51",
    ])
    out = capsys.readouterr().out
    fields = dict(line.split(": ") for line in out.strip().splitlines())
    assert float(fields["max_deviation"]) > 1e-5
    assert code == 1


# ---------------------------------------------------------------------------
# error paths
# ---------------------------------------------------------------------------

def test_missing_config_file_exits_2(capsys):
    assert main(["sweep", "--config", "/nonexistent.json", "--grid", "0:1:1"]) == 2
    assert "config error" in capsys.readouterr().err


def test_invalid_json_exits_2(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["estimate", "--config", str(path)]) == 2
    assert "invalid JSON" in capsys.readouterr().err
