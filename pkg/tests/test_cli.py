import os

import pytest

from littsim.cli import main

FAST_CONFIG = """\
[geometry]
mesh_h = 8.0

[run]
dt = 60.0
"""


@pytest.fixture()
def fast_config(tmp_path):
    path = tmp_path / "fast.conf"
    path.write_text(FAST_CONFIG)
    return str(path)


def test_cases_lists_table(capsys):
    assert main(["cases"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 9
    assert out[6].startswith("P34F47")
    assert "q_hat=33.8 W" in out[6]
    assert "t_off=1206 s" in out[6]
    assert "d_r=11.2 mm" in out[6]


def test_unknown_case_exits_2(capsys, fast_config):
    code = main(["run", "--case", "NOPE", "--model", "none",
                 "--config", fast_config])
    assert code == 2
    err = capsys.readouterr().err
    assert "P22F47" in err and "P34F92" in err


def test_unknown_flag_exits_2(capsys):
    assert main(["run", "--case", "P34F47", "--bogus"]) == 2


def test_bad_window_exits_2(capsys, fast_config):
    code = main(["sweep", "--case", "P22F92", "--config", fast_config,
                 "--windows", "60-80"])
    assert code == 2


def test_run_fast_case(tmp_path, capsys, fast_config):
    out_dir = str(tmp_path / "out")
    code = main(["run", "--case", "P22F92", "--model", "none",
                 "--config", fast_config, "--out", out_dir])
    assert code == 0
    series = os.path.join(out_dir, "P22F92_none", "timeseries.csv")
    assert os.path.exists(series)
    lines = open(series).read().splitlines()
    assert lines[0].startswith("t_s,T_probe_C,")
    assert len(lines) == 1 + 12 + 1  # header + 12 steps + initial row


def test_run_dt_flag_overrides_config(tmp_path, fast_config):
    out_dir = str(tmp_path / "out")
    code = main(["run", "--case", "P22F92", "--model", "none",
                 "--config", fast_config, "--dt", "120", "--out", out_dir])
    assert code == 0
    lines = open(os.path.join(out_dir, "P22F92_none",
                              "timeseries.csv")).read().splitlines()
    assert len(lines) == 1 + 6 + 1


def test_output_root_env(tmp_path, fast_config, monkeypatch, capsys):
    root = str(tmp_path / "env_root")
    monkeypatch.setenv("LITTSIM_OUTPUT_ROOT", root)
    code = main(["run", "--case", "P22F92", "--model", "none",
                 "--config", fast_config])
    assert code == 0
    assert os.path.exists(os.path.join(root, "P22F92_none", "timeseries.csv"))


def test_sweep_fast(tmp_path, fast_config, capsys):
    out_dir = str(tmp_path / "sweep")
    code = main(["sweep", "--case", "P22F92", "--model", "enthalpy",
                 "--config", fast_config, "--windows", "60:80,70:90",
                 "--out", out_dir])
    assert code == 0
    assert os.path.exists(os.path.join(out_dir, "P22F92_enthalpy_sweep.csv"))


def test_tcond_flag(tmp_path, fast_config):
    out_dir = str(tmp_path / "out")
    code = main(["run", "--case", "P22F92", "--model", "enthalpy",
                 "--config", fast_config, "--tcond", "65:85",
                 "--out", out_dir])
    assert code == 0
    meta = open(os.path.join(out_dir, "P22F92_enthalpy",
                             "run_metadata.txt")).read()
    assert "T_cond_low = 65.0" in meta
    assert "T_cond_high = 85.0" in meta


def test_missing_config_exits_2(capsys, tmp_path):
    code = main(["run", "--case", "P22F92", "--model", "none",
                 "--config", str(tmp_path / "absent.conf")])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_verify_reports_pass(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 3
    assert "FAIL" not in out


def test_help_documents_flags_and_schema(capsys):
    assert main(["run", "--help"]) == 0
    out = capsys.readouterr().out
    for token in ("--case", "--model", "--config", "--dt", "--tcond", "--out",
                  "t_s,T_probe_C", "timeseries.csv"):
        assert token in out
