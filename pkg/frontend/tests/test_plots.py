import os

import numpy as np
import pytest

from littplot.cli import main
from littplot.figures import (CASE_ORDER, PlotJob, build_case_figure,
                              build_grid_figure, jobs_from_run_root,
                              plot_case, plot_grid)
from littplot.series import SeriesError, align, load_series

HEADER = ("t_s,T_probe_C,T_max_C,Qvap_W,Qcond_discarded_W,H_total_J,"
          "omega_probe,cg_iters_heat,cg_iters_rad")


def write_series(path, t, temperature):
    lines = [HEADER]
    for ti, temp in zip(t, temperature):
        ti, temp = float(ti), float(temp)
        lines.append(f"{ti!r},{temp!r},{temp!r},0.0,0.0,0.0,0.0,3,5")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def synth_runs(root, labels, models=("none", "esh", "enthalpy"), dt=1.0):
    t = np.arange(0.0, 100.0 + dt / 2, dt)
    for label in labels:
        for k, model in enumerate(models):
            temperature = 20.0 + (60.0 + 5.0 * k) * (1.0 - np.exp(-t / 30.0))
            write_series(root / f"{label}_{model}" / "timeseries.csv",
                         t, temperature)


@pytest.fixture()
def nine_runs(tmp_path):
    root = tmp_path / "runs"
    synth_runs(root, CASE_ORDER)
    return root


def test_load_series_roundtrip(tmp_path):
    path = tmp_path / "ts.csv"
    t = np.array([0.0, 1.0, 2.0])
    temp = np.array([20.0, 21.5, 24.0])
    write_series(path, t, temp)
    t2, temp2 = load_series(path)
    assert np.array_equal(t, t2) and np.array_equal(temp, temp2)


def test_missing_column_named(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t_s,wrong\n0.0,1.0\n")
    with pytest.raises(SeriesError) as err:
        load_series(path)
    assert "T_probe_C" in str(err.value)


def test_empty_csv_is_error_and_writes_nothing(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text(HEADER + "\n")
    out = tmp_path / "fig.svg"
    job = PlotJob("P34F47", {"none": str(path)}, str(out))
    with pytest.raises(SeriesError):
        plot_case(job)
    assert not out.exists()


def test_align_resamples_to_coarsest():
    fine = (np.arange(0.0, 10.5, 0.5), np.arange(0.0, 10.5, 0.5) * 2.0)
    coarse = (np.arange(0.0, 11.0, 1.0), np.arange(0.0, 11.0, 1.0) * 3.0)
    t, curves = align({"fine": fine, "coarse": coarse})
    assert np.array_equal(t, coarse[0])
    assert curves["fine"].shape == t.shape
    assert curves["fine"][4] == pytest.approx(8.0)


def test_case_panel_three_models(tmp_path, nine_runs):
    out = tmp_path / "case.svg"
    job = jobs_from_run_root(str(nine_runs), ["P34F47"], str(out))[0]
    assert sorted(job.inputs) == ["enthalpy", "esh", "none"]
    fig = build_case_figure(job)
    assert len(fig.axes) == 1
    ax = fig.axes[0]
    assert len(ax.lines) == 4  # three curves plus the 100 C guide
    assert ax.get_legend() is not None
    plot_case(job)
    assert out.exists() and out.stat().st_size > 0


def test_case_panel_single_model(tmp_path):
    root = tmp_path / "runs"
    synth_runs(root, ["P34F47"], models=("enthalpy",))
    out = tmp_path / "single.svg"
    job = jobs_from_run_root(str(root), ["P34F47"], str(out))[0]
    plot_case(job)
    assert out.exists()


def test_grid_has_nine_panels(tmp_path, nine_runs):
    out = tmp_path / "grid.svg"
    jobs = jobs_from_run_root(str(nine_runs), CASE_ORDER, str(out))
    fig = build_grid_figure(jobs)
    assert len(fig.axes) == 9
    titles = [ax.get_title() for ax in fig.axes]
    assert titles == CASE_ORDER
    plot_grid(jobs, str(out))
    assert out.exists()


def test_grid_missing_case_is_named(tmp_path, nine_runs):
    out = tmp_path / "grid.svg"
    jobs = jobs_from_run_root(str(nine_runs), CASE_ORDER, str(out))
    partial = [j for j in jobs if j.case_label != "P28F92"]
    with pytest.raises(SeriesError) as err:
        plot_grid(partial, str(out))
    assert "P28F92" in str(err.value)
    assert not out.exists()


def test_difference_mode(tmp_path, nine_runs):
    out = tmp_path / "diff.svg"
    job = jobs_from_run_root(str(nine_runs), ["P22F47"], str(out))[0]
    fig = build_case_figure(job, diff=True)
    ax = fig.axes[0]
    assert len(ax.lines) == 4  # three pairwise differences plus zero guide
    jobs = jobs_from_run_root(str(nine_runs), CASE_ORDER, str(out))
    plot_grid(jobs, str(out), diff=True)
    assert out.exists()


def test_measured_overlay(tmp_path, nine_runs):
    measured = tmp_path / "measured.csv"
    measured.write_text("t_s,T_C\n0.0,20.0\n50.0,70.0\n100.0,80.0\n")
    out = tmp_path / "overlay.svg"
    job = jobs_from_run_root(str(nine_runs), ["P34F47"], str(out),
                             measured=str(measured))[0]
    fig = build_case_figure(job)
    assert len(fig.axes[0].lines) == 5  # three models, measured, guide


@pytest.mark.parametrize("suffix", ["svg", "png"])
def test_acceptance_figures_deterministic(tmp_path, nine_runs, suffix):
    # the secondary acceptance contract: nine run CSVs produce the grid and
    # the P34F47 comparison, byte-identical across reruns
    grid_a = tmp_path / f"grid_a.{suffix}"
    grid_b = tmp_path / f"grid_b.{suffix}"
    for out in (grid_a, grid_b):
        jobs = jobs_from_run_root(str(nine_runs), CASE_ORDER, str(out))
        plot_grid(jobs, str(out))
    assert grid_a.read_bytes() == grid_b.read_bytes()

    case_a = tmp_path / f"case_a.{suffix}"
    case_b = tmp_path / f"case_b.{suffix}"
    for out in (case_a, case_b):
        job = jobs_from_run_root(str(nine_runs), ["P34F47"], str(out))[0]
        plot_case(job)
    assert case_a.read_bytes() == case_b.read_bytes()


def test_cli_case_and_grid(tmp_path, nine_runs, capsys):
    out = tmp_path / "cli_case.svg"
    assert main(["--root", str(nine_runs), "--case", "P34F47",
                 "--out", str(out)]) == 0
    assert out.exists()
    grid = tmp_path / "cli_grid.png"
    assert main(["--root", str(nine_runs), "--grid", "--diff",
                 "--out", str(grid)]) == 0
    assert grid.exists()


def test_cli_reports_missing_runs(tmp_path, capsys):
    code = main(["--root", str(tmp_path), "--case", "P34F47",
                 "--out", str(tmp_path / "x.svg")])
    assert code == 1
    assert "no runs found" in capsys.readouterr().err
