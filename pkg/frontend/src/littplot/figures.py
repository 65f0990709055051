"""Figure rendering: single-case comparisons and the nine-case grid."""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .series import SeriesError, align, load_measured, load_series  # noqa: E402

# Canonical case order of the experiment table (grid layout is row-major).
CASE_ORDER = ["P22F47", "P22F70", "P22F92",
              "P28F47", "P28F70", "P28F92",
              "P34F47", "P34F70", "P34F92"]

GUIDE_TEMPERATURE_C = 100.0

# Deterministic output: fixed hash salt for SVG ids, no date metadata.
plt.rcParams["svg.hashsalt"] = "littplot"


@dataclass
class PlotJob:
    """One case's inputs: a CSV per model plus an optional measurement."""

    case_label: str
    inputs: dict  # model name -> timeseries.csv path
    output: str
    measured: str | None = None
    guide_c: float = GUIDE_TEMPERATURE_C
    title: str = ""

    def loaded(self):
        if not self.inputs:
            raise SeriesError(f"{self.case_label}: no input CSVs")
        series = {name: load_series(path) for name, path in self.inputs.items()}
        return align(series)


def _save(fig, output):
    metadata = {"Date": None} if output.endswith(".svg") else \
        {"Software": "littplot"}
    fig.savefig(output, metadata=metadata)
    plt.close(fig)


def _draw_case(ax, job, show_guide=True):
    t, curves = job.loaded()
    for name in sorted(curves):
        ax.plot(t, curves[name], label=name, linewidth=1.2)
    if job.measured is not None:
        mt, mv = load_measured(job.measured)
        ax.plot(mt, mv, "k--", label="measured", linewidth=1.0)
    if show_guide:
        ax.axhline(job.guide_c, color="0.6", linestyle=":", linewidth=0.9)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("probe temperature [C]")
    ax.set_title(job.title or job.case_label)
    ax.legend(fontsize="small")


def _draw_differences(ax, job):
    t, curves = job.loaded()
    names = sorted(curves)
    for a, b in itertools.combinations(names, 2):
        ax.plot(t, curves[a] - curves[b], label=f"{a} - {b}", linewidth=1.2)
    ax.axhline(0.0, color="0.6", linestyle=":", linewidth=0.9)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("difference [K]")
    ax.set_title(job.title or job.case_label)
    ax.legend(fontsize="small")


def build_case_figure(job, diff=False):
    fig, ax = plt.subplots(figsize=(6.4, 4.2), constrained_layout=True)
    if diff:
        _draw_differences(ax, job)
    else:
        _draw_case(ax, job)
    return fig


def plot_case(job, diff=False):
    """Render one case comparison (or difference panel) to job.output."""
    fig = build_case_figure(job, diff=diff)
    _save(fig, job.output)
    return job.output


def build_grid_figure(jobs, diff=False):
    by_label = {job.case_label: job for job in jobs}
    missing = [label for label in CASE_ORDER if label not in by_label]
    if missing:
        raise SeriesError("missing case(s): " + ", ".join(missing))
    fig, axes = plt.subplots(3, 3, figsize=(12.5, 9.5), constrained_layout=True)
    for ax, label in zip(axes.ravel(), CASE_ORDER):
        if diff:
            _draw_differences(ax, by_label[label])
        else:
            _draw_case(ax, by_label[label])
    return fig


def plot_grid(jobs, output, diff=False):
    """Render the nine-case grid, ordered as the experiment table."""
    fig = build_grid_figure(jobs, diff=diff)
    _save(fig, output)
    return output


def jobs_from_run_root(root, labels, output, measured=None):
    """Build PlotJobs from a simulator output root.

    Expects <root>/<label>_<model>/timeseries.csv as written by the run
    driver; every model directory found for a label becomes one curve.
    """
    jobs = []
    for label in labels:
        inputs = {}
        prefix = f"{label}_"
        if os.path.isdir(root):
            for entry in sorted(os.listdir(root)):
                if not entry.startswith(prefix):
                    continue
                path = os.path.join(root, entry, "timeseries.csv")
                if os.path.isfile(path):
                    inputs[entry[len(prefix):]] = path
        if not inputs:
            raise SeriesError(f"no runs found for case {label} under {root}")
        jobs.append(PlotJob(case_label=label, inputs=inputs, output=output,
                            measured=measured))
    return jobs
