"""Comparison figures for simulator run CSVs (probe-temperature curves)."""

__version__ = "0.1.0"

from .figures import PlotJob, plot_case, plot_grid
from .series import SeriesError, load_series

__all__ = ["PlotJob", "SeriesError", "load_series", "plot_case", "plot_grid",
           "__version__"]
