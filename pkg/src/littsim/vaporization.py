"""Tissue-water vaporization models and the shared condensation source.

Two routes are provided:

* the effective-specific-heat route, where the latent heat appears as a
  temperature-dependent spike in the heat capacity driven by the tissue
  water density W(T);
* the enthalpy route, where nodes at the boiling point park incoming heat
  in a volumetric enthalpy H until the cap rho * lambda_vap is reached.

Both feed the same condensation source: the latent power taken out of the
hot zone in one step is deposited uniformly over the region whose
temperature lies inside a user window, one step later.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import T_BOIL
from .mesh import integrate

WATER_FRACTION = 0.8  # vaporizable share of the latent heat


class WaterModel:
    """Tissue water density W(T) with a C1 cubic across the transition.

    Below the transition W follows amplitude * (1 - exp((t - 106)/3.42)),
    above it amplitude * exp(-(t - 80)/34.37) (t in Celsius); a Hermite
    cubic recomputed from the neighbouring branch values and slopes bridges
    [103 C, 104 C] so value and slope are continuous at both knots.
    """

    def __init__(self, amplitude=800.0, t_lo=103.0, t_hi=104.0,
                 rise_ref=106.0, rise_scale=3.42,
                 decay_ref=80.0, decay_scale=34.37):
        self.amplitude = amplitude
        self.t_lo = t_lo
        self.t_hi = t_hi
        self.rise_ref = rise_ref
        self.rise_scale = rise_scale
        self.decay_ref = decay_ref
        self.decay_scale = decay_scale
        h = t_hi - t_lo
        y0 = self._low(t_lo)
        m0 = self._low_slope(t_lo) * h
        y1 = self._high(t_hi)
        m1 = self._high_slope(t_hi) * h
        # Hermite coefficients for p(s) = y0 + m0 s + a s^2 + b s^3, s in [0,1]
        self._ha = 3.0 * (y1 - y0) - 2.0 * m0 - m1
        self._hb = m0 + m1 - 2.0 * (y1 - y0)
        self._h = h
        self._y0 = y0
        self._m0 = m0

    # Bracket-unit branches (amplitude factored out), argument in Celsius.
    def _low(self, t):
        return 1.0 - np.exp((t - self.rise_ref) / self.rise_scale)

    def _low_slope(self, t):
        return -np.exp((t - self.rise_ref) / self.rise_scale) / self.rise_scale

    def _high(self, t):
        return np.exp(-(t - self.decay_ref) / self.decay_scale)

    def _high_slope(self, t):
        return -np.exp(-(t - self.decay_ref) / self.decay_scale) / self.decay_scale

    def _spline(self, t):
        s = (t - self.t_lo) / self._h
        return self._y0 + s * (self._m0 + s * (self._ha + s * self._hb))

    def _spline_slope(self, t):
        s = (t - self.t_lo) / self._h
        return (self._m0 + s * (2.0 * self._ha + 3.0 * s * self._hb)) / self._h

    def bracket_value(self, t_celsius):
        """Piecewise value before scaling by the amplitude."""
        return self._piecewise(t_celsius, self._low, self._spline, self._high)

    def bracket_slope(self, t_celsius):
        return self._piecewise(t_celsius, self._low_slope, self._spline_slope,
                               self._high_slope)

    def _piecewise(self, t, low, mid, high):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.empty_like(t)
        lo_mask = t <= self.t_lo
        hi_mask = t > self.t_hi
        mid_mask = ~(lo_mask | hi_mask)
        out[lo_mask] = low(t[lo_mask])
        out[mid_mask] = mid(t[mid_mask])
        out[hi_mask] = high(t[hi_mask])
        return float(out[0]) if scalar else out

    def density(self, T_kelvin):
        """Tissue water density, kg/m^3 (temperature in Kelvin)."""
        return self.amplitude * self.bracket_value(
            np.asarray(T_kelvin, dtype=float) - 273.15)

    def density_slope(self, T_kelvin):
        """Exact derivative dW/dT of the active branch, kg/(m^3 K)."""
        return self.amplitude * self.bracket_slope(
            np.asarray(T_kelvin, dtype=float) - 273.15)


WATER = WaterModel()


def water_density(T_kelvin, water=WATER):
    return water.density(T_kelvin)


def water_density_slope(T_kelvin, water=WATER):
    return water.density_slope(T_kelvin)


def effective_capacity(T, params, water=WATER):
    """Effective heat capacity C_p - (lambda/rho) dW/dT, always >= C_p."""
    slope = water.density_slope(T)
    return params.c_p - (params.lambda_latent / params.rho) * slope


def enthalpy_cap(params):
    """Latent enthalpy per volume at full vaporization, J/m^3."""
    return params.rho * WATER_FRACTION * params.lambda_latent


def enthalpy_clamp(T, H, params, volumes):
    """Move nodal temperature overshoot above 100 C into enthalpy.

    A node above the boiling point with unsaturated enthalpy transfers its
    sensible excess rho c_p (T - 100 C) into H; whatever would push H past
    the cap returns as temperature. Returns (T_new, H_new, delta_H_total)
    with the total measured through the lumped volumes.
    """
    T = np.asarray(T, dtype=float)
    H = np.asarray(H, dtype=float)
    rho_cp = params.rho * params.c_p
    cap = enthalpy_cap(params)
    active = (T > T_BOIL) & (H < cap)
    excess = np.where(active, rho_cp * (T - T_BOIL), 0.0)
    filled = H + excess
    H_new = np.where(active, np.minimum(filled, cap), H)
    surplus = np.where(active, np.maximum(filled - cap, 0.0), 0.0)
    T_new = np.where(active, T_BOIL + surplus / rho_cp, T)
    delta_h_total = float(np.dot(volumes, H_new - H))
    return T_new, H_new, delta_h_total


def esh_latent_power(T_old, T_new, dt, params, volumes, water=WATER):
    """Latent power released by the water-density drop over one step.

    Uses the secant W(T_old) - W(T_new) so the power handed to the
    condensation source matches what the heat step actually absorbed.
    Cooling through the transition would be re-condensation in place and is
    clipped; the clipped power is returned so runs can account for it.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    drop = water.density(T_old) - water.density(T_new)
    released = np.maximum(drop, 0.0)
    clipped = np.maximum(-drop, 0.0)
    lam = params.lambda_latent
    q_vap = lam * float(np.dot(volumes, released)) / dt
    q_clipped = lam * float(np.dot(volumes, clipped)) / dt
    return q_vap, q_clipped


@dataclass(frozen=True)
class CondensationSource:
    """Uniform latent-heat deposit over the condensation window."""

    q_bar_vap: float      # total latent power, W
    q_cond: np.ndarray    # nodal volumetric source, W/m^3
    window: tuple         # (T_low, T_high), K
    volume: float         # vol(Omega_cond), m^3
    discarded_power: float  # latent power dropped because the window was empty

    @classmethod
    def zero(cls, n_nodes, window):
        return cls(0.0, np.zeros(n_nodes), tuple(window), 0.0, 0.0)


def condensation_source(mesh, T, q_bar_vap, window):
    """Distribute q_bar_vap uniformly over nodes with T inside the window.

    When the window region has positive volume the source integrates back
    to q_bar_vap exactly; an empty region drops the energy (and reports it
    through discarded_power), following the defining case split.
    """
    if q_bar_vap < 0.0:
        raise ValueError("latent power must be nonnegative")
    low, high = window
    T = np.asarray(T, dtype=float)
    mask = (T >= low) & (T <= high)
    volume = integrate(mesh, np.ones(mesh.n_nodes), mask)
    q_cond = np.zeros(mesh.n_nodes)
    discarded = 0.0
    if q_bar_vap > 0.0:
        if volume > 0.0:
            q_cond[mask] = q_bar_vap / volume
        else:
            discarded = q_bar_vap
    return CondensationSource(q_bar_vap=q_bar_vap, q_cond=q_cond,
                              window=(low, high), volume=volume,
                              discarded_power=discarded)
