"""Cumulative Arrhenius tissue damage.

The damage variable omega integrates a temperature-activated rate over
time (right-hand Riemann sum, so each step uses the new temperature).
The frequency factor is ~1e98 1/s, so the rate is always formed in the
log domain; the naive product would overflow long before the exponent
itself becomes large.
"""

from __future__ import annotations

import math

import numpy as np


def arrhenius_rate(T, params):
    """Damage rate exp(ln A - E_a / (R T)) at absolute temperature T."""
    T = np.asarray(T, dtype=float)
    if np.any(T <= 0.0):
        raise ValueError("absolute temperature must be positive")
    exponent = math.log(params.A_freq) - params.E_a / (params.R_gas * T)
    return np.exp(exponent)


def damage_step(omega, T_new, dt, params):
    """Advance omega by dt * rate(T_new) nodewise; omega never decreases."""
    if dt < 0.0:
        raise ValueError("dt must be nonnegative")
    return np.asarray(omega, dtype=float) + dt * arrhenius_rate(T_new, params)
