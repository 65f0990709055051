"""Built-in self checks for the `litt verify` command.

Three families: water-spline knot continuity, a melting-front oracle
against the analytic similarity solution, and the conservation audits on
a truncated high-power run.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .config import MaterialParams, RunSettings, T_BOIL, get_case
from .driver import run_case
from .mesh import TAG_AMB, TAG_COOL, structured_mesh
from .thermal import HeatSystem
from .vaporization import WATER, WATER_FRACTION, enthalpy_cap, enthalpy_clamp


def stefan_zeta(stefan_number, tol=1e-13):
    """Root of zeta exp(zeta^2) erf(zeta) = St / sqrt(pi), by bisection."""
    target = stefan_number / math.sqrt(math.pi)

    def f(z):
        return z * math.exp(z * z) * math.erf(z) - target

    lo, hi = 1e-12, 10.0
    if f(lo) > 0.0 or f(hi) < 0.0:
        raise ValueError("Stefan number outside the bracketed range")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def run_stefan_strip(dz, dt, t_end, t_hot_c=150.0, length=0.04,
                     r0=1.0, width=0.001):
    """Melting-front configuration: 1D strip, fixed hot face, enthalpy model.

    The strip sits at a large radius so the cylindrical weight is constant
    to 0.1%; the hot face is a Robin condition with a huge coefficient.
    Radiation and condensation are off. Returns a dict with the numeric
    front position (from the absorbed latent enthalpy) and the run inputs.
    """
    params = MaterialParams(alpha_cool=1e8, alpha_amb=0.0)
    settings = RunSettings(model="enthalpy", T_init=T_BOIL,
                           T_cool=t_hot_c + 273.15, dt=dt)

    tol = 1e-9 * length

    def tag_edge(rm, zm):
        return TAG_COOL if abs(zm) < tol else TAG_AMB

    n_z = max(2, int(round(length / dz)) + 1)
    mesh = structured_mesh([r0, r0 + width], np.linspace(0.0, length, n_z),
                           tag_edge)
    heat = HeatSystem(mesh, params, settings)
    c_p = np.full(mesh.n_nodes, params.c_p)
    zero = np.zeros(mesh.n_nodes)

    T = np.full(mesh.n_nodes, settings.T_init)
    H = np.zeros(mesh.n_nodes)
    n_steps = int(math.ceil(t_end / dt - 1e-9))
    for _ in range(n_steps):
        T, _ = heat.step(T, c_p, zero)
        T, H, _ = enthalpy_clamp(T, H, params, mesh.lumped_volumes)

    cross_area = mesh.lumped_volumes.sum() / length
    absorbed = float(np.dot(mesh.lumped_volumes, H))
    front = absorbed / (enthalpy_cap(params) * cross_area)
    return {
        "front_numeric": front,
        "t_end": n_steps * dt,
        "alpha": params.kappa / (params.rho * params.c_p),
        "stefan_number": params.c_p * (settings.T_cool - T_BOIL)
                         / (WATER_FRACTION * params.lambda_latent),
    }


def check_knots():
    """Spline value/slope must match both exponential branches at the knots."""
    failures = []
    for knot, branch_v, branch_s in (
            (WATER.t_lo, WATER._low, WATER._low_slope),
            (WATER.t_hi, WATER._high, WATER._high_slope)):
        dv = abs(WATER._spline(knot) - branch_v(knot)) / abs(branch_v(knot))
        ds = abs(WATER._spline_slope(knot) - branch_s(knot)) / abs(branch_s(knot))
        if dv > 1e-9 or ds > 1e-9:
            failures.append(f"knot {knot:g} C: value defect {dv:.2e}, "
                            f"slope defect {ds:.2e}")
    grid = np.arange(0.0, 200.0 + 1e-9, 0.01) + 273.15
    slopes = WATER.density_slope(grid)
    if np.any(slopes > 0.0):
        failures.append("water density is not monotone on [0, 200] C")
    return failures


def check_stefan():
    run = run_stefan_strip(dz=0.0005, dt=1.0, t_end=1200.0)
    zeta = stefan_zeta(run["stefan_number"])
    exact = 2.0 * zeta * math.sqrt(run["alpha"] * run["t_end"])
    err = abs(run["front_numeric"] - exact) / exact
    if err > 0.05:
        return [f"front error {err:.1%} exceeds 5% "
                f"(numeric {run['front_numeric']:.4e}, exact {exact:.4e})"]
    return []


def check_conservation():
    """Step audit and radiative balance on a truncated high-power run."""
    case = get_case("P34F47")
    case = replace(case, t_off=580.0, t_end=600.0)
    settings = RunSettings(model="enthalpy")
    result = run_case(case, MaterialParams(), settings, write_outputs=False)
    failures = []
    worst = float(result.balance_residuals.max())
    if worst > 1e-6:
        failures.append(f"radiative balance residual {worst:.2e} exceeds 1e-6")
    scale = max(result.delta_h.max(), 1.0)
    vaporized = False
    for k in range(1, len(result.times) - 1):
        if result.delta_h[k] > 0.0:
            vaporized = True
        if result.cond_volumes[k] > 0.0 and result.discarded[k] == 0.0:
            gap = abs(result.injected[k + 1] - result.delta_h[k])
            if gap > 1e-9 * max(result.delta_h[k], 1e-12 * scale):
                failures.append(
                    f"step {k}: injected {result.injected[k + 1]:.6e} J vs "
                    f"clamp {result.delta_h[k]:.6e} J")
                break
    if not vaporized:
        failures.append("no vaporization occurred; conservation check is vacuous")
    return failures


def run_all():
    """Run every check; returns a list of (name, ok, details)."""
    out = []
    for name, check in (("water-spline-knots", check_knots),
                        ("stefan-front-oracle", check_stefan),
                        ("conservation-audits", check_conservation)):
        failures = check()
        out.append((name, not failures, failures))
    return out
