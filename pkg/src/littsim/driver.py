"""Per-step pipeline, run state, and all file outputs.

Step order (t -> t + dt): blend optics from the damage field, solve the
radiative problem at the new time, advance the bio-heat equation with the
lagged condensation source, run the model-specific phase handling, build
the condensation source for the next step, then accumulate damage.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import KELVIN_OFFSET, dump_config, with_window
from .damage import damage_step
from .mesh import TAG_RAD, build_mesh, integrate
from .radiative import LaserDrive, laser_power, optical_update, solve_p1
from .thermal import HeatSystem, esh_outer_iteration
from .vaporization import (CondensationSource, condensation_source,
                           enthalpy_clamp, esh_latent_power)

TIMESERIES_HEADER = ("t_s,T_probe_C,T_max_C,Qvap_W,Qcond_discarded_W,"
                     "H_total_J,omega_probe,cg_iters_heat,cg_iters_rad")
SNAPSHOT_HEADER = "node,r_m,z_m,T_C,phi_W_m2,omega,H_J_m3"


def _fmt(x):
    return repr(float(x))


@dataclass
class SimState:
    """Fields carried between steps of one run."""

    t: float
    T: np.ndarray
    omega: np.ndarray
    phi: np.ndarray
    q_rad: np.ndarray
    H: np.ndarray | None          # enthalpy model only
    cond: CondensationSource      # lagged source, applied next step


@dataclass
class RunResult:
    """Scalar per-step history of one run plus audit totals.

    Arrays have one leading entry for the initial state (t = 0).
    """

    case_label: str
    model: str
    times: np.ndarray
    probe_T_c: np.ndarray
    max_T_c: np.ndarray
    q_vap: np.ndarray
    discarded: np.ndarray
    h_total: np.ndarray
    omega_probe: np.ndarray
    iters_heat: np.ndarray
    iters_rad: np.ndarray
    balance_residuals: np.ndarray
    delta_h: np.ndarray           # clamp energy moved into H per step, J
    injected: np.ndarray          # dt * int Q_cond dx applied in the step, J
    cond_volumes: np.ndarray
    clipped_latent_total: float
    discarded_total: float
    esh_unconverged_sweeps: int
    run_dir: str | None = None
    final_T: np.ndarray | None = None
    final_H: np.ndarray | None = None
    final_omega: np.ndarray | None = None
    warnings: list = field(default_factory=list)


def _probe_evaluator(mesh, point):
    tri, bary = mesh.locate(point)
    idx = mesh.triangles[tri]
    return lambda values: float(np.dot(bary, values[idx]))


def _write_snapshot(path, mesh, T, phi, omega, H):
    n = mesh.n_nodes
    h_values = np.zeros(n) if H is None else H
    with open(path, "w", encoding="utf-8", newline="\n") as out:
        out.write(SNAPSHOT_HEADER + "\n")
        for i in range(n):
            out.write(",".join([
                str(i), _fmt(mesh.nodes[i, 0]), _fmt(mesh.nodes[i, 1]),
                _fmt(T[i] - KELVIN_OFFSET), _fmt(phi[i]), _fmt(omega[i]),
                _fmt(h_values[i]),
            ]) + "\n")


def run_case(case, params, settings, mesh=None, out_dir=None, run_dir=None,
             write_outputs=True):
    """Simulate one case; returns a RunResult and (optionally) writes files.

    Outputs land in <out_dir>/<label>_<model>/ unless run_dir overrides the
    full path: timeseries.csv (one row per step plus the initial state),
    field snapshots every snapshot_every steps, and run_metadata.txt with
    the resolved configuration.
    """
    model = settings.model
    if mesh is None:
        mesh = build_mesh(settings)
    dt = settings.dt
    n_steps = int(math.ceil(case.t_end / dt - 1e-9))
    probe = _probe_evaluator(mesh, (case.d_r, case.d_z))
    volumes = mesh.lumped_volumes
    area_rad = mesh.boundary_measure(TAG_RAD)
    window = (settings.T_cond_low, settings.T_cond_high)
    heat = HeatSystem(mesh, params, settings)
    c_p_field = np.full(mesh.n_nodes, params.c_p)

    state = SimState(
        t=0.0,
        T=np.full(mesh.n_nodes, settings.T_init),
        omega=np.zeros(mesh.n_nodes),
        phi=np.zeros(mesh.n_nodes),
        q_rad=np.zeros(mesh.n_nodes),
        H=np.zeros(mesh.n_nodes) if model == "enthalpy" else None,
        cond=CondensationSource.zero(mesh.n_nodes, window),
    )

    size = n_steps + 1
    out = RunResult(
        case_label=case.label, model=model,
        times=np.zeros(size), probe_T_c=np.zeros(size), max_T_c=np.zeros(size),
        q_vap=np.zeros(size), discarded=np.zeros(size), h_total=np.zeros(size),
        omega_probe=np.zeros(size), iters_heat=np.zeros(size, dtype=int),
        iters_rad=np.zeros(size, dtype=int), balance_residuals=np.zeros(size),
        delta_h=np.zeros(size), injected=np.zeros(size),
        cond_volumes=np.zeros(size), clipped_latent_total=0.0,
        discarded_total=0.0, esh_unconverged_sweeps=0,
    )

    if run_dir is None and write_outputs:
        root = out_dir if out_dir is not None else settings.output_dir
        run_dir = os.path.join(root, f"{case.label}_{model}")
    if write_outputs:
        os.makedirs(run_dir, exist_ok=True)
        out.run_dir = run_dir
        series = open(os.path.join(run_dir, "timeseries.csv"), "w",
                      encoding="utf-8", newline="\n")
    else:
        series = None

    def log_row(k):
        out.times[k] = k * dt
        out.probe_T_c[k] = probe(state.T) - KELVIN_OFFSET
        out.max_T_c[k] = float(state.T.max()) - KELVIN_OFFSET
        out.h_total[k] = 0.0 if state.H is None else integrate(mesh, state.H)
        out.omega_probe[k] = probe(state.omega)
        if series is not None:
            series.write(",".join([
                _fmt(out.times[k]), _fmt(out.probe_T_c[k]), _fmt(out.max_T_c[k]),
                _fmt(out.q_vap[k]), _fmt(out.discarded[k]), _fmt(out.h_total[k]),
                _fmt(out.omega_probe[k]), str(int(out.iters_heat[k])),
                str(int(out.iters_rad[k])),
            ]) + "\n")

    def snapshot(k):
        if series is None:
            return
        if k % settings.snapshot_every == 0 or k == n_steps:
            path = os.path.join(run_dir, f"fields_step{k:06d}.csv")
            _write_snapshot(path, mesh, state.T, state.phi, state.omega, state.H)

    try:
        if series is not None:
            series.write(TIMESERIES_HEADER + "\n")
        log_row(0)
        snapshot(0)
        last_q_app = None
        p1 = None
        for k in range(1, n_steps + 1):
            t_new = k * dt
            q_app = laser_power(t_new, case, settings.beta_q)
            resolve = ((k - 1) % settings.radiation_every == 0
                       or q_app != last_q_app or p1 is None)
            if resolve:
                optics = optical_update(params, state.omega)
                drive = LaserDrive(q_app=q_app, area_rad=area_rad)
                p1 = solve_p1(mesh, optics, drive, settings.cg_rtol,
                              x0=state.phi)
                state.phi = p1.phi
                state.q_rad = p1.q_rad
                last_q_app = q_app
            out.iters_rad[k] = p1.report.iterations if resolve else 0
            out.balance_residuals[k] = p1.balance_residual

            T_start = state.T
            sources = (state.q_rad, state.cond.q_cond)
            out.injected[k] = dt * integrate(mesh, state.cond.q_cond)
            if model == "esh":
                T_new, iters, sweeps, converged = esh_outer_iteration(
                    T_start, sources, params, settings, mesh, system=heat)
                if not converged:
                    out.esh_unconverged_sweeps += 1
                out.iters_heat[k] = iters
            else:
                T_new, report = heat.step(T_start, c_p_field,
                                          sources[0] + sources[1])
                out.iters_heat[k] = report.iterations

            if model == "enthalpy":
                T_new, state.H, dh = enthalpy_clamp(T_new, state.H, params,
                                                    volumes)
                out.delta_h[k] = dh
                q_vap = dh / dt
            elif model == "esh":
                q_vap, clipped = esh_latent_power(T_start, T_new, dt, params,
                                                  volumes)
                out.clipped_latent_total += clipped * dt
            else:
                q_vap = 0.0
            state.T = T_new
            out.q_vap[k] = q_vap

            if model != "none":
                state.cond = condensation_source(mesh, state.T, q_vap, window)
                out.discarded[k] = state.cond.discarded_power
                out.cond_volumes[k] = state.cond.volume
                out.discarded_total += state.cond.discarded_power * dt

            state.omega = damage_step(state.omega, state.T, dt, params)
            state.t = t_new
            log_row(k)
            snapshot(k)
            if series is not None and k % 50 == 0:
                series.flush()
    finally:
        if series is not None:
            series.close()

    out.final_T = state.T
    out.final_H = state.H
    out.final_omega = state.omega
    if out.esh_unconverged_sweeps:
        out.warnings.append(
            f"esh fixed point hit the sweep cap in "
            f"{out.esh_unconverged_sweeps} of {n_steps} steps")
    if write_outputs:
        _write_metadata(run_dir, case, params, settings, mesh, n_steps, out)
    return out


def _write_metadata(run_dir, case, params, settings, mesh, n_steps, result):
    lines = [dump_config(params, settings)]
    lines.append("[case]")
    lines.append(f"label = {case.label}")
    lines.append(f"q_hat = {_fmt(case.q_hat)}")
    lines.append(f"flow_rate = {_fmt(case.flow_rate)}")
    lines.append(f"t_on = {_fmt(case.t_on)}")
    lines.append(f"t_off = {_fmt(case.t_off)}")
    lines.append(f"t_end = {_fmt(case.t_end)}")
    lines.append(f"d_r_mm = {_fmt(case.d_r * 1000.0)}")
    lines.append(f"d_z_mm = {_fmt(case.d_z * 1000.0)}")
    lines.append("")
    lines.append("[meta]")
    lines.append(f"version = {__version__}")
    lines.append("preconditioner = jacobi")
    lines.append(f"n_nodes = {mesh.n_nodes}")
    lines.append(f"n_triangles = {mesh.n_triangles}")
    lines.append(f"n_steps = {n_steps}")
    lines.append("")
    lines.append("[audit]")
    lines.append(f"max_balance_residual = {_fmt(result.balance_residuals.max())}")
    lines.append(f"clipped_latent_J = {_fmt(result.clipped_latent_total)}")
    lines.append(f"discarded_condensation_J = {_fmt(result.discarded_total)}")
    lines.append(f"esh_unconverged_sweeps = {result.esh_unconverged_sweeps}")
    for warning in result.warnings:
        lines.append(f"warning = {warning}")
    with open(os.path.join(run_dir, "run_metadata.txt"), "w",
              encoding="utf-8", newline="\n") as out:
        out.write("\n".join(lines) + "\n")


def _window_label(window_k):
    lo = window_k[0] - KELVIN_OFFSET
    hi = window_k[1] - KELVIN_OFFSET
    return f"tcond{lo:g}_{hi:g}"


def run_sensitivity(case, params, settings, windows, mesh=None, out_dir=None,
                    write_outputs=True):
    """One full run per condensation window on a shared mesh.

    windows is a list of (T_low, T_high) pairs in Kelvin, at least two.
    Writes each run under an indexed window directory plus a combined
    comparison CSV of the probe temperatures.
    """
    if len(windows) < 2:
        raise ValueError("need at least two condensation windows")
    if mesh is None:
        mesh = build_mesh(settings)
    root = out_dir if out_dir is not None else settings.output_dir
    results = []
    for idx, window in enumerate(windows):
        sub_settings = with_window(settings, window[0], window[1])
        run_dir = None
        if write_outputs:
            run_dir = os.path.join(
                root, f"{case.label}_{settings.model}_w{idx}_"
                      f"{_window_label(window)}")
        results.append(run_case(case, params, sub_settings, mesh=mesh,
                                run_dir=run_dir,
                                write_outputs=write_outputs))
    if write_outputs:
        os.makedirs(root, exist_ok=True)
        path = os.path.join(root, f"{case.label}_{settings.model}_sweep.csv")
        header = ["t_s"] + [f"T_probe_C_w{idx}_{_window_label(w)}"
                            for idx, w in enumerate(windows)]
        with open(path, "w", encoding="utf-8", newline="\n") as out:
            out.write(",".join(header) + "\n")
            for row in range(len(results[0].times)):
                cells = [_fmt(results[0].times[row])]
                cells += [_fmt(res.probe_T_c[row]) for res in results]
                out.write(",".join(cells) + "\n")
    return results
