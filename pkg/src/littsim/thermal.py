"""Implicit-Euler bio-heat stepping with Robin boundary conditions.

One step solves

    (M(c_eff)/dt + K + R + P) T_new = M/dt T_old + b

with lumped mass M (rho * c_eff weighted), stiffness K (kappa), Robin
matrix R (alpha_cool on the applicator wall and tip, alpha_amb on the
ambient surface), perfusion P (xi_b, exactly absent ex vivo), and a load b
collecting volumetric sources, Robin exterior data, and the perfusion sink
reference temperature.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .assembly import assemble_boundary, assemble_stiffness, lumped_mass_diagonal
from .linsolve import cg_solve
from .mesh import TAG_AMB, TAG_COOL, TAG_RAD
from .vaporization import WATER, effective_capacity

_SECANT_MIN_DT = 1e-3  # K; below this the chord capacity degenerates


class HeatSolveError(RuntimeError):
    def __init__(self, report):
        self.report = report
        super().__init__(
            f"heat solve did not converge: {report.iterations} iterations, "
            f"relative residual {report.final_relative_residual:.3e}")


class HeatSystem:
    """Per-mesh operators of the bio-heat step; mass is rebuilt per call."""

    def __init__(self, mesh, params, settings):
        self.mesh = mesh
        self.params = params
        self.settings = settings
        stiffness = assemble_stiffness(mesh, params.kappa)
        robin_spec = [(TAG_RAD, params.alpha_cool, settings.T_cool),
                      (TAG_COOL, params.alpha_cool, settings.T_cool),
                      (TAG_AMB, params.alpha_amb, settings.T_amb)]
        present = [(tag, alpha, t_ext) for tag, alpha, t_ext in robin_spec
                   if tag in mesh.tags]
        robin, load = assemble_boundary(mesh,
                                        {tag: a for tag, a, _ in present})
        self.robin_load = np.zeros(mesh.n_nodes)
        for tag, _, t_ext in present:
            self.robin_load += load(tag, t_ext)
        self.volumes = mesh.lumped_volumes
        if params.xi_b > 0.0:
            perfusion_diag = lumped_mass_diagonal(mesh, params.xi_b)
        else:
            perfusion_diag = np.zeros(mesh.n_nodes)
        self.perfusion_load = perfusion_diag * params.T_b
        self.fixed = (stiffness + robin
                      + sp.diags(perfusion_diag, format="csr")).tocsr()

    def mass_diagonal(self, c_eff):
        return lumped_mass_diagonal(self.mesh, self.params.rho * np.asarray(c_eff))

    def step(self, T_old, c_eff, q_volumetric, x0=None):
        """Advance one implicit Euler step; returns (T_new, SolveReport)."""
        dt = self.settings.dt
        mass = self.mass_diagonal(c_eff)
        system = self.fixed + sp.diags(mass / dt, format="csr")
        rhs = ((mass / dt) * T_old + self.volumes * q_volumetric
               + self.robin_load + self.perfusion_load)
        T_new, report = cg_solve(system, rhs,
                                 x0=T_old if x0 is None else x0,
                                 rtol=self.settings.cg_rtol)
        if not report.converged:
            raise HeatSolveError(report)
        return T_new, report


def heat_step(T_old, c_eff, sources, params, settings, mesh, system=None):
    """One bio-heat step. sources is (q_rad, q_cond) in W/m^3 nodewise."""
    if system is None:
        system = HeatSystem(mesh, params, settings)
    q_rad, q_cond = sources
    return system.step(np.asarray(T_old, dtype=float),
                       np.asarray(c_eff, dtype=float), q_rad + q_cond)


def sweep_capacity(T_old, iterate, params, water=WATER):
    """Effective capacity for one fixed-point sweep.

    Uses the chord of the water density between the step start and the
    latest iterate where the two differ, and the pointwise derivative
    otherwise. The chord cannot step over the capacity spike, so the latent
    heat absorbed by the step matches the water-density drop; a node that
    jumps across the transition with the pointwise capacity would skip the
    spike entirely and the condensation feed would double-count its latent
    heat (which runs away on fine meshes).
    """
    pointwise = effective_capacity(iterate, params, water=water)
    delta = iterate - T_old
    wide = np.abs(delta) > _SECANT_MIN_DT
    if not np.any(wide):
        return pointwise
    with np.errstate(divide="ignore", invalid="ignore"):
        chord_slope = (water.density(iterate) - water.density(T_old)) / delta
    chord = params.c_p - (params.lambda_latent / params.rho) * chord_slope
    out = np.where(wide, chord, pointwise)
    return np.maximum(out, params.c_p)


def esh_outer_iteration(T_old, sources, params, settings, mesh, system=None,
                        water=WATER, tol_fixpoint=0.01, max_sweeps=5):
    """Fixed-point sweeps for the temperature-dependent effective capacity.

    Each sweep repeats the implicit step with the capacity evaluated at the
    latest iterate (the first sweep uses T_old, so max_sweeps=1 is the
    lagged-coefficient mode). Stops once the max nodal change drops below
    tol_fixpoint; returns (T_new, total_cg_iterations, sweeps, converged).
    """
    if system is None:
        system = HeatSystem(mesh, params, settings)
    q_rad, q_cond = sources
    q_total = q_rad + q_cond
    T_old = np.asarray(T_old, dtype=float)
    iterate = T_old
    total_iters = 0
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        c_eff = sweep_capacity(T_old, iterate, params, water=water)
        T_new, report = system.step(T_old, c_eff, q_total, x0=iterate)
        total_iters += report.iterations
        change = float(np.max(np.abs(T_new - iterate)))
        iterate = T_new
        if change <= tol_fixpoint:
            converged = True
            break
    return iterate, total_iters, sweeps, converged
