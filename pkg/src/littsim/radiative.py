"""Quasi-stationary radiative diffusion and the volumetric heat source.

The radiative energy phi solves -div(D grad phi) + mu_a phi = 0 with a
uniform inflow q_app / area(rad) on the diffuser surface, a half-range
(Marshak) outflow weight of 0.5 on the ambient surface, and a reflecting
condition on the cooled applicator wall. The heat source is mu_a * phi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import (assemble_boundary, assemble_mass_lumped,
                       assemble_stiffness, boundary_measure_weights)
from .linsolve import SolveReport, cg_solve
from .mesh import TAG_AMB, TAG_RAD

MARSHAK_AMB_WEIGHT = 0.5
_OMEGA_CAP = 700.0  # blend factor is coagulated beyond this, avoids underflow


class RadiativeSolveError(RuntimeError):
    def __init__(self, report):
        self.report = report
        super().__init__(
            f"radiative solve did not converge: {report.iterations} iterations, "
            f"relative residual {report.final_relative_residual:.3e}")


@dataclass(frozen=True)
class OpticalFields:
    """Nodal optical coefficients and the derived diffusion length."""

    mu_a: np.ndarray   # 1/m
    mu_s: np.ndarray   # 1/m
    g: np.ndarray      # dimensionless
    D: np.ndarray      # m, equals 1 / (3 (mu_a + (1 - g) mu_s))


@dataclass(frozen=True)
class LaserDrive:
    q_app: float     # power entering tissue, W
    area_rad: float  # surface measure of the diffuser span, m^2

    def __post_init__(self):
        if self.q_app < 0.0 or self.area_rad <= 0.0:
            raise ValueError("need q_app >= 0 and area_rad > 0")


def laser_power(t, case, beta_q):
    """Power entering the tissue: (1 - beta_q) q_hat while the laser is on."""
    if case.t_on <= t <= case.t_off:
        return (1.0 - beta_q) * case.q_hat
    return 0.0


def diffusion_length(mu_a, mu_s, g):
    return 1.0 / (3.0 * (mu_a + (1.0 - g) * mu_s))


def optical_update(params, omega):
    """Blend native and coagulated coefficients through the damage field."""
    w = np.minimum(np.asarray(omega, dtype=float), _OMEGA_CAP)
    if np.any(w < 0.0):
        raise ValueError("damage must be nonnegative")
    f = -np.expm1(-w)  # 1 - exp(-omega), accurate for small omega
    mu_a = params.mu_a_native + f * (params.mu_a_coag - params.mu_a_native)
    mu_s = params.mu_s_native + f * (params.mu_s_coag - params.mu_s_native)
    g = params.g_native + f * (params.g_coag - params.g_native)
    return OpticalFields(mu_a=mu_a, mu_s=mu_s, g=g,
                         D=diffusion_length(mu_a, mu_s, g))


@dataclass
class P1Solution:
    phi: np.ndarray        # radiative energy, W/m^2
    q_rad: np.ndarray      # heat source mu_a phi, W/m^3
    report: SolveReport
    absorbed_power: float  # int mu_a phi dx in assembly quadrature, W
    boundary_outflow: float  # Marshak loss over the ambient surface, W
    q_app: float

    @property
    def balance_residual(self):
        """Relative defect of absorbed + outflow = q_app (0 when idle)."""
        if self.q_app == 0.0:
            return abs(self.absorbed_power + self.boundary_outflow)
        return abs(self.absorbed_power + self.boundary_outflow
                   - self.q_app) / self.q_app


def solve_p1(mesh, optics, drive, rtol, x0=None, max_iter=None):
    """Solve the radiative diffusion problem for the current optics."""
    stiffness = assemble_stiffness(mesh, optics.D)
    absorption = assemble_mass_lumped(mesh, optics.mu_a)
    marshak, _ = assemble_boundary(mesh, {TAG_AMB: MARSHAK_AMB_WEIGHT})
    system = stiffness + absorption + marshak

    inflow = boundary_measure_weights(mesh, TAG_RAD)
    rhs = (drive.q_app / drive.area_rad) * inflow

    phi, report = cg_solve(system, rhs, x0=x0, rtol=rtol, max_iter=max_iter)
    if not report.converged:
        raise RadiativeSolveError(report)
    absorbed = float(np.dot(absorption.diagonal(), phi))
    outflow = float(np.dot(marshak.diagonal(), phi))
    return P1Solution(phi=phi, q_rad=optics.mu_a * phi, report=report,
                      absorbed_power=absorbed, boundary_outflow=outflow,
                      q_app=drive.q_app)
