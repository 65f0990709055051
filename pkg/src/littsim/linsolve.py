"""Conjugate gradient solver for the SPD systems produced by assembly."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class SolverBreakdown(RuntimeError):
    """NaN/Inf or loss of positive definiteness during the iteration."""


@dataclass
class SolveReport:
    iterations: int
    final_relative_residual: float
    converged: bool
    residual_history: list = field(default_factory=list, repr=False)


def cg_solve(matrix, rhs, x0=None, rtol=1e-10, max_iter=None):
    """Jacobi-preconditioned CG with minimal-residual smoothing.

    The smoothing step (Zhou & Walker style) returns the best residual
    along each update direction, which makes the reported residual norms
    non-increasing without changing the Krylov space. Deterministic given
    identical inputs; returns (x, SolveReport). Convergence means
    ||b - A x|| <= rtol ||b||. Hitting max_iter yields a non-converged
    report and leaves the decision to the caller; NaN/Inf raises
    SolverBreakdown.
    """
    b = np.asarray(rhs, dtype=float)
    n = b.shape[0]
    if max_iter is None:
        max_iter = 10 * n
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return np.zeros(n), SolveReport(0, 0.0, True, [0.0])

    inv_diag = 1.0 / matrix.diagonal()
    if not np.all(np.isfinite(inv_diag)):
        raise SolverBreakdown("matrix has zero or non-finite diagonal")

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    r = b - matrix @ x
    res = float(np.linalg.norm(r))
    history = [res / b_norm]
    if res <= rtol * b_norm:
        return x, SolveReport(0, history[-1], True, history)

    x_s = x.copy()  # smoothed iterate, carries the monotone residual
    r_s = r.copy()
    res_s = res

    z = inv_diag * r
    rz = float(np.dot(r, z))
    p = z.copy()
    for k in range(1, max_iter + 1):
        q = matrix @ p
        pq = float(np.dot(p, q))
        if not np.isfinite(pq) or pq <= 0.0:
            raise SolverBreakdown(
                f"CG breakdown at iteration {k}: p.Ap = {pq!r}")
        alpha = rz / pq
        x += alpha * p
        r -= alpha * q
        if not np.all(np.isfinite(r)):
            raise SolverBreakdown(f"non-finite residual at iteration {k}")
        # minimal-residual smoothing along the new update
        d = r - r_s
        dd = float(np.dot(d, d))
        if dd > 0.0:
            eta = -float(np.dot(r_s, d)) / dd
            x_s += eta * (x - x_s)
            r_s += eta * d
            res_s = float(np.linalg.norm(r_s))
        history.append(res_s / b_norm)
        if res_s <= rtol * b_norm:
            return x_s, SolveReport(k, history[-1], True, history)
        z = inv_diag * r
        rz_new = float(np.dot(r, z))
        p = z + (rz_new / rz) * p
        rz = rz_new
    return x_s, SolveReport(max_iter, history[-1], False, history)
