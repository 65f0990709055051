import numpy as np
import pytest
import scipy.sparse as sp

from littsim.assembly import assemble_mass_lumped, assemble_stiffness
from littsim.config import RunSettings
from littsim.linsolve import SolverBreakdown, cg_solve
from littsim.mesh import build_mesh


def test_identity_converges_in_one_iteration():
    A = sp.identity(40, format="csr")
    b = np.linspace(-3.0, 5.0, 40)
    x, report = cg_solve(A, b, rtol=1e-12)
    assert report.converged and report.iterations == 1
    assert np.allclose(x, b, atol=1e-12)


def test_diagonal_system_known_solution():
    n = 25
    A = sp.diags(np.arange(1.0, n + 1.0), format="csr")
    b = A @ np.ones(n)
    x, report = cg_solve(A, b, rtol=1e-12)
    assert report.converged
    assert np.allclose(x, 1.0, rtol=1e-10)


def test_two_by_two_hand_solution():
    A = sp.csr_matrix(np.array([[4.0, 1.0], [1.0, 3.0]]))
    b = np.array([1.0, 2.0])
    x, report = cg_solve(A, b, rtol=1e-13)
    assert report.converged
    assert x == pytest.approx([1.0 / 11.0, 7.0 / 11.0], rel=1e-12)


def test_exact_initial_guess_needs_zero_iterations():
    A = sp.csr_matrix(np.array([[4.0, 1.0], [1.0, 3.0]]))
    x_exact = np.array([1.0 / 11.0, 7.0 / 11.0])
    x, report = cg_solve(A, A @ x_exact, x0=x_exact, rtol=1e-10)
    assert report.converged and report.iterations == 0
    assert np.array_equal(x, x_exact)


def test_zero_rhs_short_circuits():
    A = sp.identity(5, format="csr")
    x, report = cg_solve(A, np.zeros(5), x0=np.ones(5))
    assert report.converged and report.iterations == 0
    assert np.array_equal(x, np.zeros(5))


def test_residual_monotone_on_assembled_system():
    mesh = build_mesh(RunSettings(mesh_h=0.006))
    A = (assemble_stiffness(mesh, np.full(mesh.n_nodes, 0.5))
         + assemble_mass_lumped(mesh, np.full(mesh.n_nodes, 50.0)))
    rng = np.random.default_rng(7)
    b = rng.standard_normal(mesh.n_nodes)
    _, report = cg_solve(A, b, rtol=1e-11)
    assert report.converged
    history = np.asarray(report.residual_history)
    assert np.all(np.diff(history) <= 1e-12)
    assert report.final_relative_residual <= 1e-11


def test_max_iter_reports_non_convergence():
    mesh = build_mesh(RunSettings(mesh_h=0.008))
    A = assemble_stiffness(mesh, np.ones(mesh.n_nodes)) \
        + assemble_mass_lumped(mesh, np.full(mesh.n_nodes, 1e-6))
    b = np.ones(mesh.n_nodes)
    x, report = cg_solve(A, b, rtol=1e-14, max_iter=2)
    assert not report.converged
    assert report.iterations == 2
    assert report.final_relative_residual > 1e-14


def test_nan_raises_breakdown():
    A = sp.identity(3, format="csr")
    with pytest.raises(SolverBreakdown):
        cg_solve(A, np.array([1.0, np.nan, 0.0]))


def test_indefinite_matrix_raises_breakdown():
    A = sp.csr_matrix(np.array([[1.0, 2.0], [2.0, 1.0]]))  # eigenvalues 3, -1
    with pytest.raises(SolverBreakdown):
        cg_solve(A, np.array([0.0, 1.0]))
