import numpy as np
import pytest
import scipy.sparse as sp

import hodge3d as h
from hodge3d.assembly import SparseSymMatrix
from hodge3d.errors import ConvergenceError, InconsistentSystemError


def _identity(n):
    return SparseSymMatrix(csr=sp.identity(n, format="csr"))


def test_identity_single_iteration():
    rng = np.random.default_rng(0)
    b = rng.standard_normal(50)
    x, rep = h.solve_spsd(_identity(50), b)
    np.testing.assert_allclose(x, b, rtol=1e-14)
    assert rep.converged
    assert rep.iterations == 1


def test_zero_rhs():
    x, rep = h.solve_spsd(_identity(10), np.zeros(10))
    assert (x == 0.0).all()
    assert rep.converged and rep.iterations == 0
    assert rep.relative_residual == 0.0


def test_exact_recovery_interior_face(two_tet):
    # X = grad(psi) of the single interior face dof; the unconstrained
    # solve recovers the coefficient up to the constant kernel
    tables, _, dof_face = h.build_element_tables(two_tet)
    A = h.assemble_gram(two_tet, tables, dof_face)
    k = int(np.flatnonzero(dof_face.interior_mask)[0])
    e = np.zeros(dof_face.n_dofs)
    e[k] = 1.0
    X = h.reconstruct(two_tet, tables, dof_face, e)
    b = h.assemble_rhs(X, tables, dof_face)
    u, rep = h.solve_spsd(A, b)
    assert rep.converged
    Y = h.reconstruct(two_tet, tables, dof_face, u)
    err = np.sqrt(h.sq_norm(h.combine(Y, X, 1.0, -1.0)) / h.sq_norm(X))
    assert err <= 1e-10
    shift = u - e
    assert np.abs(shift - shift.mean()).max() <= 1e-9


def test_kernel_invariance_of_reconstruction(two_tet):
    # adding a constant vector (gradient-system kernel) to the coefficients
    # leaves the reconstructed field unchanged
    tables, _, dof_face = h.build_element_tables(two_tet)
    rng = np.random.default_rng(5)
    c = rng.standard_normal(dof_face.n_dofs)
    Y1 = h.reconstruct(two_tet, tables, dof_face, c)
    Y2 = h.reconstruct(two_tet, tables, dof_face, c + 3.7)
    scale = np.abs(Y1.vectors).max()
    assert np.abs(Y2.vectors - Y1.vectors).max() <= 1e-12 * scale


def test_inconsistent_rhs_rejected(two_tet):
    tables, _, dof_face = h.build_element_tables(two_tet)
    A = h.assemble_gram(two_tet, tables, dof_face)
    kern = np.ones(dof_face.n_dofs)      # constants span the kernel
    with pytest.raises(InconsistentSystemError):
        h.solve_spsd(A, kern.copy(), kernel=[kern])


def test_consistent_rhs_passes_kernel_check(two_tet):
    tables, _, dof_face = h.build_element_tables(two_tet)
    A = h.assemble_gram(two_tet, tables, dof_face)
    X = h.random_field(two_tet, seed=2)
    b = h.assemble_rhs(X, tables, dof_face)
    kern = np.ones(dof_face.n_dofs)
    x, rep = h.solve_spsd(A, b, kernel=[kern])
    assert rep.converged


def test_nonconvergence_reported_not_raised(ball_coarse):
    tables, dof_edge, _ = h.build_element_tables(ball_coarse)
    A = h.assemble_gram(ball_coarse, tables, dof_edge, constrained=True)
    X = h.random_field(ball_coarse, seed=3)
    b = h.assemble_rhs(X, tables, dof_edge, constrained=True)
    x, rep = h.solve_spsd(A, b, max_iter=2)
    assert not rep.converged
    assert rep.relative_residual > 1e-12


def test_engine_raises_convergence_error_with_stage(ball_coarse):
    eng = h.HodgeDecomposer(ball_coarse, max_iter=1)
    X = h.random_field(ball_coarse, seed=3)
    with pytest.raises(ConvergenceError) as exc:
        eng.decompose(X, "FD")
    assert exc.value.stage == "curl_constrained"


def test_projection_idempotent_through_solver(torus_engine):
    mesh = torus_engine.mesh
    X = h.random_field(mesh, seed=14)
    P1 = torus_engine.project_grad(X, constrained=False)
    P2 = torus_engine.project_grad(P1, constrained=False)
    diff = np.sqrt(h.sq_norm(h.combine(P2, P1, 1.0, -1.0)))
    assert diff <= 1e-10 * np.sqrt(h.sq_norm(P1))
    C1 = torus_engine.project_curl(X, constrained=True)
    C2 = torus_engine.project_curl(C1, constrained=True)
    diff = np.sqrt(h.sq_norm(h.combine(C2, C1, 1.0, -1.0)))
    assert diff <= 1e-10 * np.sqrt(h.sq_norm(C1))


def test_bad_inputs():
    A = _identity(4)
    with pytest.raises(ValueError):
        h.solve_spsd(A, np.zeros(3))
    with pytest.raises(ValueError):
        h.solve_spsd(A, np.zeros(4), tol=0.0)
