import itertools

import numpy as np
import pytest

from numerics import (
    ConvergenceError, EntryConstraint, LinearProgram, SymMatrix, block_diagonal,
    cholesky_reduce, dykstra_feasible, gram_factor, is_psd, jacobi_eigen,
    min_eigenvalue, nearest_rank_projection, project_psd, simplex_solve,
)


def border_matrix(n, t, edge_value):
    """(n+1)x(n+1) completion for K_n: p00 = 1, border and diagonal t, edges edge_value."""
    p = np.full((n + 1, n + 1), edge_value)
    p[0, :] = p[:, 0] = t
    p[0, 0] = 1.0
    np.fill_diagonal(p[1:, 1:], t)
    return SymMatrix(p)


def vertex_minimum(c, a, b):
    """Smallest c.x over basic feasible solutions of a x = b, x >= 0, or None."""
    m, n = a.shape
    best = None
    for cols in itertools.combinations(range(n), m):
        basis = a[:, cols]
        if np.linalg.cond(basis) > 1e10:
            continue
        x_b = np.linalg.solve(basis, b)
        if x_b.min() < -1e-9:
            continue
        value = float(c[list(cols)] @ x_b)
        best = value if best is None else min(best, value)
    return best


# ============== SymMatrix ==============

def test_symmatrix_mirrors_and_is_read_only():
    s = SymMatrix([[1.0, 2.0], [2.0 + 1e-12, 3.0]])
    assert s[1, 0] == s[0, 1] == 2.0
    with pytest.raises(ValueError):
        s.entries[0, 0] = 5.0


def test_symmatrix_rejects_asymmetric():
    with pytest.raises(ValueError, match="not symmetric"):
        SymMatrix([[1.0, 2.0], [0.0, 1.0]])


# ============== Eigenvalues ==============

@pytest.mark.parametrize("entries,expected", [
    (np.diag([3.0, 1.0, 2.0]), [1.0, 2.0, 3.0]),
    (np.ones((2, 2)), [0.0, 2.0]),
    ((1 / 3) * np.eye(3) - (1 / 9) * np.ones((3, 3)), [0.0, 1 / 3, 1 / 3]),
])
def test_jacobi_eigen_known_spectra(entries, expected):
    values, vectors = jacobi_eigen(SymMatrix(entries))
    assert values == pytest.approx(expected, abs=1e-10)
    assert vectors.T @ vectors == pytest.approx(np.eye(len(expected)), abs=1e-10)


def test_jacobi_reconstruction(rng):
    a = rng.standard_normal((6, 6))
    s = SymMatrix(a + a.T)
    values, vectors = jacobi_eigen(s)
    assert np.all(np.diff(values) >= 0)
    rebuilt = vectors @ np.diag(values) @ vectors.T
    assert np.linalg.norm(rebuilt - s.entries) <= 10 * 1e-12 * s.frobenius_norm() + 1e-12
    assert values == pytest.approx(np.linalg.eigvalsh(s.entries), abs=1e-9)


@pytest.mark.slow
def test_jacobi_reconstruction_random_dims():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        dim = int(rng.integers(2, 13))
        a = rng.standard_normal((dim, dim))
        s = SymMatrix(a + a.T)
        values, vectors = jacobi_eigen(s)
        assert np.abs(vectors.T @ vectors - np.eye(dim)).max() <= 1e-9
        rebuilt = vectors @ np.diag(values) @ vectors.T
        assert np.linalg.norm(rebuilt - s.entries) <= 10 * 1e-12 * s.frobenius_norm() + 1e-12


def test_jacobi_sweep_cap():
    a = np.array([[1.0, 0.5, 0.2], [0.5, 2.0, 0.3], [0.2, 0.3, 3.0]])
    with pytest.raises(ConvergenceError):
        jacobi_eigen(SymMatrix(a), tol=1e-15, max_sweeps=0)


def test_psd_checks():
    assert min_eigenvalue(SymMatrix.identity(3)) == pytest.approx(1.0)
    assert is_psd(SymMatrix.identity(3))
    assert not is_psd(SymMatrix.diag([1.0, -0.5]), tol=1e-9)


def test_k5_border_matrix_on_the_psd_boundary():
    # edge value (n t^2 - t) / (n - 1) at t = 0.4
    s = border_matrix(5, 0.4, (5 * 0.16 - 0.4) / 4)
    assert is_psd(s)
    assert min_eigenvalue(s) == pytest.approx(0.0, abs=1e-9)


# ============== Cholesky reduction ==============

def test_cholesky_reduce_identity():
    assert cholesky_reduce(SymMatrix.identity(3)) == SymMatrix.identity(2)


def test_cholesky_reduce_border_matrix():
    t, edge = 0.4, 0.1
    q = cholesky_reduce(border_matrix(5, t, edge)).entries
    assert np.diag(q) == pytest.approx(np.full(5, t - t * t))
    off = q[~np.eye(5, dtype=bool)]
    assert off == pytest.approx(np.full(20, edge - t * t))


def test_cholesky_reduce_rank_one():
    v = np.array([2.0, 1.0, -3.0])
    assert cholesky_reduce(SymMatrix(np.outer(v, v))).entries == pytest.approx(np.zeros((2, 2)), abs=1e-12)


def test_cholesky_reduce_bad_pivot():
    with pytest.raises(ValueError, match="Pivot"):
        cholesky_reduce(SymMatrix.diag([0.0, 1.0]))


# ============== Projections ==============

def test_project_psd_clips_negative_eigenvalues(rng):
    assert project_psd(SymMatrix.diag([2.0, -1.0])).entries == pytest.approx(np.diag([2.0, 0.0]))
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    a = SymMatrix(q @ np.diag([-2.0, -0.5, 1.0, 3.0]) @ q.T)
    projected = project_psd(a)
    assert np.linalg.eigvalsh(projected.entries) == pytest.approx([0.0, 0.0, 1.0, 3.0], abs=1e-10)


def test_project_psd_fixed_point():
    s = border_matrix(3, 1 / 3, 0.0)
    assert project_psd(s).entries == pytest.approx(s.entries, abs=1e-12)


def test_gram_factor_reproduces_matrix():
    s = border_matrix(5, 0.5, 0.1875)
    x = gram_factor(s)
    assert x @ x.T == pytest.approx(s.entries, abs=1e-10)
    with pytest.raises(ValueError):
        gram_factor(SymMatrix.diag([1.0, -1.0]))


def test_nearest_rank_projection(rng):
    a = rng.standard_normal((5, 5))
    p = nearest_rank_projection(a + a.T, 2)
    assert p @ p == pytest.approx(p, abs=1e-10)
    assert np.trace(p) == pytest.approx(2.0)


def test_block_diagonal():
    out = block_diagonal([np.eye(2), 3.0 * np.ones((1, 1))])
    assert out.shape == (3, 3)
    assert out[2, 2] == 3.0
    assert out[0, 2] == 0.0


# ============== Dykstra ==============

def _completion_constraints(n, t, edge_value):
    return [
        EntryConstraint(((0, 0),), 1.0),
        EntryConstraint(tuple((0, v) for v in range(1, n + 1)) + tuple((v, v) for v in range(1, n + 1)), t),
        EntryConstraint(tuple((v, w) for v in range(1, n + 1) for w in range(v + 1, n + 1)), edge_value),
    ]


def test_dykstra_closed_form_completion_is_feasible():
    result = dykstra_feasible(_completion_constraints(3, 1 / 3, 0.0), SymMatrix.identity(4))
    assert result.feasible
    assert result.witness.entries == pytest.approx(border_matrix(3, 1 / 3, 0.0).entries, abs=1e-12)


def test_dykstra_edge_value_above_marginal_is_infeasible():
    constraints = [
        EntryConstraint(((0, 0),), 1.0),
        EntryConstraint(((0, 1), (0, 2), (1, 1), (2, 2)), 0.5),
        EntryConstraint(((1, 2),), 0.6),
    ]
    result = dykstra_feasible(constraints, SymMatrix.identity(3), max_iter=2000)
    assert not result.feasible
    assert result.status == "infeasible-at-tolerance"


def test_dykstra_empty_constraints():
    result = dykstra_feasible([], SymMatrix.identity(3))
    assert result.feasible
    assert result.iterations == 0


def test_dykstra_free_entries_found():
    # 3x3 with diagonal 1 and (0,1) = 0.9: the free entries must be filled in
    constraints = [
        EntryConstraint(((0, 0), (1, 1), (2, 2)), 1.0),
        EntryConstraint(((0, 1),), 0.9),
    ]
    start = SymMatrix(np.eye(3) - 0.4 * (np.ones((3, 3)) - np.eye(3)))
    result = dykstra_feasible(constraints, start, tol=1e-9)
    assert result.feasible
    w = result.witness.entries
    assert w[0, 1] == 0.9
    assert np.linalg.eigvalsh(w)[0] >= -1e-9
    assert w.min() >= 0.0


def test_dykstra_inconsistent_constraints():
    constraints = [EntryConstraint(((0, 1),), 0.1), EntryConstraint(((1, 0),), 0.2)]
    with pytest.raises(ValueError, match="Inconsistent"):
        dykstra_feasible(constraints, SymMatrix.identity(2))


# ============== Simplex ==============

def test_simplex_single_variable():
    result = simplex_solve(LinearProgram(c=[1.0], a_eq=[[1.0]], b_eq=[1.0]))
    assert result.success
    assert result.value == pytest.approx(1.0)


def test_simplex_zero_objective():
    result = simplex_solve(LinearProgram(c=[0.0, 0.0], a_eq=[[1.0, 1.0]], b_eq=[1.0]))
    assert result.value == pytest.approx(0.0)
    assert result.solution.sum() == pytest.approx(1.0)


def test_simplex_infeasible_and_unbounded():
    assert simplex_solve(LinearProgram(c=[1.0, 1.0], a_eq=[[1.0, 1.0]], b_eq=[-1.0])).status == "infeasible"
    assert simplex_solve(LinearProgram(c=[-1.0, 0.0], a_eq=[[1.0, -1.0]], b_eq=[1.0])).status == "unbounded"


def test_simplex_redundant_rows():
    lp = LinearProgram(c=[1.0, 2.0, 0.0], a_eq=[[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]], b_eq=[1.0, 2.0])
    result = simplex_solve(lp)
    assert result.success
    assert result.value == pytest.approx(0.0)


def test_simplex_degenerate_problem_terminates():
    # Classic Beale cycling example in equality form
    c = [-0.75, 150.0, -0.02, 6.0, 0.0, 0.0, 0.0]
    a = [
        [0.25, -60.0, -0.04, 9.0, 1.0, 0.0, 0.0],
        [0.5, -90.0, -0.02, 3.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
    ]
    result = simplex_solve(LinearProgram(c=c, a_eq=a, b_eq=[0.0, 0.0, 1.0]))
    assert result.success
    assert result.value == pytest.approx(-0.05)


def test_simplex_matches_vertex_enumeration():
    rng = np.random.default_rng(31)
    for trial in range(200):
        m = int(rng.integers(1, 6))
        n = int(rng.integers(m + 1, 9))
        c = rng.uniform(0.1, 1.0, n)
        if trial % 5 == 0:
            a = np.abs(rng.standard_normal((m, n))) + 0.1
            b = -rng.uniform(0.1, 1.0, m)
        else:
            a = rng.standard_normal((m, n))
            b = a @ (rng.uniform(0.0, 1.0, n) * (rng.random(n) < 0.7))
        expected = vertex_minimum(c, a, b)
        result = simplex_solve(LinearProgram(c=c, a_eq=a, b_eq=b))
        if expected is None:
            assert result.status == "infeasible"
        else:
            assert result.success
            assert result.value == pytest.approx(expected, abs=1e-7)


def test_linear_program_shape_check():
    with pytest.raises(ValueError, match="Inconsistent LP"):
        LinearProgram(c=[1.0, 2.0], a_eq=[[1.0]], b_eq=[1.0])
