"""
Numerics Module
Dense symmetric linear algebra, PSD feasibility by Dykstra's alternating projections, and a tableau simplex solver.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

import config

logger = logging.getLogger(__name__)


class ConvergenceError(RuntimeError):
    """Raised when an iterative kernel hits its iteration cap."""


# ============== Symmetric matrices ==============

class SymMatrix:
    """
    Dense real symmetric matrix.

    Only the upper triangle of the input is read; the lower triangle is
    mirrored from it so entry(i, j) == entry(j, i) exactly.
    """

    __slots__ = ("_a",)

    def __init__(self, entries, check_symmetric=True, tol=1e-9):
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"SymMatrix needs a non-empty square array, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("SymMatrix entries must be finite")
        if check_symmetric:
            scale = max(1.0, float(np.max(np.abs(a))))
            if np.max(np.abs(a - a.T)) > tol * scale:
                raise ValueError("SymMatrix input is not symmetric")
        upper = np.triu(a)
        a = upper + np.triu(a, 1).T
        a.setflags(write=False)
        self._a = a

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim))

    @classmethod
    def diag(cls, values):
        return cls(np.diag(np.asarray(values, dtype=float)))

    @property
    def dim(self):
        return self._a.shape[0]

    def to_array(self):
        """Writable copy of the entries."""
        return np.array(self._a)

    @property
    def entries(self):
        return self._a

    def __getitem__(self, key):
        return self._a[key]

    def frobenius_norm(self):
        return float(np.linalg.norm(self._a))

    def __eq__(self, other):
        return isinstance(other, SymMatrix) and np.array_equal(self._a, other._a)

    def __hash__(self):
        return hash(self._a.tobytes())

    def __repr__(self):
        return f"SymMatrix(dim={self.dim})"


def _symmetrize(a):
    return 0.5 * (a + a.T)


# ============== Eigendecomposition ==============

def _rotate(a, v, p, q):
    """One Jacobi rotation zeroing a[p, q]."""
    apq = a[p, q]
    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
    if abs(theta) > 1e150:
        t = 1.0 / (2.0 * theta)
    else:
        t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c

    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p - s * col_q
    a[:, q] = s * col_p + c * col_q
    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p - s * row_q
    a[q, :] = s * row_p + c * row_q
    a[p, q] = a[q, p] = 0.0

    vec_p = v[:, p].copy()
    vec_q = v[:, q].copy()
    v[:, p] = c * vec_p - s * vec_q
    v[:, q] = s * vec_p + c * vec_q


def jacobi_eigen(s, tol=1e-12, max_sweeps=100):
    """
    Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Args:
        s: SymMatrix
        tol: relative off-diagonal tolerance
        max_sweeps: sweep cap before ConvergenceError

    Returns:
        (eigenvalues ascending, orthogonal matrix with eigenvectors as columns)
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    a = s.to_array()
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), v

    for sweep in range(max_sweeps + 1):
        off = np.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2))
        if off <= tol * scale:
            logger.debug("jacobi_eigen: dim=%d converged after %d sweeps", n, sweep)
            break
        if sweep == max_sweeps:
            raise ConvergenceError(f"Jacobi eigendecomposition did not converge in {max_sweeps} sweeps")
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > 1e-300:
                    _rotate(a, v, p, q)

    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return eigenvalues[order], v[:, order]


def min_eigenvalue(s):
    return float(jacobi_eigen(s)[0][0])


def is_psd(s, tol=None):
    tol = config.PSD_TOL if tol is None else tol
    return min_eigenvalue(s) >= -tol


def cholesky_reduce(p):
    """
    One step of Cholesky elimination on the leading pivot.

    Returns the Schur complement q(i,j) = p(i,j) - p(0,i) p(0,j) / p(0,0) of
    size dim - 1. P is PSD iff the complement is PSD when p(0,0) > 0.
    """
    if p.dim < 2:
        raise ValueError("cholesky_reduce needs dim >= 2")
    pivot = p[0, 0]
    if pivot <= 0:
        raise ValueError(f"Pivot p(0,0) must be positive, got {pivot}")
    border = p.entries[0, 1:]
    return SymMatrix(p.entries[1:, 1:] - np.outer(border, border) / pivot)


def _psd_projection(a):
    w, vecs = np.linalg.eigh(a)
    clipped = (vecs * np.maximum(w, 0.0)) @ vecs.T
    return _symmetrize(clipped)


def project_psd(s):
    """Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped to 0)."""
    return SymMatrix(_psd_projection(s.to_array()), check_symmetric=False)


def gram_factor(s, tol=1e-10):
    """
    Gram vectors of a PSD matrix.

    Returns an array X of shape (dim, rank) with X @ X.T == s, keeping only
    eigenvalues above tol times the largest one.
    """
    w, vecs = np.linalg.eigh(s.entries)
    top = max(float(np.max(w)), 0.0)
    if w[0] < -max(tol, config.PSD_TOL) * max(1.0, top):
        raise ValueError(f"gram_factor needs a PSD matrix, min eigenvalue {w[0]:.3e}")
    keep = w > tol * max(1.0, top)
    return vecs[:, keep] * np.sqrt(w[keep])


def nearest_rank_projection(m, rank):
    """Orthogonal projection onto the span of the top-rank eigenvectors of a Hermitian matrix."""
    h = 0.5 * (m + m.conj().T)
    _, vecs = np.linalg.eigh(h)
    top = vecs[:, h.shape[0] - rank:]
    return top @ top.conj().T


def block_diagonal(blocks):
    blocks = [np.atleast_2d(b) for b in blocks]
    size = sum(b.shape[0] for b in blocks)
    dtype = np.result_type(*blocks)
    out = np.zeros((size, size), dtype=dtype)
    offset = 0
    for b in blocks:
        k = b.shape[0]
        out[offset:offset + k, offset:offset + k] = b
        offset += k
    return out


# ============== Dykstra feasibility ==============

@dataclass(frozen=True)
class EntryConstraint:
    """A group of matrix positions pinned to one value (mirrored positions implied)."""
    positions: tuple
    value: float


@dataclass
class FeasibilityResult:
    feasible: bool
    witness: SymMatrix
    residual: float
    iterations: int
    status: str


def _constraint_mask(constraints, dim):
    mask = np.zeros((dim, dim), dtype=bool)
    values = np.zeros((dim, dim))
    for constraint in constraints:
        for i, j in constraint.positions:
            if not (0 <= i < dim and 0 <= j < dim):
                raise ValueError(f"Constraint position ({i}, {j}) out of range for dim={dim}")
            for a, b in ((i, j), (j, i)):
                if mask[a, b] and values[a, b] != constraint.value:
                    raise ValueError(
                        f"Inconsistent constraints at ({a}, {b}): {values[a, b]} vs {constraint.value}"
                    )
                mask[a, b] = True
                values[a, b] = constraint.value
    return mask, values


def dykstra_feasible(constraints, start, lower_bound=0.0, tol=None, max_iter=None,
                     stall_window=200, stall_ratio=1e-6):
    """
    Decide whether a PSD matrix meets fixed entries and an entrywise lower bound.

    Alternates projections between the affine/box set (fixed entries pinned,
    free entries clipped at lower_bound) and the PSD cone with Dykstra's
    corrections. Infeasibility is only ever reported at tolerance.

    Args:
        constraints: list of EntryConstraint
        start: SymMatrix starting point
        lower_bound: entrywise lower bound on free entries, or None
        tol: residual tolerance between the two sets
        max_iter: iteration cap
        stall_window: iterations between stall checks
        stall_ratio: minimum relative residual decrease per window

    Returns:
        FeasibilityResult; when feasible, the witness satisfies the fixed
        entries exactly, the bounds, and has min eigenvalue >= -tol.
    """
    tol = config.FEASIBILITY_TOL if tol is None else tol
    max_iter = config.DYKSTRA_MAX_ITER if max_iter is None else max_iter
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    dim = start.dim
    mask, values = _constraint_mask(constraints, dim)
    free = ~mask

    def project_affine(z):
        out = z.copy()
        if lower_bound is not None:
            out[free] = np.maximum(out[free], lower_bound)
        out[mask] = values[mask]
        return out

    y = project_affine(start.to_array())
    if np.linalg.eigvalsh(y)[0] >= -tol:
        return FeasibilityResult(True, SymMatrix(y, check_symmetric=False), 0.0, 0, "feasible")
    if not free.any():
        # Fully pinned: the affine set is a single point
        residual = float(np.linalg.norm(_psd_projection(y) - y))
        feasible = residual <= tol
        return FeasibilityResult(feasible, SymMatrix(y, check_symmetric=False), residual, 1,
                                 "feasible" if feasible else "infeasible-at-tolerance")

    x = start.to_array()
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    residual = np.inf
    checkpoint = np.inf
    for k in range(1, max_iter + 1):
        y = project_affine(x + p)
        p = x + p - y
        x_new = _psd_projection(y + q)
        q = y + q - x_new
        x = x_new
        residual = float(np.linalg.norm(x - y))
        if residual <= tol:
            logger.debug("dykstra_feasible: feasible after %d iterations (residual %.3e)", k, residual)
            return FeasibilityResult(True, SymMatrix(y, check_symmetric=False), residual, k, "feasible")
        if k % stall_window == 0:
            if checkpoint - residual < stall_ratio * checkpoint:
                logger.debug("dykstra_feasible: stalled at %d iterations (residual %.3e)", k, residual)
                return FeasibilityResult(False, SymMatrix(y, check_symmetric=False), residual, k,
                                         "infeasible-at-tolerance")
            checkpoint = residual

    logger.debug("dykstra_feasible: iteration cap %d reached (residual %.3e)", max_iter, residual)
    return FeasibilityResult(False, SymMatrix(y, check_symmetric=False), residual, max_iter,
                             "infeasible-at-tolerance")


# ============== Linear programming ==============

@dataclass(frozen=True, eq=False)
class LinearProgram:
    """minimize c.x subject to a_eq x = b_eq, x >= 0"""
    c: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).reshape(-1)
        a = np.asarray(self.a_eq, dtype=float)
        b = np.asarray(self.b_eq, dtype=float).reshape(-1)
        if a.size == 0:
            a = a.reshape(0, c.size)
        if a.ndim != 2 or a.shape[1] != c.size or a.shape[0] != b.size:
            raise ValueError(
                f"Inconsistent LP dimensions: c {c.shape}, a_eq {a.shape}, b_eq {b.shape}"
            )
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "a_eq", a)
        object.__setattr__(self, "b_eq", b)


@dataclass
class LPResult:
    status: str
    value: float = None
    solution: np.ndarray = None
    iterations: int = 0
    basis: list = field(default_factory=list)

    @property
    def success(self):
        return self.status == "optimal"


def _pivot(tableau, basis, row, col):
    tableau[row] /= tableau[row, col]
    pivot_row = tableau[row]
    for r in range(tableau.shape[0]):
        if r != row and tableau[r, col] != 0.0:
            tableau[r] -= tableau[r, col] * pivot_row
    basis[row] = col


def _run_simplex(tableau, basis, columns, tol, max_iter):
    """Bland's rule iterations; returns 'optimal' or 'unbounded' and the pivot count."""
    m = tableau.shape[0] - 1
    for it in range(max_iter):
        costs = tableau[m, :columns]
        entering = np.flatnonzero(costs < -tol)
        if entering.size == 0:
            return "optimal", it
        col = int(entering[0])
        column = tableau[:m, col]
        candidates = np.flatnonzero(column > tol)
        if candidates.size == 0:
            return "unbounded", it
        ratios = tableau[candidates, -1] / column[candidates]
        best = ratios.min()
        tied = candidates[ratios <= best + tol * max(1.0, abs(best))]
        row = int(min(tied, key=lambda r: basis[r]))
        _pivot(tableau, basis, row, col)
    raise ConvergenceError(f"Simplex exceeded {max_iter} pivots")


def simplex_solve(lp, tol=1e-9, max_iter=None):
    """
    Two-phase dense tableau simplex with Bland's anti-cycling rule.

    Returns:
        LPResult with status optimal, infeasible or unbounded
    """
    a = lp.a_eq.copy()
    b = lp.b_eq.copy()
    flip = b < 0
    a[flip] *= -1.0
    b[flip] *= -1.0
    m, n = a.shape
    max_iter = max_iter or 50 * (m + n + 10)

    # Phase 1: artificial basis
    tableau = np.zeros((m + 1, n + m + 1))
    tableau[:m, :n] = a
    tableau[:m, n:n + m] = np.eye(m)
    tableau[:m, -1] = b
    tableau[m, :n] = -a.sum(axis=0)
    tableau[m, -1] = -b.sum()
    basis = list(range(n, n + m))

    status, phase1_iters = _run_simplex(tableau, basis, n + m, tol, max_iter)
    infeasibility = -tableau[m, -1]
    if infeasibility > tol * max(1.0, float(np.abs(b).sum())):
        logger.debug("simplex_solve: infeasible (phase 1 value %.3e)", infeasibility)
        return LPResult("infeasible", iterations=phase1_iters)

    # Drive artificials out of the basis; drop redundant rows
    row = 0
    while row < len(basis):
        if basis[row] >= n:
            nonzero = np.flatnonzero(np.abs(tableau[row, :n]) > tol)
            if nonzero.size:
                _pivot(tableau, basis, row, int(nonzero[0]))
            else:
                tableau = np.delete(tableau, row, axis=0)
                del basis[row]
                continue
        row += 1

    # Phase 2
    tableau = np.delete(tableau, np.arange(n, n + m), axis=1)
    k = len(basis)
    tableau[k, :n] = lp.c
    tableau[k, -1] = 0.0
    for r, var in enumerate(basis):
        tableau[k] -= lp.c[var] * tableau[r]

    status, phase2_iters = _run_simplex(tableau, basis, n, tol, max_iter)
    iterations = phase1_iters + phase2_iters
    if status == "unbounded":
        return LPResult("unbounded", iterations=iterations)

    solution = np.zeros(n)
    for r, var in enumerate(basis):
        solution[var] = max(tableau[r, -1], 0.0)
    value = float(lp.c @ solution)
    logger.debug("simplex_solve: optimal value %.12g after %d pivots", value, iterations)
    return LPResult("optimal", value, solution, iterations, list(basis))


if __name__ == "__main__":
    values, vectors = jacobi_eigen(SymMatrix.diag([3.0, 1.0, 2.0]))
    print(f"Eigenvalues of diag(3,1,2): {values}")
    result = simplex_solve(LinearProgram(c=[1.0], a_eq=[[1.0]], b_eq=[1.0]))
    print(f"min x s.t. x = 1: {result.status} value={result.value}")
