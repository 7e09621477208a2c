"""
Operators Module
Finite-dimensional projection families: Clifford constructions, searches for projections summing to a scalar, symmetrizations and certificates.
"""

import json
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

import config
from curves import vect_completion
from graphs import automorphisms, from_edge_list, is_vertex_edge_transitive, make_named
from numerics import SymMatrix, block_diagonal, gram_factor, nearest_rank_projection

logger = logging.getLogger(__name__)

# Scalars lambda for which five projections can sum to lambda * I (rational points realizable)
SCALAR_SUM_INTERVAL = ((5 - math.sqrt(5)) / 2, (5 + math.sqrt(5)) / 2)

PROJECTION_TOL = 1e-9
MAX_CLIFFORD_GENERATORS = 12
MAX_T_DENOMINATOR = 20

# Significant digits kept in witness files
WITNESS_DIGITS = 12

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


# ============== Projection families ==============

@dataclass(frozen=True, eq=False)
class ProjectionFamily:
    """
    Projections E_{v,0} in a direct sum of matrix blocks with a weighted trace.

    blocks[l][v] is the block-l component of E_{v,0}. The trace is
    tau(Y) = sum_l weights[l] * tr(Y_l) / d_l. E_{v,1} = I - E_{v,0}.
    """
    blocks: tuple
    weights: tuple = (1.0,)

    def __post_init__(self):
        blocks = tuple(tuple(np.asarray(m) for m in block) for block in self.blocks)
        if not blocks or not blocks[0]:
            raise ValueError("ProjectionFamily needs at least one block and one projection")
        if len(self.weights) != len(blocks):
            raise ValueError(f"{len(blocks)} blocks but {len(self.weights)} weights")
        size = len(blocks[0])
        for block in blocks:
            if len(block) != size:
                raise ValueError("Every block must hold one matrix per input")
            dim = block[0].shape[0]
            if any(m.shape != (dim, dim) for m in block):
                raise ValueError("Matrices within a block must share one square shape")
        weights = tuple(float(w) for w in self.weights)
        if any(w <= 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-12:
            raise ValueError(f"Block weights must be positive and sum to 1, got {weights}")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def single(cls, projections):
        return cls((tuple(projections),), (1.0,))

    @property
    def size(self):
        return len(self.blocks[0])

    @property
    def dims(self):
        return tuple(block[0].shape[0] for block in self.blocks)

    @property
    def projections(self):
        """Matrices of a single-block family."""
        if len(self.blocks) != 1:
            raise ValueError("Family has several blocks")
        return self.blocks[0]

    def trace(self, v):
        return float(sum(w * np.trace(block[v]).real / block[v].shape[0]
                         for w, block in zip(self.weights, self.blocks)))

    def pair_trace(self, v, w):
        return float(sum(weight * np.trace(block[v] @ block[w]).real / block[v].shape[0]
                         for weight, block in zip(self.weights, self.blocks)))

    def pair_traces(self):
        n = self.size
        return np.array([[self.pair_trace(v, w) for w in range(n)] for v in range(n)])

    def projection_residual(self):
        """Largest ||E^2 - E||_F or ||E - E*||_F over all members."""
        worst = 0.0
        for block in self.blocks:
            for m in block:
                worst = max(worst, np.linalg.norm(m @ m - m), np.linalg.norm(m - m.conj().T))
        return float(worst)

    def sum_residual(self, lam):
        """Largest ||sum_v E_v - lam I||_F over the blocks."""
        return float(max(np.linalg.norm(sum(block) - lam * np.eye(block[0].shape[0]))
                         for block in self.blocks))

    def imaginary_residual(self):
        """Largest |Im tr(E_v E_w)|; zero for Hermitian members."""
        return float(max(abs(np.trace(block[v] @ block[w]).imag)
                         for block in self.blocks
                         for v in range(self.size) for w in range(self.size)))


def family_objective(fam, g):
    """Sum over ordered edges of tau(E_{v,0} E_{w,0})."""
    if fam.size != g.n:
        raise ValueError(f"Family has {fam.size} projections but graph has n={g.n}")
    return float(sum(fam.pair_trace(v, w) for v, w in sorted(g.edges)))


def commutation_residual(fam, g):
    """
    ||E_v S_v - S_v E_v||_F per vertex, with S_v the sum of E_w over neighbours w of v.

    Vanishing residuals are necessary for the family to attain the minimum
    edge mass at its trace.
    """
    if fam.size != g.n:
        raise ValueError(f"Family has {fam.size} projections but graph has n={g.n}")
    residuals = np.zeros(g.n)
    for v in range(g.n):
        total = 0.0
        for block in fam.blocks:
            s_v = sum((block[w] for w in g.neighbors(v)), np.zeros_like(block[v]))
            total += np.linalg.norm(block[v] @ s_v - s_v @ block[v]) ** 2
        residuals[v] = math.sqrt(total)
    return residuals


# ============== Clifford families ==============

def clifford_generators(m):
    """
    m pairwise anticommuting self-adjoint unitaries of size 2^ceil(m/2).

    Jordan-Wigner construction: generator 2k is Z^(k) (x) X (x) I..., generator
    2k+1 is Z^(k) (x) Y (x) I...
    """
    if not 1 <= m <= MAX_CLIFFORD_GENERATORS:
        raise ValueError(f"Clifford generator count must be in 1..{MAX_CLIFFORD_GENERATORS}, got {m}")
    sites = (m + 1) // 2
    generators = []
    for k in range(m):
        site, local = divmod(k, 2)
        factors = [PAULI_Z] * site + [PAULI_X if local == 0 else PAULI_Y] + [np.eye(2)] * (sites - site - 1)
        gamma = factors[0]
        for factor in factors[1:]:
            gamma = np.kron(gamma, factor)
        generators.append(gamma)
    if m == 1:
        generators = [generators[0].real]
    return generators


def clifford_operator(generators, x):
    return sum(xi * gamma for xi, gamma in zip(x, generators))


def clifford_family(unit_vectors, tol=1e-9):
    """
    Projections P_v = (I + C(x_v)) / 2 for unit vectors x_v.

    Every P_v has normalized trace 1/2 and tr(P_v P_w) = (1 + <x_v, x_w>) / 4.
    """
    x = np.atleast_2d(np.asarray(unit_vectors, dtype=float))
    norms = np.linalg.norm(x, axis=1)
    if np.any(np.abs(norms - 1.0) > tol):
        raise ValueError(f"Clifford family needs unit vectors, norms are {norms}")
    generators = clifford_generators(x.shape[1])
    identity = np.eye(generators[0].shape[0])
    return ProjectionFamily.single([0.5 * (identity + clifford_operator(generators, xv)) for xv in x])


def family_from_gram(witness, tol=1e-9):
    """
    Clifford family from a trace-1/2 completion matrix.

    witness is the Gram matrix of (h, x_1, ..., x_n) with <x_v, h> = 1/2; the
    unit vectors 2 x_v - h are re-factored into their own span.

    Returns:
        (ProjectionFamily, unit vectors as rows)
    """
    p = witness.entries
    if np.any(np.abs(p[0, 1:] - 0.5) > tol) or abs(p[0, 0] - 1.0) > tol:
        raise ValueError("family_from_gram needs a completion with p00 = 1 and border 1/2")
    inner = p[1:, 1:]
    unit_gram = 4.0 * inner - 2.0 * p[0, 1:][:, None] - 2.0 * p[0, 1:][None, :] + 1.0
    vectors = gram_factor(SymMatrix(unit_gram), tol=1e-10)
    vectors = vectors / np.linalg.norm(vectors, axis=1, keepdims=True)
    return clifford_family(vectors), vectors


# ============== Projections summing to a scalar ==============

def scalar_sum_interval(count):
    """Continuous range of lambda with count projections summing to lambda * I."""
    if count < 4:
        raise ValueError(f"No continuous range for fewer than 4 projections, got {count}")
    root = math.sqrt(count * count - 4 * count)
    return (count - root) / 2, (count + root) / 2


@dataclass
class SearchResult:
    success: bool
    family: ProjectionFamily = None
    residual: float = math.inf
    lam: Fraction = None
    dim: int = 0
    rank: int = 0
    seed: int = 0
    restart: int = -1
    error: str = None

    def to_dict(self):
        return {
            "success": self.success,
            "residual": self.residual,
            "lambda": str(self.lam),
            "dim": self.dim,
            "rank": self.rank,
            "seed": self.seed,
            "restart": self.restart,
            "error": self.error,
        }


def pentagon_family():
    """Five rank-one projections in R^2 onto lines at angles 2 pi j / 5; they sum to (5/2) I."""
    projections = []
    for j in range(5):
        angle = 2 * math.pi * j / 5
        u = np.array([math.cos(angle), math.sin(angle)])
        projections.append(np.outer(u, u))
    return ProjectionFamily.single(projections)


def _alternating_projections(count, dim, rank, lam, rng, max_iter, target):
    """
    Alternate between {sum X_j = lam I} and the rank-r projection manifolds.

    Returns:
        (list of projections, final sum residual)
    """
    projections = []
    for _ in range(count):
        q, _ = np.linalg.qr(rng.standard_normal((dim, rank)))
        projections.append(q @ q.T)
    identity = np.eye(dim)
    checkpoint = math.inf
    for it in range(max_iter + 1):
        gap = lam * identity - sum(projections)
        residual = float(np.linalg.norm(gap))
        if residual <= target or it == max_iter:
            break
        if it % 200 == 0:
            if residual > 0.999 * checkpoint:
                break
            checkpoint = residual
        projections = [nearest_rank_projection(p + gap / count, rank) for p in projections]
    return projections, residual


def projection_sum_search(count, lam, dim_hint=None, restarts=None, seed=None, tol=None,
                          max_iter=4000, max_doublings=3):
    """
    Search for count rank-r projections in dimension k with sum lam * I.

    k is the smallest dimension making r = (lam / count) k integral (or
    dim_hint when it is a multiple of it), doubled up to 2^max_doublings
    times on failure; doubling also covers complex solutions in half the
    dimension. For lam > count / 2 the complementary problem is solved and
    every projection replaced by I - P.

    Returns:
        SearchResult; failure is reported in the result, never raised
    """
    lam = Fraction(lam)
    lo, hi = scalar_sum_interval(count)
    if not lo <= lam <= hi:
        raise ValueError(f"lambda={lam} outside the realizable interval [{lo:.5f}, {hi:.5f}]")
    restarts = config.SEARCH_RESTARTS if restarts is None else restarts
    seed = config.get_seed() if seed is None else seed
    tol = config.SEARCH_SUM_TOL if tol is None else tol

    complement = lam > Fraction(count, 2)
    search_lam = count - lam if complement else lam
    share = search_lam / count
    base_dim = share.denominator
    if dim_hint and dim_hint % base_dim == 0:
        base_dim = dim_hint

    best = SearchResult(False, lam=lam, seed=seed, error="no restarts attempted")
    for doubling in range(max_doublings + 1):
        dim = base_dim * 2 ** doubling
        rank = int(share * dim)
        for restart in range(restarts):
            rng = np.random.default_rng([seed, dim, restart])
            projections, residual = _alternating_projections(
                count, dim, rank, float(search_lam), rng, max_iter, target=1e-12)
            logger.debug("search lam=%s dim=%d restart=%d residual=%.3e", lam, dim, restart, residual)
            if residual < best.residual:
                if complement:
                    projections = [np.eye(dim) - p for p in projections]
                best = SearchResult(residual <= tol, ProjectionFamily.single(projections), residual,
                                    lam, dim, dim - rank if complement else rank, seed, restart)
            if best.success:
                logger.info("Found %d projections summing to %s*I in dim %d (restart %d, residual %.2e)",
                            count, lam, dim, restart, best.residual)
                return best
        logger.info("No solution for lambda=%s in dim %d after %d restarts", lam, dim, restarts)

    best.success = False
    best.error = f"best sum residual {best.residual:.3e} exceeds {tol:.1e} after all restarts"
    logger.warning("Projection search for lambda=%s failed: %s", lam, best.error)
    return best


def cyclic_symmetrize(fam, tol=None):
    """
    Equalize traces: P~_i = P_i (+) P_{i+1} (+) ... (+) P_{i+c-1}, indices mod c.

    The result still sums to lam * I and every member has normalized trace lam / c.
    """
    tol = config.SEARCH_SUM_TOL if tol is None else tol
    projections = fam.projections
    count = len(projections)
    dim = projections[0].shape[0]
    lam = float(np.trace(sum(projections)).real) / dim
    residual = fam.sum_residual(lam)
    if residual > tol:
        raise ValueError(f"Input does not sum to a scalar (residual {residual:.3e})")
    return ProjectionFamily.single([
        block_diagonal([projections[(i + j) % count] for j in range(count)]) for i in range(count)
    ])


def aut_symmetrize(fam, g):
    """
    Direct sum over Aut(G) within every block: P~_{v,l} = (+)_pi P_{pi(v),l}.

    Returns:
        (symmetrized family, per-block traces r_l, equal across vertices)
    """
    if not is_vertex_edge_transitive(g):
        raise ValueError(f"aut_symmetrize requires a vertex- and edge-transitive graph; {g.label} is not")
    if fam.size != g.n:
        raise ValueError(f"Family has {fam.size} projections but graph has n={g.n}")
    perms = automorphisms(g)
    blocks = []
    block_traces = []
    for block in fam.blocks:
        new_block = tuple(block_diagonal([block[perm[v]] for perm in perms]) for v in range(g.n))
        blocks.append(new_block)
        block_traces.append(float(np.trace(new_block[0]).real) / new_block[0].shape[0])
    return ProjectionFamily(tuple(blocks), fam.weights), block_traces


# ============== Upper bounds on f_q for K_5 ==============

@dataclass
class FqUpperResult:
    t: Fraction
    success: bool
    value: float = None
    target: float = None
    witness: ProjectionFamily = None
    method: str = ""
    sum_residual: float = None
    search: SearchResult = None
    error: str = None
    imaginary_residual: float = None

    def to_dict(self):
        return {
            "t": str(self.t),
            "success": self.success,
            "value": self.value,
            "target": self.target,
            "gap": None if self.value is None else abs(self.value - self.target),
            "method": self.method,
            "sum_residual": self.sum_residual,
            "imaginary_residual": self.imaginary_residual,
            "search": None if self.search is None else self.search.to_dict(),
            "error": self.error,
        }


def fq_upper(t, seed=None, restarts=None):
    """
    Upper bound on f_q(t) for K_5 from an explicit projection family.

    t = 1/2 uses the Clifford family of the vectorial optimum; other rational
    t use the scalar-sum search at lambda = 5t followed by cyclic
    symmetrization, which gives the value 5t(5t-1).
    """
    t = Fraction(t)
    if t.denominator > MAX_T_DENOMINATOR:
        raise ValueError(f"t={t} has denominator above {MAX_T_DENOMINATOR}")
    lam = 5 * t
    lo, hi = SCALAR_SUM_INTERVAL
    if not lo <= lam <= hi:
        raise ValueError(f"5t={lam} outside [{lo:.5f}, {hi:.5f}]")
    k5 = make_named("complete", 5)
    target = float(5 * t * (5 * t - 1))

    if t == Fraction(1, 2):
        family, _ = family_from_gram(vect_completion(k5, 0.5).witness)
        return _upper_result(t, family, k5, target, "clifford")

    search = projection_sum_search(5, lam, restarts=restarts, seed=seed)
    if not search.success:
        return FqUpperResult(t, False, target=target, method="search", search=search, error=search.error)
    return _upper_result(t, cyclic_symmetrize(search.family), k5, target, "search", search)


def _upper_result(t, family, k5, target, method, search=None):
    imaginary = family.imaginary_residual()
    if imaginary > config.IMAGINARY_TOL:
        return FqUpperResult(t, False, target=target, method=method, search=search,
                             imaginary_residual=imaginary,
                             error=f"traces have imaginary part {imaginary:.3e}")
    return FqUpperResult(t, True, family_objective(family, k5), target, family, method,
                         family.sum_residual(float(5 * t)), search, imaginary_residual=imaginary)


# ============== Witness files ==============

def _round(x):
    return float(f"{x:.{WITNESS_DIGITS}g}")


def witness_to_dict(fam, lam, t, residuals=None):
    projections = fam.projections
    data = {
        "dim": projections[0].shape[0],
        "lambda": str(Fraction(lam)),
        "t": str(Fraction(t)),
        "projections": [[[_round(x) for x in row] for row in np.real(m)] for m in projections],
        "residuals": {k: _round(v) for k, v in (residuals or {}).items()},
    }
    if any(np.iscomplexobj(m) and np.abs(m.imag).max() > 0 for m in projections):
        data["projections_imag"] = [[[_round(x) for x in row] for row in np.imag(m)] for m in projections]
    return data


def save_witness(fam, path, lam, t, residuals=None, objective=None):
    data = witness_to_dict(fam, lam, t, residuals)
    if objective is not None:
        data["objective"] = _round(objective)
    Path(path).write_text(json.dumps(data, indent=1) + "\n")
    return data


def family_from_witness(data):
    try:
        real = np.array(data["projections"], dtype=float)
        if "projections_imag" in data:
            real = real + 1j * np.array(data["projections_imag"], dtype=float)
        dim = int(data["dim"])
        lam = Fraction(data["lambda"])
        t = Fraction(data["t"])
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Malformed witness: {e}")
    if real.ndim != 3 or real.shape[1:] != (dim, dim):
        raise ValueError(f"Witness projections have shape {real.shape}, expected (*, {dim}, {dim})")
    return ProjectionFamily.single(list(real)), lam, t


def verify_witness(data, projection_tol=1e-8, sum_tol=1e-5, trace_tol=1e-6, objective_tol=1e-4):
    """
    Recompute the checks of a witness.

    Returns:
        dict with one {'value', 'pass'} entry per check and an overall 'success'
    """
    fam, lam, t = family_from_witness(data)
    count = fam.size
    complete = from_edge_list(count, [(v, w) for v in range(count) for w in range(v + 1, count)])
    objective = family_objective(fam, complete)
    trace_gap = max(abs(fam.trace(v) - float(t)) for v in range(count))
    expected = float(lam * (lam - 1))

    checks = {
        "projection": {"value": fam.projection_residual(), "limit": projection_tol},
        "sum": {"value": fam.sum_residual(float(lam)), "limit": sum_tol},
        "imaginary": {"value": fam.imaginary_residual(), "limit": config.IMAGINARY_TOL},
        "traces": {"value": trace_gap, "limit": trace_tol},
        "objective": {"value": abs(objective - expected), "limit": objective_tol},
    }
    if "objective" in data:
        checks["recorded_objective"] = {"value": abs(objective - float(data["objective"])),
                                        "limit": objective_tol}
    for check in checks.values():
        check["pass"] = bool(check["value"] <= check["limit"])
    return {
        "checks": checks,
        "objective": objective,
        "success": all(check["pass"] for check in checks.values()),
    }


if __name__ == "__main__":
    k5 = make_named("complete", 5)
    pentagon = pentagon_family()
    print(f"Pentagon sum residual: {pentagon.sum_residual(2.5):.2e}")
    symmetric = cyclic_symmetrize(pentagon)
    print(f"Symmetrized traces: {[round(symmetric.trace(v), 12) for v in range(5)]}")
    print(f"Objective on K_5: {family_objective(symmetric, k5):.12f} (expected 3.75)")
