"""
Correlations Module
Synchronous two-output correlation tensors p(i,j|v,w): validation, group actions and explicit constructions.
"""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

import config

logger = logging.getLogger(__name__)

PROVENANCES = ("ns", "loc", "vect", "q", "qa", "unknown")

# Marginal range for the explicit element of the closure of the quantum set on K_5
QA_NOT_Q_INTERVAL = (
    (math.sqrt(5) - 1) / (2 * math.sqrt(5)),
    (math.sqrt(5) + 1) / (2 * math.sqrt(5)),
)


@dataclass(frozen=True, eq=False)
class SyncCorrelation:
    """
    Correlation tensor for n inputs and outputs {0, 1}.

    p is indexed p[v, w, i, j] = p(i,j|v,w), matching the JSON layout
    [v][w][i][j]. Class membership is carried as provenance metadata.
    """
    n: int
    p: np.ndarray
    provenance: str = "unknown"

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.shape != (self.n, self.n, 2, 2):
            raise ValueError(f"Tensor shape {p.shape} does not match n={self.n} (expected ({self.n}, {self.n}, 2, 2))")
        if not np.all(np.isfinite(p)):
            raise ValueError("Correlation entries must be finite")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"Unknown provenance {self.provenance!r}")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def edge_value(self, v, w):
        """p(0,0|v,w)"""
        return float(self.p[v, w, 0, 0])

    def to_dict(self):
        return {"n": self.n, "p": self.p.tolist(), "provenance": self.provenance}


@dataclass
class ValidationReport:
    nonneg: bool
    normalized: bool
    nonsignalling: bool
    synchronous: bool
    max_residual: float

    @property
    def all_pass(self):
        return self.nonneg and self.normalized and self.nonsignalling and self.synchronous

    def to_dict(self):
        return {
            "nonneg": self.nonneg,
            "normalized": self.normalized,
            "nonsignalling": self.nonsignalling,
            "synchronous": self.synchronous,
            "max_residual": self.max_residual,
        }


# ============== Validation ==============

def _signalling_residuals(p):
    alice = p.sum(axis=3)  # [v, w, i]
    bob = p.sum(axis=2)    # [v, w, j]
    alice_gap = np.abs(alice - alice[:, :1, :]).max()
    bob_gap = np.abs(bob - bob[:1, :, :]).max()
    return float(max(alice_gap, bob_gap))


def validate(p, tol=None):
    """
    Check the nonsignalling and synchronous identities.

    Returns:
        ValidationReport with one flag per identity and the largest violation
    """
    tol = config.VALIDATE_TOL if tol is None else tol
    t = p.p
    negativity = float(max(0.0, -t.min()))
    normalization = float(np.abs(t.sum(axis=(2, 3)) - 1.0).max())
    signalling = _signalling_residuals(t)
    diag = np.arange(p.n)
    off_diagonal_outputs = float(max(np.abs(t[diag, diag, 0, 1]).max(), np.abs(t[diag, diag, 1, 0]).max()))
    return ValidationReport(
        nonneg=negativity <= tol,
        normalized=normalization <= tol,
        nonsignalling=signalling <= tol,
        synchronous=off_diagonal_outputs <= tol,
        max_residual=max(negativity, normalization, signalling, off_diagonal_outputs),
    )


def marginals(p, tol=None):
    """
    Marginal densities p_A(i|v) and p_B(j|w).

    Returns:
        (p_a, p_b) arrays of shape (n, 2)
    """
    tol = config.VALIDATE_TOL if tol is None else tol
    gap = _signalling_residuals(p.p)
    if gap > tol:
        raise ValueError(f"Marginals undefined: signalling residual {gap:.3e} exceeds {tol:.1e}")
    p_a = p.p[:, 0, :, :].sum(axis=2)
    p_b = p.p[0, :, :, :].sum(axis=1)
    return p_a, p_b


def F_objective(p, g):
    """Sum of p(0,0|v,w) over the ordered edges of g."""
    if p.n != g.n:
        raise ValueError(f"Correlation has n={p.n} but graph has n={g.n}")
    return float(sum(p.p[v, w, 0, 0] for v, w in sorted(g.edges)))


# ============== Group actions ==============

def act_permutation(p, perm):
    """beta_pi: entry (i,j|v,w) of the output is entry (i,j|pi^-1(v),pi^-1(w)) of the input."""
    perm = [int(x) for x in perm]
    if sorted(perm) != list(range(p.n)):
        raise ValueError(f"Not a permutation of 0..{p.n - 1}: {perm}")
    inverse = np.argsort(perm)
    return SyncCorrelation(p.n, p.p[np.ix_(inverse, inverse)], p.provenance)


def reflect(p):
    """Swap the roles of outputs 0 and 1 for both parties."""
    return SyncCorrelation(p.n, p.p[:, :, ::-1, ::-1], p.provenance)


def average_over_group(p, perms):
    """Average of beta_pi(p) over a list of permutations."""
    perms = list(perms)
    if not perms:
        raise ValueError("Cannot average over an empty group")
    total = sum(act_permutation(p, perm).p for perm in perms)
    return SyncCorrelation(p.n, total / len(perms), p.provenance)


# ============== Constructors ==============

def deterministic(n, output):
    """Both parties always answer output."""
    p = np.zeros((n, n, 2, 2))
    p[:, :, output, output] = 1.0
    return SyncCorrelation(n, p, "loc")


def product_correlation(marginal_zero):
    """Classical product strategy from per-vertex probabilities of answering 0 (synchronous only when each is 0 or 1)."""
    a = np.asarray(marginal_zero, dtype=float)
    probs = np.stack([a, 1.0 - a], axis=1)  # [v, i]
    p = np.einsum("vi,wj->vwij", probs, probs)
    return SyncCorrelation(len(a), p, "loc")


def _edge_block(t, a):
    return ((a, t - a), (t - a, 1.0 - 2.0 * t + a))


def from_edge_value(g, t, s, tol=None):
    """
    Synchronous correlation with marginals t and edge value s / |E|.

    Diagonal blocks are (t, 0, 0, 1-t); ordered edges carry p(0,0|v,w) = s/|E|
    with the nonsignalling completion; off-edge pairs use the product
    completion with p(0,0|v,w) = t^2.
    """
    tol = config.VALIDATE_TOL if tol is None else tol
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if g.edge_count == 0:
        raise ValueError("from_edge_value needs a graph with at least one edge")
    a = s / g.edge_count
    lower, upper = max(0.0, 2.0 * t - 1.0), t
    if a < lower - tol or a > upper + tol:
        raise ValueError(
            f"s={s} outside [{lower * g.edge_count}, {upper * g.edge_count}] for t={t}, |E|={g.edge_count}"
        )

    p = np.empty((g.n, g.n, 2, 2))
    p[:, :] = _edge_block(t, t * t)
    p[g.adjacency_matrix()] = _edge_block(t, a)
    diag = np.arange(g.n)
    p[diag, diag] = ((t, 0.0), (0.0, 1.0 - t))
    return SyncCorrelation(g.n, p, "ns")


def from_projection_family(fam, tol=None):
    """
    Correlation p(i,j|v,w) = tau(E_{v,i} E_{w,j}) of a projection family.

    E_{v,1} = I - E_{v,0}, so only tau(E_{v,0}) and tau(E_{v,0} E_{w,0}) are needed.
    """
    tol = config.VALIDATE_TOL if tol is None else tol
    residual = fam.projection_residual()
    if residual > max(tol, 1e-9):
        raise ValueError(f"Family is not a set of projections (residual {residual:.3e})")
    imaginary = fam.imaginary_residual()
    if imaginary > config.IMAGINARY_TOL:
        raise ValueError(f"Family traces have imaginary part {imaginary:.3e}")
    n = fam.size
    traces = np.array([fam.trace(v) for v in range(n)])
    joint = fam.pair_traces()
    p = np.empty((n, n, 2, 2))
    p[:, :, 0, 0] = joint
    p[:, :, 0, 1] = traces[:, None] - joint
    p[:, :, 1, 0] = traces[None, :] - joint
    p[:, :, 1, 1] = 1.0 - traces[:, None] - traces[None, :] + joint
    return SyncCorrelation(n, p, "q")


def from_vectors(x, h, tol=None):
    """
    Vectorial correlation p(i,j|v,w) = <x_{v,i}, x_{w,j}>.

    Args:
        x: mapping (v, i) -> vector for v in 0..n-1, i in {0, 1}
        h: unit vector with x_{v,0} + x_{v,1} = h

    Returns:
        SyncCorrelation with provenance vect
    """
    tol = config.VALIDATE_TOL if tol is None else tol
    h = np.asarray(h)
    if abs(np.linalg.norm(h) - 1.0) > tol:
        raise ValueError(f"h must be a unit vector, norm is {np.linalg.norm(h)}")
    vertices = sorted({v for v, _ in x})
    n = len(vertices)
    if vertices != list(range(n)) or any((v, i) not in x for v in range(n) for i in (0, 1)):
        raise ValueError("x must provide x[(v, 0)] and x[(v, 1)] for v = 0..n-1")

    vectors = np.array([[np.asarray(x[(v, i)]) for i in (0, 1)] for v in range(n)])
    for v in range(n):
        if np.linalg.norm(vectors[v, 0] + vectors[v, 1] - h) > tol:
            raise ValueError(f"x[({v},0)] + x[({v},1)] != h")
        if abs(np.vdot(vectors[v, 0], vectors[v, 1])) > tol:
            raise ValueError(f"x[({v},0)] and x[({v},1)] are not orthogonal")

    p = np.real(np.einsum("vik,wjk->vwij", vectors.conj(), vectors))
    if p.min() < -tol:
        raise ValueError(f"Negative inner product {p.min():.3e} among the vectors")
    return SyncCorrelation(n, np.maximum(p, 0.0), "vect")


def explicit_qa_not_q(t):
    """
    Five-input correlation in the closure of the synchronous quantum set.

    Diagonal blocks (t, 0, 0, 1-t); off-diagonal blocks
    (t(5t-1)/4, 5t(1-t)/4, 5t(1-t)/4, (1-t)(4-5t)/4). At irrational t in
    the admissible interval it is not realized by finite-dimensional projections.
    """
    lo, hi = QA_NOT_Q_INTERVAL
    if not lo - 1e-15 <= t <= hi + 1e-15:
        raise ValueError(f"t must lie in [{lo:.5f}, {hi:.5f}], got {t}")
    cross = 1.25 * t * (1.0 - t)
    p = np.empty((5, 5, 2, 2))
    p[:, :] = ((0.25 * t * (5.0 * t - 1.0), cross), (cross, 0.25 * (1.0 - t) * (4.0 - 5.0 * t)))
    diag = np.arange(5)
    p[diag, diag] = ((t, 0.0), (0.0, 1.0 - t))
    return SyncCorrelation(5, p, "qa")


# ============== JSON ==============

def correlation_from_dict(data):
    try:
        n = int(data["n"])
        p = np.array(data["p"], dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise ValueError(f"Malformed correlation JSON: {e}")
    return SyncCorrelation(n, p, data.get("provenance", "unknown"))


def load_correlation(path, tol=None):
    """
    Load a correlation file and validate it.

    Returns:
        (SyncCorrelation, ValidationReport)
    """
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: invalid JSON ({e})")
    corr = correlation_from_dict(data)
    report = validate(corr, tol)
    if not report.all_pass:
        logger.warning("%s fails validation (max residual %.3e)", path, report.max_residual)
    return corr, report


def save_correlation(p, path):
    Path(path).write_text(json.dumps(p.to_dict(), indent=2) + "\n")


if __name__ == "__main__":
    corr = explicit_qa_not_q(0.5)
    print("explicit element at t=1/2:", validate(corr).to_dict())
    print("off-diagonal block:", corr.p[0, 1].tolist())
