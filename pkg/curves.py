"""
Curves Module
Graph correlation functions f_ns, f_loc, f_vect (and f_q upper bounds) with symmetry, convexity and sampling tools.
"""

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

import config
from graphs import (
    automorphism_generators, independent_sets, is_vertex_edge_transitive,
    is_vertex_transitive, orbits, MAX_ENUMERATION_VERTICES,
)
from numerics import (
    ConvergenceError, EntryConstraint, LinearProgram, SymMatrix,
    dykstra_feasible, simplex_solve,
)

logger = logging.getLogger(__name__)

FUNCTIONS = ("ns", "loc", "vect", "q_upper")

# Zero test for LP values
LP_ZERO_TOL = 1e-9


def _check_t(t):
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")


def _is_complete(g):
    return g.edge_count == g.n * (g.n - 1)


# ============== Nonsignalling ==============

def ns_s_bounds(t, edge_count):
    """Admissible range of s = sum of edge values for marginal t."""
    _check_t(t)
    return max(0.0, 2.0 * t - 1.0) * edge_count, t * edge_count


def f_ns(g, t):
    """max{0, |E|(2t-1)}"""
    _check_t(t)
    return max(0.0, g.edge_count * (2.0 * t - 1.0))


# ============== Local (classical) ==============

def _subset_edge_counts(g):
    masks = np.arange(1 << g.n)
    counts = np.zeros(masks.size)
    for v, w in g.edges:
        counts += ((masks >> v) & 1) * ((masks >> w) & 1)
    return counts


def _subset_orbits(g):
    generators = automorphism_generators(g)

    def act(perm, mask):
        image = 0
        for v in range(g.n):
            if mask >> v & 1:
                image |= 1 << perm[v]
        return image

    return orbits(range(1 << g.n), generators, act)


def _f_loc_full(g, t):
    masks = np.arange(1 << g.n)
    membership = np.array([(masks >> v) & 1 for v in range(g.n)], dtype=float)
    a_eq = np.vstack([np.ones(masks.size), membership])
    b_eq = np.concatenate([[1.0], np.full(g.n, t)])
    return simplex_solve(LinearProgram(c=_subset_edge_counts(g), a_eq=a_eq, b_eq=b_eq))


def _f_loc_reduced(g, t):
    counts = _subset_edge_counts(g)
    subset_orbits = _subset_orbits(g)
    reps = [orbit[0] for orbit in subset_orbits]
    sizes = np.array([bin(mask).count("1") for mask in reps], dtype=float)
    a_eq = np.vstack([np.ones(len(reps)), sizes / g.n])
    return simplex_solve(LinearProgram(c=counts[reps], a_eq=a_eq, b_eq=[1.0, t]))


def f_loc(g, t, reduce="auto"):
    """
    Classical graph correlation function.

    Minimizes the edge mass of a probability measure on the 2^n atoms S of
    V whose vertex marginals all equal t. For vertex-transitive graphs the
    atoms are grouped into Aut(G)-orbits first.

    Args:
        g: Graph with n <= 12
        t: marginal in [0, 1]
        reduce: "auto", True or False

    Returns:
        float
    """
    _check_t(t)
    if g.n > MAX_ENUMERATION_VERTICES:
        raise ValueError(f"f_loc limited to n <= {MAX_ENUMERATION_VERTICES}, got n={g.n}")
    if reduce == "auto":
        reduce = is_vertex_transitive(g)
    result = _f_loc_reduced(g, t) if reduce else _f_loc_full(g, t)
    if not result.success:
        raise ConvergenceError(f"f_loc LP for {g.label} at t={t} returned {result.status}")
    return max(result.value, 0.0)


def fractional_chromatic(g):
    """
    Fractional chromatic number from the independent-set covering LP.

    minimize sum_I y_I subject to sum_{I contains v} y_I >= 1, y >= 0.
    """
    sets = independent_sets(g)
    cover = np.zeros((g.n, len(sets)))
    for k, members in enumerate(sets):
        cover[list(members), k] = 1.0
    a_eq = np.hstack([cover, -np.eye(g.n)])
    c = np.concatenate([np.ones(len(sets)), np.zeros(g.n)])
    result = simplex_solve(LinearProgram(c=c, a_eq=a_eq, b_eq=np.ones(g.n)))
    if not result.success:
        raise ConvergenceError(f"Independent-set LP for {g.label} returned {result.status}")
    return result.value


def zero_threshold(g, tol=1e-4):
    """sup{t : f_loc(t) = 0} by bisection; its inverse is the fractional chromatic number."""
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f_loc(g, mid) <= LP_ZERO_TOL:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ============== Vectorial ==============

def f_vect_complete(n, t):
    """
    f_vect for the complete graph K_n.

    0 on [0, 1/n], nt(nt-1) on [1/n, (n-1)/n], (n^2-n)(2t-1) on [(n-1)/n, 1].
    """
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    _check_t(t)
    if t <= 1.0 / n:
        return 0.0
    if t >= (n - 1.0) / n:
        return (n * n - n) * (2.0 * t - 1.0)
    return n * t * (n * t - 1.0)


@dataclass
class VectSolution:
    s: float
    witness: SymMatrix
    status: str
    oracle_calls: int = 0


def vect_constraints(g, t, s):
    """Pinned entries of the (n+1)x(n+1) completion problem for marginal t and edge sum s."""
    edge_value = s / g.edge_count
    constraints = [
        EntryConstraint(((0, 0),), 1.0),
        EntryConstraint(tuple((0, v + 1) for v in range(g.n)) + tuple((v + 1, v + 1) for v in range(g.n)), t),
    ]
    if g.edge_count:
        constraints.append(EntryConstraint(tuple((v + 1, w + 1) for v, w in g.undirected_edges), edge_value))
    return constraints


def completion_matrix(g, t, s, free_value=None):
    """The completion matrix with free (off-edge) entries set to free_value (default t^2)."""
    free_value = t * t if free_value is None else free_value
    p = np.full((g.n + 1, g.n + 1), free_value)
    p[0, :] = p[:, 0] = t
    p[0, 0] = 1.0
    np.fill_diagonal(p[1:, 1:], t)
    if g.edge_count:
        inner = p[1:, 1:]
        inner[g.adjacency_matrix()] = s / g.edge_count
    return SymMatrix(p)


def _check_transitive(g):
    if g.edge_count == 0:
        raise ValueError(f"f_vect needs at least one edge; {g.label} has none")
    if not is_vertex_edge_transitive(g):
        raise ValueError(f"f_vect requires a vertex- and edge-transitive graph; {g.label} is not")


def vect_completion(g, t, tol=None, dykstra_tol=1e-9, method="closed", max_iter=None):
    """
    Smallest edge sum s admitting a nonnegative PSD completion, with the completion.

    Args:
        g: vertex- and edge-transitive graph
        t: marginal in [0, 1]
        tol: absolute bisection tolerance on s
        dykstra_tol: residual tolerance of each feasibility call
        method: "closed" uses the closed form for complete graphs, "sdp" always bisects
        max_iter: Dykstra iteration cap

    Returns:
        VectSolution
    """
    _check_t(t)
    _check_transitive(g)
    tol = config.BISECTION_TOL if tol is None else tol
    if method not in ("closed", "sdp"):
        raise ValueError(f"Unknown method {method!r}")

    if method == "closed" and _is_complete(g):
        s = f_vect_complete(g.n, t)
        return VectSolution(s, completion_matrix(g, t, s), "closed-form")

    lo, hi = ns_s_bounds(t, g.edge_count)
    calls = 0
    start = completion_matrix(g, t, hi)

    def oracle(s, start):
        nonlocal calls
        calls += 1
        return dykstra_feasible(vect_constraints(g, t, s), start, lower_bound=0.0,
                                tol=dykstra_tol, max_iter=max_iter)

    top = oracle(hi, start)
    if not top.feasible:
        raise ConvergenceError(f"Bisection bracket empty for {g.label} at t={t}: s={hi} infeasible")
    witness = top.witness
    bottom = oracle(lo, witness)
    if bottom.feasible:
        return VectSolution(lo, bottom.witness, "lower-bound", calls)

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        result = oracle(mid, witness)
        if result.feasible:
            hi, witness = mid, result.witness
        else:
            lo = mid
    logger.debug("vect_completion %s t=%.6g: s=%.10g after %d oracle calls", g.label, t, hi, calls)
    return VectSolution(hi, witness, "bisection", calls)


def f_vect(g, t, tol=None, method="closed"):
    """Vectorial graph correlation function for vertex- and edge-transitive graphs."""
    return vect_completion(g, t, tol=tol, method=method).s


# ============== Curve tables ==============

@dataclass
class CurveTable:
    graph: str
    edge_count: int
    grid: list
    values: dict = field(default_factory=dict)
    statuses: dict = field(default_factory=dict)
    ordering_ok: bool = True
    vertex_count: int = 0

    def column(self, fn):
        if fn not in self.values:
            raise ValueError(f"Curve table has no column {fn!r}")
        return self.values[fn]

    def ordering_violations(self, tol=1e-6):
        """Gridpoints where f_loc >= f_q_upper >= f_vect >= f_ns >= 0 fails."""
        chain = [fn for fn in ("loc", "q_upper", "vect", "ns") if fn in self.values]
        violations = []
        for k, t in enumerate(self.grid):
            present = [(fn, self.values[fn][k]) for fn in chain if self.values[fn][k] is not None]
            for (upper_fn, upper), (lower_fn, lower) in zip(present, present[1:]):
                if upper < lower - tol:
                    violations.append((t, f"f_{upper_fn}={upper:.9g} < f_{lower_fn}={lower:.9g}"))
            for fn, value in present:
                if value < -tol or value > self.edge_count * t + tol:
                    violations.append((t, f"f_{fn}={value:.9g} outside [0, |E|t]"))
        return violations

    def rows(self):
        header = ["t"] + [f"f_{fn}" for fn in FUNCTIONS] + [f"status_{fn}" for fn in FUNCTIONS]
        yield header
        for k, t in enumerate(self.grid):
            row = [format(t, ".12g")]
            for fn in FUNCTIONS:
                value = self.values.get(fn, [None] * len(self.grid))[k]
                row.append("" if value is None else format(value, ".12g"))
            for fn in FUNCTIONS:
                row.append(self.statuses.get(fn, ["skipped"] * len(self.grid))[k])
            yield row

    def to_csv(self, path=None):
        """Write the table as CSV; returns the text."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerows(self.rows())
        text = buffer.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @property
    def failed(self):
        return any(status.startswith("failed") for column in self.statuses.values() for status in column)


def parse_grid(spec):
    """
    Parse 'start:step:stop' or a comma-separated list into t values.

    Range endpoints are handled in exact rational arithmetic so 0:0.05:1
    yields exactly 21 points.
    """
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"Grid range must be start:step:stop, got {spec!r}")
        try:
            start, step, stop = (Fraction(x) for x in parts)
        except ValueError:
            raise ValueError(f"Bad grid range {spec!r}")
        if step <= 0:
            raise ValueError(f"Grid step must be positive, got {step}")
        count = int((stop - start) / step) + 1
        grid = [float(start + k * step) for k in range(count)]
    else:
        try:
            grid = [float(Fraction(x)) for x in spec.split(",") if x.strip()]
        except ValueError:
            raise ValueError(f"Bad grid list {spec!r}")
    if not grid:
        raise ValueError("Grid is empty")
    for t in grid:
        _check_t(t)
    return grid


def is_symmetric_grid(grid, tol=1e-12):
    values = np.array(grid)
    return all(np.min(np.abs(values - (1.0 - t))) <= tol for t in grid)


def symmetry_check(curve, fn):
    """
    Largest violation of f(1-t) = |E|(1-2t) + f(t) over the grid.

    Args:
        curve: CurveTable with a symmetric grid
        fn: column id

    Returns:
        float
    """
    if not is_symmetric_grid(curve.grid):
        raise ValueError("symmetry_check needs a grid symmetric about 1/2")
    values = curve.column(fn)
    grid = np.array(curve.grid)
    worst = 0.0
    for k, t in enumerate(curve.grid):
        mirror = int(np.argmin(np.abs(grid - (1.0 - t))))
        if values[k] is None or values[mirror] is None:
            continue
        worst = max(worst, abs(values[mirror] - curve.edge_count * (1.0 - 2.0 * t) - values[k]))
    return worst


def convexity_check(curve, fn, tol=1e-9):
    """
    Chord convexity on consecutive gridpoints; the grid need not be even.

    Returns:
        (convex, worst excess of f(t_k) over the chord from t_{k-1} to t_{k+1})
    """
    values = curve.column(fn)
    if len(values) < 3:
        raise ValueError("convexity_check needs at least 3 gridpoints")
    worst = 0.0
    for k in range(1, len(values) - 1):
        f0, f1, f2 = values[k - 1:k + 2]
        if f0 is None or f1 is None or f2 is None:
            continue
        t0, t1, t2 = (float(t) for t in curve.grid[k - 1:k + 2])
        if not t0 < t1 < t2:
            raise ValueError("convexity_check needs a strictly increasing grid")
        chord = ((t2 - t1) * f0 + (t1 - t0) * f2) / (t2 - t0)
        worst = max(worst, f1 - chord)
    return worst <= tol, worst


def _q_upper_cell(g, t, seed, restarts):
    from operators import SCALAR_SUM_INTERVAL, fq_upper

    if not (_is_complete(g) and g.n == 5):
        return None, "unavailable"
    frac = Fraction(t).limit_denominator(20)
    if abs(float(frac) - t) > 1e-12:
        return None, "irrational-grid-point"
    lam = 5 * frac
    if not SCALAR_SUM_INTERVAL[0] <= lam <= SCALAR_SUM_INTERVAL[1]:
        return None, "out-of-interval"
    result = fq_upper(frac, seed=seed, restarts=restarts)
    if not result.success:
        return None, f"failed: {result.error}"
    return result.value, "ok"


def _evaluate_cell(g, fn, t, seed, restarts):
    try:
        if fn == "ns":
            return f_ns(g, t), "closed-form"
        if fn == "loc":
            return f_loc(g, t), "ok"
        if fn == "vect":
            solution = vect_completion(g, t)
            return solution.s, solution.status
        return _q_upper_cell(g, t, seed, restarts)
    except (ValueError, ConvergenceError) as e:
        logger.warning("f_%s failed on %s at t=%.6g: %s", fn, g.label, t, e)
        return None, f"failed: {e}"


def sample_curves(g, grid, which, workers=None, seed=None, restarts=None):
    """
    Evaluate the requested functions on every gridpoint.

    Solver failures are recorded per cell. Cells are independent and run on
    a thread pool; results are gathered by grid index.

    Returns:
        CurveTable
    """
    requested = set(which)
    unknown = requested - set(FUNCTIONS)
    if unknown or not requested:
        raise ValueError(f"Unknown or empty function set: {sorted(unknown) or 'empty'}")
    which = [fn for fn in FUNCTIONS if fn in requested]
    for t in grid:
        _check_t(t)
    workers = workers or config.SAMPLING_WORKERS
    seed = config.get_seed() if seed is None else seed

    cells = [(fn, k, t) for fn in which for k, t in enumerate(grid)]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        outcomes = list(pool.map(lambda cell: _evaluate_cell(g, cell[0], cell[2], seed, restarts), cells))

    table = CurveTable(graph=g.label, edge_count=g.edge_count, grid=list(grid), vertex_count=g.n)
    for fn in which:
        table.values[fn] = [None] * len(grid)
        table.statuses[fn] = ["skipped"] * len(grid)
    for (fn, k, _), (value, status) in zip(cells, outcomes):
        table.values[fn][k] = value
        table.statuses[fn][k] = status

    violations = table.ordering_violations()
    table.ordering_ok = not violations
    for t, message in violations:
        logger.warning("Ordering violated on %s at t=%.6g: %s", g.label, t, message)
    return table


if __name__ == "__main__":
    from graphs import make_named

    k5 = make_named("complete", 5)
    table = sample_curves(k5, parse_grid("0:0.1:1"), {"ns", "loc", "vect"})
    print(table.to_csv())
    print(f"Fractional chromatic number of C_5: {fractional_chromatic(make_named('cycle', 5)):.6f}")
