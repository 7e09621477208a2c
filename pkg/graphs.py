"""
Graphs Module
Simple graphs with the ordered-pair edge convention, named constructors and automorphism search.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

NAMED_GRAPHS = ("complete", "cycle", "path", "petersen")

# Brute-force automorphism enumeration bound
MAX_ENUMERATION_VERTICES = 12


@dataclass(frozen=True)
class Graph:
    """
    Simple undirected graph on vertices 0..n-1.

    Edges are stored as ordered pairs, so every undirected edge appears twice
    and edge_count is twice the number of undirected edges.
    """
    n: int
    edges: frozenset
    name: str = ""

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"Vertex count must be a positive integer, got {self.n!r}")
        edges = frozenset((int(v), int(w)) for v, w in self.edges)
        for v, w in edges:
            if not (0 <= v < self.n and 0 <= w < self.n):
                raise ValueError(f"Edge ({v}, {w}) out of range for n={self.n}")
            if v == w:
                raise ValueError(f"Loop at vertex {v} is not allowed")
            if (w, v) not in edges:
                raise ValueError(f"Edge ({v}, {w}) has no reverse pair")
        object.__setattr__(self, "edges", edges)

    @property
    def edge_count(self):
        """Ordered edge count |E|."""
        return len(self.edges)

    @cached_property
    def undirected_edges(self):
        return tuple(sorted((v, w) for v, w in self.edges if v < w))

    @cached_property
    def _neighbors(self):
        table = [[] for _ in range(self.n)]
        for v, w in sorted(self.edges):
            table[v].append(w)
        return tuple(tuple(row) for row in table)

    def neighbors(self, v):
        return self._neighbors[v]

    def degree(self, v):
        return len(self._neighbors[v])

    def has_edge(self, v, w):
        return (v, w) in self.edges

    def adjacency_matrix(self):
        adj = np.zeros((self.n, self.n), dtype=bool)
        for v, w in self.edges:
            adj[v, w] = True
        return adj

    @property
    def label(self):
        return self.name or f"graph(n={self.n},|E|={self.edge_count})"


# ============== Constructors ==============

def from_edge_list(n, pairs, name=""):
    """Build a graph from undirected pairs; duplicates and both orientations are merged."""
    edges = set()
    for v, w in pairs:
        edges.add((int(v), int(w)))
        edges.add((int(w), int(v)))
    return Graph(n=int(n), edges=frozenset(edges), name=name)


def make_named(name, n=None):
    """
    Build one of the named graphs.

    Args:
        name: complete, cycle, path or petersen
        n: vertex count (ignored for petersen)

    Returns:
        Graph
    """
    name = name.lower().strip()
    if name not in NAMED_GRAPHS:
        raise ValueError(f"Unknown graph name: {name!r} (expected one of {', '.join(NAMED_GRAPHS)})")

    if name == "petersen":
        outer = [(i, (i + 1) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        return from_edge_list(10, outer + spokes + inner, name="petersen")

    if n is None:
        raise ValueError(f"Graph {name!r} needs a vertex count")
    n = int(n)
    minimum = 2 if name == "path" else 3
    if n < minimum:
        raise ValueError(f"Graph {name!r} needs n >= {minimum}, got {n}")

    if name == "complete":
        pairs = [(v, w) for v in range(n) for w in range(v + 1, n)]
    elif name == "cycle":
        pairs = [(v, (v + 1) % n) for v in range(n)]
    else:
        pairs = [(v, v + 1) for v in range(n - 1)]
    return from_edge_list(n, pairs, name=f"{name}:{n}")


def load_edge_list(path, n=None):
    """
    Load a graph from an edge-list file.

    One undirected edge "u v" per line with 0-indexed integers; '#' starts a
    comment. The loader symmetrizes and deduplicates. The vertex count is the
    largest index plus one unless n is given.
    """
    path = Path(path)
    pairs = []
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'u v', got {raw!r}")
        try:
            v, w = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"{path}:{lineno}: vertices must be integers, got {raw!r}")
        if v < 0 or w < 0:
            raise ValueError(f"{path}:{lineno}: negative vertex index")
        pairs.append((v, w))

    largest = max((max(v, w) for v, w in pairs), default=-1)
    if n is None:
        n = largest + 1
    if n < 1:
        raise ValueError(f"{path}: no vertices")
    if largest >= n:
        raise ValueError(f"{path}: vertex {largest} out of range for n={n}")
    return from_edge_list(n, pairs, name=path.stem)


def save_edge_list(g, path):
    lines = [f"# {g.label}"]
    lines += [f"{v} {w}" for v, w in g.undirected_edges]
    Path(path).write_text("\n".join(lines) + "\n")


def parse_graph_spec(spec):
    """Parse 'complete:5', 'cycle:7', 'path:3', 'petersen' or an edge-list path."""
    head, _, tail = spec.partition(":")
    if head.lower() in NAMED_GRAPHS:
        if not tail:
            return make_named(head)
        try:
            count = int(tail)
        except ValueError:
            raise ValueError(f"Bad vertex count in graph spec {spec!r}")
        return make_named(head, count)
    if Path(spec).exists():
        return load_edge_list(spec)
    raise ValueError(f"Unrecognized graph spec: {spec!r}")


# ============== Automorphisms ==============

def _check_enumerable(g):
    if g.n > MAX_ENUMERATION_VERTICES:
        raise ValueError(
            f"Automorphism enumeration limited to n <= {MAX_ENUMERATION_VERTICES}, got n={g.n}"
        )


def _backtrack(g, adj, prefix, visit):
    """
    Extend a partial vertex map to automorphisms.

    prefix is a list with prefix[i] = image of vertex i. visit is called with
    each complete automorphism and returns True to stop the search.
    """
    i = len(prefix)
    if i == g.n:
        return visit(tuple(prefix))
    used = set(prefix)
    for u in range(g.n):
        if u in used or g.degree(u) != g.degree(i):
            continue
        if any(adj[i, j] != adj[u, prefix[j]] for j in range(i)):
            continue
        prefix.append(u)
        stop = _backtrack(g, adj, prefix, visit)
        prefix.pop()
        if stop:
            return True
    return False


def automorphisms(g):
    """
    All permutations pi with (v,w) in E iff (pi(v),pi(w)) in E.

    Permutations are tuples with pi[v] the image of v, in lexicographic order
    (identity first).
    """
    _check_enumerable(g)
    adj = g.adjacency_matrix()
    found = []

    def visit(perm):
        found.append(perm)
        return False

    _backtrack(g, adj, [], visit)
    logger.debug("%s: %d automorphisms", g.label, len(found))
    return found


def _find_automorphism(g, adj, fixed, target):
    """First automorphism fixing 0..fixed-1 pointwise and sending vertex fixed to target."""
    hit = []

    def visit(perm):
        hit.append(perm)
        return True

    prefix = list(range(fixed))
    if g.degree(target) != g.degree(fixed):
        return None
    if any(adj[fixed, j] != adj[target, j] for j in range(fixed)):
        return None
    prefix.append(target)
    _backtrack(g, adj, prefix, visit)
    return hit[0] if hit else None


def _stabilizer_chain(g):
    _check_enumerable(g)
    adj = g.adjacency_matrix()
    generators = []
    orbit_sizes = []
    for level in range(g.n):
        orbit = [level]
        for target in range(level + 1, g.n):
            perm = _find_automorphism(g, adj, level, target)
            if perm is not None:
                orbit.append(target)
                generators.append(perm)
        orbit_sizes.append(len(orbit))
    return generators, orbit_sizes


def automorphism_generators(g):
    """Strong generating set of Aut(G), one automorphism per stabilizer coset representative found."""
    return _stabilizer_chain(g)[0]


def automorphism_group_order(g):
    """|Aut(G)| as the product of the stabilizer-chain orbit sizes."""
    return math.prod(_stabilizer_chain(g)[1])


def orbits(items, generators, act):
    """Orbits of a finite set of hashable items under the group generated by generators."""
    remaining = set(items)
    result = []
    while remaining:
        seed = min(remaining)
        orbit = {seed}
        frontier = [seed]
        while frontier:
            x = frontier.pop()
            for perm in generators:
                y = act(perm, x)
                if y not in orbit:
                    orbit.add(y)
                    frontier.append(y)
        result.append(sorted(orbit))
        remaining -= orbit
    return sorted(result)


def edge_orbits(g, ordered=False):
    """Orbits of Aut(G) on undirected edges, or on ordered edges when ordered=True."""
    generators = automorphism_generators(g)
    if ordered:
        return orbits(g.edges, generators, lambda p, e: (p[e[0]], p[e[1]]))
    return orbits(
        g.undirected_edges, generators,
        lambda p, e: tuple(sorted((p[e[0]], p[e[1]]))),
    )


def is_vertex_transitive(g):
    generators = automorphism_generators(g)
    vertex_orbits = orbits(range(g.n), generators, lambda p, v: p[v])
    return len(vertex_orbits) == 1


def is_edge_transitive(g):
    """Transitivity of Aut(G) on undirected edges (vacuously true without edges)."""
    return len(edge_orbits(g)) <= 1


def is_arc_transitive(g):
    """Transitivity of Aut(G) on ordered edges."""
    return len(edge_orbits(g, ordered=True)) <= 1


def is_vertex_edge_transitive(g):
    return is_vertex_transitive(g) and is_edge_transitive(g)


# ============== Independent sets ==============

def independent_sets(g, include_empty=False):
    """All independent sets as sorted tuples, ordered by bitmask."""
    _check_enumerable(g)
    adj = g.adjacency_matrix()
    result = []
    for mask in range(0 if include_empty else 1, 1 << g.n):
        members = [v for v in range(g.n) if mask >> v & 1]
        if all(not adj[v, w] for k, v in enumerate(members) for w in members[k + 1:]):
            result.append(tuple(members))
    return result


def graph_info(g):
    """Summary dictionary used by the graph-info command."""
    return {
        "name": g.label,
        "n": g.n,
        "ordered_edges": g.edge_count,
        "undirected_edges": len(g.undirected_edges),
        "automorphism_group_order": automorphism_group_order(g),
        "vertex_transitive": is_vertex_transitive(g),
        "edge_transitive": is_edge_transitive(g),
        "arc_transitive": is_arc_transitive(g),
    }


if __name__ == "__main__":
    for spec in ("complete:5", "cycle:5", "petersen", "path:3"):
        info = graph_info(parse_graph_spec(spec))
        print(f"{info['name']}: |E|={info['ordered_edges']}  |Aut|={info['automorphism_group_order']}  "
              f"vertex-transitive={info['vertex_transitive']}  edge-transitive={info['edge_transitive']}")
