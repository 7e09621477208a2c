"""
Seed script to write sample input files for trying the command line.
Creates an edge list, a correlation JSON and a projection witness in one directory.
"""

import sys
from fractions import Fraction
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent))

from correlations import explicit_qa_not_q, from_edge_value, save_correlation
from graphs import make_named, save_edge_list
from operators import pentagon_family, save_witness

# Sample graphs written as edge lists
sample_graphs = [
    ("complete", 5),
    ("cycle", 5),
    ("petersen", None),
]


def seed_data(target="sample_data"):
    """Write the sample files into target and return their paths."""
    target = Path(target)
    target.mkdir(parents=True, exist_ok=True)
    written = []

    print("Writing edge lists...")
    for name, n in sample_graphs:
        g = make_named(name, n)
        path = target / f"{name}{n or ''}.edges"
        save_edge_list(g, path)
        written.append(path)
        print(f"  Added: {path} ({g.label}, |E|={g.edge_count})")

    print("Writing correlations...")
    correlations = {
        "qa_half.json": explicit_qa_not_q(0.5),
        "ns_cycle5.json": from_edge_value(make_named("cycle", 5), 0.4, 0.0),
    }
    for filename, corr in correlations.items():
        path = target / filename
        save_correlation(corr, path)
        written.append(path)
        print(f"  Added: {path} (provenance {corr.provenance})")

    print("Writing witness...")
    pentagon = pentagon_family()
    path = target / "pentagon_witness.json"
    save_witness(pentagon, path, Fraction(5, 2), Fraction(1, 2),
                 {"projection": pentagon.projection_residual(), "sum": pentagon.sum_residual(2.5)})
    written.append(path)
    print(f"  Added: {path}")

    print("\nDone! Sample data has been written.")
    print(f"Try 'python cli.py check {target / 'qa_half.json'} --graph complete:5'.")
    return written


if __name__ == "__main__":
    seed_data(sys.argv[1] if len(sys.argv) > 1 else "sample_data")
