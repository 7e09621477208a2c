"""
Command Line Interface
Curve sampling, non-closure certificates, witness verification, game analysis and graph reports.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import config
from correlations import F_objective, load_correlation
from curves import FUNCTIONS, f_vect_complete, fractional_chromatic, parse_grid, sample_curves
from games import SignedGame, attainment_check
from graphs import MAX_ENUMERATION_VERTICES, graph_info, parse_graph_spec
from numerics import ConvergenceError
from operators import SCALAR_SUM_INTERVAL, fq_upper, save_witness, verify_witness
from plots import render_curves

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3

# Largest allowed |f_q_upper - f_vect| on a certified gridpoint
CERTIFICATE_GAP_TOL = 1e-5


@dataclass
class RunConfig:
    """Validated settings of a curves run."""
    graph: object
    grid: list
    functions: list
    seed: int
    restarts: int = None
    workers: int = None
    csv_path: Path = None
    plot_path: Path = None
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.grid or any(not 0.0 <= t <= 1.0 for t in self.grid):
            raise ValueError("Grid must be non-empty and lie in [0, 1]")
        if not self.functions:
            raise ValueError("Select at least one function (--fns, --floc, --fvect, --fq or --all)")
        if any(value <= 0 for value in self.tolerances.values()):
            raise ValueError(f"Tolerances must be positive: {self.tolerances}")


def current_tolerances():
    return {
        "validate": config.VALIDATE_TOL,
        "psd": config.PSD_TOL,
        "feasibility": config.FEASIBILITY_TOL,
        "bisection": config.BISECTION_TOL,
        "search_sum": config.SEARCH_SUM_TOL,
        "certificate_gap": CERTIFICATE_GAP_TOL,
    }


def parse_t(text):
    """
    Parse a marginal given as 'p/q' (exact) or 'irrational:x' / 'approx:x'.

    Returns:
        (value, rational) with value a Fraction when rational
    """
    text = text.strip()
    kind, sep, number = text.partition(":")
    if sep:
        if kind not in ("irrational", "approx"):
            raise ValueError(f"Unknown t qualifier {kind!r} (use irrational: or approx:)")
        try:
            return float(number), False
        except ValueError:
            raise ValueError(f"Bad decimal in {text!r}")
    if "." in text or "e" in text.lower():
        raise ValueError(f"Decimal t {text!r} is ambiguous; write it as p/q or irrational:{text}")
    try:
        return Fraction(text), True
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"Bad rational t {text!r}")


def _print_json(data):
    print(json.dumps(data, indent=2))


# ============== Commands ==============

def cmd_curves(args):
    functions = list(FUNCTIONS) if args.all else [
        fn for fn, flag in zip(FUNCTIONS, (args.fns, args.floc, args.fvect, args.fq)) if flag
    ]
    run = RunConfig(
        graph=parse_graph_spec(args.graph),
        grid=parse_grid(args.grid),
        functions=functions,
        seed=config.get_seed(args.seed),
        restarts=args.restarts,
        workers=args.workers,
        csv_path=Path(args.out) if args.out else None,
        plot_path=Path(args.plot) if args.plot else None,
        tolerances=current_tolerances(),
    )
    table = sample_curves(run.graph, run.grid, run.functions, workers=run.workers,
                          seed=run.seed, restarts=run.restarts)
    text = table.to_csv(run.csv_path)
    if run.csv_path is None:
        print(text, end="")
    if run.plot_path is not None:
        render_curves(table, run.plot_path)
    if not table.ordering_ok:
        logger.warning("Ordering check failed on %s", run.graph.label)
    return EXIT_SOLVER if table.failed else EXIT_OK


def _parse_t_list(spec):
    values = []
    for item in (x for x in spec.split(",") if x.strip()):
        t, rational = parse_t(item)
        if not rational:
            raise ValueError(f"Certificate gridpoints must be exact rationals, got {item!r}")
        if not SCALAR_SUM_INTERVAL[0] <= 5 * t <= SCALAR_SUM_INTERVAL[1]:
            raise ValueError(f"t={t} outside [{SCALAR_SUM_INTERVAL[0] / 5:.5f}, {SCALAR_SUM_INTERVAL[1] / 5:.5f}]")
        values.append(t)
    if not values:
        raise ValueError("Empty t-list")
    return sorted(set(values))


def second_differences(points):
    """
    f(a) - 2 f(b) + f(c) for every equally spaced triple a < b < c.

    Args:
        points: dict mapping exact t to value
    """
    ts = sorted(points)
    result = []
    for i, a in enumerate(ts):
        for j in range(i + 1, len(ts)):
            b = ts[j]
            c = 2 * b - a
            if c in points:
                result.append({
                    "t": [str(a), str(b), str(c)],
                    "value": points[a] - 2 * points[b] + points[c],
                })
    return result


def cmd_certify_nonclosure(args):
    ts = _parse_t_list(args.t_list)
    seed = config.get_seed(args.seed)
    witness_dir = Path(args.witness_dir) if args.witness_dir else None
    if witness_dir is not None:
        witness_dir.mkdir(parents=True, exist_ok=True)

    entries = []
    upper_values = {}
    complete = True
    for t in ts:
        target = f_vect_complete(5, float(t))
        result = fq_upper(t, seed=seed, restarts=args.restarts)
        entry = {"t": str(t), "f_vect": target, **result.to_dict()}
        if result.success:
            upper_values[t] = result.value
            if witness_dir is not None:
                path = witness_dir / f"witness_t{t.numerator}_{t.denominator}.json"
                save_witness(result.witness, path, 5 * t, t,
                             {"projection": result.witness.projection_residual(),
                              "sum": result.sum_residual},
                             objective=result.value)
                entry["witness"] = str(path)
        else:
            complete = False
            logger.warning("No witness at t=%s: %s", t, result.error)
        entries.append(entry)

    gaps = [abs(upper_values[t] - f_vect_complete(5, float(t))) for t in upper_values]
    max_gap = max(gaps) if gaps else None
    diffs = second_differences(upper_values)
    certificate = {
        "graph": "complete:5",
        "seed": seed,
        "restarts": args.restarts or config.SEARCH_RESTARTS,
        "tolerances": current_tolerances(),
        "points": entries,
        "summary": {
            "complete": complete,
            "max_gap": max_gap,
            "gap_within_tolerance": max_gap is not None and max_gap <= CERTIFICATE_GAP_TOL,
            "second_differences": diffs,
            "strictly_convex": bool(diffs) and all(d["value"] > 0 for d in diffs),
        },
    }
    text = json.dumps(certificate, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    summary = certificate["summary"]
    return EXIT_OK if summary["complete"] and summary["gap_within_tolerance"] else EXIT_SOLVER


def cmd_verify_witness(args):
    try:
        data = json.loads(Path(args.path).read_text())
    except json.JSONDecodeError as e:
        raise ValueError(f"{args.path}: invalid JSON ({e})")
    report = verify_witness(data)
    _print_json(report)
    return EXIT_OK


def cmd_game(args):
    t, rational = parse_t(args.t)
    _print_json(attainment_check(SignedGame(args.n, t, rational)))
    return EXIT_OK


def cmd_check(args):
    corr, report = load_correlation(args.path)
    output = {"n": corr.n, "provenance": corr.provenance, **report.to_dict(), "all_pass": report.all_pass}
    if args.graph:
        output["F"] = F_objective(corr, parse_graph_spec(args.graph))
    _print_json(output)
    return EXIT_OK


def cmd_graph_info(args):
    g = parse_graph_spec(args.graph)
    info = graph_info(g)
    if g.n <= MAX_ENUMERATION_VERTICES:
        info["fractional_chromatic_number"] = fractional_chromatic(g)
    _print_json(info)
    return EXIT_OK


# ============== Entry point ==============

def build_parser():
    parser = argparse.ArgumentParser(prog="corrgraph", description="Graph correlation function toolkit")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING (default from CORRGRAPH_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    curves = sub.add_parser("curves", help="Sample f_ns, f_loc, f_vect and f_q upper bounds on a grid")
    curves.add_argument("--graph", required=True, help="complete:5, cycle:7, path:3, petersen or an edge-list file")
    curves.add_argument("--grid", default="0:0.05:1", help="start:step:stop or a comma-separated list")
    curves.add_argument("--fns", action="store_true")
    curves.add_argument("--floc", action="store_true")
    curves.add_argument("--fvect", action="store_true")
    curves.add_argument("--fq", action="store_true", help="f_q upper bounds (K_5 only)")
    curves.add_argument("--all", action="store_true")
    curves.add_argument("--out", help="CSV path (default stdout)")
    curves.add_argument("--plot", "--svg", dest="plot", help="plot path ending in .svg or .pdf")
    curves.add_argument("--seed", type=int)
    curves.add_argument("--restarts", type=int)
    curves.add_argument("--workers", type=int)
    curves.set_defaults(handler=cmd_curves)

    certify = sub.add_parser("certify-nonclosure", help="Rational-grid certificate f_q_upper = f_vect on K_5")
    certify.add_argument("--t-list", default="3/10,2/5,1/2,3/5,7/10")
    certify.add_argument("--witness-dir")
    certify.add_argument("--out", help="certificate JSON path (default stdout)")
    certify.add_argument("--seed", type=int)
    certify.add_argument("--restarts", type=int)
    certify.set_defaults(handler=cmd_certify_nonclosure)

    verify = sub.add_parser("verify-witness", help="Re-check a projection witness file")
    verify.add_argument("path")
    verify.set_defaults(handler=cmd_verify_witness)

    game = sub.add_parser("game", help="Signed game value and attainment")
    game.add_argument("--n", type=int, default=5)
    game.add_argument("--t", required=True, help="p/q, irrational:x or approx:x")
    game.set_defaults(handler=cmd_game)

    check = sub.add_parser("check", help="Validate a correlation JSON file")
    check.add_argument("path")
    check.add_argument("--graph", help="also report F for this graph")
    check.set_defaults(handler=cmd_check)

    info = sub.add_parser("graph-info", help="Transitivity and automorphism report")
    info.add_argument("--graph", required=True)
    info.set_defaults(handler=cmd_graph_info)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config.setup_logging(args.log_level)
        return args.handler(args)
    except (ValueError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as e:
        print(f"Solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
