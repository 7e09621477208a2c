import math

import numpy as np
import pytest

from curves import (
    CurveTable, completion_matrix, convexity_check, f_loc, f_ns, f_vect, f_vect_complete,
    fractional_chromatic, is_symmetric_grid, ns_s_bounds, parse_grid, sample_curves,
    symmetry_check, vect_completion, vect_constraints, zero_threshold,
)
from graphs import from_edge_list, make_named, parse_graph_spec
from numerics import cholesky_reduce, dykstra_feasible, min_eigenvalue


def circulant_f_vect_c5(t, points=200001):
    """
    Smallest edge sum for C_5 over circulant completions.

    Edge entries a, distance-two entries b; the Schur complement is circulant
    with eigenvalues c0 + 2 c1 cos(2 pi k / 5) + 2 c2 cos(4 pi k / 5).
    """
    b = np.linspace(0.0, t, points)
    c0 = t - t * t
    c2 = b - t * t
    lower = np.full_like(b, max(0.0, 2 * t - 1))
    upper = np.full_like(b, t)
    for k in range(5):
        cos1 = math.cos(2 * math.pi * k / 5)
        cos2 = math.cos(4 * math.pi * k / 5)
        # c0 + 2 (a - t^2) cos1 + 2 c2 cos2 >= 0
        rest = c0 + 2 * c2 * cos2 - 2 * t * t * cos1
        if cos1 > 1e-12:
            lower = np.maximum(lower, -rest / (2 * cos1))
        elif cos1 < -1e-12:
            upper = np.minimum(upper, -rest / (2 * cos1))
    feasible = lower <= upper + 1e-15
    return 10 * float(lower[feasible].min())


# ============== Nonsignalling ==============

@pytest.mark.parametrize("t,expected", [(0.3, 0.0), (0.75, 10.0), (0.5, 0.0), (1.0, 20.0)])
def test_f_ns_k5(k5, t, expected):
    assert f_ns(k5, t) == pytest.approx(expected)


@pytest.mark.parametrize("t,bounds", [(0.3, (0.0, 6.0)), (0.75, (10.0, 15.0)), (1.0, (20.0, 20.0))])
def test_ns_s_bounds(t, bounds):
    assert ns_s_bounds(t, 20) == pytest.approx(bounds)


def test_t_out_of_range(k5):
    with pytest.raises(ValueError, match="t must lie"):
        f_ns(k5, 1.2)


# ============== Local ==============

def test_f_loc_known_values(k3, k5, c5):
    assert f_loc(k3, 1 / 3) == pytest.approx(0.0, abs=1e-9)
    assert f_loc(c5, 1.0) == pytest.approx(10.0)
    assert f_loc(k5, 0.5) == pytest.approx(4.0)


def test_f_loc_reduced_matches_full(c5):
    for g in (c5, make_named("complete", 4)):
        for t in (0.2, 0.45, 0.7):
            assert f_loc(g, t, reduce=True) == pytest.approx(f_loc(g, t, reduce=False), abs=1e-9)


def test_f_loc_non_transitive_graph(p3):
    # S = {0, 2} has no edges
    assert f_loc(p3, 0.5) == pytest.approx(0.0, abs=1e-9)
    assert f_loc(p3, 1.0) == pytest.approx(4.0)


@pytest.mark.parametrize("fixture,chi", [("k3", 3.0), ("k5", 5.0), ("c5", 2.5), ("petersen", 2.5)])
def test_fractional_chromatic(request, fixture, chi):
    assert fractional_chromatic(request.getfixturevalue(fixture)) == pytest.approx(chi)


@pytest.mark.parametrize("n", range(3, 9))
def test_fractional_chromatic_complete_graphs(n):
    assert fractional_chromatic(make_named("complete", n)) == pytest.approx(float(n), abs=1e-9)


@pytest.mark.parametrize("graph", ["complete:3", "complete:4", "complete:6", "cycle:5", "petersen"])
def test_f_loc_vanishes_below_inverse_fractional_chromatic(graph):
    g = parse_graph_spec(graph)
    threshold = 1.0 / fractional_chromatic(g)
    assert f_loc(g, threshold) == pytest.approx(0.0, abs=1e-9)
    assert f_loc(g, threshold * 0.5) == pytest.approx(0.0, abs=1e-9)
    assert f_loc(g, threshold + 1e-3) > 0.0


def test_zero_threshold_cross_check(c5):
    assert zero_threshold(c5) == pytest.approx(0.4, abs=1e-4)


# ============== Vectorial ==============

@pytest.mark.parametrize("t,expected", [(0.1, 0.0), (0.4, 2.0), (0.5, 3.75), (0.9, 16.0)])
def test_f_vect_complete(t, expected):
    assert f_vect_complete(5, t) == pytest.approx(expected)


def test_f_vect_sdp_path_k5(k5):
    solution = vect_completion(k5, 0.4, method="sdp")
    assert solution.s == pytest.approx(2.0, abs=1e-6)
    assert solution.status == "bisection"


def test_f_vect_k3_witness_is_singular(k3):
    solution = vect_completion(k3, 1 / 3, method="sdp")
    assert solution.s == pytest.approx(0.0, abs=1e-6)
    assert min_eigenvalue(cholesky_reduce(solution.witness)) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_sdp_path_matches_closed_form(n):
    g = make_named("complete", n)
    for t in parse_grid("0:0.05:1"):
        assert vect_completion(g, t, method="sdp").s == pytest.approx(f_vect_complete(n, t), abs=1e-6)


def test_feasibility_answers_change_sign_once(k5):
    t = 0.4
    answers = []
    for s in np.linspace(0.0, 8.0, 17):
        result = dykstra_feasible(vect_constraints(k5, t, s), completion_matrix(k5, t, s), tol=1e-9)
        answers.append(result.feasible)
    assert answers == sorted(answers)
    assert answers.index(True) == 4  # s = 2


@pytest.mark.slow
def test_f_vect_c5_matches_circulant_oracle(c5):
    solution = vect_completion(c5, 0.5, tol=1e-6)
    expected = circulant_f_vect_c5(0.5)
    assert expected == pytest.approx(0.47746, abs=1e-4)
    assert solution.s == pytest.approx(expected, abs=1e-3)
    assert solution.witness.entries.min() >= 0.0


def test_f_vect_rejects_non_transitive(p3):
    with pytest.raises(ValueError, match="transitive"):
        f_vect(p3, 0.5)
    with pytest.raises(ValueError, match="edge"):
        f_vect(from_edge_list(3, []), 0.5)


def test_f_vect_below_f_loc(k5):
    for t in (0.2, 0.35, 0.5, 0.65):
        assert f_vect(k5, t) <= f_loc(k5, t) + 1e-9


# ============== Tables and checks ==============

def test_parse_grid():
    assert len(parse_grid("0:0.05:1")) == 21
    assert parse_grid("0, 1/2, 1") == [0.0, 0.5, 1.0]
    for bad in ("0:0:1", "0:0.1", "a,b", "0:0.5:2"):
        with pytest.raises(ValueError):
            parse_grid(bad)


def test_symmetric_grid_detection():
    assert is_symmetric_grid(parse_grid("0:0.05:1"))
    assert not is_symmetric_grid([0.1, 0.2])


def test_sample_curves_k5(k5):
    table = sample_curves(k5, parse_grid("0:0.05:1"), {"ns", "vect"})
    assert len(table.grid) == 21
    assert table.ordering_ok
    assert all(v >= n - 1e-12 for v, n in zip(table.column("vect"), table.column("ns")))
    assert symmetry_check(table, "ns") == pytest.approx(0.0, abs=1e-12)
    assert symmetry_check(table, "vect") <= 1e-12
    assert convexity_check(table, "ns")[0]
    assert convexity_check(table, "vect")[0]
    with pytest.raises(ValueError):
        table.column("loc")


def test_sample_curves_loc_symmetry_and_convexity(k3, k5):
    assert symmetry_check(sample_curves(k3, parse_grid("0:0.1:1"), {"loc"}), "loc") <= 1e-6
    table = sample_curves(k5, parse_grid("0:0.1:1"), {"ns", "loc", "vect"}, workers=2)
    assert convexity_check(table, "loc")[0]
    assert table.ordering_ok
    assert not table.failed


def test_c5_ns_and_loc_symmetry_and_convexity(c5):
    table = sample_curves(c5, parse_grid("0:0.1:1"), {"ns", "loc"})
    for fn in ("ns", "loc"):
        assert symmetry_check(table, fn) <= 1e-6
        assert convexity_check(table, fn, tol=1e-7)[0]


@pytest.mark.slow
def test_c5_vect_symmetry_and_convexity(c5):
    table = sample_curves(c5, parse_grid("0:0.1:1"), {"vect"})
    assert not table.failed
    assert symmetry_check(table, "vect") <= 1e-6
    assert convexity_check(table, "vect", tol=1e-6)[0]


def test_sample_curves_c5_ns_is_closed_form(c5):
    table = sample_curves(c5, [0.0, 0.5, 0.75], {"ns"})
    assert table.column("ns") == pytest.approx([0.0, 0.0, 5.0])
    assert set(table.statuses["ns"]) == {"closed-form"}


def test_q_upper_cells(k5, c5):
    table = sample_curves(k5, [0.1, 0.5, math.sqrt(0.3)], {"q_upper"})
    assert table.statuses["q_upper"] == ["out-of-interval", "ok", "irrational-grid-point"]
    assert table.column("q_upper")[1] == pytest.approx(3.75, abs=1e-9)
    assert sample_curves(c5, [0.5], {"q_upper"}).statuses["q_upper"] == ["unavailable"]


def test_failed_cells_are_recorded(p3):
    table = sample_curves(p3, [0.5], {"ns", "vect"})
    assert table.failed
    assert table.statuses["vect"][0].startswith("failed")
    assert table.column("vect") == [None]
    assert table.column("ns") == [0.0]


def test_sample_curves_rejects_unknown_function(k5):
    with pytest.raises(ValueError):
        sample_curves(k5, [0.5], {"ns", "qc"})
    with pytest.raises(ValueError):
        sample_curves(k5, [0.5], set())


def test_ordering_violations_reported():
    table = CurveTable(graph="toy", edge_count=2, grid=[0.5],
                       values={"loc": [0.1], "vect": [0.2], "ns": [0.0]})
    violations = table.ordering_violations()
    assert len(violations) == 1
    assert "f_loc" in violations[0][1]


def test_convexity_check_detects_concave_curve():
    table = CurveTable(graph="toy", edge_count=2, grid=[0.0, 0.5, 1.0], values={"ns": [0.0, 1.0, 0.0]})
    convex, worst = convexity_check(table, "ns")
    assert not convex
    assert worst == pytest.approx(1.0)


def test_convexity_check_uses_chords_on_uneven_grids(k5):
    table = sample_curves(k5, [0.4, 0.5, 0.9, 1.0], {"ns"})
    assert table.column("ns") == pytest.approx([0.0, 0.0, 16.0, 20.0])
    convex, worst = convexity_check(table, "ns")
    assert convex
    assert worst == pytest.approx(0.0, abs=1e-9)

    # the midpoint of the neighbours would be 0.5 here
    bent = CurveTable(graph="toy", edge_count=1, grid=[0.0, 0.1, 1.0], values={"ns": [0.0, 0.5, 1.0]})
    convex, worst = convexity_check(bent, "ns")
    assert not convex
    assert worst == pytest.approx(0.4)


def test_convexity_check_rejects_repeated_gridpoints():
    table = CurveTable(graph="toy", edge_count=1, grid=[0.5, 0.5, 1.0], values={"ns": [0.0, 0.0, 1.0]})
    with pytest.raises(ValueError, match="increasing"):
        convexity_check(table, "ns")


def test_csv_output(tmp_path, k5):
    table = sample_curves(k5, [0.0, 0.5, 1.0], {"ns"})
    path = tmp_path / "curves.csv"
    text = table.to_csv(path)
    lines = path.read_text().splitlines()
    assert text == path.read_text()
    assert lines[0] == "t,f_ns,f_loc,f_vect,f_q_upper,status_ns,status_loc,status_vect,status_q_upper"
    assert lines[3].startswith("1,20,,,,closed-form,skipped")
    assert len(lines) == 4
