import pytest
from reportlab.graphics.shapes import Polygon, Rect

from curves import CurveTable, sample_curves
from plots import BAND_COLOR, build_drawing, render_curves


def k5_table():
    grid = [0.3, 0.4, 0.5, 0.6, 0.7]
    vect = [0.75, 2.0, 3.75, 6.0, 8.75]
    return CurveTable(graph="complete:5", edge_count=20, vertex_count=5, grid=grid,
                      values={"vect": vect, "q_upper": [v + 0.01 for v in vect], "ns": [0.0] * 5})


def test_drawing_shades_gap_between_vect_and_upper_bound():
    drawing = build_drawing(k5_table())
    assert (drawing.width, drawing.height) == (800, 600)
    assert any(isinstance(item, Polygon) for item in drawing.contents)


def band_rects(drawing):
    return [item for item in drawing.contents if isinstance(item, Rect) and item.fillColor is BAND_COLOR]


def test_band_is_shaded_on_k5_only(c5):
    assert len(band_rects(build_drawing(k5_table()))) == 1
    table = sample_curves(c5, [0.0, 0.25, 0.5, 0.75, 1.0], {"ns", "loc"})
    assert table.vertex_count == 5
    assert band_rects(build_drawing(table)) == []
    # same edge count, more vertices
    other = CurveTable(graph="toy", edge_count=20, vertex_count=10, grid=[0.0, 0.5, 1.0],
                       values={"ns": [0.0, 1.0, 20.0]})
    assert band_rects(build_drawing(other)) == []


def test_drawing_without_values_is_rejected():
    table = CurveTable(graph="toy", edge_count=2, grid=[0.5], values={"vect": [None]})
    with pytest.raises(ValueError, match="no sampled values"):
        build_drawing(table)


def test_render_svg_and_pdf(tmp_path, k5):
    table = sample_curves(k5, [0.0, 0.25, 0.5, 0.75, 1.0], {"ns", "vect"})
    svg = render_curves(table, tmp_path / "k5.svg")
    pdf = render_curves(table, tmp_path / "k5.pdf", title="K5")
    assert "<svg" in svg.read_text()
    assert pdf.read_bytes().startswith(b"%PDF")
    with pytest.raises(ValueError, match=".svg or .pdf"):
        render_curves(table, tmp_path / "k5.png")
