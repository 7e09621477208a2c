"""
Plots Module
Renders sampled correlation-function curves to SVG or PDF with reportlab graphics.
"""

import logging
from pathlib import Path

from reportlab.graphics import renderPDF, renderSVG
from reportlab.graphics.charts.legends import Legend
from reportlab.graphics.charts.lineplots import LinePlot
from reportlab.graphics.shapes import Drawing, Polygon, Rect, String
from reportlab.lib import colors

from correlations import QA_NOT_Q_INTERVAL

logger = logging.getLogger(__name__)

WIDTH, HEIGHT = 800, 600
PLOT_BOX = (70, 70, 640, 460)  # x, y, width, height

SERIES_COLORS = {
    "ns": colors.HexColor("#0a1622"),
    "vect": colors.HexColor("#d80010"),
    "q_upper": colors.HexColor("#2563eb"),
    "loc": colors.HexColor("#6b7280"),
}
BAND_COLOR = colors.Color(0.85, 0.85, 0.85, alpha=0.5)
GAP_COLOR = colors.Color(0.85, 0.0, 0.06, alpha=0.25)


def _is_k5(table):
    # 20 ordered edges on 5 vertices only occur in K_5
    return table.vertex_count == 5 and table.edge_count == 20


def _series(table, fn):
    return [(t, v) for t, v in zip(table.grid, table.values.get(fn, [])) if v is not None]


def _to_canvas(t, value, y_max):
    x0, y0, width, height = PLOT_BOX
    return x0 + t * width, y0 + value / y_max * height


def _gap_polygon(table, y_max):
    """Region between f_vect and f_q_upper inside the interval, or None when either is missing."""
    lo, hi = QA_NOT_Q_INTERVAL
    vect = dict(_series(table, "vect"))
    upper = dict(_series(table, "q_upper"))
    shared = sorted(t for t in vect.keys() & upper.keys() if lo <= t <= hi)
    if len(shared) < 2:
        return None
    points = []
    for t in shared:
        points.extend(_to_canvas(t, vect[t], y_max))
    for t in reversed(shared):
        points.extend(_to_canvas(t, upper[t], y_max))
    return Polygon(points, fillColor=GAP_COLOR, strokeColor=None)


def build_drawing(table, title=None):
    """
    Line plot with one series per sampled function.

    On K_5 the interval [(sqrt5-1)/(2 sqrt5), (sqrt5+1)/(2 sqrt5)] is shaded;
    there f_vect and f_q_upper coincide on rational t.

    Returns:
        reportlab Drawing of size 800 x 600
    """
    fns = [fn for fn in SERIES_COLORS if _series(table, fn)]
    if not fns:
        raise ValueError("Curve table has no sampled values to plot")
    y_max = max(v for fn in fns for _, v in _series(table, fn)) or 1.0
    y_max *= 1.05
    x0, y0, width, height = PLOT_BOX

    drawing = Drawing(WIDTH, HEIGHT)
    if _is_k5(table):
        lo, hi = QA_NOT_Q_INTERVAL
        drawing.add(Rect(x0 + lo * width, y0, (hi - lo) * width, height, fillColor=BAND_COLOR, strokeColor=None))
    gap = _gap_polygon(table, y_max)
    if gap is not None:
        drawing.add(gap)

    plot = LinePlot()
    plot.x, plot.y, plot.width, plot.height = PLOT_BOX
    plot.data = [_series(table, fn) for fn in fns]
    for k, fn in enumerate(fns):
        plot.lines[k].strokeColor = SERIES_COLORS[fn]
        plot.lines[k].strokeWidth = 1.5
    plot.xValueAxis.valueMin = 0.0
    plot.xValueAxis.valueMax = 1.0
    plot.xValueAxis.valueSteps = [k / 10 for k in range(11)]
    plot.xValueAxis.labelTextFormat = "%.1f"
    plot.yValueAxis.valueMin = 0.0
    plot.yValueAxis.valueMax = y_max
    plot.yValueAxis.labelTextFormat = "%.2f"
    drawing.add(plot)

    legend = Legend()
    legend.x, legend.y = x0 + 10, y0 + height - 10
    legend.fontName = "Helvetica"
    legend.fontSize = 10
    legend.colorNamePairs = [(SERIES_COLORS[fn], f"f_{fn}") for fn in fns]
    drawing.add(legend)

    drawing.add(String(WIDTH / 2, HEIGHT - 40, title or f"Correlation functions of {table.graph}",
                       fontName="Helvetica-Bold", fontSize=16, textAnchor="middle"))
    drawing.add(String(x0 + width / 2, 30, "t", fontName="Helvetica", fontSize=12, textAnchor="middle"))
    return drawing


def render_curves(table, path, title=None):
    """
    Write the plot to path; the extension (.svg or .pdf) selects the backend.

    Returns:
        Path written
    """
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix not in (".svg", ".pdf"):
        raise ValueError(f"Plot path must end in .svg or .pdf, got {path.name!r}")
    drawing = build_drawing(table, title)
    if suffix == ".svg":
        renderSVG.drawToFile(drawing, str(path))
    else:
        renderPDF.drawToFile(drawing, str(path), title or table.graph)
    logger.info("Wrote %s", path)
    return path


if __name__ == "__main__":
    from curves import sample_curves
    from graphs import make_named

    table = sample_curves(make_named("complete", 5), [k / 20 for k in range(21)], ["ns", "vect"])
    print(f"Wrote {render_curves(table, 'k5_curves.svg')}")
