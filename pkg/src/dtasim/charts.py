"""Deterministic SVG rendering of sweep tables.

Self-contained SVG 1.1 documents on a fixed 800x500 canvas: a line
chart (one polyline per selected metric) for 1-D tables, a heatmap
(one rect per grid cell) for 2-D tables.  Output bytes are a pure
function of (table, spec), so re-emission is byte-identical.  Every
chart carries a footer naming the parameterization it was drawn from.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from xml.sax.saxutils import escape

from .errors import ValidationError
from .sweep import SweepTable

WIDTH = 800
HEIGHT = 500

_PLOT_X0 = 70.0
_PLOT_Y0 = 45.0
_PLOT_X1 = 775.0
_PLOT_Y1 = 425.0

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

# heatmap color ramp endpoints (low -> high)
_RAMP_LO = (37, 52, 148)
_RAMP_HI = (255, 237, 160)


class ChartKind(enum.Enum):
    LINE = "line"
    HEATMAP = "heatmap"


@dataclass(frozen=True)
class ChartSpec:
    """What to draw: chart kind, metric columns, title and footer text.

    Empty title/footer are filled with defaults derived from the table.
    Heatmaps color by the first listed metric.
    """

    kind: ChartKind
    metrics: tuple[str, ...] = ("effective_throughput",)
    title: str = ""
    footer: str = ""

    def __post_init__(self):
        if not self.metrics:
            raise ValidationError("chart spec needs at least one metric")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    return format(v, ".4g")


def _span(values: list[float]) -> tuple[float, float]:
    lo = min(values)
    hi = max(values)
    if lo == hi:
        lo -= 1.0
        hi += 1.0
    return lo, hi


def _check_metrics(table: SweepTable, spec: ChartSpec) -> None:
    for name in spec.metrics:
        if name not in table.metric_columns:
            raise ValidationError(f"no such metric column: {name!r}")


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<text x="{_fmt((_PLOT_X0 + _PLOT_X1) / 2)}" y="28" '
        f'font-family="monospace" font-size="15" text-anchor="middle">'
        f"{escape(title)}</text>",
    ]


def _frame() -> str:
    return (
        f'<path d="M {_fmt(_PLOT_X0)} {_fmt(_PLOT_Y0)} H {_fmt(_PLOT_X1)} '
        f'V {_fmt(_PLOT_Y1)} H {_fmt(_PLOT_X0)} Z" fill="none" '
        f'stroke="#333333" stroke-width="1"/>'
    )


def _axis_labels(x_name: str, y_name: str) -> list[str]:
    cx = (_PLOT_X0 + _PLOT_X1) / 2
    cy = (_PLOT_Y0 + _PLOT_Y1) / 2
    return [
        f'<text x="{_fmt(cx)}" y="466" font-family="monospace" font-size="13" '
        f'text-anchor="middle">{escape(x_name)}</text>',
        f'<text x="18" y="{_fmt(cy)}" font-family="monospace" font-size="13" '
        f'text-anchor="middle" transform="rotate(-90 18 {_fmt(cy)})">'
        f"{escape(y_name)}</text>",
    ]


def _footer_text(footer: str) -> str:
    return (
        f'<text x="{_fmt(_PLOT_X0)}" y="488" font-family="monospace" '
        f'font-size="11" fill="#555555">{escape(footer)}</text>'
    )


def _x_ticks(lo: float, hi: float) -> list[str]:
    parts = []
    for k in range(5):
        t = k / 4
        v = lo + t * (hi - lo)
        x = _PLOT_X0 + t * (_PLOT_X1 - _PLOT_X0)
        parts.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(_PLOT_Y1)}" x2="{_fmt(x)}" '
            f'y2="{_fmt(_PLOT_Y1 + 5)}" stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(_PLOT_Y1 + 20)}" '
            f'font-family="monospace" font-size="11" text-anchor="middle">'
            f"{_tick_label(v)}</text>"
        )
    return parts


def _y_ticks(lo: float, hi: float) -> list[str]:
    parts = []
    for k in range(5):
        t = k / 4
        v = lo + t * (hi - lo)
        y = _PLOT_Y1 - t * (_PLOT_Y1 - _PLOT_Y0)
        parts.append(
            f'<line x1="{_fmt(_PLOT_X0 - 5)}" y1="{_fmt(y)}" x2="{_fmt(_PLOT_X0)}" '
            f'y2="{_fmt(y)}" stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(_PLOT_X0 - 9)}" y="{_fmt(y + 4)}" '
            f'font-family="monospace" font-size="11" text-anchor="end">'
            f"{_tick_label(v)}</text>"
        )
    return parts


def _render_line(table: SweepTable, spec: ChartSpec) -> str:
    x_name = table.axis_columns[0]
    xs = table.column(x_name)
    xlo, xhi = _span(xs)

    series = [(name, table.column(name)) for name in spec.metrics]
    all_vals = [v for _, vals in series for v in vals]
    lo, hi = _span(all_vals)
    pad = 0.05 * (hi - lo)
    ylo = lo - pad
    yhi = hi + pad

    def sx(v: float) -> float:
        return _PLOT_X0 + (v - xlo) / (xhi - xlo) * (_PLOT_X1 - _PLOT_X0)

    def sy(v: float) -> float:
        return _PLOT_Y1 - (v - ylo) / (yhi - ylo) * (_PLOT_Y1 - _PLOT_Y0)

    title = spec.title or f"{', '.join(spec.metrics)} vs {x_name}"
    footer = spec.footer or f"policy={table.policy.value}"
    y_name = spec.metrics[0] if len(spec.metrics) == 1 else "value"

    parts = _header(title)
    parts.append(_frame())
    parts.extend(_x_ticks(xlo, xhi))
    parts.extend(_y_ticks(ylo, yhi))
    parts.extend(_axis_labels(x_name, y_name))
    for idx, (name, vals) in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        points = " ".join(f"{_fmt(sx(x))},{_fmt(sy(v))}" for x, v in zip(xs, vals))
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )
        ly = _PLOT_Y0 + 14 + 14 * idx
        parts.append(
            f'<text x="{_fmt(_PLOT_X1 - 8)}" y="{_fmt(ly)}" '
            f'font-family="monospace" font-size="11" text-anchor="end" '
            f'fill="{color}">{escape(name)}</text>'
        )
    parts.append(_footer_text(footer))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _ramp_color(t: float) -> str:
    r = round(_RAMP_LO[0] + t * (_RAMP_HI[0] - _RAMP_LO[0]))
    g = round(_RAMP_LO[1] + t * (_RAMP_HI[1] - _RAMP_LO[1]))
    b = round(_RAMP_LO[2] + t * (_RAMP_HI[2] - _RAMP_LO[2]))
    return f"#{r:02x}{g:02x}{b:02x}"


def _render_heatmap(table: SweepTable, spec: ChartSpec) -> str:
    a_name, b_name = table.axis_columns
    count_a, count_b = table.axis_counts
    metric = spec.metrics[0]
    vals = table.column(metric)
    vmin = min(vals)
    vmax = max(vals)
    span = vmax - vmin

    title = spec.title or f"{metric} over {a_name} x {b_name}"
    footer = spec.footer or f"policy={table.policy.value}"

    a_vals = table.column(a_name)
    b_vals = table.column(b_name)
    alo, ahi = _span(a_vals)
    blo, bhi = _span(b_vals)

    cell_w = (_PLOT_X1 - _PLOT_X0) / count_a
    cell_h = (_PLOT_Y1 - _PLOT_Y0) / count_b

    parts = _header(title)
    # cells first, frame on top; row-major input (axis a outer)
    for ia in range(count_a):
        for ib in range(count_b):
            v = vals[ia * count_b + ib]
            t = 0.5 if span == 0.0 else (v - vmin) / span
            x = _PLOT_X0 + ia * cell_w
            y = _PLOT_Y1 - (ib + 1) * cell_h
            parts.append(
                f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(cell_w)}" '
                f'height="{_fmt(cell_h)}" fill="{_ramp_color(t)}"/>'
            )
    parts.append(_frame())
    parts.extend(_x_ticks(alo, ahi))
    parts.extend(_y_ticks(blo, bhi))
    parts.extend(_axis_labels(a_name, b_name))
    parts.append(
        f'<text x="{_fmt(_PLOT_X1)}" y="28" font-family="monospace" '
        f'font-size="11" text-anchor="end">'
        f"{escape(metric)}: min={_tick_label(vmin)} max={_tick_label(vmax)}</text>"
    )
    parts.append(_footer_text(footer))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_svg(table: SweepTable, spec: ChartSpec, destination) -> int:
    """Render the table per the spec and write SVG bytes to destination.

    Returns the byte count written.  Line charts need a 1-axis table,
    heatmaps a 2-axis table.
    """
    if not table.rows:
        raise ValidationError("cannot chart an empty table")
    _check_metrics(table, spec)
    if spec.kind is ChartKind.LINE:
        if len(table.axis_columns) != 1:
            raise ValidationError("line chart needs a 1-axis table")
        doc = _render_line(table, spec)
    else:
        if len(table.axis_columns) != 2:
            raise ValidationError("heatmap needs a 2-axis table")
        doc = _render_heatmap(table, spec)
    payload = doc.encode("utf-8")
    with open(destination, "wb") as fh:
        fh.write(payload)
    return len(payload)
