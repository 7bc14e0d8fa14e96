"""Rectangular result tables and their deterministic CSV / SVG renderings."""
from __future__ import annotations

import math
import numbers
import os
import tempfile
from dataclasses import dataclass, field
from typing import Sequence

DIVERGED = "DIVERGED"


@dataclass
class Table:
    columns: tuple
    rows: list = field(default_factory=list)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row {row!r} does not match header {self.columns!r}")

    def column(self, name) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def __len__(self):
        return len(self.rows)


def format_value(v) -> str:
    """Shortest round-trip text for floats; ``inf`` renders as ``DIVERGED``."""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, numbers.Integral):
        return str(v)
    if isinstance(v, float) or hasattr(v, "__float__") and not isinstance(v, str):
        x = float(v)
        if math.isinf(x):
            return DIVERGED if x > 0 else "-" + DIVERGED
        if math.isnan(x):
            return "nan"
        return repr(x)
    return str(v)


def render_csv(table: Table) -> str:
    lines = [",".join(str(c) for c in table.columns)]
    lines.extend(",".join(format_value(v) for v in row) for row in table.rows)
    return "\n".join(lines) + "\n"


def write_atomic(path, text: str) -> None:
    """Write ``text`` as ASCII through a temp file renamed onto ``path``."""
    data = text.encode("ascii")
    target = os.path.abspath(os.fspath(path))
    directory = os.path.dirname(target)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_csv(table: Table, path) -> None:
    write_atomic(path, render_csv(table))


# -- SVG -------------------------------------------------------------------------

SVG_WIDTH = 640
SVG_HEIGHT = 480
_MARGIN = (70, 30, 30, 60)  # left, right, top, bottom
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _tick(x: float) -> str:
    return f"{x:.4g}"


def render_svg(
    table: Table,
    x_label: str,
    y_label: str,
    x_column: str | None = None,
    y_columns: Sequence[str] | None = None,
    y_max: float | None = None,
    title: str = "",
) -> str:
    """Line chart with one polyline per ordinate column.

    Non-finite values, and values above ``y_max`` when given, are left out of
    their polyline.
    """
    x_column = x_column or table.columns[0]
    y_columns = list(y_columns) if y_columns is not None else [c for c in table.columns if c != x_column]
    if not y_columns:
        raise ValueError("a chart needs at least one ordinate column")
    xs = [float(v) for v in table.column(x_column)]

    def keep(v):
        return math.isfinite(v) and (y_max is None or v <= y_max)

    series = []
    for name in y_columns:
        ys = [float(v) for v in table.column(name)]
        series.append((name, [(x, y) for x, y in zip(xs, ys) if math.isfinite(x) and keep(y)]))
    all_x = [x for _, pts in series for x, _ in pts] or [0.0, 1.0]
    all_y = [y for _, pts in series for _, y in pts] or [0.0, 1.0]
    x0, x1 = min(all_x), max(all_x)
    y0, y1 = min(min(all_y), 0.0), max(all_y)
    if y_max is not None:
        y1 = max(min(y1, y_max), y0)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    left, right, top, bottom = _MARGIN
    pw = SVG_WIDTH - left - right
    ph = SVG_HEIGHT - top - bottom

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f'<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{SVG_WIDTH // 2}" y="18" text-anchor="middle" font-size="14">{_escape(title)}</text>')
    base_y = _fmt(py(y0))
    out.append(f'<line class="axis" x1="{_fmt(px(x0))}" y1="{base_y}" x2="{_fmt(px(x1))}" y2="{base_y}" stroke="black"/>')
    out.append(f'<line class="axis" x1="{_fmt(px(x0))}" y1="{base_y}" x2="{_fmt(px(x0))}" y2="{_fmt(py(y1))}" stroke="black"/>')
    for i in range(5):
        xv = x0 + (x1 - x0) * i / 4
        yv = y0 + (y1 - y0) * i / 4
        out.append(f'<text x="{_fmt(px(xv))}" y="{_fmt(py(y0) + 16)}" text-anchor="middle" font-size="11">{_tick(xv)}</text>')
        out.append(f'<text x="{_fmt(px(x0) - 6)}" y="{_fmt(py(yv) + 4)}" text-anchor="end" font-size="11">{_tick(yv)}</text>')
    out.append(f'<text x="{_fmt(left + pw / 2)}" y="{SVG_HEIGHT - 15}" text-anchor="middle" font-size="13">{_escape(x_label)}</text>')
    out.append(
        f'<text x="16" y="{_fmt(top + ph / 2)}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {_fmt(top + ph / 2)})">{_escape(y_label)}</text>'
    )
    for i, (name, pts) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        coords = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in pts)
        out.append(f'<polyline data-series="{_escape(name)}" fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        out.append(f'<text x="{left + 10}" y="{top + 16 + 16 * i}" font-size="12" fill="{color}">{_escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def emit_svg(table: Table, path, x_label: str, y_label: str, **kwargs) -> None:
    write_atomic(path, render_svg(table, x_label, y_label, **kwargs))
