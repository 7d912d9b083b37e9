"""Grayscale SVG phase-transition maps (white = success rate 1, black = 0)."""
from __future__ import annotations

from xml.sax.saxutils import escape

from .experiments import ResultTable

CELL = 40
MARGIN_LEFT = 70
MARGIN_TOP = 40
MARGIN_BOTTOM = 50


def _sort_key(v):
    return (0, float(v), "") if isinstance(v, (int, float)) else (1, 0.0, str(v))


def heatmap_matrix(table: ResultTable, x_param: str, y_param: str, method: str | None = None):
    """``(xs, ys, rates)`` with ``rates[iy][ix]`` the success rate at ``(xs[ix], ys[iy])``."""
    methods = sorted({row.method for row in table.rows})
    if method is None:
        if len(methods) != 1:
            raise ValueError(f"table holds several methods {methods}; choose one")
        method = methods[0]
    rows = [row for row in table.rows if row.method == method]
    if not rows:
        raise ValueError(f"no rows for method {method!r}")
    for p in (x_param, y_param):
        if p not in rows[0].grid:
            raise ValueError(f"{p!r} is not a grid parameter")
    extra = [p for p in rows[0].grid if p not in (x_param, y_param)
             and len({row.grid[p] for row in rows}) > 1]
    if extra or x_param == y_param:
        raise ValueError(f"grid is not 2-D over ({x_param}, {y_param}); also varies {extra}")
    xs = sorted({row.grid[x_param] for row in rows}, key=_sort_key)
    ys = sorted({row.grid[y_param] for row in rows}, key=_sort_key)
    cells: dict = {}
    for row in rows:
        key = (row.grid[x_param], row.grid[y_param])
        if key in cells:
            raise ValueError(f"duplicate cell at {key}")
        cells[key] = row.success_rate
    if len(cells) != len(xs) * len(ys):
        raise ValueError("grid is not a full 2-D product")
    rates = [[cells[(x, y)] for x in xs] for y in ys]
    return xs, ys, rates, method


def render_svg(table: ResultTable, x_param: str, y_param: str, method: str | None = None) -> str:
    xs, ys, rates, method = heatmap_matrix(table, x_param, y_param, method)
    width = MARGIN_LEFT + CELL * len(xs) + 10
    height = MARGIN_TOP + CELL * len(ys) + MARGIN_BOTTOM
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<text x="{MARGIN_LEFT}" y="20" font-family="sans-serif" font-size="14">'
           f'{escape(method)} success rate</text>']
    # largest y value on top
    for iy, y in enumerate(reversed(ys)):
        row = rates[len(ys) - 1 - iy]
        top = MARGIN_TOP + iy * CELL
        for ix, rate in enumerate(row):
            level = 0 if rate != rate else int(round(255 * min(max(rate, 0.0), 1.0)))
            out.append(f'<rect x="{MARGIN_LEFT + ix * CELL}" y="{top}" width="{CELL}" height="{CELL}" '
                       f'fill="rgb({level},{level},{level})" stroke="#808080" stroke-width="0.5"/>')
        out.append(f'<text x="{MARGIN_LEFT - 6}" y="{top + CELL // 2 + 4}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{escape(str(y))}</text>')
    base = MARGIN_TOP + CELL * len(ys)
    for ix, x in enumerate(xs):
        out.append(f'<text x="{MARGIN_LEFT + ix * CELL + CELL // 2}" y="{base + 16}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{escape(str(x))}</text>')
    out.append(f'<text x="{MARGIN_LEFT + CELL * len(xs) // 2}" y="{base + 38}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">{escape(x_param)}</text>')
    mid = MARGIN_TOP + CELL * len(ys) // 2
    out.append(f'<text x="14" y="{mid}" text-anchor="middle" font-family="sans-serif" font-size="12" '
               f'transform="rotate(-90 14 {mid})">{escape(y_param)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_heatmap(table: ResultTable, x_param: str, y_param: str, path, method: str | None = None) -> None:
    svg = render_svg(table, x_param, y_param, method)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg)
