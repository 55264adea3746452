"""Deterministic CSV, JSON and SVG output.

Floats are written with ``repr`` so that files round-trip exactly and
identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidBody, PreconditionError
from .geometry import Ball, Box, NodeSet, Polygon2D, body_from_dict

__all__ = [
    "dumps_json",
    "write_json",
    "write_rows_csv",
    "write_nodes_csv",
    "read_nodes_csv",
    "read_body",
    "svg_plot",
    "svg_nodes",
]


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        # JSON has no inf/nan; adding 0.0 turns -0.0 into 0.0
        return x + 0.0 if math.isfinite(x) else str(x)
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps_json(obj))
    return path


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_rows_csv(path, rows: Sequence[dict], columns: Sequence[str]) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(row.get(c)) for c in columns])
    path = Path(path)
    path.write_text(buf.getvalue())
    return path


def write_nodes_csv(path, nodes: NodeSet) -> Path:
    cols = [f"x{i + 1}" for i in range(nodes.dim)]
    rows = [dict(zip(cols, map(float, p))) for p in nodes.points]
    return write_rows_csv(path, rows, cols)


def read_nodes_csv(path) -> NodeSet:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise PreconditionError(f"{path}: empty node file")
    header = rows[0]
    if header != [f"x{i + 1}" for i in range(len(header))]:
        raise PreconditionError(f"{path}: header must be x1,...,xd, got {','.join(header)}")
    try:
        pts = [[float(v) for v in r] for r in rows[1:] if r]
    except ValueError as exc:
        raise PreconditionError(f"{path}: {exc}") from None
    if any(len(p) != len(header) for p in pts):
        raise PreconditionError(f"{path}: ragged rows")
    return NodeSet(np.array(pts, dtype=float).reshape(-1, len(header)), len(header))


def read_body(spec):
    """Body from a dict, a JSON string or a path to a JSON file."""
    if isinstance(spec, (Box, Ball, Polygon2D)):
        return spec
    if isinstance(spec, dict):
        return body_from_dict(spec)
    text = str(spec).strip()
    if not text.startswith("{"):
        try:
            text = Path(text).read_text()
        except OSError as exc:
            raise InvalidBody(f"cannot read body file {spec}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidBody(f"body is not valid JSON: {exc}") from None
    return body_from_dict(data)


# ---- SVG -------------------------------------------------------------------

_W, _H, _M = 640, 420, 56
_COLOURS = ("#1f5fa8", "#c0392b", "#2e8b57", "#7d3c98")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _tick(v: float) -> str:
    return f"{v:.3g}"


def _frame(title: str, xlabel: str, ylabel: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2}" y="20" text-anchor="middle" font-size="14">{_esc(title)}</text>',
        f'<text x="{_W / 2}" y="{_H - 8}" text-anchor="middle">{_esc(xlabel)}</text>',
        f'<text x="14" y="{_H / 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {_H / 2})">{_esc(ylabel)}</text>',
        f'<rect x="{_M}" y="{_M}" width="{_W - 2 * _M}" height="{_H - 2 * _M}" '
        f'fill="none" stroke="black"/>',
    ]


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def svg_plot(path, series: dict, title: str = "", xlabel: str = "x", ylabel: str = "y",
             logx: bool = False, logy: bool = False, hlines: dict | None = None,
             markers: bool = False) -> Path:
    """Line plot of ``{label: (xs, ys)}`` with optional horizontal reference lines."""
    hlines = hlines or {}
    fx = np.log10 if logx else np.asarray
    fy = np.log10 if logy else np.asarray
    xs_all = np.concatenate([fx(np.asarray(x, float)) for x, _ in series.values()])
    ys_all = np.concatenate([fy(np.asarray(y, float)) for _, y in series.values()]
                            + [fy(np.array(list(hlines.values()), float))])
    x0, x1 = float(xs_all.min()), float(xs_all.max())
    y0, y1 = float(ys_all.min()), float(ys_all.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    pad = 0.05 * (y1 - y0) if y1 > y0 else 0.5
    y0, y1 = y0 - pad, y1 + pad

    def px(x):
        return _M + (x - x0) / (x1 - x0) * (_W - 2 * _M)

    def py(y):
        return _H - _M - (y - y0) / (y1 - y0) * (_H - 2 * _M)

    out = _frame(title, xlabel, ylabel)
    for v in np.linspace(x0, x1, 5):
        label = _tick(10**v if logx else v)
        out.append(f'<text x="{_fmt(px(v))}" y="{_H - _M + 16}" text-anchor="middle">{label}</text>')
    for v in np.linspace(y0, y1, 5):
        label = _tick(10**v if logy else v)
        out.append(f'<text x="{_M - 4}" y="{_fmt(py(v) + 4)}" text-anchor="end">{label}</text>')
    legend_y = _M + 14
    for i, (label, (x, y)) in enumerate(series.items()):
        colour = _COLOURS[i % len(_COLOURS)]
        pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}"
                       for a, b in zip(fx(np.asarray(x, float)), fy(np.asarray(y, float))))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{colour}" stroke-width="1.5"/>')
        if markers:
            for a, b in zip(fx(np.asarray(x, float)), fy(np.asarray(y, float))):
                out.append(f'<circle cx="{_fmt(px(a))}" cy="{_fmt(py(b))}" r="3" fill="{colour}"/>')
        out.append(f'<text x="{_W - _M - 6}" y="{legend_y}" text-anchor="end" '
                   f'fill="{colour}">{_esc(label)}</text>')
        legend_y += 14
    for label, v in hlines.items():
        y = py(float(fy(np.array(v, float))))
        out.append(f'<line x1="{_M}" y1="{_fmt(y)}" x2="{_W - _M}" y2="{_fmt(y)}" '
                   f'stroke="gray" stroke-dasharray="6 4"/>')
        out.append(f'<text x="{_M + 6}" y="{_fmt(y - 4)}" fill="gray">{_esc(label)}</text>')
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n")
    return path


def _outline(body) -> np.ndarray | None:
    if isinstance(body, Polygon2D):
        return np.array(body.vertices)
    if isinstance(body, Box) and body.dim == 2:
        (x0, y0), (x1, y1) = body.lo, body.hi
        return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    if isinstance(body, Ball) and body.dim == 2:
        ang = np.linspace(0.0, 2.0 * math.pi, 129)[:-1]
        return np.array(body.center) + body.radius * np.column_stack([np.cos(ang), np.sin(ang)])
    return None


def svg_nodes(path, body, nodes: NodeSet, highlight: int = 0, title: str = "") -> Path | None:
    """Scatter plot of planar nodes inside the body outline.

    The last ``highlight`` nodes (the boundary layer) are drawn in a second colour.
    Returns ``None`` for bodies that are not planar.
    """
    outline = _outline(body)
    if outline is None or nodes.dim != 2:
        return None
    lo, hi = body.bounds()
    span = float(np.max(hi - lo))
    size = min(_W, _H) - 2 * _M

    def tr(p):
        return _M + (p[0] - lo[0]) / span * size, _H - _M - (p[1] - lo[1]) / span * size

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2}" y="20" text-anchor="middle" font-size="14">{_esc(title)}</text>',
    ]
    pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in map(tr, outline))
    out.append(f'<polygon points="{pts}" fill="none" stroke="black"/>')
    r = max(1.0, min(3.0, 120.0 / math.sqrt(max(len(nodes), 1))))
    split = len(nodes) - highlight
    for i, p in enumerate(nodes.points):
        a, b = tr(p)
        colour = _COLOURS[1] if i >= split else _COLOURS[0]
        out.append(f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="{r:.2f}" fill="{colour}"/>')
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n")
    return path
