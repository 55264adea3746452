"""Exact Voronoi machinery for node sets in convex polygons.

For a planar polygonal body the covering radius of a node set is the
largest distance from a node to a vertex of its Voronoi cell clipped to the
body, so it can be computed exactly. The same cells drive the minimax Lloyd
step (move to the centre of the smallest circle around the cell) and an
exact ``sum_j int_{cell_j} |x - p_j|^(2k) dx`` objective.

Cells are stored flat: ``verts[start[j]:start[j] + count[j]]`` is the
counterclockwise vertex list of the cell of site ``j`` (empty if the cell
misses the body) and ``owner`` maps each vertex row back to its site.
"""

from __future__ import annotations

import itertools
import math
from typing import NamedTuple

import numpy as np
from scipy import optimize
from scipy.spatial import Voronoi

__all__ = [
    "Cells",
    "voronoi_cells",
    "cell_radii",
    "covering_radius_polygon",
    "smallest_circle",
    "cell_power_moments",
    "minimax_lloyd",
    "pnorm_descent",
]


class Cells(NamedTuple):
    verts: np.ndarray
    owner: np.ndarray
    start: np.ndarray
    count: np.ndarray

    def cell(self, j: int) -> np.ndarray:
        return self.verts[self.start[j]:self.start[j] + self.count[j]]

    def successor(self) -> np.ndarray:
        """Index of the next vertex of the same cell, wrapping around."""
        nxt = np.arange(len(self.verts)) + 1
        last = self.start + self.count - 1
        full = self.count > 0
        nxt[last[full]] = self.start[full]
        return nxt


def _halfplanes(poly: np.ndarray):
    e = np.roll(poly, -1, axis=0) - poly
    normals = np.column_stack([e[:, 1], -e[:, 0]])
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    return normals, np.einsum("ij,ij->i", normals, poly)


def _clip(cell: list, normals, offsets) -> list:
    """Sutherland-Hodgman clip of a convex cell against a convex polygon."""
    for (nx, ny), off in zip(normals.tolist(), offsets.tolist()):
        if not cell:
            break
        out = []
        prev = cell[-1]
        pv = nx * prev[0] + ny * prev[1] - off
        for cur in cell:
            cv = nx * cur[0] + ny * cur[1] - off
            if (cv <= 0) != (pv <= 0):
                t = pv / (pv - cv)
                out.append((prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])))
            if cv <= 0:
                out.append(cur)
            prev, pv = cur, cv
        cell = out
    return cell


def voronoi_cells(points: np.ndarray, poly: np.ndarray) -> Cells:
    """Voronoi cells of ``points`` clipped to the convex polygon ``poly``, counterclockwise."""
    points = np.asarray(points, dtype=float)
    n = len(points)
    normals, offsets = _halfplanes(poly)
    centre = poly.mean(axis=0)
    span = 10.0 * (np.ptp(poly, axis=0).max() + np.ptp(points, axis=0).max() + 1.0)
    guards = centre + span * np.array([[1, 1], [-1, 1], [-1, -1], [1, -1]], dtype=float)
    vor = Voronoi(np.concatenate([points, guards]))
    regions = [vor.regions[r] for r in vor.point_region[:n]]
    lengths = np.fromiter(map(len, regions), dtype=np.intp, count=n)
    flat = np.fromiter(itertools.chain.from_iterable(regions), dtype=np.intp,
                       count=int(lengths.sum()))
    owner = np.repeat(np.arange(n), lengths)
    vv = vor.vertices
    inside_v = np.all(vv @ normals.T - offsets <= 0, axis=1)
    bad = (flat < 0) | ~inside_v[np.maximum(flat, 0)]
    clip = np.zeros(n, dtype=bool)
    clip[owner[bad]] = True

    keep = ~clip[owner]
    verts = [vv[flat[keep]]]
    owners = [owner[keep]]
    count = np.where(clip, 0, lengths)
    start = np.zeros(n, dtype=np.intp)
    start[~clip] = (np.cumsum(count) - count)[~clip]
    pos = int(count.sum())
    vlist = vv.tolist()
    for j in np.flatnonzero(clip).tolist():
        cell = _clip([tuple(vlist[i]) for i in regions[j]], normals, offsets)
        if cell:
            verts.append(np.array(cell, dtype=float))
            owners.append(np.full(len(cell), j))
        start[j], count[j] = pos, len(cell)
        pos += len(cell)
    cells = Cells(np.concatenate(verts), np.concatenate(owners), start, count)
    return _orient(cells)


def _orient(cells: Cells) -> Cells:
    """Reverse the vertex order of every clockwise cell."""
    verts, owner, start, count = cells
    if verts.size == 0:
        return cells
    nxt = cells.successor()
    area2 = np.bincount(owner, verts[:, 0] * verts[nxt, 1] - verts[nxt, 0] * verts[:, 1],
                        minlength=len(start))
    flip = area2 < 0
    if np.any(flip):
        idx = np.arange(len(verts))
        rev = 2 * start[owner] + count[owner] - 1 - idx
        verts = verts[np.where(flip[owner], rev, idx)]
    return Cells(verts, owner, start, count)


def cell_radii(cells: Cells, sites: np.ndarray) -> np.ndarray:
    """Largest site-to-vertex distance per cell (0 for empty cells)."""
    out = np.zeros(len(cells.start))
    if cells.verts.size:
        d = np.linalg.norm(cells.verts - sites[cells.owner], axis=1)
        np.maximum.at(out, cells.owner, d)
    return out


def covering_radius_polygon(points: np.ndarray, poly: np.ndarray) -> float:
    return float(cell_radii(voronoi_cells(points, poly), points).max())


def _circle3(ax, ay, bx, by, cx, cy):
    """Circle through three points; for collinear points, the widest pair."""
    bx, by, cx, cy = bx - ax, by - ay, cx - ax, cy - ay
    den = 2.0 * (bx * cy - by * cx)
    if den == 0.0:
        pairs = [((0.0, 0.0), (bx, by)), ((0.0, 0.0), (cx, cy)), ((bx, by), (cx, cy))]
        (px, py), (qx, qy) = max(pairs, key=lambda pq: math.dist(*pq))
        return ax + 0.5 * (px + qx), ay + 0.5 * (py + qy), 0.5 * math.hypot(px - qx, py - qy)
    b2, c2 = bx * bx + by * by, cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / den
    uy = (bx * c2 - cx * b2) / den
    return ax + ux, ay + uy, math.hypot(ux, uy)


def smallest_circle(pts: list) -> tuple[float, float, float]:
    """Incremental smallest enclosing circle; expected linear on shuffled input."""

    def out(p, cx, cy, r):
        return math.hypot(p[0] - cx, p[1] - cy) > r * (1 + 1e-12) + 1e-15

    cx, cy, r = pts[0][0], pts[0][1], 0.0
    for i in range(1, len(pts)):
        p = pts[i]
        if not out(p, cx, cy, r):
            continue
        cx, cy, r = p[0], p[1], 0.0
        for j in range(i):
            q = pts[j]
            if not out(q, cx, cy, r):
                continue
            cx, cy = 0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])
            r = 0.5 * math.hypot(p[0] - q[0], p[1] - q[1])
            for k in range(j):
                w = pts[k]
                if out(w, cx, cy, r):
                    cx, cy, r = _circle3(p[0], p[1], q[0], q[1], w[0], w[1])
    return cx, cy, r


def minimax_lloyd(poly: np.ndarray, free: np.ndarray, anchor: np.ndarray,
                  iterations: int) -> tuple[np.ndarray, float]:
    """Move free sites to the centres of their cells' smallest circles.

    Returns the best configuration seen and its covering radius.
    """
    m = len(free)
    best_pts, best_r = free.copy(), math.inf
    for _ in range(iterations + 1):
        sites = np.concatenate([free, anchor])
        cells = voronoi_cells(sites, poly)
        radius = float(cell_radii(cells, sites).max())
        if radius < best_r:
            best_r, best_pts = radius, free.copy()
        moved = free.copy()
        vl = cells.verts.tolist()
        for i, (s0, c) in enumerate(zip(cells.start[:m].tolist(), cells.count[:m].tolist())):
            if c:
                moved[i] = smallest_circle(vl[s0:s0 + c])[:2]
        shift = float(np.max(np.linalg.norm(moved - free, axis=1))) if m else 0.0
        free = moved
        if shift < 1e-6:
            break
    return best_pts, best_r


def cell_power_moments(cells: Cells, sites: np.ndarray, k: int, scale: float):
    """``sum_j int_{cell_j} (|x - p_j| / scale)^(2k) dx`` and its gradient in each ``p_j``.

    Each cell is fanned into triangles from its site. Along an edge at
    signed distance ``h`` from the site, with tangential coordinate ``t``
    and squared radius ``r2``, the recursion
    ``K_j = (t r2^j + 2j h^2 K_{j-1}) / (2j + 1)``, ``K_0 = t``
    integrates the powers exactly and never divides by ``h``.
    """
    verts, owner = cells.verts, cells.owner
    nxt = cells.successor()
    a = (verts - sites[owner]) / scale
    b = (verts[nxt] - sites[owner]) / scale
    edge = b - a
    length = np.linalg.norm(edge, axis=1)
    keep = length > 0
    owner, a, b, edge, length = owner[keep], a[keep], b[keep], edge[keep], length[keep]
    tan = edge / length[:, None]
    nrm = np.column_stack([tan[:, 1], -tan[:, 0]])
    h = np.einsum("ij,ij->i", a, nrm)
    ta, tb = np.einsum("ij,ij->i", a, tan), np.einsum("ij,ij->i", b, tan)
    ra2, rb2 = (a * a).sum(axis=1), (b * b).sum(axis=1)
    h2 = h * h
    ka, kb = ta.copy(), tb.copy()
    pa, pb = np.ones_like(ra2), np.ones_like(rb2)
    prev_a, prev_b = ka, kb
    for j in range(1, k + 1):
        pa, pb = pa * ra2, pb * rb2
        prev_a, prev_b = ka, kb
        ka = (ta * pa + 2 * j * h2 * ka) / (2 * j + 1)
        kb = (tb * pb + 2 * j * h2 * kb) / (2 * j + 1)
    total = float(np.sum(h * (kb - ka))) / (2 * k + 2)
    grad = np.zeros_like(sites)
    if k > 0:
        coef_n = -(2 * k) / (2 * k + 1) * h2 * (prev_b - prev_a)
        coef_t = -(h * (pb - pa)) / (2 * k + 1)
        np.add.at(grad, owner, coef_n[:, None] * nrm + coef_t[:, None] * tan)
    # x = scale * y: area scales by scale^2, gradient in x by scale
    return total * scale**2, grad * scale


def pnorm_descent(poly: np.ndarray, free: np.ndarray, anchor: np.ndarray,
                  powers=(30, 60, 120), max_iter: int = 150) -> np.ndarray:
    """L-BFGS on ``log sum_j int_{cell_j} |x - p_j|^p`` over the free sites."""
    m = len(free)
    lo, hi = poly.min(axis=0), poly.max(axis=0)
    box = [(float(lo[i % 2]), float(hi[i % 2])) for i in range(2 * m)]
    v = free.ravel().copy()
    for p in powers:
        k = int(round(p / 2))
        sites0 = np.concatenate([v.reshape(m, 2), anchor])
        scale = float(cell_radii(voronoi_cells(sites0, poly), sites0).max())

        def objective(x):
            sites = np.concatenate([x.reshape(m, 2), anchor])
            total, grad = cell_power_moments(voronoi_cells(sites, poly), sites, k, scale)
            return math.log(total), (grad[:m] / total).ravel()

        res = optimize.minimize(objective, v, jac=True, method="L-BFGS-B", bounds=box,
                                options={"maxiter": max_iter})
        v = res.x
    return v.reshape(m, 2)
