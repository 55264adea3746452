"""Node generation with small covering radius.

``build_xi_star`` assembles the two-part node set used to show that the
boundary term of the error bound is negligible: a boundary layer ``Z`` that
covers the boundary within ``theta * h`` and a set ``X`` of interior centres
that, together with ``Z``, covers the body as well as possible.

Approximate n-centres come from farthest-point insertion or from a clipped
lattice, each polished by minimax Lloyd steps (every node jumps to the centre
of the smallest ball enclosing the samples it is nearest to).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy import optimize
from scipy.spatial import ConvexHull, QhullError, cKDTree
from scipy.stats import special_ortho_group

from . import planar
from .errors import NTooSmall, ParameterError, PreconditionError, UnsupportedDimension
from .geometry import (
    Ball,
    Box,
    Boundary,
    DistanceEstimate,
    NodeSet,
    Polygon2D,
    boundary_sample,
    one_sided_hausdorff,
    unit_ball_volume,
)

__all__ = [
    "CoveringConstants",
    "COVERING_CONSTANTS",
    "NodeGenReport",
    "dens_lookup",
    "en_asymptotic",
    "auto_resolution",
    "interior_sample",
    "greedy_farthest_point",
    "lloyd_refine",
    "lattice_nodes",
    "maximal_separated_set",
    "boundary_layer",
    "layer_depth",
    "covering_radius",
    "pnorm_refine",
    "enclosing_ball",
    "approximate_centers",
    "build_xi_star",
    "THETA_MAX",
]

THETA_MAX = 1.0 / math.sqrt(2.0)


def _thinnest_lattice_density(d: int) -> float:
    # covering density of the A_d^* lattice
    return unit_ball_volume(d) * math.sqrt(d + 1) * (d * (d + 2) / (12.0 * (d + 1))) ** (d / 2)


@dataclass(frozen=True)
class CoveringConstants:
    table: dict = field(default_factory=lambda: {
        1: (1.0, "exact"),
        2: (2.0 * math.pi / math.sqrt(27.0), "exact"),
        3: (_thinnest_lattice_density(3), "best_known_upper"),
        4: (_thinnest_lattice_density(4), "best_known_upper"),
    })

    def lookup(self, d: int) -> tuple[float, str]:
        if d not in self.table:
            raise UnsupportedDimension(f"no covering density on record for d={d}")
        return self.table[d]


COVERING_CONSTANTS = CoveringConstants()


def dens_lookup(d: int) -> tuple[float, str]:
    return COVERING_CONSTANTS.lookup(d)


def en_asymptotic(body, n: int) -> float:
    """Leading term of the n-covering radius of ``body``."""
    if n < 1:
        raise PreconditionError("n must be positive")
    d = body.dim
    dens, _ = dens_lookup(d)
    return (dens * body.volume() / (n * unit_ball_volume(d))) ** (1.0 / d)


def auto_resolution(body, n: int) -> float:
    return (body.volume() / n) ** (1.0 / body.dim) / 40.0


def interior_sample(body, resolution: float) -> np.ndarray:
    """Grid points of ``body`` plus boundary points, dispersion about ``resolution``."""
    lo, hi = body.bounds()
    d = lo.size
    side = 2.0 * resolution / math.sqrt(d)
    axes = [l + (np.arange(max(1, int(math.ceil((h - l) / side)))) + 0.5) * side
            for l, h in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    grid = grid[body.contains(grid)]
    return np.concatenate([grid, boundary_sample(body, resolution)])


def _circumball(support: list) -> tuple[np.ndarray, float]:
    p0 = support[0]
    if len(support) == 1:
        return p0.copy(), 0.0
    A = np.array(support[1:]) - p0
    rhs = 0.5 * np.einsum("ij,ij->i", A, A)
    lam, *_ = np.linalg.lstsq(A @ A.T, rhs, rcond=None)
    c = p0 + A.T @ lam
    return c, float(np.linalg.norm(c - p0))


def _welzl(points: np.ndarray, support: list, d: int):
    if len(points) == 0 or len(support) == d + 1:
        if not support:
            return None, -1.0
        return _circumball(support)
    c, r = _welzl(points[:-1], support, d)
    p = points[-1]
    if c is not None and np.linalg.norm(p - c) <= r * (1 + 1e-12) + 1e-15:
        return c, r
    return _welzl(points[:-1], support + [p], d)


def enclosing_ball(points: np.ndarray) -> tuple[np.ndarray, float]:
    """Smallest ball containing ``points``, computed on the hull vertices."""
    pts = np.asarray(points, dtype=float)
    n, d = pts.shape
    if n > d + 1:
        try:
            pts = pts[ConvexHull(pts).vertices]
        except (QhullError, ValueError):
            pass
    # fixed shuffle keeps the expected-linear behaviour deterministic
    order = np.random.default_rng(12345).permutation(len(pts))
    pts = pts[order]
    if d == 1:
        lo, hi = float(pts.min()), float(pts.max())
        return np.array([0.5 * (lo + hi)]), 0.5 * (hi - lo)
    if d == 2:
        cx, cy, r = planar.smallest_circle(pts.tolist())
        return np.array([cx, cy]), r
    return _welzl(pts, [], d)


def greedy_farthest_point(body, n: int, seed: int = 0, resolution: float | None = None,
                          fixed: NodeSet | None = None, samples: np.ndarray | None = None) -> NodeSet:
    """Farthest-point insertion on a sample of ``body``.

    Without fixed nodes the first node is the deepest sample; ties are broken
    by a seed-dependent permutation.
    """
    if n < 0 or (n == 0 and fixed is None):
        raise PreconditionError("n must be positive")
    if samples is None:
        samples = interior_sample(body, resolution or auto_resolution(body, max(n, 1)))
    rng = np.random.default_rng(seed)
    samples = samples[rng.permutation(len(samples))]
    chosen = []
    if fixed is not None and len(fixed):
        dist, _ = cKDTree(fixed.points).query(samples)
    else:
        chosen.append(int(np.argmax(body.depth(samples))))
        dist = np.linalg.norm(samples - samples[chosen[0]], axis=1)
    while len(chosen) < n:
        k = int(np.argmax(dist))
        chosen.append(k)
        dist = np.minimum(dist, np.linalg.norm(samples - samples[k], axis=1))
    return NodeSet(samples[chosen], body.dim)


def _sample_radius(tree_points: np.ndarray, samples: np.ndarray) -> float:
    dist, _ = cKDTree(tree_points).query(samples)
    return float(dist.max())


def _polygon_of(body):
    """Vertex array for planar polygonal bodies, ``None`` otherwise."""
    if isinstance(body, Polygon2D):
        return np.array(body.vertices)
    if isinstance(body, Box) and body.dim == 2:
        (x0, y0), (x1, y1) = body.lo, body.hi
        return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    return None


def covering_radius(body, points: np.ndarray, samples: np.ndarray | None = None) -> float:
    """Covering radius, exact for planar polygons and on ``samples`` otherwise."""
    poly = _polygon_of(body)
    if poly is not None:
        return planar.covering_radius_polygon(points, poly)
    return _sample_radius(points, samples)


def lloyd_refine(body, xi: NodeSet, iterations: int = 50, resolution: float | None = None,
                 fixed: NodeSet | None = None, samples: np.ndarray | None = None) -> NodeSet:
    """Minimax Lloyd iteration; nodes in ``fixed`` take part but never move.

    Each free node moves to the centre of the smallest ball enclosing its
    Voronoi cell, so the covering radius never increases. Planar polygons
    use exact clipped cells; other bodies use the samples nearest to each
    node. The best configuration seen is returned.
    """
    if len(xi) == 0:
        raise PreconditionError("node set is empty")
    anchor = np.empty((0, xi.dim)) if fixed is None else np.asarray(fixed.points)
    poly = _polygon_of(body)
    if poly is not None:
        pts, _ = planar.minimax_lloyd(poly, np.array(xi.points), anchor, iterations)
        return NodeSet(pts, xi.dim)
    if samples is None:
        samples = interior_sample(body, resolution or auto_resolution(body, len(xi)))
    free = np.array(xi.points)
    m = len(free)
    best_pts, best_r = free.copy(), math.inf
    for _ in range(iterations):
        dist, label = cKDTree(np.concatenate([free, anchor])).query(samples)
        r = float(dist.max())
        if r < best_r:
            best_r, best_pts = r, free.copy()
        order = np.argsort(label, kind="stable")
        bounds = np.searchsorted(label[order], np.arange(m + 1))
        moved = free.copy()
        for i in range(m):
            group = samples[order[bounds[i]:bounds[i + 1]]]
            if len(group):
                moved[i] = enclosing_ball(group)[0]
        moved = body.project(moved)
        shift = float(np.max(np.linalg.norm(moved - free, axis=1)))
        free = moved
        if shift < 1e-6:
            break
    if _sample_radius(np.concatenate([free, anchor]), samples) < best_r:
        best_pts = free
    return NodeSet(best_pts, xi.dim)


def _lattice_basis(d: int) -> np.ndarray:
    """Rows generate a thin covering lattice with unit covering radius."""
    if d == 1:
        return np.array([[2.0]])
    if d == 2:
        # hexagonal lattice, spacing sqrt(3)
        s = math.sqrt(3.0)
        return s * np.array([[1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])
    if d == 3:
        # body-centred cubic with cube side 4/sqrt(5)
        a = 4.0 / math.sqrt(5.0)
        return 0.5 * a * np.array([[1.0, 1.0, -1.0], [1.0, -1.0, 1.0], [-1.0, 1.0, 1.0]])
    return (2.0 / math.sqrt(d)) * np.eye(d)


def _lattice_points(body, scale: float, rot: np.ndarray, shift: np.ndarray) -> np.ndarray:
    basis = scale * _lattice_basis(body.dim) @ rot.T
    lo, hi = body.bounds()
    centre = 0.5 * (lo + hi)
    reach = 0.5 * float(np.linalg.norm(hi - lo))
    inv = np.linalg.inv(basis)
    span = np.abs(inv).sum(axis=0).max() * (reach + np.abs(shift @ basis).max() + scale)
    k = int(math.ceil(span)) + 1
    grid = np.stack(np.meshgrid(*[np.arange(-k, k + 1)] * body.dim, indexing="ij"), axis=-1)
    pts = centre + (grid.reshape(-1, body.dim) + shift) @ basis
    return pts[body.contains(pts)]


def lattice_nodes(body, m: int, seed: int = 0, fixed: NodeSet | None = None,
                  clearance: float = 0.0, aligned: bool = False) -> NodeSet:
    """``m`` points of a randomly placed covering lattice clipped to ``body``.

    The scale is the smallest one giving at least ``m`` points at depth
    ``>= clearance``; surplus points closest to their neighbours (or to the
    fixed nodes) are removed one at a time. ``aligned`` keeps the lattice
    axes parallel to the coordinate axes and only randomises the offset.
    """
    d = body.dim
    rng = np.random.default_rng(seed)
    if aligned or d == 1:
        rot = np.eye(d)
    elif d == 2:
        rot = _rotation2(rng.uniform(0, math.pi / 3))
    else:
        rot = special_ortho_group.rvs(d, random_state=rng)
    shift = rng.uniform(0, 1, d)

    def pts_at(scale):
        p = _lattice_points(body, scale, rot, shift)
        return p[body.depth(p) >= clearance * scale] if clearance else p

    lo_s, hi_s = 1e-9, en_asymptotic(body, 1) * 4.0
    while len(pts_at(hi_s)) >= m:
        hi_s *= 2.0
    lo_s = hi_s / 2.0
    while len(pts_at(lo_s)) < m:
        lo_s /= 2.0
    for _ in range(60):
        mid = 0.5 * (lo_s + hi_s)
        if len(pts_at(mid)) >= m:
            lo_s = mid
        else:
            hi_s = mid
    pts = pts_at(lo_s)
    anchor = None if fixed is None or len(fixed) == 0 else fixed.points
    while len(pts) > m:
        near, _ = cKDTree(pts).query(pts, k=2)
        score = near[:, 1]
        if anchor is not None:
            score = np.minimum(score, cKDTree(anchor).query(pts)[0])
        pts = np.delete(pts, int(np.argmin(score)), axis=0)
    return NodeSet(pts, d)


def _rotation2(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s], [s, c]])


def maximal_separated_set(candidates, epsilon: float) -> NodeSet:
    """Greedy scan keeping points farther than ``epsilon`` from all kept points."""
    if not epsilon > 0:
        raise PreconditionError("epsilon must be positive")
    cand = np.asarray(candidates, dtype=float)
    if cand.size == 0:
        return NodeSet(np.empty((0, cand.shape[-1] if cand.ndim == 2 else 1)),
                       cand.shape[-1] if cand.ndim == 2 else 1)
    cand = cand.reshape(len(cand), -1)
    tree = cKDTree(cand)
    blocked = np.zeros(len(cand), dtype=bool)
    kept = []
    for i in range(len(cand)):
        if blocked[i]:
            continue
        kept.append(i)
        for j in tree.query_ball_point(cand[i], epsilon):
            blocked[j] = True
    return NodeSet(cand[kept], cand.shape[1])


def layer_depth(theta: float) -> float:
    """Inward offset, in units of ``h``, for a layer covering the boundary within ``theta h``.

    Along a straight edge, nodes at depth ``t h`` spaced ``2 h sqrt(theta^2 - t^2)``
    cover a strip of depth ``h (t + sqrt(1 - theta^2 + t^2))``; the offset
    maximising strip area per node is returned.
    """
    area = lambda t: -math.sqrt(theta * theta - t * t) * (t + math.sqrt(1.0 - theta * theta + t * t))
    return float(optimize.minimize_scalar(area, bounds=(0.0, theta), method="bounded",
                                          options={"xatol": 1e-10}).x)


def _polygon_layer(vertices: np.ndarray, radius: float, depth: float) -> np.ndarray:
    """Nodes on an inner parallel polygon covering the boundary within ``radius``.

    Edge counts are fixed at the preferred ``depth``; the offset is then
    pushed as deep as those counts allow while every boundary point,
    corners included, stays within ``radius``.
    """
    w = np.roll(vertices, -1, axis=0)
    e = w - vertices
    outward = np.column_stack([e[:, 1], -e[:, 0]]) / np.linalg.norm(e, axis=1)[:, None]
    prev = np.roll(outward, 1, axis=0)
    miter = (prev + outward) / (1.0 + np.einsum("ij,ij->i", prev, outward))[:, None]
    # a corner sits at distance tau * |miter| from its offset vertex
    corner = float(np.linalg.norm(miter, axis=1).max())

    def offset(tau):
        inner = vertices - tau * miter
        edges = np.roll(inner, -1, axis=0) - inner
        if np.any(np.einsum("ij,ij->i", edges, e) <= 0):
            return None, None
        return inner, np.linalg.norm(edges, axis=1)

    def fits(tau, counts):
        inner, lengths = offset(tau)
        if inner is None or tau * corner > radius:
            return False
        return bool(np.all(lengths / counts <= 2.0 * math.sqrt(max(radius * radius - tau * tau, 0.0))))

    depth = min(depth, radius / corner)
    inner, lengths = offset(depth)
    while inner is None:
        depth *= 0.5
        inner, lengths = offset(depth)
    spacing = 2.0 * math.sqrt(radius * radius - depth * depth)
    counts = np.maximum(1, np.ceil(lengths / spacing - 1e-12).astype(int))
    lo, hi = depth, radius / corner
    if fits(hi, counts):
        lo = hi
    else:
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if fits(mid, counts) else (lo, mid)
    inner, _ = offset(lo)
    pts = [a + (np.arange(m)[:, None] / m) * (b - a)
           for a, b, m in zip(inner, np.roll(inner, -1, axis=0), counts)]
    return np.concatenate(pts)


def boundary_layer(body, radius: float, depth: float = 0.0) -> NodeSet:
    """Nodes within ``radius`` of the boundary covering it within ``radius``.

    ``depth`` is the preferred inward offset of the layer.
    """
    if not 0.0 <= depth < radius:
        raise ParameterError("layer depth must lie in [0, radius)")
    d = body.dim
    if d == 1:
        lo, hi = body.bounds()
        return NodeSet([[lo[0] + depth], [hi[0] - depth]], 1)
    if d == 2 and isinstance(body, Box):
        (x0, y0), (x1, y1) = body.lo, body.hi
        body = Polygon2D(((x0, y0), (x1, y0), (x1, y1), (x0, y1)))
    if isinstance(body, Polygon2D):
        return NodeSet(_polygon_layer(np.array(body.vertices), radius, depth), 2)
    if d == 2 and isinstance(body, Ball):
        R = body.radius
        depth = min(depth, 0.5 * R)
        rr = R - depth
        cos_half = (R * R + rr * rr - radius * radius) / (2.0 * R * rr)
        half = math.acos(max(-1.0, min(1.0, cos_half)))
        m = max(3, int(math.ceil(math.pi / half - 1e-12)))
        ang = 2.0 * math.pi * np.arange(m) / m
        return NodeSet(np.array(body.center) + rr * np.column_stack([np.cos(ang), np.sin(ang)]), 2)
    # general case: pushed-in boundary samples, thinned, then patched where needed
    slack = radius / 8.0
    fine = boundary_sample(body, slack)
    pushed = _push_inward(body, fine, depth)
    z = maximal_separated_set(pushed, max(slack, math.sqrt(radius * radius - depth * depth) - 2 * slack)).points
    dist = cKDTree(z).query(fine)[0]
    extra = []
    while dist.max() > radius - slack:
        k = int(np.argmax(dist))
        extra.append(fine[k])
        dist = np.minimum(dist, np.linalg.norm(fine - fine[k], axis=1))
    if extra:
        z = np.concatenate([z, np.array(extra)])
    return NodeSet(z, d)


def _push_inward(body, pts: np.ndarray, depth: float) -> np.ndarray:
    if depth == 0.0:
        return pts
    if isinstance(body, Ball):
        c = np.array(body.center)
        v = pts - c
        return c + v * (1.0 - depth / np.linalg.norm(v, axis=1, keepdims=True))
    lo, hi = body.bounds()
    # move off every face the point lies on
    tol = 1e-12 * float(np.max(hi - lo))
    out = pts.copy()
    out += depth * (np.abs(pts - lo) <= tol)
    out -= depth * (np.abs(pts - hi) <= tol)
    return out


def pnorm_refine(body, xi: NodeSet, samples: np.ndarray, fixed: NodeSet | None = None,
                 powers: tuple = (30.0, 60.0, 120.0), max_iter: int = 150) -> NodeSet:
    """Minimise a smooth stand-in for the covering radius, ``sum_x dist(x, xi)^p``.

    Larger ``p`` approaches the maximum; the powers are run in sequence,
    each warm-started from the previous one. Planar polygons integrate the
    power over exact Voronoi cells, other bodies sum it over ``samples``.
    Nodes are kept in the bounding box during the search and projected onto
    the body afterwards.
    """
    m, d = xi.points.shape
    anchor = np.empty((0, d)) if fixed is None else np.asarray(fixed.points)
    poly = _polygon_of(body)
    if poly is not None:
        free = planar.pnorm_descent(poly, np.array(xi.points), anchor, powers, max_iter)
        return NodeSet(body.project(free), d)
    lo, hi = body.bounds()
    box = [(float(lo[i % d]), float(hi[i % d])) for i in range(m * d)]

    def objective(v, p):
        free = v.reshape(m, d)
        dist, owner = cKDTree(np.concatenate([free, anchor])).query(samples)
        scale = dist.max()
        ratio = dist / scale
        weights = ratio ** p
        total = weights.sum()
        mine = owner < m
        coef = (p * ratio[mine] ** (p - 1) / scale / np.maximum(dist[mine], 1e-300))[:, None]
        grad = np.zeros((m, d))
        np.add.at(grad, owner[mine], coef * (free[owner[mine]] - samples[mine]))
        # log keeps the objective well scaled; its minimiser is unchanged
        return math.log(total) + p * math.log(scale), (grad / total).ravel()

    v = np.array(xi.points, dtype=float).ravel()
    for p in powers:
        res = optimize.minimize(objective, v, args=(p,), jac=True, method="L-BFGS-B",
                                bounds=box, options={"maxiter": max_iter})
        v = res.x
    return NodeSet(body.project(v.reshape(m, d)), d)


def approximate_centers(body, m: int, seed: int, samples: np.ndarray,
                        fixed: NodeSet | None = None, iterations: int = 40,
                        clearance: float = 0.0, lattice_starts: int = 2,
                        polish: bool = True) -> NodeSet:
    """Best of greedy and lattice starts after minimax Lloyd, then a p-norm polish."""
    anchor = np.empty((0, body.dim)) if fixed is None else fixed.points
    starts = [greedy_farthest_point(body, m, seed, fixed=fixed, samples=samples)]
    for k in range(lattice_starts):
        starts.append(lattice_nodes(body, m, seed=seed * 7919 + k, fixed=fixed,
                                    clearance=clearance, aligned=k == 0))
    best, best_r = None, math.inf
    for start in starts:
        cand = lloyd_refine(body, start, iterations, fixed=fixed, samples=samples)
        r = covering_radius(body, np.concatenate([cand.points, anchor]), samples)
        if r < best_r - 1e-15:
            best, best_r = cand, r
    if polish:
        cand = pnorm_refine(body, best, samples, fixed=fixed)
        cand = lloyd_refine(body, cand, iterations, fixed=fixed, samples=samples)
        if covering_radius(body, np.concatenate([cand.points, anchor]), samples) < best_r:
            best = cand
    return best


class NodeGenReport(NamedTuple):
    nodes: NodeSet
    e_omega: DistanceEstimate
    e_boundary: DistanceEstimate
    k_n: int
    theta: float
    seed: int
    h: float
    boundary_flag: bool

    def to_dict(self) -> dict:
        return {
            "n": len(self.nodes),
            "dim": self.nodes.dim,
            "k_n": self.k_n,
            "theta": self.theta,
            "seed": self.seed,
            "h": self.h,
            "e_omega": self.e_omega.to_dict(),
            "e_boundary": self.e_boundary.to_dict(),
            "boundary_flag": self.boundary_flag,
        }


def build_xi_star(body, n: int, theta: float = 0.5, seed: int = 0,
                  resolution: float | None = None, refinements: int = 4) -> NodeGenReport:
    """Interior centres plus a boundary layer, ``n`` nodes in total.

    ``h`` starts at the covering radius of approximate n-centres; the layer
    covers the boundary within ``theta * h``. If the finished set covers the
    body better than ``h``, the layer is rebuilt with the smaller radius so
    that ``e(boundary) <= theta * e(body)`` holds at the end.
    """
    if not 0.0 < theta < THETA_MAX:
        raise ParameterError(f"theta must lie in (0, 1/sqrt(2)), got {theta}")
    if n < 2:
        raise NTooSmall("need at least two nodes")
    if resolution is None:
        resolution = auto_resolution(body, n)
    if not resolution > 0:
        raise ParameterError("resolution must be positive")
    return _build_cached(body, int(n), float(theta), int(seed), float(resolution), int(refinements))


_MAX_SAMPLES = 300_000


def _optimisation_samples(body, n: int) -> np.ndarray:
    d = body.dim
    # polygons are optimised on exact cells; samples only seed the greedy start
    fraction = 6.0 if _polygon_of(body) is not None else 30.0
    spacing = max(en_asymptotic(body, n) / fraction, (body.volume() / _MAX_SAMPLES) ** (1.0 / d))
    return interior_sample(body, spacing)


@lru_cache(maxsize=64)
def _build_cached(body, n, theta, seed, resolution, refinements) -> NodeGenReport:
    samples = _optimisation_samples(body, n)
    centres = approximate_centers(body, n, seed, samples, iterations=20, lattice_starts=1,
                                  polish=False)
    t = layer_depth(theta)
    strip = t + math.sqrt(1.0 - theta * theta + t * t)

    def attempt(h):
        z = boundary_layer(body, theta * h, t * h)
        k = len(z)
        if k >= n:
            raise NTooSmall(f"boundary layer needs {k} nodes but only n={n} are available")
        x = approximate_centers(body, n - k, seed, samples, fixed=z, clearance=0.5 * strip)
        nodes = x.union(z)
        e_om = one_sided_hausdorff(body, nodes, resolution)
        e_bd = one_sided_hausdorff(Boundary(body), nodes, resolution)
        flag = e_bd.value + e_bd.gap <= theta * e_om.value
        return NodeGenReport(nodes, e_om, e_bd, k, theta, seed, h, flag)

    # a layer built for larger h uses fewer nodes, but h may not exceed the
    # final covering radius; search for the largest admissible h
    h = covering_radius(body, centres.points, samples)
    best = last = None
    lo, hi = 0.0, math.inf
    for _ in range(refinements + 1):
        last = attempt(h)
        achieved = last.e_omega.value
        if last.boundary_flag:
            lo = h
            if best is None or achieved < best.e_omega.value:
                best = last
            if achieved <= h * (1 + 2e-3):
                break
        else:
            hi = h
        nxt = achieved if lo < achieved < hi else (0.5 * (lo + hi) if lo > 0 else 0.9 * h)
        if abs(nxt - h) <= 2e-3 * h:
            break
        h = nxt
    return best or last
