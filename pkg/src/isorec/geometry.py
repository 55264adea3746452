"""Convex bodies, node sets and certified covering radii.

Three body types are supported: axis-aligned boxes and Euclidean balls in
dimensions 1 to 4, and convex polygons in the plane.  All of them expose the
same small contract (``contains``, ``volume``, ``bounds``, ``project``,
``project_boundary``, ``depth``, ``boundary_sample``) which is all the
covering and recovery code relies on.

Covering radii ``e(X, xi) = sup_{x in X} dist(x, xi)`` are computed by a
branch-and-bound over grid cells.  Since ``x -> dist(x, xi)`` is 1-Lipschitz,
a cell of half-diagonal ``r`` around ``c`` cannot contain a point farther
than ``dist(c, xi) + r``; cells whose bound cannot beat the incumbent are
discarded, the rest are split.  The result carries the achieved value and a
certified additive gap.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import BudgetError, InvalidBody, PreconditionError, UnsupportedDimension

__all__ = [
    "Box",
    "Ball",
    "Polygon2D",
    "Boundary",
    "NodeSet",
    "DistanceEstimate",
    "body_from_dict",
    "contains",
    "volume",
    "unit_ball_volume",
    "dist_point_to_nodes",
    "one_sided_hausdorff",
    "boundary_sample",
    "MAX_CELLS",
]

MAX_CELLS = 10**8
_CHUNK = 1 << 18
_MAX_DIM = 4


def unit_ball_volume(d: int) -> float:
    if d < 1:
        raise PreconditionError("dimension must be positive")
    # nu_d = 2 pi / d * nu_(d-2), exact in the low dimensions
    nu = 2.0 if d % 2 else 1.0
    for k in range(2 if d % 2 == 0 else 3, d + 1, 2):
        nu *= 2.0 * math.pi / k
    return nu


def _as_points(x, d: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.shape[-1] != d:
        raise PreconditionError(f"expected points of dimension {d}, got shape {np.shape(x)}")
    return arr, single


def _unit_directions(v: np.ndarray) -> np.ndarray:
    """Row-normalise ``v``; zero rows map to the first basis vector."""
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    out = np.zeros_like(v)
    out[:, 0] = 1.0
    np.divide(v, norms, out=out, where=norms > 0)
    return out


def _face_grid(lo: np.ndarray, hi: np.ndarray, spacing: float) -> np.ndarray:
    """Points on the boundary of a box, every boundary point within ``spacing``."""
    d = lo.size
    if d == 1:
        return np.array([[lo[0]], [hi[0]]])
    # grid step s with half-diagonal of a (d-1)-cell at most `spacing`
    s = 2.0 * spacing / math.sqrt(d - 1)
    axes = [np.linspace(lo[i], hi[i], int(math.ceil((hi[i] - lo[i]) / s - 1e-12)) + 1)
            for i in range(d)]
    faces = []
    for i in range(d):
        others = [axes[j] for j in range(d) if j != i]
        mesh = np.stack(np.meshgrid(*others, indexing="ij"), axis=-1).reshape(-1, d - 1)
        for val in (lo[i], hi[i]):
            pts = np.insert(mesh, i, val, axis=1)
            faces.append(pts)
    pts = np.concatenate(faces)
    return np.unique(pts, axis=0)


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        if len(lo) != len(hi) or not lo:
            raise InvalidBody("box corners must have equal, positive length")
        if len(lo) > _MAX_DIM:
            raise UnsupportedDimension(f"boxes are supported up to d={_MAX_DIM}")
        if not all(math.isfinite(v) for v in lo + hi):
            raise InvalidBody("box corners must be finite")
        if not all(a < b for a, b in zip(lo, hi)):
            raise InvalidBody("box needs lo < hi in every coordinate")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return len(self.lo)

    def bounds(self):
        return np.array(self.lo), np.array(self.hi)

    def volume(self) -> float:
        return math.prod(b - a for a, b in zip(self.lo, self.hi))

    def contains(self, x, tol: float = 0.0):
        pts, single = _as_points(x, self.dim)
        lo, hi = self.bounds()
        inside = np.all((pts >= lo - tol) & (pts <= hi + tol), axis=1)
        return bool(inside[0]) if single else inside

    def depth(self, x):
        """Distance to the boundary for interior points, negative outside."""
        pts, single = _as_points(x, self.dim)
        lo, hi = self.bounds()
        dep = np.minimum(pts - lo, hi - pts).min(axis=1)
        return float(dep[0]) if single else dep

    def project(self, x):
        pts, single = _as_points(x, self.dim)
        lo, hi = self.bounds()
        out = np.clip(pts, lo, hi)
        return out[0] if single else out

    def project_boundary(self, x):
        pts, single = _as_points(x, self.dim)
        lo, hi = self.bounds()
        out = np.clip(pts, lo, hi)
        inside = np.all((pts > lo) & (pts < hi), axis=1)
        if np.any(inside):
            sub = pts[inside]
            gaps = np.concatenate([sub - lo, hi - sub], axis=1)
            k = np.argmin(gaps, axis=1)
            axis = k % self.dim
            target = np.where(k < self.dim, lo[axis], hi[axis])
            sub = sub.copy()
            sub[np.arange(sub.shape[0]), axis] = target
            out[inside] = sub
        return out[0] if single else out

    def boundary_sample(self, dispersion: float) -> np.ndarray:
        lo, hi = self.bounds()
        return _face_grid(lo, hi, dispersion)

    def scaled(self, s: float) -> "Box":
        return Box(tuple(s * v for v in self.lo), tuple(s * v for v in self.hi))

    def to_dict(self) -> dict:
        return {"type": "box", "lo": list(self.lo), "hi": list(self.hi)}


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(self.center))
        if not c:
            raise InvalidBody("ball center must be non-empty")
        if len(c) > _MAX_DIM:
            raise UnsupportedDimension(f"balls are supported up to d={_MAX_DIM}")
        r = float(self.radius)
        if not (all(math.isfinite(v) for v in c) and math.isfinite(r) and r > 0):
            raise InvalidBody("ball needs a finite center and a positive radius")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return len(self.center)

    def bounds(self):
        c = np.array(self.center)
        return c - self.radius, c + self.radius

    def volume(self) -> float:
        return unit_ball_volume(self.dim) * self.radius ** self.dim

    def contains(self, x, tol: float = 0.0):
        pts, single = _as_points(x, self.dim)
        inside = np.linalg.norm(pts - np.array(self.center), axis=1) <= self.radius + tol
        return bool(inside[0]) if single else inside

    def depth(self, x):
        pts, single = _as_points(x, self.dim)
        dep = self.radius - np.linalg.norm(pts - np.array(self.center), axis=1)
        return float(dep[0]) if single else dep

    def project(self, x):
        pts, single = _as_points(x, self.dim)
        c = np.array(self.center)
        v = pts - c
        norms = np.linalg.norm(v, axis=1, keepdims=True)
        scale = np.minimum(1.0, self.radius / np.maximum(norms, 1e-300))
        out = c + v * scale
        return out[0] if single else out

    def project_boundary(self, x):
        pts, single = _as_points(x, self.dim)
        c = np.array(self.center)
        out = c + self.radius * _unit_directions(pts - c)
        return out[0] if single else out

    def boundary_sample(self, dispersion: float) -> np.ndarray:
        c, R, d = np.array(self.center), self.radius, self.dim
        if d == 1:
            return np.array([[c[0] - R], [c[0] + R]])
        if d == 2:
            m = max(3, int(math.ceil(2.0 * math.pi * R / dispersion - 1e-9)))
            ang = 2.0 * math.pi * np.arange(m) / m
            return c + R * np.column_stack([np.cos(ang), np.sin(ang)])
        # radial projection from the cube surface is R-Lipschitz onto the sphere
        cube = _face_grid(-np.ones(d), np.ones(d), dispersion / R)
        return c + R * _unit_directions(cube)

    def scaled(self, s: float) -> "Ball":
        return Ball(tuple(s * v for v in self.center), s * self.radius)

    def to_dict(self) -> dict:
        return {"type": "ball", "center": list(self.center), "radius": self.radius}


def _segment_nearest(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    t = np.clip((pts - a) @ ab / (ab @ ab), 0.0, 1.0)
    return a + t[:, None] * ab


@dataclass(frozen=True)
class Polygon2D:
    """Convex polygon with counterclockwise vertices."""

    vertices: tuple

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise InvalidBody("polygon needs at least 3 planar vertices")
        if not np.all(np.isfinite(v)):
            raise InvalidBody("polygon vertices must be finite")
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if not np.all(cross > 0):
            raise InvalidBody("polygon must be strictly convex and counterclockwise")
        turning = np.arctan2(cross, np.einsum("ij,ij->i", e, np.roll(e, -1, axis=0))).sum()
        if abs(turning - 2.0 * math.pi) > 1e-6:
            raise InvalidBody("polygon boundary winds more than once")
        object.__setattr__(self, "vertices", tuple(tuple(float(c) for c in row) for row in v))

    @property
    def dim(self) -> int:
        return 2

    def _arrays(self):
        v = np.array(self.vertices)
        w = np.roll(v, -1, axis=0)
        e = w - v
        normals = np.column_stack([e[:, 1], -e[:, 0]]) / np.linalg.norm(e, axis=1)[:, None]
        offsets = np.einsum("ij,ij->i", normals, v)
        return v, w, normals, offsets

    def bounds(self):
        v = np.array(self.vertices)
        return v.min(axis=0), v.max(axis=0)

    def volume(self) -> float:
        v = np.array(self.vertices)
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def depth(self, x):
        pts, single = _as_points(x, 2)
        _, _, normals, offsets = self._arrays()
        dep = (offsets[None, :] - pts @ normals.T).min(axis=1)
        return float(dep[0]) if single else dep

    def contains(self, x, tol: float = 0.0):
        dep = np.atleast_1d(self.depth(x))
        inside = dep >= -tol
        return bool(inside[0]) if np.ndim(x) == 1 else inside

    def project_boundary(self, x):
        pts, single = _as_points(x, 2)
        v, w, _, _ = self._arrays()
        best = None
        best_d = np.full(pts.shape[0], np.inf)
        for a, b in zip(v, w):
            cand = _segment_nearest(pts, a, b)
            dist = np.linalg.norm(pts - cand, axis=1)
            if best is None:
                best = cand
            else:
                best = np.where((dist < best_d)[:, None], cand, best)
            best_d = np.minimum(dist, best_d)
        return best[0] if single else best

    def project(self, x):
        pts, single = _as_points(x, 2)
        out = self.project_boundary(pts)
        inside = self.depth(pts) >= 0
        out[inside] = pts[inside]
        return out[0] if single else out

    def boundary_sample(self, dispersion: float) -> np.ndarray:
        v, w, _, _ = self._arrays()
        chunks = []
        for a, b in zip(v, w):
            m = max(1, int(math.ceil(np.linalg.norm(b - a) / dispersion - 1e-12)))
            s = np.arange(m)[:, None] / m
            chunks.append(a + s * (b - a))
        return np.concatenate(chunks)

    def scaled(self, s: float) -> "Polygon2D":
        return Polygon2D(tuple((s * x, s * y) for x, y in self.vertices))

    def to_dict(self) -> dict:
        return {"type": "polygon", "vertices": [list(p) for p in self.vertices]}


def body_from_dict(data: dict):
    """Build a body from its JSON description (see README for the schema)."""
    if not isinstance(data, dict) or "type" not in data:
        raise InvalidBody("body description needs a 'type' field")
    kind = data["type"]
    try:
        if kind == "box":
            return Box(tuple(data["lo"]), tuple(data["hi"]))
        if kind == "ball":
            return Ball(tuple(data["center"]), data["radius"])
        if kind == "polygon":
            return Polygon2D(tuple(tuple(p) for p in data["vertices"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidBody(f"malformed {kind} description: {exc}") from exc
    raise InvalidBody(f"unknown body type {kind!r}")


@dataclass(frozen=True)
class Boundary:
    """Marker selecting the boundary of a body as the target set."""

    body: object

    @property
    def dim(self) -> int:
        return self.body.dim

    def bounds(self):
        return self.body.bounds()

    def project(self, x):
        return self.body.project_boundary(x)


def _corners(target) -> np.ndarray | None:
    """Vertices of polyhedral targets; distance maxima often sit there."""
    body = target.body if isinstance(target, Boundary) else target
    if isinstance(body, Polygon2D):
        return np.array(body.vertices)
    if isinstance(body, Box) and body.dim <= 10:
        return np.array(list(itertools.product(*zip(body.lo, body.hi))), dtype=float)
    return None


class NodeSet:
    """Finite point set in R^d, stored as a read-only ``(n, d)`` array."""

    __slots__ = ("points",)

    def __init__(self, points, dim: int | None = None):
        arr = np.array(points, dtype=float)
        if arr.size == 0:
            if dim is None:
                raise PreconditionError("empty node set needs an explicit dimension")
            arr = arr.reshape(0, dim)
        elif arr.ndim == 1:
            arr = arr.reshape(-1, 1) if dim == 1 else arr.reshape(1, -1)
        if arr.ndim != 2 or (dim is not None and arr.shape[1] != dim):
            raise PreconditionError(f"node array has shape {arr.shape}, expected (n, {dim})")
        if not np.all(np.isfinite(arr)):
            raise PreconditionError("node coordinates must be finite")
        arr.setflags(write=False)
        self.points = arr

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, NodeSet) and np.array_equal(self.points, other.points)

    def __repr__(self) -> str:
        return f"NodeSet(n={len(self)}, dim={self.dim})"

    def union(self, other: "NodeSet") -> "NodeSet":
        return NodeSet(np.concatenate([self.points, other.points]), self.dim)

    def tree(self) -> cKDTree:
        if len(self) == 0:
            raise PreconditionError("node set is empty")
        return cKDTree(self.points)


@dataclass(frozen=True)
class DistanceEstimate:
    """``value <= true distance <= value + gap``; ``argmax`` attains ``value``."""

    value: float
    gap: float
    argmax: tuple

    @property
    def upper(self) -> float:
        return self.value + self.gap

    def to_dict(self) -> dict:
        return {"value": self.value, "gap": self.gap, "argmax": list(self.argmax)}


def contains(body, x, tol: float = 0.0):
    return body.contains(x, tol)


def volume(body) -> float:
    return body.volume()


def boundary_sample(body, dispersion: float) -> np.ndarray:
    if not dispersion > 0:
        raise PreconditionError("dispersion must be positive")
    lo, hi = body.bounds()
    d = lo.size
    per_axis = max(float(np.max(hi - lo)) / dispersion, 1.0) * math.sqrt(max(d - 1, 1))
    if d > 1 and 2 * d * per_axis ** (d - 1) > MAX_CELLS:
        raise BudgetError(f"dispersion {dispersion} needs more than {MAX_CELLS} boundary samples")
    return body.boundary_sample(dispersion)


def _as_nodes(xi) -> NodeSet:
    return xi if isinstance(xi, NodeSet) else NodeSet(xi)


def dist_point_to_nodes(x, xi):
    """Euclidean distance from ``x`` (one point or an ``(m, d)`` array) to ``xi``."""
    xi = _as_nodes(xi)
    if len(xi) == 0:
        raise PreconditionError("node set is empty")
    pts, single = _as_points(x, xi.dim)
    dist, _ = xi.tree().query(pts)
    return float(dist[0]) if single else dist


def _grid_centers(lo, steps, counts, start, stop):
    idx = np.stack(np.unravel_index(np.arange(start, stop), counts), axis=1)
    return lo + (idx + 0.5) * steps


def _pick_witness(values: np.ndarray, points: np.ndarray):
    top = values.max()
    ties = np.flatnonzero(values == top)
    if ties.size > 1:
        order = np.lexsort(points[ties].T[::-1])
        return top, points[ties[order[0]]]
    return top, points[ties[0]]


def one_sided_hausdorff(target, xi, resolution: float) -> DistanceEstimate:
    """Certified ``e(target, xi)`` for a body or ``Boundary(body)``.

    Grid cells of half-diagonal at most ``resolution`` are refined until every
    discarded cell provably cannot beat the best point found by more than
    ``resolution / 8``.
    """
    if not resolution > 0:
        raise PreconditionError("resolution must be positive")
    xi = _as_nodes(xi)
    if len(xi) == 0:
        raise PreconditionError("node set is empty")
    if xi.dim != target.dim:
        raise PreconditionError("node and body dimensions differ")
    tree = xi.tree()
    lo, hi = target.bounds()
    d = lo.size
    side = 2.0 * resolution / math.sqrt(d)
    counts = tuple(max(1, int(math.ceil((h - l) / side))) for l, h in zip(lo, hi))
    total = math.prod(counts)
    if total > MAX_CELLS:
        raise BudgetError(f"resolution {resolution} needs {total} cells (limit {MAX_CELLS})")
    steps = (hi - lo) / np.array(counts)
    radius = 0.5 * float(np.linalg.norm(steps))
    tol = resolution / 8.0

    best, witness = -np.inf, None
    corners = _corners(target)
    if corners is not None:
        best, witness = _pick_witness(tree.query(corners)[0], corners)
    pending = []
    for start in range(0, total, _CHUNK):
        centers = _grid_centers(lo, steps, counts, start, min(total, start + _CHUNK))
        proj = target.project(centers)
        near = np.linalg.norm(centers - proj, axis=1) <= radius
        centers, proj = centers[near], proj[near]
        if centers.size == 0:
            continue
        e_proj, _ = tree.query(proj)
        top, pt = _pick_witness(e_proj, proj)
        if top > best:
            best, witness = top, pt
        e_cent, _ = tree.query(centers)
        pending.append((centers, e_cent + radius))
    if witness is None:
        raise PreconditionError("target set produced no sample cells")

    pruned_upper = -np.inf
    level_steps, level_radius = steps, radius
    frontier = []
    for centers, upper in pending:
        keep = upper > best + tol
        if np.any(~keep):
            pruned_upper = max(pruned_upper, float(upper[~keep].max()))
        frontier.append(centers[keep])
    frontier = np.concatenate(frontier) if frontier else np.empty((0, d))

    offsets = np.array(list(itertools.product((-0.25, 0.25), repeat=d)))
    while frontier.shape[0]:
        children = (frontier[:, None, :] + offsets[None, :, :] * level_steps).reshape(-1, d)
        level_steps = level_steps / 2.0
        level_radius = level_radius / 2.0
        proj = target.project(children)
        near = np.linalg.norm(children - proj, axis=1) <= level_radius
        children, proj = children[near], proj[near]
        if children.size == 0:
            break
        e_proj, _ = tree.query(proj)
        top, pt = _pick_witness(e_proj, proj)
        if top > best:
            best, witness = top, pt
        e_cent, _ = tree.query(children)
        upper = e_cent + level_radius
        keep = upper > best + tol
        if np.any(~keep):
            pruned_upper = max(pruned_upper, float(upper[~keep].max()))
        frontier = children[keep]
    gap = max(0.0, pruned_upper - best)
    return DistanceEstimate(float(best), float(gap), tuple(float(c) for c in witness))
