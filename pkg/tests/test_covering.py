import math

import numpy as np
import pytest
from scipy.spatial import Delaunay

from isorec import (Ball, Boundary, Box, NodeSet, NTooSmall, ParameterError, Polygon2D,
                    UnsupportedDimension, build_xi_star, dens_lookup, en_asymptotic,
                    one_sided_hausdorff)
from isorec.covering import (THETA_MAX, _build_cached, boundary_layer, covering_radius, greedy_farthest_point,
                             interior_sample, layer_depth, lloyd_refine, maximal_separated_set)
from isorec.geometry import dist_point_to_nodes, unit_ball_volume

SQUARE = Box((0.0, 0.0), (1.0, 1.0))
INTERVAL = Box((0.0,), (1.0,))


def _circumradius(simplex: np.ndarray) -> float:
    a = simplex[1:] - simplex[0]
    centre = np.linalg.solve(2 * a, np.einsum("ij,ij->i", a, a))
    return float(np.linalg.norm(centre))


def _lattice_density(points: np.ndarray, det: float) -> float:
    """Covering density from the largest empty circumsphere of central Delaunay cells."""
    tri = Delaunay(points)
    d = points.shape[1]
    central = [s for s in tri.simplices if np.linalg.norm(points[s].mean(0)) < 1.0]
    r = max(_circumradius(points[s]) for s in central)
    return unit_ball_volume(d) * r**d / det


def test_dens_d2_from_hexagonal_lattice():
    b = np.array([[1.0, 0.0], [0.5, math.sqrt(3) / 2]])
    ij = np.array([(i, j) for i in range(-6, 7) for j in range(-6, 7)])
    dens = _lattice_density(ij @ b, abs(np.linalg.det(b)))
    assert dens_lookup(2) == (pytest.approx(dens, abs=1e-6), "exact")
    assert dens_lookup(2)[0] == pytest.approx(1.2091996, abs=1e-7)


def test_dens_d3_from_body_centred_cubic_lattice():
    z = np.array([(i, j, k) for i in range(-3, 4) for j in range(-3, 4) for k in range(-3, 4)], float)
    pts = np.concatenate([z, z + 0.5])
    dens = _lattice_density(pts, 0.5)  # two points per unit cube
    value, status = dens_lookup(3)
    assert status == "best_known_upper"
    assert value == pytest.approx(dens, abs=1e-3)
    assert value == pytest.approx(5 * math.sqrt(5) * math.pi / 24, abs=1e-12)


def test_dens_table_edges():
    assert dens_lookup(1) == (1.0, "exact")
    assert dens_lookup(4)[0] == pytest.approx(1.7655, abs=1e-4)
    with pytest.raises(UnsupportedDimension):
        dens_lookup(5)


def test_en_asymptotic():
    for n in (1, 10, 1000):
        assert en_asymptotic(SQUARE, n) == pytest.approx(math.sqrt(2 / (math.sqrt(27) * n)), rel=1e-14)
    assert en_asymptotic(Ball((0.0, 0.0), 1.0), 1) == pytest.approx(1.0996, abs=1e-4)
    s = 3.0
    assert en_asymptotic(Box((0.0, 0.0), (s, s)), 50) == pytest.approx(s * en_asymptotic(SQUARE, 50), rel=1e-14)


def test_greedy_examples():
    res = 1e-3
    one = greedy_farthest_point(SQUARE, 1, 0, res)
    assert np.linalg.norm(one.points[0] - 0.5) <= res
    e = one_sided_hausdorff(SQUARE, one, res)
    # the node is off-centre by at most res, which moves the farthest corner by as much
    assert e.value <= math.sqrt(2) / 2 + np.linalg.norm(one.points[0] - 0.5) + e.gap
    e4 = one_sided_hausdorff(SQUARE, greedy_farthest_point(SQUARE, 4, 7, 0.01), 1e-3)
    e5 = one_sided_hausdorff(SQUARE, greedy_farthest_point(SQUARE, 5, 7, 0.01), 1e-3)
    assert e5.value < e4.value


def test_greedy_then_lloyd_finds_1d_centres():
    start = greedy_farthest_point(INTERVAL, 2, 0, 1e-3)
    pts = np.sort(lloyd_refine(INTERVAL, start, 50, 1e-3).points.ravel())
    assert pts == pytest.approx([0.25, 0.75], abs=2e-3)
    assert one_sided_hausdorff(INTERVAL, pts.reshape(-1, 1), 1e-4).value == pytest.approx(0.25, abs=2e-3)


def test_lloyd_examples():
    pts = np.sort(lloyd_refine(INTERVAL, NodeSet([[0.1], [0.9]]), 50, 1e-3).points.ravel())
    assert pts == pytest.approx([0.25, 0.75], abs=0.02)
    start = NodeSet(np.random.default_rng(4).random((4, 2)))
    after = lloyd_refine(SQUARE, start, 50, 1e-3)
    assert one_sided_hausdorff(SQUARE, after, 1e-3).value <= one_sided_hausdorff(SQUARE, start, 1e-3).upper
    grid = NodeSet([[0.25, 0.25], [0.25, 0.75], [0.75, 0.25], [0.75, 0.75]])
    assert np.allclose(lloyd_refine(SQUARE, grid, 10, 1e-3).points, grid.points, atol=1e-6)


def test_lloyd_on_disc_uses_samples():
    disc = Ball((0.0, 0.0), 1.0)
    start = NodeSet(np.random.default_rng(2).normal(scale=0.3, size=(7, 2)))
    samples = interior_sample(disc, 0.01)
    after = lloyd_refine(disc, start, 30, samples=samples)
    assert covering_radius(disc, after.points, samples) <= covering_radius(disc, start.points, samples)


def test_maximal_separated_set_examples():
    assert len(maximal_separated_set(np.random.default_rng(0).random((20, 2)) * 0.1, 0.5)) == 1
    kept = maximal_separated_set([[0.0], [0.4], [0.8], [1.2]], 0.5)
    assert kept.points.ravel().tolist() == [0.0, 0.8]
    assert len(maximal_separated_set(np.empty((0, 2)), 0.5)) == 0


def test_maximal_separated_set_properties():
    cand = np.random.default_rng(1).random((500, 2))
    eps = 0.07
    kept = maximal_separated_set(cand, eps).points
    d = np.linalg.norm(kept[:, None] - kept[None], axis=2)
    assert np.all(d[np.triu_indices(len(kept), 1)] > eps)
    assert dist_point_to_nodes(cand, kept).max() <= eps


def test_layer_depth_optimum():
    for theta in (0.3, 0.5, 0.65):
        t = layer_depth(theta)
        area = lambda s: math.sqrt(theta**2 - s * s) * (s + math.sqrt(1 - theta**2 + s * s))
        grid = np.linspace(0, theta, 20001)
        assert area(t) >= max(area(s) for s in grid) - 1e-9
    assert layer_depth(0.5) == pytest.approx(0.2236, abs=1e-4)


@pytest.mark.parametrize("body", [SQUARE, Polygon2D(((0.0, 0.0), (2.0, 0.0), (0.4, 1.0))),
                                  Ball((0.0, 0.0), 1.0), Box((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))],
                         ids=["square", "triangle", "disc", "cube"])
def test_boundary_layer_covers_boundary_from_inside(body):
    h = 0.2
    z = boundary_layer(body, 0.5 * h, layer_depth(0.5) * h)
    assert np.all(body.contains(z.points, 1e-12))
    # every layer node lies within h of the boundary
    assert np.all(body.depth(z.points) <= h)
    e = one_sided_hausdorff(Boundary(body), z, 0.005)
    assert e.value <= 0.5 * h + 1e-12


def test_build_parameter_errors():
    with pytest.raises(ParameterError):
        build_xi_star(SQUARE, 100, theta=0.8)
    with pytest.raises(ParameterError):
        build_xi_star(SQUARE, 100, theta=THETA_MAX)
    with pytest.raises(NTooSmall):
        build_xi_star(SQUARE, 3)


def test_build_xi_star_square_100():
    rep = build_xi_star(SQUARE, 100, theta=0.5, seed=0)
    assert len(rep.nodes) == 100 and rep.k_n < 100
    assert rep.boundary_flag
    assert rep.e_boundary.value <= 0.5 * rep.e_omega.value + rep.e_boundary.gap + rep.e_omega.gap
    lower = math.sqrt(1 / (100 * math.pi))
    assert lower * 0.98 <= rep.e_omega.upper <= 1.5 * lower
    assert np.all(SQUARE.contains(rep.nodes.points, 1e-12))


def test_build_xi_star_deterministic():
    a = build_xi_star(SQUARE, 64, seed=3)
    _build_cached.cache_clear()
    b = build_xi_star(SQUARE, 64, seed=3)
    assert a is not b
    assert a.nodes == b.nodes and a.to_dict() == b.to_dict()


def test_build_xi_star_other_bodies():
    for body in (Ball((0.0, 0.0), 1.0), Polygon2D(((0.0, 0.0), (2.0, 0.0), (0.4, 1.0)))):
        rep = build_xi_star(body, 60, theta=0.5)
        assert len(rep.nodes) == 60 and rep.boundary_flag


@pytest.mark.slow
def test_boundary_share_decreases():
    shares = [build_xi_star(SQUARE, n, theta=0.5).k_n / n for n in (100, 400, 1600)]
    assert shares[0] > shares[1] > shares[2]
