"""
Node sets with a boundary layer
===============================

Interior centres plus a thin layer near the boundary. The layer takes a
share of the nodes that shrinks like n^(-1/2) in the plane.
"""

import math
import sys
from pathlib import Path

from isorec import Ball, Box, Polygon2D, build_xi_star
from isorec.io import svg_nodes

out = Path(sys.argv[1] if len(sys.argv) > 1 else "out")
out.mkdir(parents=True, exist_ok=True)
theta = 0.65

bodies = {
    "square": Box((0.0, 0.0), (1.0, 1.0)),
    "disc": Ball((0.0, 0.0), 0.6),
    "triangle": Polygon2D([(0.0, 0.0), (1.4, 0.0), (0.3, 1.0)]),
}

for name, body in bodies.items():
    for n in (64, 256):
        rep = build_xi_star(body, n, theta=theta, seed=0)
        # a covering by n discs of radius e needs n*pi*e^2 >= area
        ref = math.sqrt(body.volume() / (math.pi * n))
        print(f"{name:8s} n={n:4d}  e/ref={rep.e_omega.value / ref:.3f}  "
              f"layer {rep.k_n:3d} ({rep.k_n / n:.0%})  boundary check {rep.boundary_flag}")
        svg_nodes(out / f"nodes_{name}_{n}.svg", body, rep.nodes, rep.k_n,
                  title=f"{name}, n = {n}, layer in red")
print(f"wrote node plots to {out}")
