"""
The radial bump for D^2 + q with q > 0
======================================

The bump h~(|x|) has the right second derivative along rays. Across rays
the second derivative is h~'(r)/r, and with q > 0 the sum h~'/r + q h~ can
exceed 1. Dividing by that excess gives a valid lower bound witness.
"""

import sys
from pathlib import Path

import numpy as np

from isorec import ComplexPair, FoolingFunction, verify_fooling_class
from isorec.io import svg_plot
from isorec.recovery import tangential_factor

out = Path(sys.argv[1] if len(sys.argv) > 1 else "out")
out.mkdir(parents=True, exist_ok=True)

op = ComplexPair(0.0, 1.0)
a = np.linspace(0.05, 1.5, 30)
rho = np.array([tangential_factor(op, x) for x in a])
svg_plot(out / "tangential_factor.svg",
         {"sup |h~'/r + q h~|": (a, rho), "1 + q a^2 / 12": (a, 1 + a * a / 12)},
         title="excess of the radial bump, D^2 + 1", xlabel="a", ylabel="factor", markers=True)

for x in (0.1, 0.6, 1.2):
    f = FoolingFunction((0.0, 0.0), x, op)
    raw = verify_fooling_class(f, n_points=200, n_dirs=10)
    fixed = verify_fooling_class(f.scaled(1 / tangential_factor(op, x)), n_points=200, n_dirs=10)
    print(f"a={x:.1f}: raw residual {raw.max_residual:.4f} (ok={raw.ok}), "
          f"rescaled {fixed.max_residual:.4f} (ok={fixed.ok})")
print(f"wrote {out / 'tangential_factor.svg'}")
