"""
Extremal values of the three p = 0 families
===========================================

For a short segment every operator behaves like D^2: the largest value a
zero-data function can reach is about a^2/4. Longer segments separate the
families.
"""

import sys
from pathlib import Path

import numpy as np

from isorec import ComplexPair, DistinctReal, DoubleRoot, delta_threshold, ext2
from isorec.io import svg_plot

out = Path(sys.argv[1] if len(sys.argv) > 1 else "out")
out.mkdir(parents=True, exist_ok=True)

ops = {"D^2": DoubleRoot(0.0), "D^2 - 1": DistinctReal(-1.0, 1.0), "D^2 + 1": ComplexPair(0.0, 1.0)}

# D^2 + 1 stops at pi/2, the other two go on forever
a = np.linspace(0.01, 1.5, 150)
series = {}
for name, op in ops.items():
    keep = a < delta_threshold(op)
    ratio = [ext2(op, x) / (x * x / 4) for x in a[keep]]
    series[name] = (a[keep], ratio)
    print(f"{name:8s} delta = {delta_threshold(op):.4f}   ext2/(a^2/4) at a=1.5: {ratio[-1]:.4f}")

svg_plot(out / "extremal_ratio.svg", series, title="ext2(a) / (a^2/4)", xlabel="a", ylabel="ratio",
         hlines={"D^2": 1.0})

# positive q pushes the value up, negative q pulls it down
for x in (1e-3, 1e-2, 1e-1):
    print(f"a={x:g}: " + ", ".join(f"{n} {ext2(op, x) / (x * x / 4) - 1:+.2e}" for n, op in ops.items()))
print(f"wrote {out / 'extremal_ratio.svg'}")
