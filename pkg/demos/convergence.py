"""
Worst-case error times n
========================

On the unit square the optimal error decays like c/n with the same c for
every p = 0 operator. A comma-separated list of n after the output
directory goes further
(n=1024 takes about a minute).
"""

import sys
from pathlib import Path

from isorec import Box, ComplexPair, DistinctReal, DoubleRoot, convergence_study, rn_asymptotic
from isorec.io import svg_plot, write_rows_csv

out = Path(sys.argv[1] if len(sys.argv) > 1 else "out")
out.mkdir(parents=True, exist_ok=True)
n_list = [int(v) for v in (sys.argv[2] if len(sys.argv) > 2 else "64,144,256").split(",")]

square = Box((0.0, 0.0), (1.0, 1.0))
ops = {"D^2": DoubleRoot(0.0), "D^2 - 1": DistinctReal(-1.0, 1.0), "D^2 + 1": ComplexPair(0.0, 1.0)}
c = rn_asymptotic(square, 1).value
print(f"asymptotic constant {c:.6f}")

series = {}
for name, op in ops.items():
    rows = convergence_study(op, square, n_list, theta=0.65)
    write_rows_csv(out / f"convergence_{name.replace(' ', '').replace('^', '')}.csv", rows,
                   ["n", "e_omega", "lower", "upper", "exact", "normalized"])
    series[name] = ([r["n"] for r in rows], [r["normalized"] / c for r in rows])
    for r in rows:
        print(f"{name:8s} n={r['n']:5d}  lower*n/c={r['lower'] * r['n'] / c:.3f}  "
              f"upper*n/c={r['normalized'] / c:.3f}  exact={r['exact']}")

svg_plot(out / "convergence.svg", series, title="upper * n / asymptotic constant",
         xlabel="n", ylabel="ratio", logx=True, hlines={"limit": 1.0}, markers=True)
print(f"wrote {out / 'convergence.svg'}")
