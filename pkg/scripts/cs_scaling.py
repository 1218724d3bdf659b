"""Chern-Simons defect of the NEASS unitary versus torus size.

The defect comes from seam terms of the minimal-image kernels and should fall
off exponentially in L.
"""
import argparse
import time

import numpy as np

from artifact import response as rs
from artifact.neass import neass_state
from artifact.pipeline import hofstadter

ap = argparse.ArgumentParser()
ap.add_argument("--sizes", type=int, nargs="+", default=[12, 24, 36])
ap.add_argument("--eps", type=float, default=0.05)
ap.add_argument("--calculus", default="kernel", choices=["kernel", "twist"])
args = ap.parse_args()

rows = []
for L in args.sizes:
    t = time.time()
    m = hofstadter(L)
    U = neass_state(m.generators(2, args.calculus), args.eps).U
    lhs, rhs = rs.chern_simons_check(m.P, U, m.d, m.g)
    rows.append((L, abs(lhs - rhs)))
    print(f"L={L:3d}  |lhs - rhs| = {abs(lhs - rhs):.3e}  ({time.time() - t:.1f}s)", flush=True)

if len(rows) > 1:
    L, v = np.array(rows).T
    rate = -np.polyfit(L, np.log(v), 1)[0]
    print(f"decay rate {rate:.3f} per site")
