"""Hall conductivity in the golden-mean gap along the convergents p/q."""
import argparse

import numpy as np

from artifact import response as rs
from artifact import spectral as sp
from artifact.errors import GaplessAtFilling, NoGap
from artifact.lattice_model import convergents
from artifact.pipeline import golden_label_rank, hofstadter

ap = argparse.ArgumentParser()
ap.add_argument("--terms", type=int, default=5)
ap.add_argument("--cells", type=int, default=4, help="torus side in units of q (at least 12 sites)")
args = ap.parse_args()

golden = (np.sqrt(5) - 1) / 2
for p, q in convergents(golden, args.terms + 1):
    if p >= q:  # 1/1 is the trivial flux
        continue
    r = golden_label_rank(p, q)
    L = max(12, args.cells * q)
    L += (-L) % q
    m = hofstadter(L, L, p, q)
    try:
        gap = sp.gap_by_filling(m.spectrum, r * m.g.N // q)
        C = rs.chern_number_momentum(m.flux, r)
    except (NoGap, GaplessAtFilling) as e:
        print(f"{p}/{q}: IDS {r}/{q} gapless ({type(e).__name__})")
        continue
    m.gap_hint = gap.mu
    s = 2 * np.pi * rs.hall_conductivity_marker(m.P, m.d, m.g)
    print(f"{p}/{q}: L={L} IDS {r}/{q} gap {gap.width:.3f}  2pi sigma {s:+.4f}  C {C:+d}")
