"""Residual exponents of the two torus calculi on the 12x12, phi = 2pi/3 model."""
from artifact.neass import residual_scaling
from artifact.pipeline import hofstadter, standard_eps_grid

m = hofstadter(12)
eps = standard_eps_grid()
print("n  target  twist   kernel")
for n in (1, 2, 3):
    tw = residual_scaling(m.generators(n, "twist"), eps).slope
    ke = residual_scaling(m.generators(n, "kernel"), eps).slope
    print(f"{n}  {n + 1:6d}  {tw:6.3f}  {ke:6.3f}")
