"""Model assembly shared by the CLI, the scripts and the acceptance suite."""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import lattice_model as lm
from . import spectral as sp
from .neass import neass_generators


@dataclass
class Model:
    g: lm.LatticeGeometry
    flux: lm.FluxConfig
    pot: lm.PotentialConfig
    filled_bands: int | None = 1
    gap_hint: float | None = None
    _gens: dict = field(default_factory=dict, repr=False)

    @cached_property
    def H(self):
        return lm.build_hamiltonian(self.g, self.flux, self.pot).mat

    @cached_property
    def d(self):
        return lm.displacement_table(self.g)

    @cached_property
    def spectrum(self):
        return sp.eigendecompose(self.H)

    @cached_property
    def gap(self):
        if self.gap_hint is not None:
            return sp.find_gap(self.spectrum, self.gap_hint)
        return sp.gap_by_filling(self.spectrum, self.filled_bands * self.g.N // self.flux.q)

    @cached_property
    def P(self):
        return sp.fermi_projection_spectral(self.spectrum, self.gap.mu)

    def generators(self, n, calculus="twist"):
        key = (n, calculus)
        if key not in self._gens:
            self._gens[key] = neass_generators(self.H, self.P, self.spectrum, self.d, n, calculus)
        return self._gens[key]


def hofstadter(L1=12, L2=None, p=1, q=3, filled_bands=1, pot=None):
    flux = lm.FluxConfig(p, q)
    g = lm.build_geometry(L1, L2 or L1, flux)
    return Model(g, flux, pot or lm.PotentialConfig(), filled_bands)


def from_config(cfg):
    return Model(cfg.geometry(), cfg.flux, cfg.potential, cfg.filled_bands, cfg.gap_hint)


def golden_label_rank(p, q):
    """IDS numerator r (r/q states per site) of the gap that continues the
    golden-mean gap with Chern label -1 along the convergents: r = -p mod q."""
    return (-p) % q


def standard_eps_grid():
    return np.logspace(-1.5, -0.5, 7)
