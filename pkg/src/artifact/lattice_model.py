"""Hofstadter-type magnetic lattice Hamiltonians on an L1 x L2 torus.

Sites are indexed as idx = x2*L1 + x1. Landau gauge: the flux phase sits on the
e2-bonds, H(x, x+e2) = -exp(-i(phi*x1 + a_per2)), so the magnetic cell is q x 1.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from .errors import FlagViolation, NonCommensurateTorus

HERM_TOL = 1e-12
MP_TOL = 1e-10


@dataclass(frozen=True)
class FluxConfig:
    p: int
    q: int
    target: float | None = None
    approximants: tuple = ()

    def __post_init__(self):
        if self.q < 1 or gcd(self.p, self.q) != 1 or not (0 <= self.p < self.q or (self.p == 0 and self.q == 1)):
            raise ValueError(f"bad flux {self.p}/{self.q}")
        for pk, qk in self.approximants:
            if gcd(pk, qk) != 1:
                raise ValueError(f"approximant {pk}/{qk} not coprime")

    @property
    def phi(self):
        return 2 * np.pi * self.p / self.q


def convergents(x, k):
    """First k continued-fraction convergents (p, q) of x in [0, 1)."""
    a, y = [], x
    for _ in range(k + 1):
        ai = int(np.floor(y))
        a.append(ai)
        frac = y - ai
        if frac < 1e-14:
            break
        y = 1 / frac
    out = []
    for n in range(1, len(a) + 1):
        f = Fraction(a[n - 1])
        for ai in reversed(a[: n - 1]):
            f = ai + 1 / f
        out.append((f.numerator, f.denominator))
    return [c for c in out if c[0] > 0][:k]


@dataclass(frozen=True)
class PotentialConfig:
    """Onsite energies and extra Peierls phases on the q x 1 magnetic cell.

    Entry s applies to sites with x1 % q == s; a_per[j][s] is the phase on the
    bond x -> x+e_j (the reversed bond gets the negative, by Hermiticity).
    """
    v: tuple = ()
    a_per1: tuple = ()
    a_per2: tuple = ()

    def tables(self, q):
        def tab(t):
            t = np.zeros(q) if len(t) == 0 else np.asarray(t, float)
            if t.shape != (q,):
                raise ValueError(f"potential table needs {q} entries, got {t.shape}")
            return t
        return tab(self.v), tab(self.a_per1), tab(self.a_per2)


@dataclass(frozen=True)
class LatticeGeometry:
    L1: int
    L2: int
    p: int
    q: int
    a: float = 1.0

    @property
    def N(self):
        return self.L1 * self.L2

    @property
    def cell_area(self):
        return self.q * self.a**2

    @property
    def area(self):
        return self.L1 * self.L2 * self.a**2

    def coords(self):
        i = np.arange(self.N)
        return i % self.L1, i // self.L1

    def index(self, x1, x2):
        return (np.asarray(x2) % self.L2) * self.L1 + (np.asarray(x1) % self.L1)


@dataclass
class OperatorMatrix:
    mat: np.ndarray
    geometry: LatticeGeometry | None = None
    hermitian: bool = False
    magnetic_periodic: bool = False

    def __array__(self, dtype=None, copy=None):
        return self.mat if dtype is None else self.mat.astype(dtype)

    @property
    def site_coords(self):
        return np.stack(self.geometry.coords(), axis=1)


@dataclass(frozen=True)
class DisplacementTable:
    """d_j(x, x') = minimal-image x_j - x'_j, plus the site coordinates."""
    d1: np.ndarray = field(repr=False)
    d2: np.ndarray = field(repr=False)
    x1: np.ndarray = field(repr=False)
    x2: np.ndarray = field(repr=False)

    def __getitem__(self, j):
        return (self.d1, self.d2)[j - 1]


def build_geometry(L1, L2, flux, a=1.0):
    if L1 < 2 or L2 < 2:
        raise NonCommensurateTorus(f"torus too small: {L1}x{L2}")
    if L1 % flux.q:
        raise NonCommensurateTorus(f"L1={L1} is not a multiple of q={flux.q}")
    if (flux.p * L1 * L2) % flux.q:
        raise NonCommensurateTorus("total flux through the torus is not an integer")
    return LatticeGeometry(L1, L2, flux.p, flux.q, a)


def minimal_image(dx, L):
    d = (dx + L / 2) % L - L / 2
    if L % 2 == 0:
        # exactly half-way round: no preferred sign, take 0 to keep d antisymmetric
        d = np.where(np.abs(np.abs(dx) % L - L / 2) < 1e-12, 0.0, d)
    return d


def displacement_table(g):
    x1, x2 = g.coords()
    d1 = g.a * minimal_image(x1[:, None] - x1[None, :], g.L1)
    d2 = g.a * minimal_image(x2[:, None] - x2[None, :], g.L2)
    return DisplacementTable(d1, d2, x1, x2)


def mp_hopping(g, flux, onsite, t1, t2):
    """Magnetic-periodic nearest-neighbour operator with cell-periodic tables.

    onsite[s] sits on x1 % q == s; t1[s], t2[s] are the amplitudes of the bonds
    x -> x+e1, x -> x+e2 (the flux phase is added to t2). Hermitian by construction.
    """
    x1, x2 = g.coords()
    s = x1 % g.q
    i = np.arange(g.N)
    j1 = g.index(x1 + 1, x2)
    j2 = g.index(x1, x2 + 1)
    M = np.zeros((g.N, g.N), complex)
    M[i, i] += np.asarray(onsite)[s]
    a1 = np.asarray(t1)[s]
    a2 = np.asarray(t2)[s] * np.exp(-1j * flux.phi * x1)
    np.add.at(M, (i, j1), a1)
    np.add.at(M, (j1, i), a1.conj())
    np.add.at(M, (i, j2), a2)
    np.add.at(M, (j2, i), a2.conj())
    return M


def build_hamiltonian(g, flux, pot=PotentialConfig(), check=True):
    if (g.p, g.q) != (flux.p, flux.q):
        raise ValueError("geometry and flux disagree")
    v, a1, a2 = pot.tables(g.q)
    H = mp_hopping(g, flux, v, -np.exp(-1j * a1), -np.exp(-1j * a2))
    op = OperatorMatrix(H, g)
    if check:
        herm = np.abs(H - H.conj().T).max()
        if herm > HERM_TOL:
            raise FlagViolation(f"Hamiltonian not Hermitian ({herm:.2e})")
        mp = mp_defect(H, g, flux)
        if mp > MP_TOL:
            raise FlagViolation(f"Hamiltonian not magnetic-periodic ({mp:.2e})")
        op.hermitian = op.magnetic_periodic = True
    return op


def magnetic_translation(g, flux, gamma):
    """T_gamma psi(x) = exp(i phi g1 x2) psi(x - gamma).

    The phase closes around the torus only if phi*g1*L2 is a multiple of 2 pi,
    which holds for the generators q*e1 and e2.
    """
    g1, g2 = gamma
    if (flux.p * g1 * g.L2) % flux.q:
        raise ValueError(f"translation {gamma} is not compatible with the torus")
    x1, x2 = g.coords()
    src = g.index(x1 - g1, x2 - g2)
    T = np.zeros((g.N, g.N), complex)
    T[np.arange(g.N), src] = np.exp(1j * flux.phi * g1 * x2)
    return T


def mp_defect(T, g, flux):
    """Largest operator-norm commutator with the two generator translations."""
    T = np.asarray(T)
    out = 0.0
    for gamma in ((g.q, 0), (0, 1)):
        M = magnetic_translation(g, flux, gamma)
        out = max(out, np.linalg.norm(M @ T - T @ M, 2))
    return out


def position_branch(d):
    """x2 measured from the torus centre row, as a diagonal vector."""
    L2 = int(d.x2.max()) + 1
    return (d.x2 - L2 // 2).astype(float)


def perturbed_hamiltonian(H0, eps, d):
    """H0 - eps*X2 with X2 the centred branch coordinate. Not magnetic-periodic."""
    H = np.array(H0, dtype=complex)
    H[np.diag_indices_from(H)] -= eps * position_branch(d)
    return H


def random_mp_operator(g, flux, rng, hermitian=True, scale=1.0):
    """Random localized magnetic-periodic operator: a nearest-neighbour part plus
    the product of two more (range 2)."""
    def nn():
        c = lambda: rng.normal(size=g.q) + 1j * rng.normal(size=g.q)
        return mp_hopping(g, flux, rng.normal(size=g.q), c(), c())
    A = nn() + 0.3 * nn() @ nn()
    if hermitian:
        A = (A + A.conj().T) / 2
    return scale * A


def export_csv(T, path):
    """Write the nonzero entries as row,col,re,im."""
    T = np.asarray(T)
    r, c = np.nonzero(np.abs(T) > 0)
    with open(path, "w") as f:
        f.write("row,col,re,im\n")
        for i, j in zip(r, c):
            f.write(f"{i},{j},{float(T[i, j].real)!r},{float(T[i, j].imag)!r}\n")
