"""Trace per unit area, currents, Hall conductivity, Hall current in the NEASS,
trace identities, and the momentum-space Chern oracle.

Units: e = hbar = 1, so the conductance quantum is 1/(2 pi).
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import GaplessAtFilling
from .neass import fit_power_law, neass_state
from .superop import LiouvillianInverse, comm


@dataclass
class ResponseReport:
    sigma_hall: float
    chern_oracle: int | None
    j_hall: dict = field(default_factory=dict)
    kubo_defect_slope: float | None = None
    ids: float | None = None
    sigma_hall_twist: float | None = None

    def to_dict(self):
        return {
            "sigma_hall": self.sigma_hall,
            "sigma_hall_2pi": 2 * np.pi * self.sigma_hall,
            "sigma_hall_twist": self.sigma_hall_twist,
            "chern_oracle": self.chern_oracle,
            "j_hall": {repr(float(k)): v for k, v in self.j_hall.items()},
            "kubo_defect_slope": self.kubo_defect_slope,
            "ids": self.ids,
        }


def trace_per_unit_area(T, g):
    return np.trace(np.asarray(T)) / g.area


def cell_trace_per_unit_area(T, g):
    """Average over one q x 1 magnetic cell; equals the global one for MP T."""
    T = np.asarray(T)
    i = g.index(np.arange(g.q), 0)
    return T[i, i].sum() / g.cell_area


def position_commutator(T, d, j):
    """[T, X_j] as the kernel (x'_j - x_j) T(x, x')."""
    return -d[j] * np.asarray(T)


def current_operator(H, d, i):
    """J_i = i[H, X_i]."""
    return 1j * position_commutator(H, d, i)


def _pdp(P, d):
    P = np.asarray(P)
    return P, d.d1 * P, d.d2 * P  # [X_j, P] = -[P, X_j]


def hall_conductivity_marker(P, d, g):
    """i T(P [[P,X1],[P,X2]] P) with minimal-image kernels; the two sign flips
    [P, X_j] = -[X_j, P] cancel."""
    P, a1, a2 = _pdp(P, d)
    return float((1j * trace_per_unit_area(P @ comm(a1, a2) @ P, g)).real)


def twist_derivatives(H, s, rank, d):
    """delta_j P = L^{-1}(i [delta_j H, P]) for j = 1, 2 in the twist calculus."""
    lin = LiouvillianInverse(s, rank)
    P = lin.P
    H = np.asarray(H)
    return P, [lin(1j * comm(D * H, P)) for D in (d.d1, d.d2)]


def hall_conductivity_twist(H, s, rank, d, g):
    """Same double commutator, with delta_j P taken as the exact twist derivative.
    This is the sigma that matches the current of the twist-calculus NEASS."""
    P, (b1, b2) = twist_derivatives(H, s, rank, d)
    return float((1j * trace_per_unit_area(P @ comm(b1, b2) @ P, g)).real)


def bloch_hamiltonian(flux, k1q, k2, pot=None, cell=None):
    """Bloch matrix of the Landau-gauge model on a cell of width `cell` (a
    multiple of q, default q), periodic in (k1 * cell, k2)."""
    q, phi = cell or flux.q, flux.phi
    if q % flux.q:
        raise ValueError("cell must be a multiple of q")
    if pot is None:
        v, a1, a2 = np.zeros(q), np.zeros(q), np.zeros(q)
    else:
        v, a1, a2 = pot.tables(q)
    s = np.arange(q)
    Hk = np.zeros((q, q), complex)
    t2 = -np.exp(-1j * (phi * s + a2))
    Hk[s, s] += v + 2 * (t2 * np.exp(1j * k2)).real
    t1 = -np.exp(-1j * a1)
    for r in range(q):
        amp = t1[r] * (np.exp(1j * k1q) if r == q - 1 else 1.0)
        Hk[r, (r + 1) % q] += amp
        Hk[(r + 1) % q, r] += np.conj(amp)
    return Hk


def _fhs(flux, nb, n, pot, cell):
    ks = 2 * np.pi * np.arange(n) / n
    m = cell or flux.q
    U = np.empty((n, n, m, nb), complex)
    gap = np.inf
    for a, k1 in enumerate(ks):
        for b, k2 in enumerate(ks):
            E, V = np.linalg.eigh(bloch_hamiltonian(flux, k1, k2, pot, cell))
            if nb < m:
                gap = min(gap, E[nb] - E[nb - 1])
            U[a, b] = V[:, :nb]

    def link(X, Y):
        return np.linalg.det(np.einsum("...ia,...ib->...ab", X.conj(), Y))

    U1 = link(U, np.roll(U, -1, axis=0))
    U2 = link(U, np.roll(U, -1, axis=1))
    F = np.angle(U1 * np.roll(U2, -1, axis=0) / (np.roll(U1, -1, axis=1) * U2))
    return F.sum() / (2 * np.pi), gap


def chern_number_momentum(flux, filled_bands, pot=None, cell=None, mesh=12, max_mesh=96, gap_tol=1e-3):
    """Lattice field-strength Chern number of the lowest `filled_bands` bands,
    mesh doubled until two successive values agree."""
    m = cell or flux.q
    if not 0 <= filled_bands <= m:
        raise ValueError("filled_bands out of range")
    if filled_bands in (0, m):
        return 0
    prev = None
    n = mesh
    while n <= max_mesh:
        c, gap = _fhs(flux, filled_bands, n, pot, cell)
        if gap < gap_tol:
            raise GaplessAtFilling(f"direct gap {gap:.2e} above band {filled_bands}")
        c = int(round(c))
        if c == prev:
            return c
        prev, n = c, 2 * n
    raise GaplessAtFilling("Chern number did not stabilize under mesh refinement")


def hall_current_density(H0, d, state, g):
    """T(J_1 Pi)."""
    return float(trace_per_unit_area(current_operator(H0, d, 1) @ np.asarray(state.Pi), g).real)


def kubo_defect_scaling(H0, gen, d, g, eps_list, sigma):
    js = np.array([hall_current_density(H0, d, neass_state(gen, e), g) for e in eps_list])
    fit = fit_power_law(eps_list, np.abs(js - np.asarray(eps_list) * sigma))
    fit.j = js
    return fit


def chern_simons_check(P, U, d, g):
    """Both sides of T([P_U X1 P_U, P_U X2 P_U]) = T([P X1 P, P X2 P]), P_U = U P U*.

    Each side is evaluated through T([PX1P, PX2P]) = T(P[[P,X1],[P,X2]]P) with
    minimal-image kernels (see commutator_identity_sides).
    """
    U = np.asarray(U)
    PU = U @ np.asarray(P) @ U.conj().T

    def side(Q):
        Q, a1, a2 = _pdp(Q, d)
        return complex(trace_per_unit_area(Q @ comm(a1, a2) @ Q, g))

    return side(PU), side(P)


def commutator_identity_sides(P, d, g):
    """T([PX1P, PX2P]) from the off-diagonal expansion, and T(P[[P,X1],[P,X2]]P).

    With X_j = PX_jP + QX_jQ + X_j^OD and [X1, X2] = 0,
    [PX1P, PX2P] = -P(X1^OD X2^OD - X2^OD X1^OD)P, X_j^OD = [delta_j P, P].
    """
    P, a1, a2 = _pdp(P, d)
    o1, o2 = comm(a1, P), comm(a2, P)
    lhs = -trace_per_unit_area(P @ (o1 @ o2 - o2 @ o1) @ P, g)
    rhs = trace_per_unit_area(P @ comm(a1, a2) @ P, g)
    return complex(lhs), complex(rhs)


def cyclicity_defect(T1, T2, g):
    T1, T2 = np.asarray(T1), np.asarray(T2)
    return float(abs(trace_per_unit_area(T1 @ T2, g) - trace_per_unit_area(T2 @ T1, g)))


def vanishing_trace_check(P, A, d, j, g):
    """|T([PAP, PX_jP])| via [PAP, PX_jP] = [PAP, X_j] - [PAP, X_j^OD]."""
    P = np.asarray(P)
    T = P @ np.asarray(A) @ P
    xod = comm(d[j] * P, P)
    val = trace_per_unit_area(position_commutator(T, d, j), g) - trace_per_unit_area(comm(T, xod), g)
    return float(abs(val))
