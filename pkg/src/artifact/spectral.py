"""Eigendecomposition, gaps, and Fermi projections (spectral sum and Riesz contour)."""
from dataclasses import dataclass

import numpy as np

from .errors import EnclosureFailure, FermiOnSpectrum, NoGap, QuadratureDivergence, SolverFailure

GAP_MIN = 1e-6


@dataclass
class Spectrum:
    E: np.ndarray
    V: np.ndarray

    @property
    def eigenvalues(self):
        return self.E

    @property
    def eigenvectors(self):
        return self.V


@dataclass
class GapInfo:
    lower_edge: float
    upper_edge: float
    mu: float
    rank: int

    @property
    def width(self):
        return self.upper_edge - self.lower_edge


@dataclass
class Contour:
    center: complex
    radius: float
    nodes: np.ndarray
    weights: np.ndarray


@dataclass
class Projection:
    matrix: np.ndarray
    rank: int

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def eigendecompose(H, tol=1e-10):
    H = np.asarray(H)
    E, V = np.linalg.eigh(H)
    res = np.linalg.norm(H @ V - V * E, axis=0).max() if len(E) else 0.0
    if res > tol * max(1.0, np.abs(E).max()):
        raise SolverFailure(f"eigen-residual {res:.2e}")
    return Spectrum(E, V)


def find_gap(s, hint, gap_min=GAP_MIN):
    E = s.E
    if len(E) and np.abs(E - hint).min() < gap_min:
        raise NoGap(f"hint {hint} sits on the spectrum")
    k = np.searchsorted(E, hint)  # E[k-1] < hint <= E[k]
    lo = E[k - 1] if k > 0 else -np.inf
    hi = E[k] if k < len(E) else np.inf
    if hi - lo < gap_min:
        raise NoGap(f"no gap of width >= {gap_min} around {hint} (found {hi - lo:.3e})")
    if np.isinf(lo) or np.isinf(hi):
        mu = hint
    else:
        mu = (lo + hi) / 2
    return GapInfo(float(lo), float(hi), float(mu), int(k))


def gap_by_filling(s, rank, gap_min=GAP_MIN):
    """Gap just above the lowest `rank` eigenvalues."""
    return find_gap(s, (s.E[rank - 1] + s.E[rank]) / 2, gap_min)


def fermi_projection_spectral(s, mu):
    if len(s.E) and np.abs(s.E - mu).min() < 1e-8:
        raise FermiOnSpectrum(f"mu={mu} sits on the spectrum")
    r = int(np.sum(s.E < mu))
    W = s.V[:, :r]
    return Projection(W @ W.conj().T, r)


def build_contour(gap, s, n_nodes=64):
    """Circle through mu and E_min - margin, margin = g/2, trapezoid nodes."""
    if n_nodes < 8:
        raise ValueError("need at least 8 contour nodes")
    E = s.E
    g = gap.width if np.isfinite(gap.width) else 1.0
    margin = g / 2
    emin = E.min() if len(E) else gap.mu - 1.0
    left = min(emin, gap.mu) - margin
    center = (left + gap.mu) / 2
    radius = (gap.mu - left) / 2
    inside = np.abs(E - center) < radius
    if not np.array_equal(inside, E < gap.mu):
        raise EnclosureFailure("circle does not separate the spectrum below mu from the rest")
    t = 2 * np.pi * (np.arange(n_nodes) + 0.5) / n_nodes
    z = center + radius * np.exp(1j * t)
    w = 1j * radius * np.exp(1j * t) * (2 * np.pi / n_nodes)  # dz
    if len(E) and np.abs(z[:, None] - E[None, :]).min() < g / 4 - 1e-12:
        raise EnclosureFailure("contour passes too close to the spectrum")
    return Contour(complex(center), float(radius), z, w)


def resolvent_quadrature(H, c, f):
    """sum_k w_k f(R(z_k)) with R = (H - z)^-1 from a dense solve per node."""
    H = np.asarray(H)
    Id = np.eye(H.shape[0])
    out = 0
    for z, w in zip(c.nodes, c.weights):
        R = np.linalg.solve(H - z * Id, Id)
        out = out + w * f(R)
    return out


def fermi_projection_riesz(H, c, tol=1e-6):
    # P = -(1/2 pi i) \oint (H - z)^-1 dz = (i/2 pi) \oint (H - z)^-1 dz
    P = 1j / (2 * np.pi) * resolvent_quadrature(H, c, lambda R: R)
    P = (P + P.conj().T) / 2
    defect = np.abs(P @ P - P).max() if P.size else 0.0
    if defect > tol:
        raise QuadratureDivergence(f"idempotency defect {defect:.2e}; use more nodes")
    return Projection(P, int(round(np.trace(P).real)))


def projection_defects(P):
    P = np.asarray(P)
    return np.abs(P @ P - P).max(), np.abs(P - P.conj().T).max()
