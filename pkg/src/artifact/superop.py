"""Diagonal/off-diagonal split, the Liouvillian L_H(B) = -i[H, B] and its inverse
on off-diagonal operators (eigenbasis sum and contour formula)."""
from dataclasses import dataclass

import numpy as np

from .errors import GapTooSmall
from .spectral import resolvent_quadrature


def comm(A, B):
    return A @ B - B @ A


@dataclass
class OdSplit:
    diagonal: np.ndarray
    offdiagonal: np.ndarray


def od_split(A, P):
    A, P = np.asarray(A), np.asarray(P)
    Q = np.eye(len(P)) - P
    D = P @ A @ P + Q @ A @ Q
    return OdSplit(D, A - D)


def offdiag(A, P):
    A, P = np.asarray(A), np.asarray(P)
    PA, AP = P @ A, A @ P
    return PA + AP - 2 * PA @ P


def liouvillian(H, B):
    return -1j * comm(np.asarray(H), np.asarray(B))


class LiouvillianInverse:
    """Cached eigenbasis data for repeated inversions with fixed (H, P).

    P must be the spectral projection onto the lowest `rank` eigenvectors of s.
    """

    def __init__(self, s, rank, min_den=1e-8):
        self.V, self.Vh = s.V, s.V.conj().T
        below = np.arange(len(s.E)) < rank
        self.mask = below[:, None] ^ below[None, :]
        den = s.E[:, None] - s.E[None, :]
        if self.mask.any() and np.abs(den[self.mask]).min() < min_den:
            raise GapTooSmall(f"cross-gap denominator {np.abs(den[self.mask]).min():.2e}")
        den[~self.mask] = 1.0
        self.fac = np.where(self.mask, 1j / den, 0)
        self.P = self.V[:, :rank] @ self.V[:, :rank].conj().T

    def __call__(self, A):
        return self.V @ (self.fac * (self.Vh @ A @ self.V)) @ self.Vh

    def od(self, A):
        return offdiag(A, self.P)


def inv_liouvillian_spectral(s, P, A):
    return LiouvillianInverse(s, P.rank)(np.asarray(A))


def inv_liouvillian_contour(H, P, A, c):
    """(1/2 pi) \\oint R(z) [P, A] R(z) dz over the positively oriented contour."""
    PA = comm(np.asarray(P), np.asarray(A))
    return resolvent_quadrature(H, c, lambda R: R @ PA @ R) / (2 * np.pi)
