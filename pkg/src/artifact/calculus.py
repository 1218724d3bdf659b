"""Two realizations of the derivation T -> [X_j, T] on the torus.

KernelCalculus: entrywise product with a displacement table D, [X_j, T](x, x') =
D(x, x') T(x, x'). With the minimal-image table this has zero diagonal (so traces
of commutators vanish exactly) but it is not a derivation: D is not additive
across the seam, so d(AB) != d(A)B + A d(B) by terms of size ~ exp(-beta L/2).

TwistCalculus: the boundary-twist derivative. Put H(k) = exp(i k D) o H and carry
every operator as a Taylor jet in k; then d = -i d/dk is an exact derivation
(Leibniz rule holds order by order). Both agree in the bulk.
"""
import math

import numpy as np

from .superop import comm


class Jet:
    """Truncated Taylor series sum_k c[k] kappa^k with matrix coefficients."""

    __array_ufunc__ = None

    def __init__(self, c):
        self.c = list(c)

    def __len__(self):
        return len(self.c)

    def __getitem__(self, k):
        return self.c[k]

    def _bin(self, other, f):
        K = min(len(self), len(other))
        return Jet([f(self.c[k], other.c[k]) for k in range(K)])

    def __add__(self, other):
        return self._bin(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._bin(other, lambda a, b: a - b)

    def __neg__(self):
        return Jet([-a for a in self.c])

    def __rmul__(self, s):
        return Jet([s * a for a in self.c])

    __mul__ = __rmul__

    def __matmul__(self, other):
        K = min(len(self), len(other))
        return Jet([sum(self.c[i] @ other.c[k - i] for i in range(k + 1)) for k in range(K)])

    def truncate(self, K):
        return Jet(self.c[:K])

    def delta(self):
        # -i d/dk lowers the order by one
        return Jet([-1j * (k + 1) * self.c[k + 1] for k in range(len(self) - 1)])


def frechet_exp_herm(M, E):
    """exp(iM) and its directional derivative along iE, M Hermitian.

    Uses divided differences of exp in the eigenbasis of M.
    """
    w, W = np.linalg.eigh((M + M.conj().T) / 2)
    lam = 1j * w
    ex = np.exp(lam)
    dl = lam[:, None] - lam[None, :]
    big = np.abs(dl) > 1e-12
    with np.errstate(all="ignore"):
        dd = np.where(big, (ex[:, None] - ex[None, :]) / np.where(big, dl, 1), ex[:, None])
    U = (W * ex) @ W.conj().T
    if E is None:
        return U, None
    Wh = W.conj().T
    return U, W @ (dd * (Wh @ (1j * E) @ W)) @ Wh


class KernelCalculus:
    """Plain matrices; delta(T) = D o T. Exact derivation if D comes from a
    genuine diagonal position (open geometry), seam-defective on a torus.
    D may also be a callable T -> delta(T)."""

    name = "kernel"

    def __init__(self, H, lin, D):
        self.lin = lin
        self.D = D
        self.H = np.asarray(H)
        self.P = lin.P
        self.one = np.eye(len(self.P))

    def delta(self, T):
        return self.D(T) if callable(self.D) else self.D * T

    def linv(self, A):
        return self.lin(A)

    def value(self, T):
        return T

    def dressed(self, S, eps):
        """Pi = U P U* with U = exp(i eps S); returns (Pi, delta Pi, U)."""
        U, _ = frechet_exp_herm(eps * S, None)
        Pi = U @ self.P @ U.conj().T
        return Pi, self.delta(Pi), U


class TwistCalculus:
    """Taylor jets in the twist k of H(k) = exp(i k D) o H, up to `order`."""

    name = "twist"

    def __init__(self, H, lin, D, order):
        self.lin = lin
        self.D = D
        H = np.asarray(H)
        N = len(H)
        self.H = Jet([(1j * D) ** k / math.factorial(k) * H for k in range(order + 1)])
        P0 = lin.P
        Q0 = np.eye(N) - P0
        od0 = lin.od
        Pj = [P0]
        for k in range(1, order + 1):
            S = sum((Pj[j] @ Pj[k - j] for j in range(1, k)), np.zeros((N, N), complex))
            C = sum(comm(self.H[j], Pj[k - j]) for j in range(1, k + 1))
            Pj.append(-P0 @ S @ P0 + Q0 @ S @ Q0 + lin(1j * od0(C)))
        self.P = Jet(Pj)
        self.Q = Jet([Q0] + [-x for x in Pj[1:]])
        self.one = Jet([np.eye(N)] + [np.zeros((N, N))] * order)

    def delta(self, T):
        return T.delta()

    def linv(self, A):
        """Jet of L_{H(k)}^{-1}(A(k)) restricted to the P(k)-off-diagonal part."""
        lin, od0 = self.lin, self.lin.od
        K = len(A)
        P, Q, H = self.P, self.Q, self.H
        C = P.truncate(K)
        C = C @ (C @ A - A @ C) - (C @ A - A @ C) @ C
        P0, Q0 = P[0], Q[0]
        B = []
        for k in range(K):
            rhs = C[k] + 1j * sum((comm(H[j], B[k - j]) for j in range(1, k + 1)), 0)
            Bk = lin(od0(rhs))
            if k > 0:
                # remove the k-th order diagonal part picked up through P(k)
                PP = sum(P[a] @ B[b] @ P[k - a - b] for b in range(k) for a in range(k - b + 1))
                QQ = sum(Q[a] @ B[b] @ Q[k - a - b] for b in range(k) for a in range(k - b + 1))
                Bk = Bk - P0 @ PP @ P0 - Q0 @ QQ @ Q0
            B.append(Bk)
        return Jet(B)

    def value(self, T):
        return T[0]

    def dressed(self, S, eps):
        U, U1 = frechet_exp_herm(eps * S[0], eps * S[1])
        Ud = U.conj().T
        P0, P1 = self.P[0], self.P[1]
        Pi = U @ P0 @ Ud
        Pi1 = U1 @ P0 @ Ud + U @ P1 @ Ud + U @ P0 @ U1.conj().T
        return Pi, -1j * Pi1, U
