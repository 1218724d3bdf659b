"""Order-n NEASS: generators A_1..A_n, S = sum eps^(j-1) A_j, Pi = e^{i eps S} P e^{-i eps S}.

The recursion is written once over a "calculus" object providing H, P, the
derivation delta(T) = [X_2, T] and the inverse Liouvillian; see calculus.py for
the two torus realizations.
"""
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .calculus import KernelCalculus, TwistCalculus
from .errors import DegenerateFit, MissingGenerator
from .spectral import Projection
from .superop import LiouvillianInverse, comm

EPS0 = 0.35  # must cover the 10^-0.5 end of the standard grid


def compositions(m, k):
    """All j in N^k with j_i >= 1 and |j| = m (so j_i <= m-k+1 automatically)."""
    for j in itertools.product(range(1, m - k + 2), repeat=k):
        if sum(j) == m:
            yield j


def expansion(A, m, inner, kmin=1):
    """sum_{k>=kmin} (-i)^k/k! sum_j [A_j1, [A_j2, ... inner(A_jk)]].

    inner(a) stands for the innermost commutator [a, B].
    """
    memo = {}

    def nested(j):
        if j not in memo:
            if len(j) == 1:
                memo[j] = inner(A[j[0] - 1])
            else:
                memo[j] = comm(A[j[0] - 1], nested(j[1:]))
        return memo[j]

    out = None
    for k in range(kmin, m + 1):
        c = (-1j) ** k / math.factorial(k)
        for j in compositions(m, k):
            if max(j) > len(A):
                raise MissingGenerator(f"B_{m} needs A_{max(j)}, only {len(A)} given")
            t = c * nested(j)
            out = t if out is None else out + t
    return out


def nested_commutator_coefficient(B, A, m):
    """B_m of e^{-i eps S} B e^{i eps S} in powers of eps (the rotated-frame
    operator; the dressed projection itself is the same series with A -> -A)."""
    if m == 0:
        return B
    if any(a is None for a in A[:m]) or len(A) < 1:
        raise MissingGenerator("generator list too short")
    return expansion(A, m, lambda a: comm(a, B))


@dataclass
class NeassGenerators:
    order: int
    A: list
    calc: object = field(repr=False)
    jets: list = field(repr=False)


@dataclass
class NeassState:
    eps: float
    S: np.ndarray = field(repr=False)
    U: np.ndarray = field(repr=False)
    Pi: Projection = field(repr=False)
    residual_norm: float
    dPi: np.ndarray = field(repr=False, default=None)


@dataclass
class PowerLawFit:
    slope: float
    intercept: float
    r_squared: float
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)


def fit_power_law(x, y, floor=1e-13):
    x, y = np.asarray(x, float), np.asarray(y, float)
    if np.any(y < floor):
        raise DegenerateFit(f"values below {floor:.0e}: {y.min():.2e}")
    lx, ly = np.log(x), np.log(y)
    slope, icept = np.polyfit(lx, ly, 1)
    r = ly - (slope * lx + icept)
    ss = np.sum((ly - ly.mean()) ** 2)
    r2 = 1 - np.sum(r**2) / ss if ss > 0 else 1.0
    return PowerLawFit(float(slope), float(icept), float(r2), x, y)


def make_calculus(H0, Pi0, s, d, n, calculus="twist", axis=2):
    lin = LiouvillianInverse(s, Pi0.rank)
    D = d[axis] if hasattr(d, "d1") else d if callable(d) else np.asarray(d)
    if calculus == "twist":
        if callable(D):
            raise ValueError("the twist calculus needs a displacement table")
        return TwistCalculus(H0, lin, D, order=n + 1)
    if calculus == "kernel":
        return KernelCalculus(H0, lin, D)
    raise ValueError(f"unknown calculus {calculus!r}")


def neass_generators(H0, Pi0, s, d, n, calculus="twist"):
    """A_1 = -L^{-1}(X2^OD); A_m = L^{-1}((L_{m-1} - (X2)_{m-1})^OD).

    L_{m-1} are the H0-terms of B_m with k >= 2 (those without A_m); (X2)_{m-1}
    is the expansion with B = X2, whose innermost commutator is [A, X2] = -delta(A).
    """
    if n < 1:
        raise ValueError("order must be >= 1")
    calc = make_calculus(H0, Pi0, s, d, n, calculus)
    H, P = calc.H, calc.P
    x2od = comm(calc.delta(P), P)  # [P,[P,X2]] = [delta P, P]
    A = [-calc.linv(x2od)]
    for m in range(2, n + 1):
        Lm = expansion(A, m, lambda a: comm(a, H), kmin=2)
        Xm = expansion(A, m - 1, lambda a: -calc.delta(a))
        A.append(calc.linv(Lm - Xm))
    vals = [calc.value(a) for a in A]
    return NeassGenerators(n, vals, calc, A)


def defining_equation_defects(gen):
    """|| [(H0)_m - (X2)_{m-1}, P] || for m = 1..n, with (X2)_0 = X2."""
    calc, A = gen.calc, gen.jets
    out = []
    for m in range(1, gen.order + 1):
        Hm = expansion(A[:m], m, lambda a: comm(a, calc.H))
        lhs = comm(Hm, calc.P)
        if m == 1:
            rhs = calc.delta(calc.P)  # [X2, P]
        else:
            rhs = comm(expansion(A[: m - 1], m - 1, lambda a: -calc.delta(a)), calc.P)
        out.append(float(np.linalg.norm(calc.value(lhs - rhs), 2)))
    return out


def neass_state(gen, eps):
    """Dressed projection at field strength eps and the residual
    || [H0 - eps X2, Pi] || = || [H0, Pi] - eps delta(Pi) ||."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    calc = gen.calc
    S = gen.jets[0]
    for j, a in enumerate(gen.jets[1:], start=1):
        S = S + eps**j * a
    Pi, dPi, U = calc.dressed(S, eps)
    H0 = calc.value(calc.H)
    res = np.linalg.norm(comm(H0, Pi) - eps * dPi, 2)
    rank = int(round(np.trace(calc.value(calc.P)).real))
    return NeassState(eps, calc.value(S), U, Projection(Pi, rank), float(res), dPi)


def residual_scaling(gen, eps_list, eps0=EPS0):
    eps_list = np.asarray(eps_list, float)
    if len(eps_list) < 5:
        raise ValueError("need at least 5 eps values")
    if np.any(eps_list <= 0) or np.any(eps_list >= eps0):
        raise ValueError(f"eps values must lie in (0, {eps0})")
    res = [neass_state(gen, e).residual_norm for e in eps_list]
    return fit_power_law(eps_list, res)
