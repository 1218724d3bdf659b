"""Exponential-decay diagnostics for operator kernels on the torus."""
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientData, ZTooCloseToSpectrum

FLOOR = 1e-14
SEAM = 0.4


@dataclass
class DecayProfile:
    d: np.ndarray
    value: np.ndarray
    d_limit: float  # seam exclusion, SEAM * min(L1, L2) * a


@dataclass
class LocalizationFit:
    C: float
    beta: float
    r_squared: float
    fit_range: tuple
    profile: DecayProfile = field(repr=False, default=None)


def distance_table(dt):
    return np.hypot(dt.d1, dt.d2)


def kernel_decay_profile(T, g, dt):
    """Max |T(x,x')| over pairs binned by rounded minimal-image distance."""
    T = np.abs(np.asarray(T))
    r = distance_table(dt)
    b = np.rint(r).astype(int)
    nb = b.max() + 1
    val = np.zeros(nb)
    np.maximum.at(val, b.ravel(), T.ravel())
    return DecayProfile(np.arange(nb, dtype=float), val, SEAM * min(g.L1, g.L2) * g.a)


def fit_localization(p, d_min=0.0, power=0):
    """Least squares of log(value) = log C + power*log(d) - beta d over the usable bins.

    power > 0 models a polynomial prefactor, e.g. power=1 for [X_j, T].
    """
    use = (p.value > FLOOR) & (p.d <= p.d_limit) & (p.d >= max(d_min, 1.0 if power else 0.0))
    if use.sum() < 4:
        raise InsufficientData(f"{use.sum()} usable bins, need 4")
    x, y = p.d[use], np.log(p.value[use]) - power * np.log(np.maximum(p.d[use], 1e-300))
    slope, icept = np.polyfit(x, y, 1)
    res = y - (slope * x + icept)
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1 - np.sum(res**2) / ss if ss > 0 else 1.0
    return LocalizationFit(float(np.exp(icept)), float(-slope), float(r2), (float(x.min()), float(x.max())), p)


def fit_kernel(T, g, dt, d_min=0.0, power=0):
    return fit_localization(kernel_decay_profile(T, g, dt), d_min, power)


def combes_thomas_scan(H, g, dt, z_list, E=None, d_min=1.0):
    """One decay fit per z for the resolvent kernel (H - z)^-1."""
    H = np.asarray(H)
    if E is None:
        E = np.linalg.eigvalsh(H)
    Id = np.eye(len(H))
    out = []
    for z in z_list:
        dist = np.abs(E - z).min()
        if dist < 1e-3:
            raise ZTooCloseToSpectrum(f"z={z} at distance {dist:.2e} from the spectrum")
        R = np.linalg.solve(H - z * Id, Id)
        out.append(fit_kernel(R, g, dt, d_min))
    return out


def kendall_tau(x, y):
    n = len(x)
    s = 0
    for i in range(n):
        for j in range(i + 1, n):
            s += np.sign(x[j] - x[i]) * np.sign(y[j] - y[i])
    return s / (n * (n - 1) / 2)


def decay_propagation_check(T1, T2, g, dt, j=1, slack=0.8, d_min=1.0):
    """Fit T1, T2, T1 T2 and [X_j, T1]; the product should keep at least
    `slack` of the smaller rate and the commutator should stay localized."""
    f1, f2 = fit_kernel(T1, g, dt, d_min), fit_kernel(T2, g, dt, d_min)
    fp = fit_kernel(np.asarray(T1) @ np.asarray(T2), g, dt, d_min)
    fc = fit_kernel(dt[j] * np.asarray(T1), g, dt, d_min)
    fcp = fit_kernel(dt[j] * np.asarray(T1), g, dt, d_min, power=1)
    return {
        "beta_1": f1.beta, "beta_2": f2.beta, "beta_product": fp.beta, "beta_commutator": fc.beta,
        "beta_commutator_poly": fcp.beta,
        "product_ok": fp.beta >= slack * min(f1.beta, f2.beta),
        "commutator_ok": fc.beta > 0,
    }
