"""The twelve acceptance criteria, each evaluated from module operations only.

Every function returns a Criterion with the raw metrics; `line()` gives the
one-line pass/fail summary printed by the test suite and the CLI.
"""
import time
from dataclasses import dataclass, field

import numpy as np

from . import config as cfgmod
from . import lattice_model as lm
from . import localization as loc
from . import response as rs
from . import spectral as sp
from .errors import GaplessAtFilling, NoGap
from .neass import neass_state, residual_scaling
from .pipeline import from_config, golden_label_rank, hofstadter, standard_eps_grid
from .superop import LiouvillianInverse, comm, inv_liouvillian_contour, liouvillian, offdiag


@dataclass
class Criterion:
    number: int
    title: str
    passed: bool
    summary: str
    metrics: dict = field(default_factory=dict)

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.number:2d} ({self.title}): {self.summary}"


class Models:
    """Lazily built models shared between criteria."""

    def __init__(self):
        self._m = {}

    def get(self, L=12, p=1, q=3, filled_bands=1):
        key = (L, p, q, filled_bands)
        if key not in self._m:
            self._m[key] = hofstadter(L, L, p, q, filled_bands)
        return self._m[key]

    def bundled(self):
        if "bundled" not in self._m:
            self._m["bundled"] = {k: from_config(cfgmod.load(k)) for k in cfgmod.BUNDLED}
        return self._m["bundled"]


def _fmt(x):
    return f"{x:.3g}"


def c1_residual_exponent(M, tol_scale=1.0, orders=(1, 2, 3)):
    m = M.get()
    eps = standard_eps_grid()
    out, ok = {}, True
    for n in orders:
        t = time.time()
        fit = residual_scaling(m.generators(n), eps)
        dt = time.time() - t
        good = abs(fit.slope - (n + 1)) <= 0.25
        ok &= good
        out[n] = {"slope": fit.slope, "r2": fit.r_squared, "seconds": dt}
    s = ", ".join(f"n={n}: slope {_fmt(v['slope'])} (target {n + 1}, {v['seconds']:.1f}s)" for n, v in out.items())
    return Criterion(1, "NEASS residual exponent", ok, s, out)


def c2_kubo(M, tol_scale=1.0, orders=(1, 2)):
    m = M.get()
    eps = standard_eps_grid()
    sig_tw = rs.hall_conductivity_twist(m.H, m.spectrum, m.P.rank, m.d, m.g)
    sig_k = rs.hall_conductivity_marker(m.P, m.d, m.g)
    out, ok = {"sigma_twist_2pi": 2 * np.pi * sig_tw, "sigma_kernel_2pi": 2 * np.pi * sig_k}, True
    for n in orders:
        fit = rs.kubo_defect_scaling(m.H, m.generators(n), m.d, m.g, eps, sig_tw)
        good = fit.slope >= n + 0.75
        ok &= good
        out[n] = {"slope": fit.slope, "r2": fit.r_squared}
    s = ", ".join(f"n={n}: slope {_fmt(out[n]['slope'])} (>= {n + 0.75})" for n in orders)
    s += f"; 2pi*sigma twist {out['sigma_twist_2pi']:.4f}, kernel marker {out['sigma_kernel_2pi']:.4f}"
    return Criterion(2, "Kubo beyond linear response", ok, s, out)


def c3_quantization(M, tol_scale=1.0):
    out, ok = {}, True
    for nb in (1, 2):
        C = rs.chern_number_momentum(lm.FluxConfig(1, 3), nb)
        defects = {}
        for L in (12, 24):
            m = M.get(L, filled_bands=nb)
            defects[L] = abs(2 * np.pi * rs.hall_conductivity_marker(m.P, m.d, m.g) - C)
        good = defects[12] <= 0.05 * tol_scale and defects[24] <= defects[12]
        ok &= good
        out[nb] = {"chern": C, "defect_12": defects[12], "defect_24": defects[24]}
    s = "; ".join(f"gap {nb}: C={v['chern']}, |2pi sigma - C| = {_fmt(v['defect_12'])} (L=12), "
                  f"{_fmt(v['defect_24'])} (L=24)" for nb, v in out.items())
    return Criterion(3, "Hall conductivity quantization", ok, s, out)


def c4_equilibrium_current(M, tol_scale=1.0):
    out = {}
    for name, m in M.bundled().items():
        J1 = rs.current_operator(m.H, m.d, 1)
        out[name] = abs(rs.trace_per_unit_area(J1 @ m.P.matrix, m.g))
    worst = max(out.values())
    return Criterion(4, "equilibrium current vanishes", worst <= 1e-8 * tol_scale,
                     f"max |T(J1 P)| over {len(out)} bundled models = {_fmt(worst)} (<= 1e-8)", out)


def c5_inverse_liouvillian(M, tol_scale=1.0, n_random=20, seed=0):
    rng = np.random.default_rng(seed)
    out = {}
    rt_worst = cont_worst = 0.0
    for name, m in M.bundled().items():
        lin = LiouvillianInverse(m.spectrum, m.P.rank)
        P = m.P.matrix
        rt = 0.0
        for _ in range(n_random):
            A = lm.random_mp_operator(m.g, m.flux, rng)
            B = lin(A)
            rt = max(rt, np.linalg.norm(liouvillian(m.H, B) - offdiag(A, P), 2))
        c = sp.build_contour(m.gap, m.spectrum, 128)
        A = comm(m.d.d2 * P, P)
        Bs = lin(A)
        Bc = inv_liouvillian_contour(m.H, m.P, A, c)
        rel = np.linalg.norm(Bc - Bs, 2) / np.linalg.norm(Bs, 2)
        out[name] = {"round_trip": rt, "contour_rel": rel}
        rt_worst, cont_worst = max(rt_worst, rt), max(cont_worst, rel)
    ok = rt_worst <= 1e-10 * tol_scale and cont_worst <= 1e-8 * tol_scale
    return Criterion(5, "inverse Liouvillian", ok,
                     f"round trip max {_fmt(rt_worst)} (<= 1e-10, {n_random} random A per model); "
                     f"contour vs spectral {_fmt(cont_worst)} (<= 1e-8)", out)


def c6_riesz(M, tol_scale=1.0):
    out = {}
    worst = [0.0, 0.0, 0.0]
    for name, m in M.bundled().items():
        c = sp.build_contour(m.gap, m.spectrum, 128)
        Pr = sp.fermi_projection_riesz(m.H, c)
        diff = np.linalg.norm(Pr.matrix - m.P.matrix, 2)
        idem, herm = sp.projection_defects(Pr.matrix)
        out[name] = {"diff": diff, "idempotency": idem, "hermiticity": herm}
        worst = [max(a, b) for a, b in zip(worst, (diff, idem, herm))]
    ok = max(worst) <= 1e-10 * tol_scale
    return Criterion(6, "Riesz vs spectral projection", ok,
                     f"||P_riesz - P_spec|| {_fmt(worst[0])}, idempotency {_fmt(worst[1])}, "
                     f"hermiticity {_fmt(worst[2])} (all <= 1e-10, 128 nodes)", out)


def c7_ids(M, tol_scale=1.0):
    m = M.get()
    ids0 = rs.trace_per_unit_area(m.P.matrix, m.g).real
    worst, out = 0.0, {}
    for n in (1, 2, 3):
        for e in (0.01, 0.05, 0.1):
            st = neass_state(m.generators(n), e)
            dv = abs(rs.trace_per_unit_area(st.Pi.matrix, m.g).real - ids0)
            out[f"n={n},eps={e}"] = dv
            worst = max(worst, dv)
    return Criterion(7, "IDS invariance", worst <= 1e-12 * tol_scale,
                     f"max |T(Pi) - T(P)| = {_fmt(worst)} (<= 1e-12), T(P) = {ids0:.6f}", out)


def c8_chern_simons(M, tol_scale=1.0, seed=0, sizes=(12, 24, 48)):
    """The NEASS-unitary side is limited by seam terms ~ exp(-0.3 L) from the
    minimal-image kernels, so the verdict is taken on the largest torus. The
    unitary is built with the kernel-level derivation, which needs no jets and
    keeps L=48 within memory; the L=48 model is not cached."""
    rng = np.random.default_rng(seed)
    out = {}
    m = M.get()
    l, r = rs.chern_simons_check(m.P, np.eye(m.g.N), m.d, m.g)
    out["identity"] = abs(l - r)
    th = rng.uniform(0, 2 * np.pi, m.g.N)
    l, r = rs.chern_simons_check(m.P, np.diag(np.exp(1j * th)), m.d, m.g)
    out["local_phase"] = abs(l - r)
    for L in sizes:
        mL = M.get(L) if L <= 24 else hofstadter(L, L, 1, 3)
        U = neass_state(mL.generators(2, "kernel"), 0.05).U
        l, r = rs.chern_simons_check(mL.P, U, mL.d, mL.g)
        out[f"neass_L{L}"] = abs(l - r)
        del mL, U
    tol = 1e-8 * tol_scale
    seq = [out[f"neass_L{L}"] for L in sizes]
    decreasing = all(b < a for a, b in zip(seq, seq[1:]))
    ok = out["identity"] <= tol and out["local_phase"] <= tol and seq[-1] <= tol and decreasing
    s = (f"identity {_fmt(out['identity'])}, local phase {_fmt(out['local_phase'])}, NEASS U (eps=0.05, n=2) "
         + ", ".join(f"{_fmt(out[f'neass_L{L}'])} (L={L})" for L in sizes) + " (<= 1e-8 at the largest L)")
    return Criterion(8, "Chern-Simons invariance", ok, s, out)


def c9_trace_lemmas(M, tol_scale=1.0, seed=0, n_pairs=10):
    rng = np.random.default_rng(seed)
    m = M.get()
    cyc = 0.0
    for _ in range(n_pairs):
        A = lm.random_mp_operator(m.g, m.flux, rng, hermitian=False)
        B = lm.random_mp_operator(m.g, m.flux, rng, hermitian=False)
        cyc = max(cyc, rs.cyclicity_defect(A, B, m.g))
    van = {}
    for j in (1, 2):
        van[f"H0,j={j}"] = rs.vanishing_trace_check(m.P, m.H, m.d, j, m.g)
        A = lm.random_mp_operator(m.g, m.flux, rng)
        van[f"random,j={j}"] = rs.vanishing_trace_check(m.P, A, m.d, j, m.g)
    vw = max(van.values())
    ok = cyc <= 1e-12 * tol_scale and vw <= 1e-8 * tol_scale
    return Criterion(9, "cyclicity and vanishing trace", ok,
                     f"cyclicity {_fmt(cyc)} (<= 1e-12), vanishing trace {_fmt(vw)} (<= 1e-8)",
                     {"cyclicity": cyc, **van})


def c10_localization(M, tol_scale=1.0, L=24, n=2, eps_list=(0.0, 0.025, 0.05, 0.075, 0.1)):
    m = M.get(L)
    P = m.P.matrix
    fits = {"P0": loc.fit_kernel(P, m.g, m.d)}
    for j in (1, 2):
        fits[f"[P0,X{j}]"] = loc.fit_kernel(m.d[j] * P, m.g, m.d, d_min=1)
    J = {i: rs.current_operator(m.H, m.d, i) for i in (1, 2)}
    gen = m.generators(n)
    betas = {}
    for e in eps_list:
        Pi = neass_state(gen, e).Pi.matrix
        ops = {"J1 Pi": J[1] @ Pi, "J2 Pi": J[2] @ Pi, "H0 Pi": m.H @ Pi,
               "[Pi,X1]": m.d.d1 * Pi, "[Pi,X2]": m.d.d2 * Pi}
        for k, T in ops.items():
            f = loc.fit_kernel(T, m.g, m.d, d_min=1)
            fits[f"{k} eps={e}"] = f
            betas.setdefault(k, []).append(f.beta)
    fit_ok = all(f.beta > 0 and f.r_squared >= 0.85 for f in fits.values())
    var = {k: (max(b) - min(b)) / np.mean(b) for k, b in betas.items()}
    var_ok = max(var.values()) <= 0.30 * tol_scale
    E = m.spectrum.E
    zs = [m.gap.mu + 0.3j, m.gap.mu + 1j, m.gap.mu + 3j, E.min() - 10]
    dists = [np.abs(E - z).min() for z in zs]
    ct = loc.combes_thomas_scan(m.H, m.g, m.d, zs, E)
    tau = loc.kendall_tau(dists, [f.beta for f in ct])
    ok = fit_ok and var_ok and tau >= 0.8
    worst = min(fits.values(), key=lambda f: f.r_squared)
    s = (f"{len(fits)} fits, min beta {_fmt(min(f.beta for f in fits.values()))}, min R2 {_fmt(worst.r_squared)} "
         f"(>= 0.85); Combes-Thomas tau {_fmt(tau)} (>= 0.8); NEASS beta variation {_fmt(max(var.values()))} "
         f"(<= 0.3), L={L}")
    metrics = {k: {"beta": f.beta, "C": f.C, "r2": f.r_squared} for k, f in fits.items()}
    metrics["ct"] = [{"dist": dd, "beta": f.beta, "r2": f.r_squared} for dd, f in zip(dists, ct)]
    metrics["variation"] = var
    metrics["kendall_tau"] = tau
    return Criterion(10, "localization suite", ok, s, metrics)


def c11_commutator_identity(M, tol_scale=1.0):
    out = {}
    for nb in (1, 2):
        m = M.get(filled_bands=nb)
        lhs, rhs = rs.commutator_identity_sides(m.P, m.d, m.g)
        out[nb] = {"lhs": lhs, "rhs": rhs, "diff": abs(lhs - rhs), "diff_opposite_sign": abs(lhs + rhs)}
    worst = max(v["diff"] for v in out.values())
    return Criterion(11, "commutator identity T([PX1P,PX2P])", worst <= 1e-10 * tol_scale,
                     f"|T([PX1P,PX2P]) - T(P[[P,X1],[P,X2]]P)| = {_fmt(worst)} (<= 1e-10); "
                     f"with the opposite sign the gap is {_fmt(out[1]['diff_opposite_sign'])}", out)


APPROXIMANTS = ((1, 2, 12), (2, 3, 12), (3, 5, 20), (5, 8, 24))


def c12_approximants(M, tol_scale=1.0, approximants=APPROXIMANTS):
    out, ok, parts = {}, True, []
    for p, q, L in approximants:
        r = golden_label_rank(p, q)
        key = f"{p}/{q}"
        m = hofstadter(L, L, p, q)
        try:
            gap = sp.gap_by_filling(m.spectrum, r * m.g.N // q)
            C = rs.chern_number_momentum(m.flux, r)
        except (NoGap, GaplessAtFilling) as e:
            out[key] = {"skipped": f"gapless at IDS {r}/{q}: {e}"}
            parts.append(f"{key}: gapless (skipped)")
            continue
        m.gap_hint = gap.mu
        sig = rs.hall_conductivity_marker(m.P, m.d, m.g)
        defect = abs(2 * np.pi * sig - C)
        good = defect <= 0.05 * tol_scale
        ok &= good
        out[key] = {"L": L, "ids": f"{r}/{q}", "gap": gap.width, "chern": C, "sigma_2pi": 2 * np.pi * sig,
                    "defect": defect}
        parts.append(f"{key}: 2pi sigma {2 * np.pi * sig:.4f} vs C={C}")
    gapped = [k for k, v in out.items() if "skipped" not in v]
    ok = ok and len(gapped) > 0
    return Criterion(12, "incommensurate approximants", ok, "; ".join(parts) + " (tol 0.05)", out)


ALL = (c1_residual_exponent, c2_kubo, c3_quantization, c4_equilibrium_current, c5_inverse_liouvillian,
       c6_riesz, c7_ids, c8_chern_simons, c9_trace_lemmas, c10_localization, c11_commutator_identity, c12_approximants)


def run_all(tol_scale=1.0, seed=0, M=None):
    M = M or Models()
    res = []
    for f in ALL:
        kw = {"tol_scale": tol_scale}
        if "seed" in f.__code__.co_varnames:
            kw["seed"] = seed
        res.append(f(M, **kw))
    return res
