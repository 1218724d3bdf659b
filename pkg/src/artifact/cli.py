"""Command-line runner: build -> spectrum -> NEASS -> response -> localization.

Exit codes:
    0   success
    1   an enabled acceptance criterion failed
    2   command-line usage error
    3   ConfigError             4   NonCommensurateTorus    5   FlagViolation
    6   SolverFailure           7   NoGap                   8   FermiOnSpectrum
    9   EnclosureFailure        10  QuadratureDivergence    11  GapTooSmall
    12  MissingGenerator        13  DegenerateFit           14  GaplessAtFilling
    15  InsufficientData        16  ZTooCloseToSpectrum     17  other errors
"""
import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import acceptance, errors
from . import config as cfgmod
from . import localization as loc
from . import response as rs
from .lattice_model import FluxConfig
from .neass import fit_power_law, neass_state
from .pipeline import from_config
from .plots import write_svg

EXIT_CODES = {
    errors.ConfigError: 3, errors.NonCommensurateTorus: 4, errors.FlagViolation: 5,
    errors.SolverFailure: 6, errors.NoGap: 7, errors.FermiOnSpectrum: 8,
    errors.EnclosureFailure: 9, errors.QuadratureDivergence: 10, errors.GapTooSmall: 11,
    errors.MissingGenerator: 12, errors.DegenerateFit: 13, errors.GaplessAtFilling: 14,
    errors.InsufficientData: 15, errors.ZTooCloseToSpectrum: 16,
}


def exit_code(exc):
    for cls in type(exc).__mro__:
        if cls in EXIT_CODES:
            return EXIT_CODES[cls]
    return 17


def _csv(path, header, rows):
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for r in rows:
            f.write(",".join(repr(float(x)) if not isinstance(x, (int, np.integer)) else str(x) for x in r) + "\n")
    return path


def _map(fn, items, threads):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(threads) as ex:
        return list(ex.map(fn, items))


class Runner:
    def __init__(self, cfg, out_dir):
        self.cfg = cfg
        self.out = out_dir
        os.makedirs(out_dir, exist_ok=True)
        self.model = from_config(cfg)
        self.report = {"config": cfg.name, "timings": {}, "metrics": {}, "files": [], "skipped": {},
                       "criteria": {}}

    def _file(self, name):
        p = os.path.join(self.out, name)
        self.report["files"].append(p)
        return p

    def stage(self, name):
        t = time.time()
        getattr(self, "do_" + name)()
        self.report["timings"][name] = time.time() - t

    def do_spectrum(self):
        m = self.model
        _csv(self._file("spectrum.csv"), ["index", "eigenvalue"], enumerate(m.spectrum.E))
        gp = m.gap
        self.report["metrics"]["gap"] = {"lower_edge": gp.lower_edge, "upper_edge": gp.upper_edge,
                                         "width": gp.width, "mu": gp.mu, "rank": gp.rank}
        self.report["metrics"]["eigenvalues"] = [float(x) for x in m.spectrum.E]

    def _states(self):
        if not hasattr(self, "_st"):
            gen = self.model.generators(self.cfg.order, self.cfg.calculus)
            self._st = _map(lambda e: neass_state(gen, e), self.cfg.eps_grid, self.cfg.threads)
        return self._st

    def do_neass(self):
        m, cfg = self.model, self.cfg
        sts = self._states()
        res = [s.residual_norm for s in sts]
        j = [rs.hall_current_density(m.H, m.d, s, m.g) for s in sts]
        _csv(self._file("neass_sweep.csv"), ["eps", "residual_norm", "j_hall", "rank"],
             [(s.eps, s.residual_norm, jj, s.Pi.rank) for s, jj in zip(sts, j)])
        fit = fit_power_law(cfg.eps_grid, res)
        self.report["metrics"]["slope_residual"] = fit.slope
        self.report["metrics"]["slope_residual_r2"] = fit.r_squared
        lo, hi = cfg.order + 1 - 0.25, cfg.order + 1 + 0.25
        self.report["criteria"]["residual_exponent"] = bool(lo <= fit.slope <= hi)

    def do_response(self):
        m, cfg = self.model, self.cfg
        sig = rs.hall_conductivity_marker(m.P, m.d, m.g)
        sig_tw = rs.hall_conductivity_twist(m.H, m.spectrum, m.P.rank, m.d, m.g)
        C = None
        bands, rem = divmod(m.P.rank * m.flux.q, m.g.N)
        if rem:
            self.report["skipped"]["chern_oracle"] = "filling is not a whole number of bands"
        else:
            try:
                C = rs.chern_number_momentum(m.flux, bands, m.pot)
            except errors.GaplessAtFilling as e:
                self.report["skipped"]["chern_oracle"] = str(e)
        sts = self._states()
        j = np.array([rs.hall_current_density(m.H, m.d, s, m.g) for s in sts])
        eps = np.asarray(cfg.eps_grid)
        ref = sig_tw if cfg.calculus == "twist" else sig
        defect = np.abs(j - eps * ref)
        _csv(self._file("response_sweep.csv"), ["eps", "j_hall", "defect"], zip(eps, j, defect))
        np.savetxt(self._file("j_hall.dat"), np.column_stack([eps, j]))
        write_svg(self._file("kubo_defect.svg"), eps, defect, "eps", "|j - eps sigma|", log=True)
        fit = fit_power_law(eps, defect)
        rep = rs.ResponseReport(sig, C, dict(zip(eps.tolist(), j.tolist())), fit.slope,
                                float(rs.trace_per_unit_area(m.P.matrix, m.g).real), sig_tw)
        self.report["metrics"]["response"] = rep.to_dict()
        if C is not None:
            self.report["criteria"]["quantization"] = bool(abs(2 * np.pi * sig - C) <= 0.05 * cfg.tol_scale)
        self.report["criteria"]["kubo"] = bool(fit.slope >= cfg.order + 0.75)
        J1P = rs.trace_per_unit_area(rs.current_operator(m.H, m.d, 1) @ m.P.matrix, m.g)
        self.report["metrics"]["equilibrium_current"] = abs(J1P)
        self.report["criteria"]["equilibrium_current"] = bool(abs(J1P) <= 1e-8 * cfg.tol_scale)

    def do_localize(self):
        m = self.model
        P = m.P.matrix
        # commutator kernels carry a factor |x - x'|, fitted as C d exp(-beta d)
        ops = {"P0": (P, 0), "P0_X1": (m.d.d1 * P, 1), "P0_X2": (m.d.d2 * P, 1)}
        fits = {}
        for name, (T, power) in ops.items():
            prof = loc.kernel_decay_profile(T, m.g, m.d)
            _csv(self._file(f"decay_{name}.csv"), ["d", "value"], zip(prof.d, prof.value))
            f = loc.fit_localization(prof, power=power)
            fits[name] = {"C": f.C, "beta": f.beta, "r_squared": f.r_squared, "fit_range": f.fit_range,
                          "prefactor_power": power}
        self.report["metrics"]["localization"] = fits
        self.report["criteria"]["localization"] = all(f["beta"] > 0 and f["r_squared"] >= 0.85
                                                      for f in fits.values())

    def finish(self):
        for s in cfgmod.STAGES:
            if s not in self.cfg.stages:
                self.report["skipped"][s] = "stage not requested"
        path = self._file("report.json")
        with open(path, "w") as f:
            json.dump(self.report, f, indent=1, default=_json_default)
        return 0 if all(self.report["criteria"].values()) else 1


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.ndarray):
        return x.tolist()
    return str(x)


def _load_cfg(args):
    cfg = cfgmod.load(args.config)
    return cfgmod.override(cfg, out_dir=args.out_dir, seed=args.seed, tol_scale=args.tol_scale,
                           threads=args.threads)


def run(cfg, stages=None):
    if stages:
        cfg = cfgmod.override(cfg, stages=tuple(stages))
    r = Runner(cfg, cfg.out_dir)
    for s in cfgmod.STAGES:
        if s in cfg.stages:
            r.stage(s)
    return r.finish(), r.report


def cmd_stage(args, stages):
    cfg = _load_cfg(args)
    code, rep = run(cfg, stages)
    print(json.dumps({k: rep[k] for k in ("criteria", "timings", "skipped")}, default=_json_default))
    return code


def cmd_oracle(args):
    print(rs.chern_number_momentum(FluxConfig(args.p, args.q), args.bands))
    return 0


def cmd_verify(args):
    cfg = _load_cfg(args)
    os.makedirs(cfg.out_dir, exist_ok=True)
    res = acceptance.run_all(cfg.tol_scale, cfg.seed)
    for c in res:
        print(c.line())
    rep = {"criteria": {c.number: {"title": c.title, "passed": c.passed, "summary": c.summary,
                                   "metrics": c.metrics} for c in res}}
    with open(os.path.join(cfg.out_dir, "report.json"), "w") as f:
        json.dump(rep, f, indent=1, default=_json_default)
    return 0 if all(c.passed for c in res) else 1


def cmd_config(args):
    if args.action != "validate":
        raise errors.ConfigError(f"unknown config action {args.action!r}")
    cfg = _load_cfg(args)
    cfg.geometry()
    print(f"ok: {cfg.name}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="artifact", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config", default="hofstadter_q3_n2", help="config file or bundled name")
    p.add_argument("--out-dir", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol-scale", type=float, default=None)
    p.add_argument("--threads", type=int, default=None)
    sub = p.add_subparsers(dest="cmd", required=True)
    for name in ("run", *cfgmod.STAGES):
        sub.add_parser(name)
    o = sub.add_parser("oracle")
    o.add_argument("--p", type=int, required=True)
    o.add_argument("--q", type=int, required=True)
    o.add_argument("--bands", type=int, required=True)
    sub.add_parser("verify")
    c = sub.add_parser("config")
    c.add_argument("action", choices=["validate"])
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "run":
            return cmd_stage(args, None)
        if args.cmd in cfgmod.STAGES:
            return cmd_stage(args, [args.cmd])
        if args.cmd == "oracle":
            return cmd_oracle(args)
        if args.cmd == "verify":
            return cmd_verify(args)
        return cmd_config(args)
    except errors.ArtifactError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return exit_code(e)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 17


if __name__ == "__main__":
    sys.exit(main())
