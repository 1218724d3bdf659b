"""Experiment configuration: INI-style key-value files (configparser).

Schema (all sections optional except [model]):

    [model]      L1, L2, p, q (ints); v, a_per1, a_per2 (comma lists, q entries)
    [spectral]   filled_bands (int) or gap_hint (energy); contour_nodes (int)
    [neass]      order (int); eps_grid (comma list) or eps_log10 = lo, hi, points;
                 eps0 (float); calculus = twist | kernel
    [run]        stages (comma list of spectrum, neass, response, localize);
                 out_dir; seed (int); tol_scale (float); threads (int)
"""
import configparser
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .errors import ConfigError
from .lattice_model import FluxConfig, PotentialConfig, build_geometry

STAGES = ("spectrum", "neass", "response", "localize")


@dataclass(frozen=True)
class ExperimentConfig:
    name: str = "custom"
    L1: int = 12
    L2: int = 12
    p: int = 1
    q: int = 3
    v: tuple = ()
    a_per1: tuple = ()
    a_per2: tuple = ()
    filled_bands: int | None = 1
    gap_hint: float | None = None
    contour_nodes: int = 128
    order: int = 2
    eps_grid: tuple = tuple(np.logspace(-1.5, -0.5, 7))
    eps0: float = 0.35
    calculus: str = "twist"
    stages: tuple = STAGES
    out_dir: str = "out"
    seed: int = 0
    tol_scale: float = 1.0
    threads: int = 1
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def flux(self):
        return FluxConfig(self.p, self.q)

    @property
    def potential(self):
        return PotentialConfig(self.v, self.a_per1, self.a_per2)

    def geometry(self):
        return build_geometry(self.L1, self.L2, self.flux)


def _floats(s):
    s = s.strip()
    return tuple(float(x) for x in s.split(",") if x.strip()) if s else ()


def validate(cfg):
    """Schema checks that do not need the model to be built."""
    if cfg.L1 < 2 or cfg.L2 < 2:
        raise ConfigError("L1, L2 must be >= 2")
    try:
        FluxConfig(cfg.p, cfg.q)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    for name in ("v", "a_per1", "a_per2"):
        t = getattr(cfg, name)
        if len(t) not in (0, cfg.q):
            raise ConfigError(f"{name} needs {cfg.q} entries, got {len(t)}")
    if cfg.filled_bands is None and cfg.gap_hint is None:
        raise ConfigError("give filled_bands or gap_hint")
    if cfg.contour_nodes < 8:
        raise ConfigError("contour_nodes must be >= 8")
    if cfg.order < 1:
        raise ConfigError("order must be >= 1")
    if not (0 < cfg.eps0):
        raise ConfigError("eps0 must be positive")
    eps = np.asarray(cfg.eps_grid)
    if len(eps) == 0 or np.any(eps <= 0) or np.any(eps >= cfg.eps0):
        raise ConfigError(f"eps grid must lie inside (0, {cfg.eps0})")
    if cfg.calculus not in ("twist", "kernel"):
        raise ConfigError(f"unknown calculus {cfg.calculus!r}")
    bad = set(cfg.stages) - set(STAGES)
    if bad:
        raise ConfigError(f"unknown stages {sorted(bad)}")
    if cfg.tol_scale <= 0:
        raise ConfigError("tol_scale must be positive")
    if cfg.threads < 1:
        raise ConfigError("threads must be >= 1")
    return cfg


def parse(text, name="custom"):
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError(str(e)) from None
    if "model" not in cp:
        raise ConfigError("missing [model] section")
    kw = {"name": name}
    try:
        m = cp["model"]
        for k in ("L1", "L2", "p", "q"):
            if k in m:
                kw[k] = m.getint(k)
        for k in ("v", "a_per1", "a_per2"):
            if k in m:
                kw[k] = _floats(m[k])
        if "spectral" in cp:
            s = cp["spectral"]
            if "gap_hint" in s:
                kw["gap_hint"] = s.getfloat("gap_hint")
                kw["filled_bands"] = None
            if "filled_bands" in s:
                kw["filled_bands"] = s.getint("filled_bands")
            if "contour_nodes" in s:
                kw["contour_nodes"] = s.getint("contour_nodes")
        if "neass" in cp:
            s = cp["neass"]
            if "order" in s:
                kw["order"] = s.getint("order")
            if "eps_grid" in s:
                kw["eps_grid"] = _floats(s["eps_grid"])
            if "eps_log10" in s:
                lo, hi, n = _floats(s["eps_log10"])
                kw["eps_grid"] = tuple(np.logspace(lo, hi, int(n)))
            if "eps0" in s:
                kw["eps0"] = s.getfloat("eps0")
            if "calculus" in s:
                kw["calculus"] = s["calculus"].strip()
        if "run" in cp:
            s = cp["run"]
            if "stages" in s:
                kw["stages"] = tuple(x.strip() for x in s["stages"].split(",") if x.strip())
            for k, conv in (("out_dir", str), ("seed", int), ("tol_scale", float), ("threads", int)):
                if k in s:
                    kw[k] = conv(s[k])
    except ValueError as e:
        raise ConfigError(str(e)) from None
    known = {f.name for f in fields(ExperimentConfig)}
    assert set(kw) <= known
    return validate(ExperimentConfig(**kw))


def load(path):
    if path in BUNDLED:
        return parse(BUNDLED[path], path)
    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from None
    return parse(text, str(path))


def override(cfg, **kw):
    return validate(replace(cfg, **{k: v for k, v in kw.items() if v is not None}))


BUNDLED = {
    "hofstadter_q3_n2": """
[model]
L1 = 12
L2 = 12
p = 1
q = 3
[spectral]
filled_bands = 1
contour_nodes = 128
[neass]
order = 2
eps_log10 = -1.5, -0.5, 7
eps0 = 0.35
[run]
stages = spectrum, neass, response, localize
""",
    "hofstadter_q3_gap2": """
[model]
L1 = 12
L2 = 12
p = 1
q = 3
[spectral]
filled_bands = 2
[neass]
order = 2
eps_log10 = -1.5, -0.5, 7
[run]
stages = spectrum, neass, response
""",
    "hofstadter_q5_potential": """
[model]
L1 = 20
L2 = 20
p = 2
q = 5
v = 0.3, -0.2, 0.1, 0.0, -0.2
a_per1 = 0.1, 0.0, -0.3, 0.2, 0.0
a_per2 = 0.0, 0.25, 0.0, -0.1, 0.05
[spectral]
filled_bands = 2
[neass]
order = 1
eps_log10 = -1.5, -0.5, 7
[run]
stages = spectrum, neass, response
""",
}
