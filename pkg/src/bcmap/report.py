"""Configuration, input parsing, the condition battery and report output."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from typing import Optional

import numpy as np

from . import __version__, kernels
from .blaschke import BlaschkeProduct
from .carleson import (
    carleson_constant,
    dyadic_centers,
    is_heavy_square,
    light_subsquare_search,
    square_masses,
    zero_measure,
)
from .clark import Arc, clark_measure, herglotz_real_part, is_heavy_arc, light_subarc_search, poisson_extension
from .density import density_a_grid, quasi_separation_count, separation_constant, uniform_upper_density
from .diagnostics import (
    BallGrid,
    QuadratureSpec,
    TargetGrid,
    ball_containment_radius,
    descent_chain,
    descent_search,
    distance_to_set,
    distortion_profile,
    gauss_curvature_residual,
    image_area_sampled,
    image_area_with_multiplicity,
    image_diameter,
    jensen_balance,
    max_hyperbolic_derivative,
    quasigeodesic_fit,
)
from .disk import ADMISSION_MARGIN, TWO_PI, check_disk
from .errors import BCMapError, DescentNotFound, DomainError, NumericalFailure, ParseError, PreconditionError

SCHEMA_VERSION = "1.0"
FORMATS = {
    "zeros_csv": "bcmap-zeros/1",
    "config_json": "bcmap-config/1",
    "report_json": "bcmap-report/1",
    "grid_csv": "bcmap-grid/1",
}
SECTIONS = ("(1)", "(1a)", "(1b)", "(1c)", "(1d)", "(1e)", "(1f)", "(2)", "(3)", "(4)",
            "(5a)", "(5b)", "(5c)", "(6)")
MIN_LEVEL, MAX_LEVEL = 3, 24


# -- input ---------------------------------------------------------------------------


def parse_zeros_text(text, path=None):
    """Parse ``re,im`` lines (``#`` comments and blank lines allowed) into complex zeros."""
    zeros = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 're,im', got {line!r}", lineno, path)
        try:
            re_, im_ = (float(p) for p in parts)
        except ValueError:
            raise ParseError(f"malformed number in {line!r}", lineno, path) from None
        z = complex(re_, im_)
        if not (math.isfinite(re_) and math.isfinite(im_)) or abs(z) >= 1.0 - ADMISSION_MARGIN:
            raise DomainError(f"{path or '<input>'}:{lineno}: zero {line!r} is not inside |z| < 1 - 1e-12")
        zeros.append(z)
    return zeros


def parse_zeros_file(path):
    """Read a zeros CSV; see :func:`parse_zeros_text`."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read zeros file: {exc.strerror}", path=path) from exc
    return parse_zeros_text(text, path)


@dataclass
class GridConfig:
    r_max: float = 0.995
    max_level: int = 12
    base_level: int = 3
    boundary_samples: int = 512
    ball_radius: float = 1.0
    quadrature_radial: int = 16
    quadrature_angular: int = 32
    target_radial: int = 32
    target_angular: int = 64
    curve_samples: int = 1024
    containment_samples: int = 128
    containment_ladder: int = 8
    containment_resolution: float = 1e-2
    descent_depth: int = 8
    chain_length: int = 6
    geodesic_t_max: float = 8.0
    geodesic_samples: int = 48
    carleson_max_level: int = 24
    gce_samples: int = 16
    density_a_level: int = 5


@dataclass
class AnalysisConfig:
    zeros: list = field(default_factory=list)
    prefactor_angle: float = 0.0
    alphas: list = field(default_factory=lambda: [TWO_PI * k / 8 for k in range(8)])
    epsilons: list = field(default_factory=lambda: [0.5, 0.25, 0.1])
    grid: GridConfig = field(default_factory=GridConfig)
    report_path: Optional[str] = None
    grids_dir: Optional[str] = None
    seed: int = 0

    def validate(self):
        if not self.zeros:
            raise DomainError("the map needs at least one zero")
        check_disk(np.asarray(self.zeros, dtype=complex), "zero")
        g = self.grid
        if not 0.0 < g.r_max < 1.0 - ADMISSION_MARGIN:
            raise DomainError("r_max must lie in (0, 1 - 1e-12)")
        for name in ("base_level", "max_level", "carleson_max_level"):
            v = getattr(g, name)
            if not MIN_LEVEL <= v <= MAX_LEVEL:
                raise DomainError(f"{name} must lie in [{MIN_LEVEL}, {MAX_LEVEL}]")
        if g.max_level < g.base_level:
            raise DomainError("max_level must be >= base_level")
        for f in fields(GridConfig):
            v = getattr(g, f.name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{f.name} must be positive")
        if g.boundary_samples < 64:
            raise DomainError("boundary_samples must be at least 64")
        if not g.ball_radius > 0:
            raise DomainError("ball_radius must be positive")
        if any(not 0.0 < e < 1.0 for e in self.epsilons):
            raise DomainError("every epsilon must lie in (0, 1)")
        if not self.alphas:
            raise DomainError("at least one alpha is required")
        return self

    @property
    def product(self):
        return BlaschkeProduct(np.asarray(self.zeros, dtype=complex), self.prefactor_angle)

    def to_dict(self):
        return {
            "format": FORMATS["config_json"],
            "map": {"zeros": [[z.real, z.imag] for z in map(complex, self.zeros)],
                    "prefactor_angle": self.prefactor_angle},
            "alphas": list(self.alphas),
            "epsilons": list(self.epsilons),
            "grid": asdict(self.grid),
            "output": {"report": self.report_path, "grids": self.grids_dir},
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data, base_dir="."):
        """Build a config from parsed JSON; relative ``zeros_file`` paths resolve against ``base_dir``."""
        if not isinstance(data, dict):
            raise ParseError("config must be a JSON object")
        known = {"format", "map", "alphas", "epsilons", "grid", "output", "seed"}
        extra = set(data) - known
        if extra:
            raise ParseError(f"unknown config keys: {sorted(extra)}")
        fmt = data.get("format", FORMATS["config_json"])
        if fmt != FORMATS["config_json"]:
            raise ParseError(f"unsupported config format {fmt!r}")
        for key in ("map", "grid", "output"):
            if not isinstance(data.get(key, {}), dict):
                raise ParseError(f"config key {key!r} must be an object")
        cfg = cls()
        m = data.get("map", {})
        try:
            if "zeros_file" in m:
                cfg.zeros = parse_zeros_file(os.path.join(base_dir, m["zeros_file"]))
            elif "zeros" in m:
                cfg.zeros = [complex(float(p[0]), float(p[1])) for p in m["zeros"]]
            cfg.prefactor_angle = float(m.get("prefactor_angle", 0.0))
            if "alphas" in data:
                cfg.alphas = [float(a) for a in data["alphas"]]
            if "epsilons" in data:
                cfg.epsilons = [float(e) for e in data["epsilons"]]
            names = {f.name: f.type for f in fields(GridConfig)}
            gdata = data.get("grid", {})
            bad = set(gdata) - set(names)
            if bad:
                raise ParseError(f"unknown grid keys: {sorted(bad)}")
            for k, v in gdata.items():
                current = getattr(cfg.grid, k)
                setattr(cfg.grid, k, int(v) if isinstance(current, int) else float(v))
            out = data.get("output", {})
            cfg.report_path = out.get("report")
            cfg.grids_dir = out.get("grids")
            cfg.seed = int(data.get("seed", 0))
        except (TypeError, ValueError, IndexError, KeyError) as exc:
            if isinstance(exc, BCMapError):
                raise
            raise ParseError(f"invalid config value: {exc}") from exc
        return cfg


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read config: {exc.strerror}", path=path) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, path) from exc
    return AnalysisConfig.from_dict(data, os.path.dirname(os.path.abspath(path)))


# -- report --------------------------------------------------------------------------------


@dataclass
class Report:
    document: dict
    grids: dict = field(default_factory=dict)

    @property
    def failed(self):
        return bool(self.document.get("failures"))


def _num(x):
    """JSON-safe scalar: non-finite floats become strings, complex becomes ``[re, im]``."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_num(float(x.real)), _num(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, dict):
        return {str(k): _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_num(v) for v in x]
    return x


def _key(square):
    return "origin" if square is None else square.key


class _Battery:
    def __init__(self, cfg: AnalysisConfig, backend=None):
        self.cfg = cfg
        self.g = cfg.grid
        self.F = cfg.product
        self.backend = backend
        self.grids = {}
        pts, gaps, squares = dyadic_centers(self.g.base_level, self.g.max_level, self.g.r_max, include_origin=True)
        self.pts, self.gaps, self.squares = pts, gaps, squares
        self.keys = [_key(q) for q in squares]
        self._crit = None
        self._diam = None

    @property
    def crit(self):
        if self._crit is None:
            self._crit = self.F.critical_points().points
        return self._crit

    def grid_params(self):
        return {"kind": "dyadic centers + origin", "base_level": self.g.base_level,
                "max_level": self.g.max_level, "r_max": self.g.r_max, "points": int(self.pts.size)}

    def _sweep(self, name, fn):
        vals = np.array([fn(z) for z in self.pts], dtype=float)
        self.grids[name] = list(zip(self.keys, vals))
        k = int(np.argmin(vals))
        stats = {"min": vals[k], "median": float(np.median(vals)), "max": float(vals.max())}
        return vals, stats, {"z": complex(self.pts[k]), "square": self.keys[k]}

    # each section returns a dict
    def s1(self):
        R = self.g.ball_radius
        vals, stats, wit = self._sweep(
            "diameter", lambda z: image_diameter(self.F, z, R, self.g.boundary_samples, self.backend))
        self._diam = (stats, wit)
        return {"operation": "image_diameter",
                "parameters": {"R": R, "n_boundary": self.g.boundary_samples, "grid": self.grid_params()},
                "statistics": {"c1": stats["min"], **stats}, "witness": wit, "grid_file": "diameter.csv",
                "notes": ["grid minimum up to r_max; no extrapolation toward the boundary"]}

    def s1a(self):
        if self._diam is None:
            raise PreconditionError("section (1) failed")
        stats, wit = self._diam
        return {"operation": "image_diameter", "parameters": {"same_as": "(1)"},
                "statistics": {"c1": stats["min"]}, "witness": wit, "grid_file": "diameter.csv"}

    def s1b(self):
        tg = TargetGrid(self.g.target_radial, self.g.target_angular, self.g.curve_samples)
        vals, stats, wit = self._sweep(
            "area_sampled", lambda z: image_area_sampled(self.F, z, self.g.ball_radius, tg, self.backend).value)
        return {"operation": "image_area_sampled",
                "parameters": {"R": self.g.ball_radius, "target_grid": asdict(tg), "grid": self.grid_params()},
                "statistics": {"c2": stats["min"], **stats}, "witness": wit, "grid_file": "area_sampled.csv"}

    def s1c(self):
        qs = QuadratureSpec(self.g.quadrature_radial, self.g.quadrature_angular)
        vals, stats, wit = self._sweep(
            "area_multiplicity",
            lambda z: image_area_with_multiplicity(self.F, z, self.g.ball_radius, qs, self.backend))
        return {"operation": "image_area_with_multiplicity",
                "parameters": {"R": self.g.ball_radius, "quadrature": asdict(qs), "grid": self.grid_params()},
                "statistics": {"c3": stats["min"], **stats}, "witness": wit,
                "grid_file": "area_multiplicity.csv"}

    def s1d(self):
        bg = BallGrid()
        vals, stats, wit = self._sweep(
            "max_derivative", lambda z: max_hyperbolic_derivative(self.F, z, self.g.ball_radius, bg, self.backend))
        dh = self.F.hyperbolic_derivative(self.pts, gap=self.gaps)
        self.grids["hyperbolic_derivative"] = list(zip(self.keys, dh))
        return {"operation": "max_hyperbolic_derivative",
                "parameters": {"R": self.g.ball_radius, "ball_grid": asdict(bg), "grid": self.grid_params()},
                "statistics": {"c4": stats["min"], **stats}, "witness": wit, "grid_file": "max_derivative.csv"}

    def s1e(self):
        R = self.g.ball_radius
        vals, stats, wit = self._sweep(
            "containment",
            lambda z: ball_containment_radius(self.F, z, R, self.g.containment_resolution,
                                              self.g.containment_samples, self.g.curve_samples,
                                              self.g.containment_ladder, self.backend))
        return {"operation": "ball_containment_radius",
                "parameters": {"R": R, "resolution": self.g.containment_resolution,
                               "n_samples": self.g.containment_samples, "n_curve": self.g.curve_samples,
                               "ladder": self.g.containment_ladder, "grid": self.grid_params()},
                "statistics": {"c5": stats["min"], **stats}, "witness": wit, "grid_file": "containment.csv"}

    def s1f(self):
        prof = distortion_profile(self.F, self.cfg.epsilons, self.g.r_max, "dyadic", self.g.max_level,
                                  self.g.base_level, backend=self.backend)
        qs = quasi_separation_count(self.crit)
        return {"operation": "distortion_profile",
                "parameters": {"epsilons": self.cfg.epsilons, "grid": self.grid_params()},
                "statistics": {"profile": [{"eps": p.eps, "delta": p.delta, "points": p.count} for p in prof],
                               "critical_points": int(self.crit.size),
                               "quasi_separation_bound": qs.bound},
                "witness": {"argmin": [p.argmin for p in prof]}}

    def s2(self):
        out = []
        targets = [q for q in self.squares if q is not None]
        for eps in self.cfg.epsilons:
            depths, rows, missing = [], [], 0
            for q in targets:
                w = descent_search(self.F, q, eps, self.g.descent_depth, self.backend)
                if w is None:
                    missing += 1
                    rows.append((q.key, float("nan")))
                else:
                    depths.append(w.depth)
                    rows.append((q.key, w.ratio))
            self.grids[f"descent_eps{eps:g}"] = rows
            out.append({"eps": eps, "N": max(depths) if depths and not missing else None,
                        "max_depth_found": max(depths) if depths else None, "not_found": missing,
                        "squares": len(targets)})
        return {"operation": "descent_search",
                "parameters": {"N_max": self.g.descent_depth, "grid": self.grid_params()},
                "statistics": {"ladder": out},
                "notes": ["Carleson squares restricted to dyadic squares"]}

    def s3(self):
        fits, fallbacks = [], 0
        for z in self.pts:
            try:
                xi = descent_chain(self.F, z, 0.5, self.g.chain_length, self.g.descent_depth,
                                   self.g.base_level, self.backend).xi
            except DescentNotFound:
                fallbacks += 1
                xi = math.atan2(z.imag, z.real)
            fits.append(quasigeodesic_fit(self.F, z, xi, self.g.geodesic_t_max, self.g.geodesic_samples,
                                          backend=self.backend))
        s = np.array([f.s for f in fits])
        C = np.array([f.C if f.found else math.inf for f in fits])
        self.grids["quasigeodesic_s"] = list(zip(self.keys, s))
        self.grids["quasigeodesic_C"] = list(zip(self.keys, C))
        k = int(np.argmin(s))
        return {"operation": "quasigeodesic_fit",
                "parameters": {"eps": 0.5, "chain_length": self.g.chain_length, "t_max": self.g.geodesic_t_max,
                               "n_samples": self.g.geodesic_samples, "grid": self.grid_params()},
                "statistics": {"s_min": float(s.min()), "C_max": float(C.max()), "radial_fallbacks": fallbacks},
                "witness": {"z": complex(self.pts[k]), "square": self.keys[k]},
                "notes": ["ray endpoint from the descent chain; radial ray when the chain fails"]}

    def _dyadic_arcs(self):
        for level in range(self.g.base_level, self.g.max_level + 1):
            side = math.ldexp(1.0, -level)
            if 1.0 - side / 2 > self.g.r_max:
                break
            for i in range(1 << level):
                yield f"{level}:{i}", Arc(TWO_PI * (i + 0.5) * side, side)

    def s4(self):
        arcs = list(self._dyadic_arcs())
        delta_min = math.ldexp(1.0, -self.g.descent_depth)
        per_alpha = []
        for j, alpha in enumerate(self.cfg.alphas):
            mu = clark_measure(self.F, alpha)
            self.grids[f"clark_alpha{j}"] = [(repr(float(a)), m) for a, m in zip(mu.angles, mu.masses)]
            heavy = [(k, arc) for k, arc in arcs if is_heavy_arc(mu, arc).heavy]
            ladder = []
            for eps in self.cfg.epsilons:
                found = [light_subarc_search(mu, arc, eps, delta_min) for _, arc in heavy]
                deltas = [f.delta for f in found if f is not None]
                ladder.append({"eps": eps, "delta": min(deltas) if deltas and len(deltas) == len(found) else None,
                               "failures": sum(f is None for f in found)})
            u0 = poisson_extension(mu, 0.0)
            per_alpha.append({"alpha": alpha, "atoms": len(mu), "total_mass": mu.total_mass,
                              "herglotz_gap_at_0": abs(u0 - herglotz_real_part(self.F, alpha, 0.0)),
                              "heavy_arcs": len(heavy), "ladder": ladder})
        return {"operation": "clark_measure + light_subarc_search",
                "parameters": {"alphas": self.cfg.alphas, "delta_min": delta_min, "arcs": len(arcs)},
                "statistics": {"per_alpha": per_alpha},
                "notes": ["heavy arcs restricted to dyadic arcs over the grid squares"]}

    def s5a(self):
        return {"operation": "construction", "parameters": {},
                "statistics": {"blaschke_product": True, "degree": self.F.degree},
                "notes": ["finite Blaschke product by construction"]}

    def s5b(self):
        sigma = zero_measure(self.F)
        value, wit = carleson_constant(sigma, self.g.carleson_max_level, self.g.base_level)
        masses = square_masses(sigma, self.g.base_level, self.g.carleson_max_level)
        self.grids["carleson"] = sorted(((q.key, m / q.side) for q, m in masses.items()),
                                        key=lambda kv: tuple(map(int, kv[0].split(":"))))
        return {"operation": "carleson_constant",
                "parameters": {"base_level": self.g.base_level, "max_level": self.g.carleson_max_level},
                "statistics": {"carleson_constant": value, "total_mass": sigma.total_mass},
                "witness": {"square": None if wit is None else wit.key},
                "notes": ["Carleson squares restricted to dyadic squares"]}

    def s5c(self):
        sigma = zero_measure(self.F)
        masses = square_masses(sigma, self.g.base_level, self.g.carleson_max_level)
        heavy = sorted(q for q in masses if is_heavy_square(sigma, q).heavy)
        ladder = []
        for eps in self.cfg.epsilons:
            found = [light_subsquare_search(sigma, q, eps, self.g.descent_depth) for q in heavy]
            deltas = [f.delta for f in found if f is not None]
            ladder.append({"eps": eps, "delta": min(deltas) if deltas and len(deltas) == len(found) else None,
                           "failures": sum(f is None for f in found)})
        notes = ["Carleson squares restricted to dyadic squares"]
        if not heavy:
            notes.append("no heavy squares; the condition holds vacuously")
        return {"operation": "light_subsquare_search",
                "parameters": {"max_depth": self.g.descent_depth, "max_level": self.g.carleson_max_level},
                "statistics": {"heavy_squares": len(heavy), "ladder": ladder}, "notes": notes}

    def s6(self, rng):
        crit = self.crit
        qs = quasi_separation_count(crit)
        dens = uniform_upper_density(crit, a_grid=density_a_grid(self.g.density_a_level))
        out = {"critical_points": int(crit.size), "separation": separation_constant(crit),
               "quasi_separation": {"bound": qs.bound, "count": qs.count, "radius": qs.radius},
               "d_plus": dens.d_plus, "d_plus_r": float(dens.r_ladder[-1])}
        notes = ["maximality of the product is not certified"]
        # Gauss curvature residual at random off-critical grid points
        far = distance_to_set(self.pts, crit) > 0.5
        cand = np.nonzero(far & (np.abs(self.pts) < self.g.r_max))[0]
        if cand.size == 0:
            out["gce"] = "skipped: no grid point at distance > 0.5 from the critical set"
        else:
            pick = rng.choice(cand, size=min(self.g.gce_samples, cand.size), replace=False)
            ratios, rel = [], []
            for k in np.sort(pick):
                z = complex(self.pts[k])
                d_e = np.min(np.abs(crit - z)) if crit.size else 1.0
                h = 0.02 * min(1.0 - abs(z), d_e)
                try:
                    r1 = gauss_curvature_residual(self.F, z, h, self.backend)
                    r2 = gauss_curvature_residual(self.F, z, h / 2, self.backend)
                except PreconditionError:
                    continue
                ratios.append(r1 / r2 if r2 != 0 else math.inf)
                u_scale = (2.0 * self.F.hyperbolic_derivative(z) / (1.0 - abs(z) ** 2)) ** 2
                rel.append(abs(r2) / u_scale)
            ratios = np.array(ratios)
            out["gce"] = {"samples": int(ratios.size),
                          "ratio_median": float(np.median(ratios)) if ratios.size else float("nan"),
                          "ratio_min": float(ratios.min()) if ratios.size else float("nan"),
                          "ratio_max": float(ratios.max()) if ratios.size else float("nan"),
                          "max_relative_residual": float(max(rel)) if rel else float("nan"),
                          "passing": bool(ratios.size and np.all(np.abs(ratios - 4.0) <= 0.8))}
        # Jensen balance on a circle away from the critical moduli
        try:
            mods = np.abs(crit)
            cands = np.linspace(0.5, 0.9, 41)
            gaps = np.array([np.min(np.abs(mods - r)) if mods.size else 1.0 for r in cands])
            r = float(cands[int(np.argmax(gaps))])
            jb = jensen_balance(self.F, r, backend=self.backend)
            out["jensen"] = {"r": r, **jb._asdict()}
        except PreconditionError as exc:
            out["jensen"] = f"skipped: {exc}"
        return {"operation": "critical set diagnostics",
                "parameters": {"density_a_level": self.g.density_a_level, "gce_samples": self.g.gce_samples},
                "statistics": out, "notes": notes}


def run_battery(cfg: AnalysisConfig, backend=None) -> Report:
    """Run every section; numerical failures are recorded per section without aborting the rest."""
    cfg.validate()
    bat = _Battery(cfg, backend)
    rng = np.random.default_rng(cfg.seed)
    sections, failures = {}, []
    runners = {"(1)": bat.s1, "(1a)": bat.s1a, "(1b)": bat.s1b, "(1c)": bat.s1c, "(1d)": bat.s1d,
               "(1e)": bat.s1e, "(1f)": bat.s1f, "(2)": bat.s2, "(3)": bat.s3, "(4)": bat.s4,
               "(5a)": bat.s5a, "(5b)": bat.s5b, "(5c)": bat.s5c, "(6)": lambda: bat.s6(rng)}
    for name in SECTIONS:
        try:
            sections[name] = _num(runners[name]())
        except NumericalFailure as exc:
            sections[name] = {"error": str(exc), "error_type": type(exc).__name__}
            failures.append(name)
        except PreconditionError as exc:
            sections[name] = {"skipped": f"skipped: {exc}"}
    F = bat.F
    doc = {
        "schema_version": SCHEMA_VERSION,
        "formats": FORMATS,
        "generator": {"package": "bcmap", "version": __version__, "backend": backend or kernels.BACKEND},
        "config": _num(cfg.to_dict()),
        "map": {"degree": F.degree, "prefactor_angle": F.prefactor_angle,
                "zeros": _num(list(F.zeros)), "critical_points": _num(list(bat.crit))},
        "sections": sections,
        "grids": sorted(f"{name}.csv" for name in bat.grids),
        "failures": failures,
        "status": "numerical_failure" if failures else "ok",
    }
    return Report(doc, bat.grids)


def load_schema():
    """The JSON schema of ``analyze`` reports."""
    return json.loads(resources.files("bcmap").joinpath("report_schema.json").read_text(encoding="utf-8"))


def dumps_report(report: Report) -> str:
    return json.dumps(_num(report.document), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def emit_report(report: Report, path):
    """Write the report as one UTF-8 JSON document with sorted keys."""
    text = dumps_report(report)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write report: {exc.strerror}", str(path)) from exc


def grid_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in rows:
        v = _num(v)
        w.writerow([k, repr(v) if isinstance(v, float) else v])
    return buf.getvalue()


def emit_grids(report: Report, directory):
    """One ``<name>.csv`` per grid with a ``key,value`` header. Returns the written paths."""
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot create grid directory: {exc.strerror}", str(directory)) from exc
    paths = []
    for name in sorted(report.grids):
        path = os.path.join(directory, f"{name}.csv")
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(grid_csv(report.grids[name]))
        except OSError as exc:
            raise OSError(exc.errno, f"cannot write grid: {exc.strerror}", path) from exc
        paths.append(path)
    return paths
