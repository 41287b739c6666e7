"""Experiment orchestration: strict INI configs, seeded per-cell sampling,
CSV/JSON persistence, and the slope fits that compare the complex-side
Lyapunov growth with its non-Archimedean counterpart.

Reproducibility contract: CSV bodies contain no timestamps and are
byte-identical across re-runs of the same config; the JSON summary carries a
config hash and refuses to overwrite a record produced by a different config.
"""

from __future__ import annotations

import configparser
import hashlib
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import admissible, berkovich, cxdyn, hybrid
from .errors import ConfigError
from .parser import parse_family, parse_sections, parse_series

_SCHEMA_VERSION = "v1"

KINDS = ("circle-demo", "hybrid-converge", "lyap-slope", "na-measure")

_KNOWN_KEYS = {
    "experiment": {"kind", "label", "family", "r"},
    "tgrid": {"moduli", "mod_start_exp", "mod_stop_exp", "mod_count", "phases"},
    "sampler": {"seed", "n_burn", "n_keep", "start"},
    "green": {"n_max", "tol"},
    "probes": {"s_min", "s_max", "q", "orbit_len", "include_critical"},
    "datum": {"sections", "k", "d"},
    "series": {"f", "j_max"},
    "output": {"dir"},
}


@dataclass
class ExperimentConfig:
    kind: str
    label: str
    family: str | None
    r: float
    moduli: list = field(default_factory=list)
    phases: int = 8
    seed: int = 2026
    n_burn: int = 100
    n_keep: int = 4000
    start: complex = 1.1 + 0.7j
    green_n_max: int = 16
    green_tol: float = 1e-3
    s_min: Fraction = Fraction(-3)
    s_max: Fraction = Fraction(3)
    probe_q: int = 2
    orbit_len: int = 2
    include_critical: bool = True
    datum_sections: list = field(default_factory=lambda: ["w0", "w1"])
    datum_k: int = 1
    datum_d: int = 1
    series_f: str | None = None
    j_max: int = 30
    out_dir: str | None = None

    def canonical_items(self):
        items = [
            ("experiment.kind", self.kind),
            ("experiment.label", self.label),
            ("experiment.family", self.family or ""),
            ("experiment.r", repr(self.r)),
            ("tgrid.moduli", ",".join(repr(m) for m in self.moduli)),
            ("tgrid.phases", str(self.phases)),
            ("sampler.seed", str(self.seed)),
            ("sampler.n_burn", str(self.n_burn)),
            ("sampler.n_keep", str(self.n_keep)),
            ("sampler.start", repr(self.start)),
            ("green.n_max", str(self.green_n_max)),
            ("green.tol", repr(self.green_tol)),
            ("probes.s_min", str(self.s_min)),
            ("probes.s_max", str(self.s_max)),
            ("probes.q", str(self.probe_q)),
            ("probes.orbit_len", str(self.orbit_len)),
            ("probes.include_critical", str(self.include_critical)),
            ("datum.sections", ";".join(self.datum_sections)),
            ("datum.k", str(self.datum_k)),
            ("datum.d", str(self.datum_d)),
            ("series.f", self.series_f or ""),
            ("series.j_max", str(self.j_max)),
        ]
        return items

    def config_hash(self) -> str:
        blob = "\n".join(f"{k}={v}" for k, v in self.canonical_items())
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    @property
    def experiment_id(self) -> str:
        return f"{self.label}-{self.config_hash()}"


def _parse_bool(text: str) -> bool:
    if text.lower() in ("true", "yes", "1", "on"):
        return True
    if text.lower() in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def load_config(source: str, kind: str | None = None) -> ExperimentConfig:
    """Parse and validate an INI config (path or literal text).

    Unknown sections or keys are rejected; ``kind`` (from the CLI subcommand)
    must agree with the config when both are present.
    """
    cp = configparser.ConfigParser(interpolation=None)
    if os.path.exists(source):
        cp.read(source)
    else:
        cp.read_string(source)
    for section in cp.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key in cp[section]:
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
    exp = cp["experiment"] if cp.has_section("experiment") else {}
    cfg_kind = exp.get("kind", kind)
    if cfg_kind is None:
        raise ConfigError("experiment.kind missing and no subcommand given")
    if kind is not None and cfg_kind != kind:
        raise ConfigError(f"config kind {cfg_kind!r} does not match subcommand {kind!r}")
    if cfg_kind not in KINDS:
        raise ConfigError(f"unknown experiment kind {cfg_kind!r}")
    try:
        r = float(exp.get("r", "0.5"))
    except ValueError:
        raise ConfigError("experiment.r must be a float")
    if not 0.0 < r < 1.0:
        raise ConfigError(f"experiment.r must lie in (0, 1), got {r}")
    cfg = ExperimentConfig(
        kind=cfg_kind,
        label=exp.get("label", cfg_kind),
        family=exp.get("family"),
        r=r,
    )
    if cp.has_section("tgrid"):
        tg = cp["tgrid"]
        if "moduli" in tg:
            cfg.moduli = [float(x) for x in tg["moduli"].replace(";", ",").split(",") if x.strip()]
        else:
            a = float(tg.get("mod_start_exp", "-2"))
            b = float(tg.get("mod_stop_exp", "-6"))
            n = int(tg.get("mod_count", "5"))
            cfg.moduli = [10.0 ** e for e in np.linspace(a, b, n)]
        cfg.phases = int(tg.get("phases", "8"))
    if cp.has_section("sampler"):
        sm = cp["sampler"]
        cfg.seed = int(sm.get("seed", str(cfg.seed)))
        cfg.n_burn = int(sm.get("n_burn", str(cfg.n_burn)))
        cfg.n_keep = int(sm.get("n_keep", str(cfg.n_keep)))
        if "start" in sm:
            cfg.start = complex(sm["start"].replace("i", "j"))
    if cp.has_section("green"):
        cfg.green_n_max = int(cp["green"].get("n_max", str(cfg.green_n_max)))
        cfg.green_tol = float(cp["green"].get("tol", repr(cfg.green_tol)))
    if cp.has_section("probes"):
        pb = cp["probes"]
        cfg.s_min = Fraction(pb.get("s_min", "-3"))
        cfg.s_max = Fraction(pb.get("s_max", "3"))
        cfg.probe_q = int(pb.get("q", "2"))
        cfg.orbit_len = int(pb.get("orbit_len", "2"))
        cfg.include_critical = _parse_bool(pb.get("include_critical", "true"))
    if cp.has_section("datum"):
        dt = cp["datum"]
        if "sections" in dt:
            cfg.datum_sections = [s.strip() for s in dt["sections"].split(";") if s.strip()]
        cfg.datum_k = int(dt.get("k", "1"))
        cfg.datum_d = int(dt.get("d", "1"))
    if cp.has_section("series"):
        cfg.series_f = cp["series"].get("f")
        cfg.j_max = int(cp["series"].get("j_max", "30"))
    if cp.has_section("output"):
        cfg.out_dir = cp["output"].get("dir")
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    if cfg.kind in ("hybrid-converge", "lyap-slope", "na-measure") and not cfg.family:
        raise ConfigError(f"experiment.family is required for {cfg.kind}")
    if cfg.kind == "circle-demo" and not cfg.series_f:
        raise ConfigError("series.f is required for circle-demo")
    if cfg.kind in ("hybrid-converge", "lyap-slope"):
        if not cfg.moduli:
            raise ConfigError("a [tgrid] section is required")
        for m in cfg.moduli:
            if not 0.0 < m <= cfg.r:
                raise ConfigError(
                    f"grid modulus {m} outside the punctured disk of radius {cfg.r}")
        if cfg.phases < 1:
            raise ConfigError("tgrid.phases must be >= 1")
    if cfg.kind == "lyap-slope" and len(cfg.moduli) < 3:
        raise ConfigError("slope fit is degenerate with fewer than 3 grid moduli")


# -- result records --------------------------------------------------------------------


@dataclass
class ResultRecord:
    experiment_id: str
    kind: str
    label: str
    config_hash: str
    columns: list
    rows: list
    summary: dict
    created: str = ""

    def csv_text(self) -> str:
        buf = io.StringIO()
        buf.write(f"# schema: hybdyn/{self.kind}/{_SCHEMA_VERSION}\n")
        buf.write(f"# experiment: {self.experiment_id}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_fmt_cell(x) for x in row) + "\n")
        return buf.getvalue()

    def json_payload(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "kind": self.kind,
            "label": self.label,
            "config_hash": self.config_hash,
            "created": self.created,
            "summary": self.summary,
        }


def _fmt_cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x) + 0.0)  # normalizes -0.0
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return str(x)


def write_record(record: ResultRecord, out_dir: str) -> tuple:
    os.makedirs(out_dir, exist_ok=True)
    json_path = os.path.join(out_dir, f"{record.label}.json")
    csv_path = os.path.join(out_dir, f"{record.label}.csv")
    if os.path.exists(json_path):
        with open(json_path) as fh:
            old = json.load(fh)
        if old.get("config_hash") not in (None, record.config_hash):
            raise ConfigError(
                f"refusing to overwrite {json_path}: existing record has config "
                f"hash {old.get('config_hash')}, current config is {record.config_hash}")
    with open(csv_path, "w") as fh:
        fh.write(record.csv_text())
    with open(json_path, "w") as fh:
        json.dump(record.json_payload(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, json_path


def load_record(out_dir: str, config: ExperimentConfig) -> dict:
    """Load a stored record, refusing a config-hash mismatch."""
    json_path = os.path.join(out_dir, f"{config.label}.json")
    with open(json_path) as fh:
        payload = json.load(fh)
    if payload.get("config_hash") != config.config_hash():
        raise ConfigError(
            f"stored record {json_path} has config hash {payload.get('config_hash')}, "
            f"expected {config.config_hash()}")
    return payload


# -- statistics -------------------------------------------------------------------------


def fit_slope(xs, ys):
    """Ordinary least squares: (slope, intercept, slope stderr)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    n = len(xs)
    if n < 2:
        raise ConfigError("slope fit needs at least 2 points")
    xm, ym = xs.mean(), ys.mean()
    sxx = float(((xs - xm) ** 2).sum())
    if sxx == 0:
        raise ConfigError("slope fit needs at least 2 distinct abscissae")
    slope = float(((xs - xm) * (ys - ym)).sum()) / sxx
    intercept = ym - slope * xm
    if n > 2:
        resid = ys - (intercept + slope * xs)
        s2 = float((resid ** 2).sum()) / (n - 2)
        stderr = math.sqrt(s2 / sxx)
    else:
        stderr = 0.0
    return slope, intercept, stderr


def _cell_seed(base: int, j: int, p: int) -> int:
    return int(np.random.SeedSequence(entropy=base, spawn_key=(j, p)).generate_state(1)[0])


def _grid_cells(cfg: ExperimentConfig):
    cells = []
    for j, m in enumerate(cfg.moduli):
        for p in range(cfg.phases):
            angle = 2.0 * math.pi * p / cfg.phases
            t = m * complex(math.cos(angle), math.sin(angle))
            cells.append((j, p, m, t))
    return cells


def _map_cells(fn, cells, jobs: int):
    if jobs <= 1:
        return [fn(c) for c in cells]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, cells))


def _na_measure(cfg: ExperimentConfig):
    """Shared non-Archimedean half: family, probe tree, potential, measure."""
    family = parse_family(cfg.family)
    evaluator = berkovich.GreenEvaluator(family, cfg.r, n_max=cfg.green_n_max,
                                         tol=cfg.green_tol)
    tree = berkovich.build_probe_tree(family, s_min=cfg.s_min, s_max=cfg.s_max,
                                      q=cfg.probe_q, orbit_len=cfg.orbit_len,
                                      include_critical=cfg.include_critical)
    mu = berkovich.tree_ma(lambda v: evaluator.exponent(v)[0], tree, cfg.r)
    return family, evaluator, tree, mu


# -- the four experiments ----------------------------------------------------------------


def cmd_circle_demo(cfg: ExperimentConfig, jobs: int = 1) -> ResultRecord:
    """Convergence table of a series seminorm along |t| = r * 2^-j."""
    f = parse_series(cfg.series_f)
    r = cfg.r
    limit = hybrid.tau_eval(f, hybrid.HybridPoint.central(r))
    rows = []
    for j in range(cfg.j_max + 1):
        t = r * 2.0 ** (-j)
        value = hybrid.tau_eval(f, hybrid.HybridPoint.interior(t, r))
        rows.append([j, t, value, limit, abs(value - limit)])
    summary = {
        "series": str(f),
        "order": _fmt_cell(f.order()) if not f.is_zero() else "inf",
        "limit": limit,
        "final_error": rows[-1][4],
        "monotone_tail": all(rows[i + 1][4] <= rows[i][4] + 1e-15
                             for i in range(len(rows) // 2, len(rows) - 1)),
    }
    return ResultRecord(cfg.experiment_id, cfg.kind, cfg.label, cfg.config_hash(),
                        ["j", "abs_t", "value", "limit", "abs_error"], rows, summary,
                        created=_now())


def cmd_hybrid_converge(cfg: ExperimentConfig, jobs: int = 1) -> ResultRecord:
    """Integrals of a model function against the sampled equilibrium measures,
    compared with the atomic non-Archimedean target."""
    family, evaluator, tree, mu = _na_measure(cfg)
    datum = parse_sections(cfg.datum_sections, k=cfg.datum_k, d=cfg.datum_d)
    if not admissible.datum_regular(datum, cfg.moduli, seed=cfg.seed):
        raise ConfigError("datum sections share a zero on the sampled fibers")
    i0 = 0.0
    for pt, mass in mu.support():
        i0 += mass * admissible.g_na(datum, pt, cfg.r)

    def run_cell(cell):
        j, p, m, t = cell
        seed = _cell_seed(cfg.seed, j, p)
        rc = cxdyn.specialize(family, t, r=cfg.r)
        sample = cxdyn.backward_sample(rc, seed, cfg.n_burn, cfg.n_keep, cfg.start)
        n_factor = hybrid.scaling_n(hybrid.HybridPoint.interior(t, cfg.r))

        def model_value(pts):
            return n_factor * admissible.phi_canonical(
                datum, (pts[:, 0], pts[:, 1]), t)

        est = cxdyn.integrate_mu(rc, model_value, sample)
        return [j, p, t.real, t.imag, est.mean, est.stderr, est.n_excluded,
                abs(est.mean - i0)]

    rows = _map_cells(run_cell, _grid_cells(cfg), jobs)
    per_mod = []
    for j, m in enumerate(cfg.moduli):
        vals = [row[4] for row in rows if row[0] == j]
        errs = [row[7] for row in rows if row[0] == j]
        stderrs = [row[5] for row in rows if row[0] == j]
        per_mod.append({
            "abs_t": m,
            "integral_mean": float(np.mean(vals)),
            "abs_error": float(np.mean(errs)),
            "stderr": float(np.sqrt(np.mean(np.square(stderrs))) / math.sqrt(len(vals))),
        })
    errs = [pm["abs_error"] for pm in per_mod]
    tol = 3.0 * max(pm["stderr"] for pm in per_mod)
    summary = {
        "na_integral": i0,
        "per_modulus": per_mod,
        "final_abs_error": errs[-1],
        "monotone_within_stderr": all(errs[i + 1] <= errs[i] + tol
                                      for i in range(len(errs) - 1)),
        "measure_total_mass": mu.total_mass(),
        "leaf_mass_fraction": mu.leaf_mass_fraction(),
    }
    return ResultRecord(cfg.experiment_id, cfg.kind, cfg.label, cfg.config_hash(),
                        ["j", "phase", "re_t", "im_t", "integral", "stderr",
                         "n_excluded", "abs_error"], rows, summary, created=_now())


def cmd_lyap_slope(cfg: ExperimentConfig, jobs: int = 1) -> ResultRecord:
    """Lyapunov growth fit against log|t|^-1 plus the non-Archimedean value."""
    family, evaluator, tree, mu = _na_measure(cfg)
    lyap_na = berkovich.na_lyapunov(family, mu)
    na_ratio = abs(lyap_na) / abs(math.log(cfg.r))
    polynomial = family.is_polynomial()

    def run_cell(cell):
        j, p, m, t = cell
        seed = _cell_seed(cfg.seed, j, p)
        rc = cxdyn.specialize(family, t, r=cfg.r)
        sample = cxdyn.backward_sample(rc, seed, cfg.n_burn, cfg.n_keep, cfg.start)
        est = cxdyn.lyapunov_complex(rc, sample)
        oracle = cxdyn.przytycki_oracle(family, t) if polynomial else math.nan
        return [j, p, t.real, t.imag, est.mean, est.stderr, oracle, est.n_excluded]

    rows = _map_cells(run_cell, _grid_cells(cfg), jobs)
    xs, ys, per_mod = [], [], []
    for j, m in enumerate(cfg.moduli):
        vals = [row[4] for row in rows if row[0] == j]
        stderrs = [row[5] for row in rows if row[0] == j]
        mean = float(np.mean(vals))
        per_mod.append({"abs_t": m, "lyapunov": mean,
                        "stderr": float(np.sqrt(np.mean(np.square(stderrs)))
                                        / math.sqrt(len(vals)))})
        xs.append(math.log(1.0 / m))
        ys.append(mean)
    slope, intercept, slope_err = fit_slope(xs, ys)
    oracle_dev = None
    if polynomial:
        devs = [abs(row[4] - row[6]) / max(row[5], 1e-12) for row in rows]
        oracle_dev = float(max(devs))
    d = family.degree
    bd_bound = 0.5 * math.log(d)
    bd_ok = all(row[4] >= bd_bound - 3.0 * row[5] for row in rows)
    summary = {
        "slope": slope,
        "slope_stderr": slope_err,
        "intercept": intercept,
        "na_lyapunov": lyap_na,
        "na_ratio": na_ratio,
        "abs_slope_discrepancy": abs(abs(slope) - na_ratio),
        "observed_sign_relation": {
            "sign_slope": _sign(slope),
            "sign_na_over_logr": _sign(lyap_na / math.log(cfg.r)),
        },
        "briend_duval_ok": bool(bd_ok),
        "briend_duval_bound": bd_bound,
        "max_oracle_deviation_sigmas": oracle_dev,
        "per_modulus": per_mod,
        "measure_total_mass": mu.total_mass(),
        "leaf_mass_fraction": mu.leaf_mass_fraction(),
    }
    return ResultRecord(cfg.experiment_id, cfg.kind, cfg.label, cfg.config_hash(),
                        ["j", "phase", "re_t", "im_t", "lyapunov", "stderr",
                         "oracle", "n_excluded"], rows, summary, created=_now())


def cmd_na_measure(cfg: ExperimentConfig, jobs: int = 1) -> ResultRecord:
    """Probe tree, Green potential with error bounds, and the atomic measure."""
    family, evaluator, tree, mu = _na_measure(cfg)
    rows = []
    for i, v in enumerate(tree.vertices):
        q, bound = evaluator.exponent(v)
        rec = v.record()
        rows.append([i, rec["chart"], rec["center"], rec["s"],
                     float(q) * math.log(cfg.r), bound, mu.masses[i]])
    lyap = berkovich.na_lyapunov(family, mu)
    summary = {
        "measure": mu.records(),
        "total_mass": mu.total_mass(),
        "mass_at_gauss": mu.mass_at_gauss(),
        "leaf_mass_fraction": mu.leaf_mass_fraction(),
        "clipped_mass": mu.clipped,
        "convention_failures": mu.negative_report,
        "na_lyapunov": lyap,
        "na_ratio": abs(lyap) / abs(math.log(cfg.r)),
        "green_n_star": evaluator.n_star,
        "green_tail_bound": evaluator._tail_bound(evaluator.n_star),
        "resultant_valuation": _fmt_cell(berkovich.resultant_valuation(family)),
        "good_reduction_exponent": _fmt_cell(berkovich.good_reduction_exponent(family)),
    }
    return ResultRecord(cfg.experiment_id, cfg.kind, cfg.label, cfg.config_hash(),
                        ["vertex", "chart", "center", "s", "green_value",
                         "green_error_bound", "mass"], rows, summary, created=_now())


def _sign(x: float) -> int:
    return 0 if x == 0 else (1 if x > 0 else -1)


def _now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())


_RUNNERS = {
    "circle-demo": cmd_circle_demo,
    "hybrid-converge": cmd_hybrid_converge,
    "lyap-slope": cmd_lyap_slope,
    "na-measure": cmd_na_measure,
}


def run(cfg: ExperimentConfig, jobs: int = 1, out_dir: str | None = None) -> ResultRecord:
    """Run the experiment selected by the config; write files when an output
    directory is configured or given."""
    record = _RUNNERS[cfg.kind](cfg, jobs=jobs)
    target = out_dir or cfg.out_dir
    if target:
        write_record(record, target)
    return record
