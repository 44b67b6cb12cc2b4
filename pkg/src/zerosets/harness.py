"""Experiment scenarios: config -> zeros -> evaluation -> verdicts -> report + CSVs."""

from __future__ import annotations

import datetime as _dt
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, ZeroSetError
from .invertibility import (A_MAX, FIT_FLOOR, FIT_REL, GRID_CELLS, MIN_STEP, fit_a, fit_step,
                            log_probes, prop1_scan, sd_scan)
from .io import atomic_write, csv_text, ingest_zeroset
from .product_engine import (K_DEFAULT, NON_CONVERGED, LineEvaluator, ProductEvaluator,
                             ProductVariant, eval_grid, make_modified_variant)
from .summation import compensated_sum
from .weights import TREND_TOL, Weight, check_weight
from .zero_model import (ClusterSpec, ZeroSequence, exp_cluster_spec, gen_cluster_counterexample,
                         gen_clustered, gen_integer_lattice, gen_one_sided,
                         gen_perturbed_lattice, partition_near_real)
from .zero_stats import THRESHOLD_SLOPE, UNBOUNDED, UNBOUNDED_FACTOR, BOUNDED, theorem1_check

SCHEMA_VERSION = "1"
SCENARIOS = ("verify-invertible", "counterexample", "projection-equivalence",
             "prop1-witness", "weight-audit")
GENERATORS = ("integer_lattice", "one_sided", "perturbed_lattice", "cluster_counterexample",
              "clustered")
REQUIRED = {
    "verify-invertible": ("weight", "range"),
    "counterexample": ("weight", "range"),
    "projection-equivalence": ("weight", "range"),
    "prop1-witness": ("weight", "range"),
    "weight-audit": ("weight",),
}
STABILITY_TOL = 0.10          # fitted a stable across doublings: max/min - 1 <= this
MIN_STRICT_INCREASES = 3      # "fails at desk scale"
DECAY_FACTOR = 2.0
WINDOW_SAMPLES = 401
DEFAULT_M1 = (0.5, 1.0, 2.0, 4.0, 8.0)


# --- config ----------------------------------------------------------------

def parse_range(text: str) -> tuple[float, float]:
    parts = str(text).replace(",", ":").split(":")
    try:
        lo, hi = (float(eval_const(p)) for p in parts)
    except (ValueError, TypeError):
        raise ConfigError(f"range must look like a:b, got {text!r}") from None
    if not lo < hi:
        raise ConfigError(f"range {text!r} is empty")
    return lo, hi


def eval_const(p: str) -> float:
    p = p.strip()
    return math.e if p == "e" else float(p)


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in str(text).replace(";", ",").split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of numbers, got {text!r}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    zeroset: dict
    output_dir: str
    weight: dict | None = None
    m0: float = 1.0
    a_max: float = A_MAX
    range: tuple[float, float] | None = None
    probes: int = 24
    tol: float = 1e-2
    seed: int = 0
    k: float = K_DEFAULT
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_flat(cls, flat: dict, overrides: dict | None = None) -> "ExperimentConfig":
        """Build from dotted keys (see :func:`zerosets.io.load_config`), then validate."""
        d = {str(k): str(v) for k, v in flat.items()}
        d.update({k: str(v) for k, v in (overrides or {}).items() if v is not None})
        scenario = d.pop("scenario", None)
        if scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {', '.join(SCENARIOS)}; got {scenario!r}")
        zeroset = {k[8:]: v for k, v in d.items() if k.startswith("zeroset.")}
        weight = {k[7:]: v for k, v in d.items() if k.startswith("weight.")}
        rest = {k: v for k, v in d.items() if not k.startswith(("zeroset.", "weight."))}
        named = {k: v for k, v in weight.items() if "." in k}
        weight = {k: v for k, v in weight.items() if "." not in k}
        extra = {k: v for k, v in rest.items()
                 if k not in ("output_dir", "m0", "a_max", "range", "probes", "tol", "seed", "k")}
        extra.update({f"weight.{k}": v for k, v in named.items()})
        try:
            cfg = cls(scenario=scenario, zeroset=zeroset,
                      output_dir=rest.get("output_dir", ""),
                      weight=weight or None,
                      m0=float(rest.get("m0", 1.0)),
                      a_max=float(rest.get("a_max", A_MAX)),
                      range=parse_range(rest["range"]) if "range" in rest else None,
                      probes=int(rest.get("probes", 24)),
                      tol=float(rest.get("tol", 1e-2)),
                      seed=int(rest.get("seed", 0)),
                      k=float(rest.get("k", K_DEFAULT)),
                      extra=extra)
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"bad config value: {e}") from None
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if not self.output_dir:
            raise ConfigError("output_dir is required (config key or --out)")
        for key in REQUIRED[self.scenario]:
            if getattr(self, key) is None:
                raise ConfigError(f"scenario {self.scenario} requires '{key}'")
        if self.scenario != "weight-audit":
            if "path" not in self.zeroset and self.zeroset.get("generator") not in GENERATORS:
                raise ConfigError("zeroset needs 'path' or a 'generator' in "
                                  + ", ".join(GENERATORS))
        if self.range is not None and self.range[0] < 2 and self.scenario != "weight-audit":
            raise ConfigError("range must start at x >= 2")
        if not (self.tol > 0 and self.a_max > FIT_FLOOR and self.m0 > 0 and self.k > 1):
            raise ConfigError("need tol > 0, a_max > 1e-3, m0 > 0, k > 1")
        if self.probes < 1:
            raise ConfigError("probes must be >= 1")
        if self.weight is not None:
            try:
                Weight.from_spec(self.weight)
            except (KeyError, ValueError) as e:
                raise ConfigError(f"bad weight spec: {e}") from None

    def echo(self) -> dict:
        """Flat dotted-key view; with an output dir, from_flat rebuilds this config.

        ``output_dir`` is left out: where a run is written does not change it.
        """
        out = {"scenario": self.scenario, "m0": repr(self.m0),
               "a_max": repr(self.a_max), "probes": str(self.probes), "tol": repr(self.tol),
               "seed": str(self.seed), "k": repr(self.k)}
        if self.range is not None:
            out["range"] = f"{self.range[0]!r}:{self.range[1]!r}"
        out.update({f"zeroset.{k}": v for k, v in self.zeroset.items()})
        out.update({f"weight.{k}": v for k, v in (self.weight or {}).items()})
        out.update(self.extra)
        return dict(sorted(out.items()))

    def get(self, key: str, default=None):
        return self.extra.get(key, default)

    def weight_obj(self) -> Weight:
        return Weight.from_spec(self.weight)


def build_zeroset(cfg: ExperimentConfig) -> tuple[ZeroSequence, ClusterSpec | None]:
    z = cfg.zeroset
    if "path" in z:
        return ingest_zeroset(z["path"]), None
    gen = z["generator"]
    try:
        n = int(z.get("n", 0)) if gen != "clustered" else 0
        if gen == "integer_lattice":
            return gen_integer_lattice(n), None
        if gen == "one_sided":
            return gen_one_sided(n), None
        if gen == "perturbed_lattice":
            band = Weight.from_spec(cfg.weight) if cfg.weight else Weight.log(1.0)
            return gen_perturbed_lattice(n, band, cfg.m0, cfg.seed), None
        if gen == "cluster_counterexample":
            j_max = int(z.get("j_max", 9))
            sp = float(z["spacing"]) if "spacing" in z else None
            return gen_cluster_counterexample(n, j_max, sp), exp_cluster_spec(j_max)
        spec = ClusterSpec(_floats(z["centers"]), tuple(int(m) for m in _floats(z["multiplicities"])))
        return gen_clustered(spec, float(z.get("spacing", 0.1))), spec
    except KeyError as e:
        raise ConfigError(f"generator {gen} needs key zeroset.{e.args[0]}") from None
    except ValueError as e:
        if isinstance(e, ZeroSetError):
            raise
        raise ConfigError(f"bad generator parameter: {e}") from None


# --- report ----------------------------------------------------------------

@dataclass
class ExperimentReport:
    payload: dict
    tables: dict[str, tuple[list[str], list[tuple]]]
    runtime: dict

    @property
    def verdict(self) -> str:
        return self.payload["verdict"]

    def document(self) -> dict:
        return {**self.payload, "runtime": self.runtime}

    def payload_json(self) -> str:
        return dumps(self.payload)


def jsonable(v):
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [jsonable(x) for x in v.tolist()]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


def dumps(doc) -> str:
    return json.dumps(jsonable(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def emit_plotdata(report: ExperimentReport, out_dir) -> list[Path]:
    """Write every table of the report as ``<name>.csv``; returns the paths."""
    out = []
    for name in sorted(report.tables):
        header, rows = report.tables[name]
        path = Path(out_dir) / f"{name}.csv"
        atomic_write(path, csv_text(header, rows))
        out.append(path)
    return out


def write_report(report: ExperimentReport, out_dir) -> Path:
    path = Path(out_dir) / "report.json"
    atomic_write(path, dumps(report.document()))
    emit_plotdata(report, out_dir)
    return path


# --- shared pieces ----------------------------------------------------------

def nested_ranges(x_min: float, x_max: float, start: float) -> list[float]:
    xs = []
    x = x_max
    while x >= start * (1 - 1e-12) and x > x_min:
        xs.append(x)
        x /= 2.0
    return xs[::-1]


def _fit_table(f, x_min: float, ends: list[float], grid: np.ndarray, a_max: float):
    """fit_a on [x_min, X] for each X in ``ends``, probes = grid points <= X."""
    rows = []
    for X in ends:
        pr = grid[(grid >= x_min) & (grid <= X * (1 + 1e-12))]
        rows.append((X, fit_a(f, (x_min, X), 0, a_max, probes=pr)))
    return rows


def _trace(zs, variant, cfg, xs) -> list[tuple]:
    res = eval_grid(zs, variant, list(xs), cfg.tol, cfg.k)
    return [(float(x), r.value, r.status) for x, r in zip(xs, res)]


def fit_rows(fits):
    return [(X, a if a is not None else math.inf) for X, a in fits]


def _thresholds(cfg) -> dict:
    return {"trend_tol_weight": TREND_TOL, "threshold_slope": THRESHOLD_SLOPE,
            "unbounded_slope": UNBOUNDED_FACTOR * THRESHOLD_SLOPE,
            "stability_tol": STABILITY_TOL, "min_strict_increases": MIN_STRICT_INCREASES,
            "decay_factor": DECAY_FACTOR, "fit_floor": FIT_FLOOR, "fit_rel": FIT_REL,
            "a_max": cfg.a_max, "grid_cells": GRID_CELLS, "min_step": MIN_STEP,
            "tol": cfg.tol, "k": cfg.k}


def desk_scale_failure(values: list[float | None]) -> bool:
    """Fitted a nondecreasing across nested ranges with >= 3 strict increases."""
    v = [math.inf if a is None else a for a in values]
    if any(b < a for a, b in zip(v, v[1:])):
        return False
    return sum(b > a for a, b in zip(v, v[1:])) >= MIN_STRICT_INCREASES


def _stats_range(cfg, default):
    return parse_range(cfg.get("stats_range")) if cfg.get("stats_range") else default


# --- scenarios --------------------------------------------------------------

def _verify_invertible(cfg, zs, spec):
    w = cfg.weight_obj()
    p = partition_near_real(zs, w, cfg.m0)
    x_min, x_max = cfg.range
    t1 = theorem1_check(p, zs, w, _stats_range(cfg, (max(math.e, x_min), x_max)),
                        float(cfg.get("threshold_slope", THRESHOLD_SLOPE)))
    f = LineEvaluator(zs, None, cfg.tol, cfg.k)
    ends = nested_ranges(x_min, x_max, x_max / 2 ** int(cfg.get("doublings", 2)))
    grid = np.unique(np.concatenate([log_probes(x_min, x_max, cfg.probes), ends]))
    fits = _fit_table(f, x_min, ends, grid, cfg.a_max)
    vals = [a for _, a in fits]
    finite = all(a is not None for a in vals)
    stable = finite and max(vals) <= (1 + STABILITY_TOL) * min(vals)
    a_fit = vals[-1] if finite else cfg.a_max
    scan = sd_scan(f, grid, a_fit, fit_step(cfg.a_max))
    passed = t1.verdict == BOUNDED and finite and stable and scan.passed
    results = {"theorem1": t1.to_dict(), "fit_a": [{"x_max": X, "a": a} for X, a in fits],
               "fit_a_finite": finite, "fit_a_stable": stable,
               "sd_scan": {"a": scan.a, "pass_fraction": scan.pass_fraction,
                           "flagged_probes": scan.flagged}}
    tables = {"ratio_profile": (["x", "m_re", "l", "ratio"], t1.profile.rows()),
              "fit_a": (["x_max", "fitted_a"], fit_rows(fits)),
              "sd_witnesses": _witness_table(scan.probes)}
    return passed, results, tables, grid


def _witness_table(ws):
    return (["x", "x_prime", "log_mod", "threshold", "found", "flagged"],
            [(w.x, w.x_prime, w.log_mod, w.threshold, int(w.found), w.flagged) for w in ws])


def _counterexample(cfg, zs, spec):
    w = cfg.weight_obj()
    p = partition_near_real(zs, w, cfg.m0)
    x_min, x_max = cfg.range
    t1 = theorem1_check(p, zs, w, _stats_range(cfg, (max(math.e, x_min), x_max)),
                        float(cfg.get("threshold_slope", THRESHOLD_SLOPE)))
    f = LineEvaluator(zs, None, cfg.tol, cfg.k)
    centers = [] if spec is None else [c for c in spec.centers if x_min <= c <= x_max]
    ends = nested_ranges(x_min, x_max, float(cfg.get("fit_start", 16)))
    grid = np.unique(np.concatenate([log_probes(x_min, x_max, cfg.probes), ends, centers]))
    fits = _fit_table(f, x_min, ends, grid, cfg.a_max)
    fails = desk_scale_failure([a for _, a in fits])
    a_last = fits[-1][1] if fits and fits[-1][1] is not None else cfg.a_max
    scan = sd_scan(f, grid, a_last, fit_step(cfg.a_max))

    near_rows, mod_rows = [], []
    decay_ok = spec is not None
    prev = math.inf
    if spec is not None:
        for j, (xc, m) in enumerate(zip(spec.centers, spec.multiplicities), start=1):
            xs = np.linspace(xc - 1.0, xc + 1.0, WINDOW_SAMPLES)
            vals = f.localize(xc, 1.0)(xs)
            usable = int(np.sum(~np.isnan(vals)))
            mx = float(np.nanmax(vals)) if usable else math.nan
            lx = float(w(xc))
            n_j = math.floor(m / lx)
            d_j = n_j * lx
            ok = usable > 0 and mx <= -d_j / DECAY_FACTOR and mx < prev
            decay_ok &= ok
            prev = mx
            near_rows.append((j, xc, m, lx, n_j, mx, -d_j, usable, int(ok)))
            var = make_modified_variant(zs, p, xc)
            fj = LineEvaluator(zs, var, cfg.tol, cfg.k)
            vj = fj.localize(xc, 1.0)(xs)
            mod_rows.append((j, xc, var.modification.m_j,
                             float(np.nanmax(vj)) if np.any(~np.isnan(vj)) else math.nan,
                             float(vj[WINDOW_SAMPLES // 2])))
    passed = t1.verdict == UNBOUNDED and fails and decay_ok
    results = {"theorem1": t1.to_dict(),
               "fit_a": [{"x_max": X, "a": a} for X, a in fits],
               "fails_at_desk_scale": fails,
               "sd_scan": {"a": scan.a, "pass_fraction": scan.pass_fraction,
                           "flagged_probes": scan.flagged},
               "decay_consistent": decay_ok,
               "near_cluster": [dict(zip(("j", "x_j", "m_j", "l_x_j", "n_j", "max_log_mod",
                                          "decay_bound", "usable", "ok"), r)) for r in near_rows],
               "modified": [dict(zip(("j", "x_j", "m_j", "max_log_mod", "log_mod_at_center"), r))
                            for r in mod_rows]}
    tables = {"ratio_profile": (["x", "m_re", "l", "ratio"], t1.profile.rows()),
              "fit_a": (["x_max", "fitted_a"], fit_rows(fits)),
              "sd_witnesses": _witness_table(scan.probes),
              "near_cluster": (["j", "x_j", "m_j", "l_x_j", "n_j", "max_log_mod", "decay_bound",
                                "usable", "ok"], near_rows),
              "modified": (["j", "x_j", "m_j", "max_log_mod", "log_mod_at_center"], mod_rows)}
    return passed, results, tables, grid


def _projection_equivalence(cfg, zs, spec):
    w = cfg.weight_obj()
    p = partition_near_real(zs, w, cfg.m0)
    f = LineEvaluator(zs, None, cfg.tol, cfg.k)
    f1 = LineEvaluator(zs, ProductVariant.projected(p), cfg.tol, cfg.k)
    xs = log_probes(*cfg.range, cfg.probes)
    a0 = fit_a(f, cfg.range, 0, cfg.a_max, probes=xs)
    a1 = fit_a(f1, cfg.range, 0, cfg.a_max, probes=xs)
    a_common = max(a for a in (a0, a1, FIT_FLOOR) if a is not None) \
        if (a0 is not None and a1 is not None) else cfg.a_max
    step = fit_step(cfg.a_max)
    s0 = sd_scan(f, xs, a_common, step)
    s1 = sd_scan(f1, xs, a_common, step)
    agree = s0.passed == s1.passed
    results = {"fit_a_psi": a0, "fit_a_psi1": a1, "a_common": a_common,
               "psi": {"pass_fraction": s0.pass_fraction, "flagged_probes": s0.flagged},
               "psi1": {"pass_fraction": s1.pass_fraction, "flagged_probes": s1.flagged},
               "verdicts_agree": agree, "near_real_count": int(p.m_prime.size),
               "far_count": int(p.m_double_prime.size)}
    h, r0 = _witness_table(s0.probes)
    _, r1 = _witness_table(s1.probes)
    tables = {"fit_a": (["function", "fitted_a"], [("psi", a0 if a0 is not None else math.inf),
                                                   ("psi1", a1 if a1 is not None else math.inf)]),
              "sd_witnesses": (["function"] + h, [("psi",) + r for r in r0]
                               + [("psi1",) + r for r in r1])}
    return agree, results, tables, xs


def comparison_slack(zs: ZeroSequence, p, w: Weight, m0: float) -> float:
    """sum over near-real zeros of (1/2) ln(1 + M0^2 l(|alpha|)^2 / alpha^2)."""
    a = zs.re[p.m_prime]
    return float(compensated_sum(0.5 * np.log1p((m0 * np.asarray(w(np.abs(a)))) ** 2 / a ** 2)))


def _prop1(cfg, zs, spec):
    w = cfg.weight_obj()
    p = partition_near_real(zs, w, cfg.m0)
    v1 = ProductVariant.projected(p)
    f1 = LineEvaluator(zs, v1, cfg.tol, cfg.k)
    xs = log_probes(*cfg.range, cfg.probes)
    mode = cfg.get("prop1.search", "real_interval")
    sweep, m1_min, rows = [], None, []
    for m1 in _floats(cfg.get("m1_values", ",".join(map(str, DEFAULT_M1)))):
        ws = prop1_scan(f1, xs, m1, w, mode)
        frac = sum(x.found for x in ws) / len(ws)
        sweep.append({"m1": m1, "found_fraction": frac,
                      "flagged_probes": sum(1 for x in ws if x.flagged)})
        rows += [(m1, x.x, x.z_prime.re, x.z_prime.im, x.log_mod, x.bound, int(x.found),
                  x.flagged) for x in ws]
        if frac == 1.0:
            m1_min = m1
            break
    slack = comparison_slack(zs, p, w, cfg.m0)
    ev, ev1 = ProductEvaluator(zs, None, cfg.k), ProductEvaluator(zs, v1, cfg.k)
    r0, r1 = ev.canonical_many(xs, cfg.tol), ev1.canonical_many(xs, cfg.tol)
    cmp_rows, usable, held = [], 0, 0
    for x, a, b in zip(xs, r0, r1):
        ok_eval = a.status != NON_CONVERGED and b.status != NON_CONVERGED
        rhs = a.value + slack + a.tail_estimate + b.tail_estimate
        ok = ok_eval and (b.value == -math.inf or b.value <= rhs)
        usable += ok_eval
        held += ok
        cmp_rows.append((float(x), b.value, a.value, slack, rhs, int(ok_eval), int(ok)))
    comparison_ok = held == len(xs)
    passed = m1_min is not None and comparison_ok
    results = {"search": mode, "m1_sweep": sweep, "m1_min": m1_min,
               "comparison": {"slack": slack, "usable_fraction": usable / len(xs),
                              "held_fraction": held / len(xs), "holds": comparison_ok}}
    tables = {"prop1_witnesses": (["m1", "x", "re", "im", "log_mod", "bound", "found", "flagged"],
                                  rows),
              "comparison": (["x", "log_psi1", "log_psi", "slack", "rhs", "usable", "holds"],
                             cmp_rows)}
    return passed, results, tables, xs


def _weight_audit(cfg, zs, spec):
    t_max = float(cfg.get("t_max", 1e6))
    k = float(cfg.get("doubling_k", 2.0))
    named = {"main": dict(cfg.weight)}
    for key, v in cfg.extra.items():
        if key.startswith("weight."):
            name, sub = key[7:].split(".", 1)
            named.setdefault(name, {})[sub] = v
    out, rows, ok_all = {}, [], True
    for name in sorted(named):
        spec_d = dict(named[name])
        expect = spec_d.pop("expect", "pass")
        rep = check_weight(Weight.from_spec(spec_d), t_max, k)
        got = "pass" if rep.passed else "fail"
        ok_all &= got == expect
        out[name] = {"spec": spec_d, "expect": expect, "result": got, **rep.to_dict()}
        for c in (rep.cond1, rep.cond2, rep.cond3):
            rows.append((name, c.name, c.limit_estimate, c.trend_slope, c.value_at_tmax,
                         int(c.passed)))
    tables = {"weight_audit": (["weight", "condition", "limit_estimate", "trend_slope",
                                "value_at_tmax", "passed"], rows)}
    return ok_all, {"weights": out}, tables, None


RUNNERS = {"verify-invertible": _verify_invertible, "counterexample": _counterexample,
           "projection-equivalence": _projection_equivalence, "prop1-witness": _prop1,
           "weight-audit": _weight_audit}


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    t0 = time.perf_counter()
    started = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    zs, spec = (None, None) if cfg.scenario == "weight-audit" else build_zeroset(cfg)
    passed, results, tables, probes = RUNNERS[cfg.scenario](cfg, zs, spec)
    if zs is not None:
        n_trace = int(cfg.get("trace_points", 256))
        lo, hi = cfg.range
        xs = np.geomspace(lo, hi, n_trace) if n_trace > 0 else np.zeros(0)
        variant = None
        tr = _trace(zs, variant, cfg, xs)
        tables["trace"] = (["x", "log_abs_psi", "status"], tr)
        results["trace_usable_fraction"] = (
            sum(r[2] != NON_CONVERGED for r in tr) / len(tr) if tr else 1.0)
        results["zeroset"] = {"count": len(zs), "coverage_radius": zs.coverage_radius}
    payload = {"schema_version": SCHEMA_VERSION, "artifact_version": __version__,
               "scenario": cfg.scenario, "config": cfg.echo(), "thresholds": _thresholds(cfg),
               "verdict": "pass" if passed else "fail", "results": jsonable(results)}
    runtime = {"started_utc": started, "wall_seconds": round(time.perf_counter() - t0, 3),
               "output_dir": cfg.output_dir}
    return ExperimentReport(jsonable(payload), tables, runtime)
