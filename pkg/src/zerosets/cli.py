"""Command-line front end.

    zerosets gen        --config C [--out DIR]          write zeros.csv
    zerosets eval       --config C [--points LIST]      ln|psi| table (eval.csv)
    zerosets sd-fit     --config C [--doublings N]      fitted a per nested range
    zerosets stats      --config C                      m_Re / l profile and verdict
    zerosets experiment --config C [--scenario NAME]    full scenario report

Exit codes: 0 success, 1 verdict "fail", 2 config or input error, 3 internal error.
"""

from __future__ import annotations

import argparse
import math
import sys
import traceback
from pathlib import Path

import numpy as np

from .errors import ZeroSetError
from .harness import (ExperimentConfig, SCENARIOS, build_zeroset, dumps, parse_range,
                      run_experiment, write_report, nested_ranges, fit_rows)
from .invertibility import fit_a, log_probes
from .io import atomic_write, csv_text, load_config, write_zeroset_csv
from .product_engine import LineEvaluator, ProductVariant, eval_grid
from .zero_model import partition_near_real
from .zero_stats import BOUNDED, theorem1_check

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="INI config file")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.add_argument("--seed", type=int)
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--tol", type=float)
    p.add_argument("--range", dest="range_", metavar="A:B", help="probe range, e.g. 2:1000")
    p.add_argument("--probes", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zerosets", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("gen", help="generate or ingest a zero set and write zeros.csv"))
    p = sub.add_parser("eval", help="evaluate ln|psi| at points")
    _common(p)
    p.add_argument("--points", help="comma-separated points, complex allowed (0.25+0.25j)")
    p.add_argument("--variant", choices=("plain", "projected", "half_projected"),
                   default="plain")
    p = sub.add_parser("sd-fit", help="fit the slow-decrease constant over nested ranges")
    _common(p)
    p.add_argument("--doublings", type=int, default=2)
    _common(sub.add_parser("stats", help="near-real counting profile and bound verdict"))
    _common(sub.add_parser("experiment", help="run a named scenario end to end"))
    return ap


def _config(args) -> ExperimentConfig:
    flat = load_config(args.config)
    over = {"output_dir": args.out, "seed": args.seed, "scenario": args.scenario,
            "tol": args.tol, "range": args.range_, "probes": args.probes}
    return ExperimentConfig.from_flat(flat, over)


def _points(text: str) -> list[complex]:
    out = []
    for tok in text.split(","):
        tok = tok.strip().replace(" ", "")
        if tok:
            try:
                out.append(complex(tok))
            except ValueError:
                raise ZeroSetError(f"not a point: {tok!r}") from None
    return out


def cmd_gen(args, cfg) -> int:
    zs, _ = build_zeroset(cfg)
    path = Path(cfg.output_dir) / "zeros.csv"
    write_zeroset_csv(zs, path)
    print(f"{len(zs)} zeros, coverage radius {zs.coverage_radius:g} -> {path}")
    return EXIT_OK


def cmd_eval(args, cfg) -> int:
    zs, _ = build_zeroset(cfg)
    if args.points:
        pts = _points(args.points)
    elif cfg.get("points"):
        pts = _points(cfg.get("points"))
    elif cfg.range is not None:
        pts = [complex(x) for x in log_probes(*cfg.range, cfg.probes)]
    else:
        raise ZeroSetError("eval needs --points, a 'points' key or a range")
    variant = None
    if args.variant != "plain":
        p = partition_near_real(zs, cfg.weight_obj(), cfg.m0)
        variant = getattr(ProductVariant, args.variant)(p)
    res = eval_grid(zs, variant, pts, cfg.tol, cfg.k)
    rows = [(z.real, z.imag, r.value, r.status, r.tail_estimate, r.truncation_radius,
             r.drift_steps) for z, r in zip(pts, res)]
    path = Path(cfg.output_dir) / "eval.csv"
    atomic_write(path, csv_text(["re", "im", "log_abs", "status", "tail_estimate",
                                 "truncation_radius", "drift_steps"], rows))
    for r in rows:
        print(f"{r[0]:g}{r[1]:+g}j  {r[2]!r}  {r[3]}  tail={r[4]:.3g}  drift_steps={r[6]}")
    return EXIT_OK


def cmd_sd_fit(args, cfg) -> int:
    if cfg.range is None:
        raise ZeroSetError("sd-fit needs a range")
    zs, _ = build_zeroset(cfg)
    f = LineEvaluator(zs, None, cfg.tol, cfg.k)
    x_min, x_max = cfg.range
    ends = nested_ranges(x_min, x_max, x_max / 2 ** args.doublings)
    grid = np.unique(np.concatenate([log_probes(x_min, x_max, cfg.probes), ends]))
    fits = []
    for X in ends:
        pr = grid[grid <= X * (1 + 1e-12)]
        fits.append((X, fit_a(f, (x_min, X), 0, cfg.a_max, probes=pr)))
    out = Path(cfg.output_dir)
    atomic_write(out / "fit_a.csv", csv_text(["x_max", "fitted_a"], fit_rows(fits)))
    atomic_write(out / "sd_fit.json", dumps({"config": cfg.echo(),
                                             "fit_a": [{"x_max": X, "a": a} for X, a in fits]}))
    for X, a in fits:
        print(f"[{x_min:g}, {X:g}]  a = {'not found' if a is None else f'{a:.4g}'}")
    return EXIT_OK if all(a is not None for _, a in fits) else EXIT_FAIL


def cmd_stats(args, cfg) -> int:
    if cfg.range is None:
        raise ZeroSetError("stats needs a range")
    zs, _ = build_zeroset(cfg)
    w = cfg.weight_obj()
    p = partition_near_real(zs, w, cfg.m0)
    rng = parse_range(cfg.get("stats_range")) if cfg.get("stats_range") else \
        (max(math.e, cfg.range[0]), cfg.range[1])
    res = theorem1_check(p, zs, w, rng)
    out = Path(cfg.output_dir)
    atomic_write(out / "ratio_profile.csv",
                 csv_text(["x", "m_re", "l", "ratio"], res.profile.rows()))
    atomic_write(out / "stats.json", dumps({"config": cfg.echo(), **res.to_dict()}))
    print(f"{res.verdict}: sup ratio {res.profile.sup_ratio:.4g}, "
          f"trend slope {res.profile.trend_slope:.4g}")
    return EXIT_OK if res.verdict == BOUNDED else EXIT_FAIL


def cmd_experiment(args, cfg) -> int:
    rep = run_experiment(cfg)
    path = write_report(rep, cfg.output_dir)
    print(f"{cfg.scenario}: {rep.verdict} ({rep.runtime['wall_seconds']} s) -> {path}")
    return EXIT_OK if rep.verdict == "pass" else EXIT_FAIL


COMMANDS = {"gen": cmd_gen, "eval": cmd_eval, "sd-fit": cmd_sd_fit, "stats": cmd_stats,
            "experiment": cmd_experiment}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except ZeroSetError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
