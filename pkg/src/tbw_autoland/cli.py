"""Command-line entry point: ``tbw-autoland {trim,train,evaluate,sweep,compare}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .aircraft import AeroModel, load_model
from .io import (
    read_metrics_csv, write_comparison_csv, write_history_csv, write_json,
    write_learning_curve_csv, write_metrics_csv,
)
from .rl import QTable, StateGrid
from .scenarios import CONTROLLERS, SCENARIOS, ScenarioConfig, compare, evaluate, manifest, robustness_sweep
from .training import LearningSchedule, train
from .trim import linearize_longitudinal, solve_trim


def _model(name: str) -> AeroModel:
    if name == "nominal":
        return AeroModel.nominal()
    if name == "uncertain":
        return AeroModel.uncertain(corrected=True)
    if name == "uncertain_literal":
        return AeroModel.uncertain(corrected=False)
    return load_model(name)


def _scenario(args, **overrides) -> ScenarioConfig:
    cfg = ScenarioConfig.load(args.config) if getattr(args, "config", None) else ScenarioConfig()
    return replace(cfg, **overrides)


def cmd_trim(args):
    model = _model(args.model)
    trim = solve_trim(model, V=args.V, h=args.h, gamma=math.radians(args.gamma))
    modes = linearize_longitudinal(model, trim)
    out = {
        "V": trim.V, "h": trim.h, "gamma_deg": args.gamma,
        "alpha_deg": math.degrees(trim.alpha_trim), "delta_E_deg": math.degrees(trim.delta_E_trim),
        "thrust_N": trim.thrust_trim, "thrust_lbf": trim.thrust_lbf,
        "short_period": [[z.real, z.imag] for z in modes.short_period],
        "phugoid": [[z.real, z.imag] for z in modes.phugoid],
    }
    if args.json:
        print(json.dumps(out, indent=2))
    else:
        print(f"alpha   {out['alpha_deg']:.4f} deg")
        print(f"elevator {out['delta_E_deg']:.4f} deg")
        print(f"thrust  {trim.thrust_trim:.1f} N ({trim.thrust_lbf:.1f} lbf)")
        print("short period " + ", ".join(f"{z:.4f}" for z in modes.short_period))
        print("phugoid      " + ", ".join(f"{z:.4f}" for z in modes.phugoid))
    return 0


def _train_settings(path):
    if not path:
        return {}, {}, {}
    with open(path) as fh:
        data = json.load(fh)
    sched = {k: data[k] for k in LearningSchedule.__dataclass_fields__ if k in data}
    grid = {k: data[k] for k in ("sigma_theta", "sigma_rate", "radius") if k in data}
    extra = {k: data[k] for k in ("td_mode", "credit", "theta_des_deg") if k in data}
    return sched, grid, extra


def cmd_train(args):
    sched_kw, grid_kw, extra = _train_settings(args.config)
    schedule = LearningSchedule(**sched_kw)
    grid = StateGrid(**grid_kw)
    episodes = args.episodes if args.episodes is not None else schedule.episodes
    result = train(args.method, schedule, seed=args.seed, episodes=episodes, grid=grid, **extra)
    out = Path(args.out)
    result.table.save(out)
    curve = Path(args.curve) if args.curve else out.with_name("learning_curve.csv")
    write_learning_curve_csv(curve, result.returns)
    write_json(out.with_name(out.stem + "_manifest.json"),
               manifest({"method": args.method, "episodes": episodes, "schedule": schedule.to_dict(),
                         "grid": grid_kw, **extra}, args.seed))
    tail = result.returns[-min(len(result.returns), 1000):]
    if len(tail):
        print(f"{args.method}: {episodes} episodes, final mean return {tail.mean():.4g}")
    print(f"table written to {out}")
    return 0


def _table(path):
    return QTable.load(path) if path else None


def cmd_evaluate(args):
    cfg = _scenario(args, kind=args.scenario, controller=args.controller, seed=args.seed)
    result = evaluate(cfg, _table(args.table))
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    write_history_csv(outdir / "history.csv", result.history)
    write_metrics_csv(outdir / "metrics.csv", [result])
    write_json(outdir / "manifest.json", manifest(cfg, cfg.seed, {"table": args.table}))
    print(f"TE_theta {result.TE_theta:.4f} deg  TE_h {result.TE_h:.4f} m  CE {result.CE:.4f} deg  "
          f"{result.reason}")
    return 0 if not result.diverged else 2


def cmd_sweep(args):
    base = _scenario(args, kind="sweep", controller=args.controller, seed=args.seed)
    results = robustness_sweep(args.controller, _table(args.table), base, workers=args.workers)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    write_metrics_csv(outdir / "metrics.csv", results)
    write_json(outdir / "manifest.json", manifest(base, base.seed, {"table": args.table, "runs": len(results)}))
    te = np.array([r.TE_theta for r in results])
    print(f"{len(results)} runs, {sum(r.diverged for r in results)} diverged, "
          f"TE_theta {np.nanmin(te):.4f}..{np.nanmax(te):.4f} deg")
    return 0


def cmd_compare(args):
    rows = []
    if args.metrics:
        for p in args.metrics:
            rows.extend(read_metrics_csv(p))
    else:
        tables = {"fql": _table(args.fql_table), "ql": _table(args.ql_table), "di": None}
        for kind in SCENARIOS:
            for c in CONTROLLERS:
                if c != "di" and tables[c] is None:
                    continue
                rows.append(evaluate(_scenario(args, kind=kind, controller=c, seed=args.seed),
                                     tables[c], keep_history=False).row())
    report = compare(rows)
    print(report["text"])
    if args.outdir:
        outdir = Path(args.outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        write_comparison_csv(outdir / "comparison.csv", report["rows"])
        if not args.metrics:
            write_metrics_csv(outdir / "metrics.csv", rows)
        (outdir / "comparison.txt").write_text(report["text"] + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tbw-autoland", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("trim", help="trim and longitudinal modes")
    t.add_argument("--V", type=float, default=160.0)
    t.add_argument("--h", type=float, default=100.0)
    t.add_argument("--gamma", type=float, default=0.0, help="flight-path angle, deg")
    t.add_argument("--model", default="nominal", help="nominal, uncertain, uncertain_literal or a JSON file")
    t.add_argument("--json", action="store_true")
    t.set_defaults(func=cmd_trim)

    tr = sub.add_parser("train", help="train a Q-table")
    tr.add_argument("--method", choices=("fql", "ql"), required=True)
    tr.add_argument("--episodes", type=int)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--out", required=True)
    tr.add_argument("--curve", help="learning curve CSV (default: next to --out)")
    tr.add_argument("--config", help="JSON with schedule, grid and update settings")
    tr.set_defaults(func=cmd_train)

    ev = sub.add_parser("evaluate", help="fly one landing scenario")
    ev.add_argument("--scenario", choices=SCENARIOS, required=True)
    ev.add_argument("--controller", choices=CONTROLLERS, required=True)
    ev.add_argument("--table")
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--config")
    ev.add_argument("--outdir", default=".")
    ev.set_defaults(func=cmd_evaluate)

    sw = sub.add_parser("sweep", help="coefficient x speed robustness grid")
    sw.add_argument("--controller", choices=CONTROLLERS, default="fql")
    sw.add_argument("--table")
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--config")
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--outdir", default=".")
    sw.set_defaults(func=cmd_sweep)

    cp = sub.add_parser("compare", help="scenario x controller comparison table")
    cp.add_argument("--metrics", nargs="*", help="metrics.csv files to tabulate instead of flying runs")
    cp.add_argument("--fql-table")
    cp.add_argument("--ql-table")
    cp.add_argument("--seed", type=int, default=0)
    cp.add_argument("--config")
    cp.add_argument("--outdir")
    cp.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
