"""Command-line front end: single runs, eps/delta limit sweeps, initial-data
checks, and report aggregation.

Exit codes: 0 all checks pass, 1 runtime or invariant failure, 2
configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from . import snapshot
from .config import ExperimentConfig, load_config
from .diagnostics import (AUX_COLUMNS, DiagnosticsSuite, evaluate_invariants,
                          summary_dict, write_aux_csv, write_records_csv,
                          write_summary_json)
from .errors import ConfigError, DragflowError
from .generators import make_raw, raw_to_state, regularized_to_state
from .initdata import build_mollifier, consistency_distances, initial_energy, regularize
from .integrators import CheckpointConfig, run
from .model import ModelParams

_EPS_TREND_COLUMNS = ("sqrt_eps_n_gradv2", "eps_n_v5", "eps_bd_mix", "eps_ninv12_v2",
                      "eps2_ninv25", "eps_u10", "eps_gradrho2", "eps_rho_gm2",
                      "eps_delta_rho_g0m2")
_DELTA_TREND_COLUMNS = ("delta_rho_g0", "delta_rho_g0p1", "delta_rho_g0hi")


def _say(quiet: bool, msg: str):
    if not quiet:
        print(msg)


def _build_initial(cfg: ExperimentConfig, params: ModelParams):
    """Returns (state0, raw_or_None)."""
    spec = cfg.initial
    if spec.kind == "snapshot":
        path = spec.options["path"]
        if snapshot.is_state_dir(path):
            return snapshot.read_state(path), None
        if snapshot.is_raw_dir(path):
            raw = snapshot.read_raw(path)
        else:
            raise ConfigError(f"initial.path {path} holds neither a state nor raw data")
    else:
        opts = dict(spec.options)
        if spec.kind == "random-smooth":
            opts["seed"] = cfg.seed
        raw = make_raw(cfg.grid, spec.kind, **opts)

    mollify = spec.mollify == "always" or (spec.mollify == "auto" and params.delta > 0)
    if mollify:
        if params.delta <= 0:
            raise ConfigError("mollification needs params.delta > 0")
        kernel = build_mollifier(params.delta, cfg.grid, params.gamma0)
        reg = regularize(raw, params.delta, kernel)
        return regularized_to_state(reg), raw
    return raw_to_state(raw), raw


def _run_one(cfg: ExperimentConfig, params: ModelParams, out_dir: str,
             quiet: bool) -> tuple[int, dict]:
    os.makedirs(out_dir, exist_ok=True)
    s0, _raw = _build_initial(cfg, params)
    suite = DiagnosticsSuite.from_initial_state(s0, params)
    checkpoint = None
    if cfg.step.checkpoint_every:
        checkpoint = CheckpointConfig(os.path.join(out_dir, "checkpoints"),
                                      cfg.step.checkpoint_every)
    t0 = time.perf_counter()
    result = run(s0, params, cfg.step, suite, checkpoint=checkpoint)
    wall = time.perf_counter() - t0

    invariants = evaluate_invariants(result.records, result.aux, suite,
                                     cfg.grid.h, result.dt_max_used)
    write_records_csv(os.path.join(out_dir, "diagnostics.csv"), result.records, cfg.grid.dim)
    write_aux_csv(os.path.join(out_dir, "auxiliary.csv"), result.aux)

    echo = dict(cfg.resolved)
    echo["params"] = {**echo["params"], "eps": params.eps, "delta": params.delta}
    summary = summary_dict(echo, result.status, result.records, invariants, cfg.grid.dim,
                           extra={
                               "message": result.message,
                               "n_steps": result.n_steps,
                               "dt_min": result.dt_min,
                               "dt_max": result.dt_max_used,
                               "wall_seconds": wall,
                           })
    write_summary_json(os.path.join(out_dir, "summary.json"), summary)

    failing = [k for k, v in invariants.items() if not v["passed"]]
    if result.status != "completed":
        _say(quiet, f"run FAILED ({result.status}): {result.message}")
        return 1, summary
    if failing:
        _say(quiet, f"run completed but invariants failed: {', '.join(failing)}")
        return 1, summary
    _say(quiet, f"run completed: {result.n_steps} steps, wall {wall:.2f}s, "
                f"all {len(invariants)} invariants pass -> {out_dir}")
    return 0, summary


def cmd_run(cfg: ExperimentConfig, out_dir: str, quiet: bool) -> int:
    code, _ = _run_one(cfg, cfg.params, out_dir, quiet)
    return code


def cmd_sweep(cfg: ExperimentConfig, out_dir: str, quiet: bool) -> int:
    if cfg.sweep is None:
        raise ConfigError("sweep requires a 'sweep' section (axis + values)")
    os.makedirs(out_dir, exist_ok=True)
    axis, values = cfg.sweep.axis, cfg.sweep.values

    rows = []
    worst = 0
    for val in values:
        params = cfg.params.with_(**{axis: val})
        member_dir = os.path.join(out_dir, f"{axis}_{val:g}")
        code, summary = _run_one(cfg, params, member_dir, quiet)
        worst = max(worst, code)

        # per-member trend data: time-integrated dissipation columns
        with open(os.path.join(member_dir, "auxiliary.csv")) as fh:
            rd = csv.DictReader(fh)
            aux_rows = [{k: float(x) for k, x in r.items()} for r in rd]
        ints = {}
        for col in AUX_COLUMNS:
            ts = np.array([r["t"] for r in aux_rows])
            ys = np.array([r[col] for r in aux_rows])
            ints["int_" + col] = float(np.trapezoid(ys, ts)) if len(ts) > 1 else 0.0
        row = {"value": val, "status": summary["status"],
               "passed": summary["passed"], **ints}
        if summary["final_record"]:
            row.update({"final_" + k: v for k, v in summary["final_record"].items()})
        rows.append(row)

    if rows:
        cols = list(rows[0].keys())
        with open(os.path.join(out_dir, "sweep.csv"), "w") as fh:
            fh.write(",".join(cols) + "\n")
            for r in rows:
                fh.write(",".join(_cell(r[c]) for c in cols) + "\n")

    trend_cols = _EPS_TREND_COLUMNS if axis == "eps" else _DELTA_TREND_COLUMNS
    lines = [f"# {axis}-sweep trend report", "",
             f"values: {values}", "",
             "| column | " + " | ".join(f"{v:g}" for v in values) + " | decreasing |",
             "|---|" + "---|" * (len(values) + 1)]
    all_trend_ok = True
    for col in trend_cols:
        series = [r["int_" + col] for r in rows]
        dec = all(b <= a for a, b in zip(series, series[1:]))
        all_trend_ok = all_trend_ok and dec
        lines.append("| int_" + col + " | "
                     + " | ".join(f"{s:.6e}" for s in series)
                     + f" | {'yes' if dec else 'NO'} |")
    lines += ["", f"trend verdict: {'all decreasing' if all_trend_ok else 'NOT monotone'}"]
    report = "\n".join(lines) + "\n"
    with open(os.path.join(out_dir, "trend_report.md"), "w") as fh:
        fh.write(report)
    _say(quiet, report)
    if not all_trend_ok:
        worst = max(worst, 1)
    return worst


def _cell(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return "%.17e" % x
    return str(x)


def cmd_report(paths: list[str], quiet: bool) -> int:
    lines = ["| summary | check | anchor | status |", "|---|---|---|---|"]
    worst = 0
    for path in paths:
        if not os.path.exists(path):
            lines.append(f"| {path} | - | - | SKIPPED |")
            continue
        with open(path) as fh:
            summary = json.load(fh)
        if summary.get("status") != "completed":
            lines.append(f"| {path} | run-status | integration reached t_end | FAIL |")
            worst = max(worst, 1)
        for name, entry in sorted(summary.get("invariants", {}).items()):
            ok = entry.get("passed", False)
            if not ok:
                worst = max(worst, 1)
            lines.append(f"| {path} | {name} | {entry.get('anchor', name)} | "
                         f"{'PASS' if ok else 'FAIL'} |")
    print("\n".join(lines))
    return worst


def cmd_check_init(cfg: ExperimentConfig, out_dir: str, quiet: bool) -> int:
    """Initial-data verifications: kernel bounds and delta -> 0 consistency."""
    os.makedirs(out_dir, exist_ok=True)
    if cfg.sweep and cfg.sweep.axis == "delta":
        deltas = list(cfg.sweep.values)
    else:
        deltas = [0.2, 0.1, 0.05, 0.025, 0.0125]
    spec = cfg.initial
    if spec.kind == "snapshot":
        path = spec.options["path"]
        if not snapshot.is_raw_dir(path):
            raise ConfigError("check-init needs raw initial data, not a state snapshot")
        raw = snapshot.read_raw(path)
    else:
        opts = dict(spec.options)
        if spec.kind == "random-smooth":
            opts["seed"] = cfg.seed
        raw = make_raw(cfg.grid, spec.kind, **opts)

    report = {"deltas": deltas, "kernel": [], "distances": {}, "initial_energy": []}
    failures = []
    dist_series: dict[str, list[float]] = {}
    for d in deltas:
        try:
            kernel = build_mollifier(d, cfg.grid, cfg.params.gamma0)
        except DragflowError as exc:
            failures.append(f"kernel bounds failed at delta={d}: {exc}")
            continue
        report["kernel"].append({"delta": d, "width": kernel.width,
                                 "gradient_const": kernel.gradient_const})
        reg = regularize(raw, d, kernel)
        dists = consistency_distances(raw, reg, cfg.params.gamma)
        for k, v in dists.items():
            dist_series.setdefault(k, []).append(v)
        p_d = cfg.params.with_(delta=d)
        report["initial_energy"].append(initial_energy(reg, p_d))

    # the five tracked distances must shrink along the delta list; the
    # (2+eta0)-moment distance is reported only
    for name, series in dist_series.items():
        monotone = all(b <= a * (1 + 1e-12) for a, b in zip(series, series[1:]))
        report["distances"][name] = {"values": series, "decreasing": monotone}
        if name != "mom_moment_l1" and not monotone:
            failures.append(f"distance {name} not decreasing along delta halvings")
    e0 = report["initial_energy"]
    if e0 and not all(np.isfinite(e0)):
        failures.append("initial energy not finite along the delta list")

    report["failures"] = failures
    with open(os.path.join(out_dir, "init_check.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    for name, entry in report["distances"].items():
        _say(quiet, f"{name}: {'decreasing' if entry['decreasing'] else 'NOT decreasing'} "
                    f"({', '.join('%.4e' % v for v in entry['values'])})")
    if failures:
        _say(quiet, "check-init FAILED: " + "; ".join(failures))
        return 1
    _say(quiet, f"check-init passed for deltas {deltas} -> {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dragflow",
                                 description="two-phase drag-coupled flow simulator")
    sub = ap.add_subparsers(dest="verb", required=True)
    for verb in ("run", "sweep", "check-init"):
        sp = sub.add_parser(verb)
        sp.add_argument("--config", required=True, help="YAML experiment configuration")
        sp.add_argument("--out", default=None, help="output directory (overrides config)")
        sp.add_argument("--override", action="append", default=[],
                        metavar="KEY=VALUE", help="dotted config override, repeatable")
        sp.add_argument("--quiet", action="store_true")
    rp = sub.add_parser("report")
    rp.add_argument("summaries", nargs="*", help="summary.json files to aggregate")
    rp.add_argument("--quiet", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.verb == "report":
            return cmd_report(args.summaries, args.quiet)
        cfg = load_config(args.config, args.override)
        out_dir = args.out or cfg.output_dir
        if args.verb == "run":
            return cmd_run(cfg, out_dir, args.quiet)
        if args.verb == "sweep":
            return cmd_sweep(cfg, out_dir, args.quiet)
        return cmd_check_init(cfg, out_dir, args.quiet)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except DragflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
