"""Command-line front end: configuration, sweep runs, and report files.

Subcommands:

* ``run``      execute a sweep and write all report files
* ``report``   recompute summaries/rollup/pareto from an existing trials file
* ``validate`` check a configuration and echo its normalized form

Configuration precedence is flags over config file over built-in
defaults; the defaults reproduce the full experimental protocol
(5 degradation levels x 4 patient loads x 3 policies x 250 trials).
All state flows through flags and files so runs are reproducible; the
emitted files are byte-identical for identical inputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from dataclasses import asdict, replace
from pathlib import Path

from . import __version__
from .engine import PlatformParams
from .experiment import (
    ParetoPoint,
    SweepConfig,
    SweepResult,
    TrialRecord,
    aggregate,
    run_sweep,
)
from .localization import LocalizationParams
from .metrics import DelayRecord, TrialMetrics
from .policy import PolicyId, TriageWeights
from .scenario import ScenarioParams

log = logging.getLogger("medmission")

TABLE_FORMATS = ("csv", "jsonl")

TRIALS_COLUMNS = [
    "policy", "delta", "load", "condition", "trial", "aborted", "duration",
    "served", "rho", "lambda_sw", "lambda_int", "workload",
    "high_sev_ids", "high_sev_delays", "high_sev_censored",
]

ROLLUP_COLUMNS = [
    "policy", "t_int_mean", "rho", "r_fail", "w_mean", "mission_time",
    "delay_median", "delay_p90", "delay_p95", "n_trials",
]

PARETO_COLUMNS = ["scope", "policy", "delta", "load", "x", "y", "size", "on_front"]


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


# ---------------------------------------------------------------------------
# Config serialization.

def config_to_dict(config: SweepConfig) -> dict:
    return {
        "master_seed": config.master_seed,
        "degradation_levels": list(config.degradation_levels),
        "patient_loads": list(config.patient_loads),
        "policies": [p.value for p in config.policies],
        "trials_per_condition": config.trials_per_condition,
        "tau_c": config.tau_c,
        "alpha": config.alpha,
        "beta": config.beta,
        "operator_error_rate": config.operator_error_rate,
        "triage_weights": asdict(config.triage_weights),
        "platform": asdict(config.platform),
        "localization": asdict(config.localization),
        "scenario": {k: (list(v) if isinstance(v, tuple) else v)
                     for k, v in asdict(config.scenario_params).items()},
    }


def _build_section(cls, data: dict, key: str):
    known = {f: v for f, v in data.items()}
    valid = set(cls.__dataclass_fields__)
    for name in known:
        if name not in valid:
            raise ConfigError(f"{key}.{name}: unknown key")
    if cls is ScenarioParams and "base_position" in known:
        known["base_position"] = tuple(known["base_position"])
    try:
        return cls(**known)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: {exc}") from exc


def config_from_dict(data: dict) -> SweepConfig:
    """Build a SweepConfig from its JSON form, naming any bad key."""
    base = SweepConfig()
    known = dict(data)
    kwargs = {}
    simple = ["master_seed", "trials_per_condition", "tau_c", "alpha", "beta",
              "operator_error_rate"]
    for key in simple:
        if key in known:
            kwargs[key] = known.pop(key)
    if "degradation_levels" in known:
        kwargs["degradation_levels"] = tuple(float(x) for x in known.pop("degradation_levels"))
    if "patient_loads" in known:
        kwargs["patient_loads"] = tuple(int(x) for x in known.pop("patient_loads"))
    if "policies" in known:
        kwargs["policies"] = _parse_policies(known.pop("policies"))
    if "triage_weights" in known:
        kwargs["triage_weights"] = _build_section(TriageWeights,
                                                  known.pop("triage_weights"),
                                                  "triage_weights")
    if "platform" in known:
        kwargs["platform"] = _build_section(PlatformParams, known.pop("platform"),
                                            "platform")
    if "localization" in known:
        kwargs["localization"] = _build_section(LocalizationParams,
                                                known.pop("localization"),
                                                "localization")
    if "scenario" in known:
        kwargs["scenario_params"] = _build_section(ScenarioParams,
                                                   known.pop("scenario"), "scenario")
    if known:
        raise ConfigError(f"{sorted(known)[0]}: unknown key")
    try:
        config = replace(base, **kwargs)
        config.validate()
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return config


def _parse_policies(values) -> tuple[PolicyId, ...]:
    out = []
    for i, name in enumerate(values):
        try:
            out.append(PolicyId(name))
        except ValueError:
            valid = ", ".join(p.value for p in PolicyId)
            raise ConfigError(f"policies[{i}]: unknown policy {name!r} "
                              f"(expected one of {valid})") from None
    return tuple(out)


def _csv_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip() != ""]


def parse_config(args: argparse.Namespace) -> SweepConfig:
    """Resolve the effective config: flags > config file > defaults."""
    data: dict = {}
    config_path = getattr(args, "config", None)
    if config_path:
        with open(config_path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config file: invalid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file: top level must be an object")

    overrides = {
        "master_seed": getattr(args, "seed", None),
        "trials_per_condition": getattr(args, "trials", None),
        "tau_c": getattr(args, "tau_c", None),
        "alpha": getattr(args, "alpha", None),
        "beta": getattr(args, "beta", None),
        "operator_error_rate": getattr(args, "error_rate", None),
    }
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    if getattr(args, "deltas", None) is not None:
        data["degradation_levels"] = _csv_floats(args.deltas)
    if getattr(args, "loads", None) is not None:
        data["patient_loads"] = [int(x) for x in _csv_floats(args.loads)]
    if getattr(args, "policies", None) is not None:
        data["policies"] = [tok.strip() for tok in args.policies.split(",") if tok.strip()]

    weight_flags = {
        "w_severity": getattr(args, "w_severity", None),
        "w_urgency": getattr(args, "w_urgency", None),
        "w_access": getattr(args, "w_access", None),
        "urgency_timescale": getattr(args, "urgency_timescale", None),
    }
    if any(v is not None for v in weight_flags.values()):
        section = dict(data.get("triage_weights", {}))
        for key, value in weight_flags.items():
            if value is not None:
                section[key] = value
        data["triage_weights"] = section

    return config_from_dict(data)


# ---------------------------------------------------------------------------
# Value formatting: floats go through repr so re-reading is exact.

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def _json_safe(value):
    """NaN becomes null so the JSON stays strictly parseable."""
    if isinstance(value, float) and math.isnan(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def _write_table(path: Path, columns: list[str], rows: list[list],
                 fmt: str) -> None:
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    else:
        with open(path, "w", encoding="utf-8") as fh:
            for row in rows:
                record = {c: _json_safe(v) for c, v in zip(columns, row)}
                fh.write(json.dumps(record, sort_keys=False) + "\n")


def _trial_rows(result: SweepResult) -> list[list]:
    rows = []
    for rec in result.records:
        m = rec.metrics
        rows.append([
            rec.policy.value, rec.delta, rec.load, rec.condition_id, rec.trial,
            m.aborted, m.duration, m.served_count, m.rho, m.lambda_sw,
            m.lambda_int, m.workload,
            ";".join(str(d.patient_id) for d in m.high_severity_delays),
            ";".join(repr(d.delay) for d in m.high_severity_delays),
            ";".join("1" if d.censored else "0" for d in m.high_severity_delays),
        ])
    return rows


def _rollup_rows(result: SweepResult) -> list[list]:
    return [[r.policy.value, r.t_int_mean, r.rho, r.r_fail, r.w_mean,
             r.mission_time, r.delay_median, r.delay_p90, r.delay_p95,
             r.n_trials] for r in result.rollups]


def _pareto_rows(result: SweepResult) -> list[list]:
    def rows_for(points: tuple[ParetoPoint, ...], front: tuple[ParetoPoint, ...],
                 scope: str) -> list[list]:
        on_front = {id(p) for p in front}
        return [[scope, p.policy.value, p.delta, p.load, p.x, p.y, p.size,
                 id(p) in on_front] for p in points]

    return (rows_for(result.pareto_condition, result.front_condition, "condition")
            + rows_for(result.pareto_pooled, result.front_pooled, "pooled"))


def _stats_dict(stats) -> dict:
    return {"mean": stats.mean, "std": stats.std,
            "ci_lo": stats.ci_lo, "ci_hi": stats.ci_hi}


def _summary_payload(result: SweepResult) -> dict:
    cells = []
    for s in result.summaries:
        cells.append({
            "policy": s.policy.value,
            "delta": s.delta,
            "load": s.load,
            "n_trials": s.n_trials,
            "delay": {**_stats_dict(s.delay), "median": s.delay_median,
                      "p90": s.delay_p90, "p95": s.delay_p95,
                      "box": list(s.delay_box)},
            "rho": _stats_dict(s.rho),
            "r_fail": _stats_dict(s.r_fail),
            "workload": {**_stats_dict(s.workload), "box": list(s.workload_box)},
            "mean_duration": s.mean_duration,
        })
    return {"cells": cells}


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_json_safe(payload), fh, indent=2)
        fh.write("\n")


def emit_reports(result: SweepResult, fmt: str, outdir: str | Path) -> list[Path]:
    """Write trials, summary, rollup, pareto, and manifest files."""
    if fmt not in TABLE_FORMATS:
        raise ConfigError(f"format: unknown format {fmt!r}")
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    ext = "csv" if fmt == "csv" else "jsonl"

    paths = []
    trials_path = out / f"trials.{ext}"
    _write_table(trials_path, TRIALS_COLUMNS, _trial_rows(result), fmt)
    paths.append(trials_path)

    summary_path = out / "summary.json"
    _write_json(summary_path, _summary_payload(result))
    paths.append(summary_path)

    rollup_path = out / f"rollup.{ext}"
    _write_table(rollup_path, ROLLUP_COLUMNS, _rollup_rows(result), fmt)
    paths.append(rollup_path)

    pareto_path = out / f"pareto.{ext}"
    _write_table(pareto_path, PARETO_COLUMNS, _pareto_rows(result), fmt)
    paths.append(pareto_path)

    manifest_path = out / "manifest.json"
    _write_json(manifest_path, {
        "config": config_to_dict(result.config),
        "master_seed": result.config.master_seed,
        "version": __version__,
        "total_missions": result.config.total_missions,
        "trial_rows": len(result.records),
    })
    paths.append(manifest_path)
    return paths


# ---------------------------------------------------------------------------
# Reading a previous run back for the `report` subcommand.

def load_trials(trials_path: str | Path, config: SweepConfig) -> tuple[TrialRecord, ...]:
    records = []
    with open(trials_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            ids = [int(x) for x in row["high_sev_ids"].split(";") if x != ""]
            delays = [float(x) for x in row["high_sev_delays"].split(";") if x != ""]
            censored = [x == "1" for x in row["high_sev_censored"].split(";") if x != ""]
            load = int(row["load"])
            metrics = TrialMetrics(
                high_severity_delays=tuple(
                    DelayRecord(i, d, c) for i, d, c in zip(ids, delays, censored)),
                served_count=int(row["served"]),
                total_patients=load,
                aborted=row["aborted"] == "1",
                lambda_sw=float(row["lambda_sw"]),
                lambda_int=float(row["lambda_int"]),
                workload=float(row["workload"]),
                duration=float(row["duration"]),
            )
            records.append(TrialRecord(
                policy=PolicyId(row["policy"]), delta=float(row["delta"]),
                load=load, condition_id=int(row["condition"]),
                trial=int(row["trial"]), metrics=metrics))
    records.sort(key=lambda r: (r.condition_id, r.policy.index, r.trial))
    return tuple(records)


# ---------------------------------------------------------------------------
# Subcommands.

def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--trials", type=int, help="trials per condition")
    parser.add_argument("--deltas", help="comma-separated degradation levels")
    parser.add_argument("--loads", help="comma-separated patient loads")
    parser.add_argument("--policies", help="comma-separated policy names")
    parser.add_argument("--tau-c", dest="tau_c", type=float,
                        help="acceptable service window, minutes")
    parser.add_argument("--alpha", type=float, help="workload weight on switching")
    parser.add_argument("--beta", type=float, help="workload weight on interventions")
    parser.add_argument("--error-rate", dest="error_rate", type=float,
                        help="teleoperator mis-pick probability")
    parser.add_argument("--w-severity", dest="w_severity", type=float)
    parser.add_argument("--w-urgency", dest="w_urgency", type=float)
    parser.add_argument("--w-access", dest="w_access", type=float)
    parser.add_argument("--urgency-timescale", dest="urgency_timescale", type=float)


def _cmd_run(args: argparse.Namespace) -> int:
    config = parse_config(args)
    log.info("running %d missions (%d cells x %d trials)", config.total_missions,
             len(config.conditions()) * len(config.policies),
             config.trials_per_condition)
    started = time.perf_counter()
    result = run_sweep(config, workers=args.workers)
    elapsed = time.perf_counter() - started
    paths = emit_reports(result, args.format, args.out)
    log.info("completed %d missions in %.1fs; wrote %s",
             len(result.records), elapsed, ", ".join(str(p) for p in paths))
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    indir = Path(args.indir)
    manifest_path = indir / "manifest.json"
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    config = config_from_dict(manifest["config"])
    trials_path = indir / "trials.csv"
    records = load_trials(trials_path, config)
    result = aggregate(config, records)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ext = "csv" if args.format == "csv" else "jsonl"
    _write_json(out / "summary.json", _summary_payload(result))
    _write_table(out / f"rollup.{ext}", ROLLUP_COLUMNS, _rollup_rows(result),
                 args.format)
    _write_table(out / f"pareto.{ext}", PARETO_COLUMNS, _pareto_rows(result),
                 args.format)
    log.info("recomputed summaries for %d trials from %s", len(records), trials_path)
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    config = parse_config(args)
    json.dump(config_to_dict(config), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="medmission",
        description="Monte Carlo evaluation of medical-response mission policies")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a sweep and write report files")
    _add_config_flags(run_p)
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument("--format", choices=TABLE_FORMATS, default="csv")
    run_p.add_argument("--workers", type=int, default=1,
                       help="parallel worker processes")
    run_p.set_defaults(func=_cmd_run)

    report_p = sub.add_parser("report",
                              help="recompute summaries from an existing run")
    report_p.add_argument("--in", dest="indir", required=True,
                          help="directory holding trials.csv and manifest.json")
    report_p.add_argument("--out", required=True, help="output directory")
    report_p.add_argument("--format", choices=TABLE_FORMATS, default="csv")
    report_p.set_defaults(func=_cmd_report)

    validate_p = sub.add_parser("validate", help="check a configuration")
    _add_config_flags(validate_p)
    validate_p.set_defaults(func=_cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s",
                        stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
