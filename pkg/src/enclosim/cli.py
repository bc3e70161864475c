"""Command-line entry points.

Every subcommand writes plot-ready CSV/JSON and prints a short JSON summary
on stdout. Failures print one line, ``error: <Kind>: <message>``, on stderr
and exit with status 2.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import case_studies, config, design, scheduler, validation
from .engine import run
from .units import k_to_c

EXIT_ERROR = 2


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _emit(doc: dict) -> None:
    print(json.dumps(doc, sort_keys=True))


def cmd_simulate(args) -> None:
    scenario = config.load_scenario(args.scenario)
    result = run(scenario)
    result.trajectory.to_csv(args.out_trajectory)
    text = result.metrics.to_json()
    if args.out_metrics:
        Path(args.out_metrics).write_text(text + "\n")
    _emit({"scenario": scenario.name, "steps": len(result.trajectory), "metrics": json.loads(text)})


def _config_summary(result: design.DesignResult, base) -> dict:
    c = result.configuration
    fan = c.fan
    return {
        "config_index": c.index,
        "insulation_u_w_m2k": c.insulation.enclosure(base).u,
        "fan_max_airflow_m3s": None if fan is None else fan.max_airflow,
        "utilization": c.utilization,
        "seasons": {s: {m: getattr(r, m) for m in design.METRICS} for s, r in sorted(result.seasons.items())},
    }


def cmd_design(args) -> None:
    base = config.load_scenario(args.scenario)
    problem = config.load_space(args.space)
    objective = config.load_objective(args.objective)
    results = design.sweep(problem.space, base, problem.seasons, workers=args.workers)
    selection = design.select(results, objective, base.enclosure)
    design.write_sweep(selection, args.out, base.enclosure)
    _emit({
        "status": "feasible" if selection.feasible else "infeasible",
        "configurations": len(results),
        "selected": _config_summary(selection.selected, base.enclosure) if selection.feasible else None,
    })


def cmd_schedule(args) -> None:
    horizon = config.load_horizon(args.horizon)
    scenario = config.load_scenario(args.scenario, traces=horizon.traces())
    outcome = scheduler.plan(horizon, scenario, max_rounds=args.max_rounds, delta=args.delta)
    scheduler.write_plan(outcome.plan, args.out_plan)
    doc = {
        "slots": len(horizon),
        "feasible": outcome.feasible,
        "work_u_hours": outcome.work_u_hours,
        "demand_u_hours": outcome.demand_u_hours,
        "drained_wh": outcome.drained / 3600.0,
        "rounds": outcome.rounds,
        "fell_back_to_naive": outcome.fell_back_to_naive,
    }
    if args.compare_naive:
        cmp = scheduler.compare_against_naive(horizon, scenario, max_rounds=args.max_rounds, delta=args.delta)
        doc["naive"] = {"naive_work": cmp.naive_work, "planned_work": cmp.planned_work,
                        "gain_percent": cmp.gain_percent}
    _emit(doc)


def cmd_validate_model(args) -> None:
    base = config.load_scenario(args.scenario)
    curves = validation.preset_curves(args.preset, base, duration=args.hours * 3600.0)
    validation.write_curves(curves, args.out)
    _emit({"preset": args.preset, "curves": {c.label: round(k_to_c(c.equilibrium), 6) for c in curves}})


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def cmd_case_study(args) -> None:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.name == "farmbeats":
        cmp = case_studies.data_rate_comparison()
        _write_rows(out / "farmbeats_rates.csv", ["season", "agnostic_rate_per_h", "aware_rate_per_h", "gain_percent"],
                    [[s.season, repr(s.agnostic_rate), repr(s.aware_rate), repr(s.gain_percent)] for s in cmp.seasons])
        for season, p in cmp.plans.items():
            scheduler.write_plan(p, out / f"farmbeats_{season}_plan.csv")
        summary = {"annual_gain_percent": cmp.annual_gain_percent,
                   "seasons": {s.season: s.gain_percent for s in cmp.seasons}}
    else:
        rows, summary = [], {"seasons": {}}
        for season in case_studies.SEASON_NAMES:
            c = case_studies.exit_stage_comparison(season)
            for stage, (a, b) in enumerate(zip(c.agnostic, c.aware)):
                rows.append([season, stage, int(a), int(b)])
            summary["seasons"][season] = {"agnostic_mean_stage": c.agnostic_mean, "aware_mean_stage": c.aware_mean}
        _write_rows(out / "multiexit_stages.csv", ["season", "stage", "agnostic_rounds", "aware_rounds"], rows)
    (out / f"{args.name}_summary.json").write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n")
    _emit({"case_study": args.name, **summary})


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="enclosim", description="Solar/battery enclosure simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run one scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out-trajectory", required=True)
    p.add_argument("--out-metrics")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("design", help="sweep a design space and select a configuration")
    p.add_argument("--scenario", required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--objective", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("schedule", help="plan utilization over a forecast horizon")
    p.add_argument("--scenario", required=True)
    p.add_argument("--horizon", required=True)
    p.add_argument("--out-plan", required=True)
    p.add_argument("--compare-naive", action="store_true")
    p.add_argument("--max-rounds", type=int, default=20)
    p.add_argument("--delta", type=float, default=0.05)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("validate-model", help="emit warm-up curve families")
    p.add_argument("--preset", required=True, choices=sorted(validation.PRESETS))
    p.add_argument("--out", required=True)
    p.add_argument("--scenario", default="prototype.json")
    p.add_argument("--hours", type=float, default=12.0)
    p.set_defaults(func=cmd_validate_model)

    p = sub.add_parser("case-study", help="run a policy-level case study")
    p.add_argument("--name", required=True, choices=["farmbeats", "multiexit"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_case_study)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except CliError as exc:
        print(f"error: UsageError: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError, KeyError, TypeError) as exc:
        msg = " ".join(str(exc).split())
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return EXIT_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
