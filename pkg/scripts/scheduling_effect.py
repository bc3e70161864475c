"""Thermal-aware plan versus constant utilization on a cold night.

    python3 scripts/scheduling_effect.py [--out-plan plan.csv]

Runs the day/night horizon and the flat 25 C control with the same system.
"""

from __future__ import annotations

import argparse

from enclosim import config, scheduler
from enclosim.units import k_to_c


def report(name: str, horizon_name: str, out_plan=None) -> None:
    horizon = config.load_horizon(horizon_name)
    scenario = config.load_scenario("daynight", traces=horizon.traces())
    outcome = scheduler.plan(horizon, scenario)
    cmp = scheduler.compare_against_naive(horizon, scenario)
    print(f"{name}: naive {cmp.naive_work / 3600:.3f} u-h, planned {cmp.planned_work / 3600:.3f} u-h, "
          f"gain {cmp.gain_percent:+.2f}%  ({outcome.rounds} rounds)")
    print("  hour  T_amb(C)  u")
    for k, (t, u) in enumerate(zip(horizon.temperatures, outcome.plan.utilizations)):
        print(f"  {k:4d}  {k_to_c(t):8.2f}  {u:.2f}")
    if out_plan:
        scheduler.write_plan(outcome.plan, out_plan)


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out-plan", default=None)
    args = parser.parse_args(argv)
    report("day/night", "daynight_horizon", args.out_plan)
    report("flat 25 C", "flat_horizon")


if __name__ == "__main__":
    main()
