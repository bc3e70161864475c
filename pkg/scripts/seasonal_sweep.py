"""Energy efficiency and availability of three insulation levels across seasons.

    python3 scripts/seasonal_sweep.py [--out sweep.csv] [--workers N]
"""

from __future__ import annotations

import argparse
import time

from enclosim import config, design

LABELS = {2.0: "low", 0.9: "medium", 0.35: "high"}


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", default=None)
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args(argv)

    base = config.load_scenario("edge_datacenter")
    problem = config.load_space("edge_space")
    objective = config.load_objective("edge_objective")
    t0 = time.perf_counter()
    results = design.sweep(problem.space, base, problem.seasons, workers=args.workers)
    elapsed = time.perf_counter() - t0
    selection = design.select(results, objective, base.enclosure)

    seasons = [s.name for s in problem.seasons]
    for metric in ("energy_efficiency", "availability"):
        print(f"\n{metric} (%)")
        print("u     " + "  ".join(f"{s}:{LABELS[i.u_value]:<6}" for s in seasons for i in problem.space.insulations))
        for u in problem.space.utilizations:
            row = [r for r in results if r.configuration.utilization == u]
            cells = []
            for s in seasons:
                for r in row:
                    v = design.metric_value(r.seasons[s], metric)
                    cells.append(f"{v:>{len(s) + 7}.2f}")
            print(f"{u:<5.1f} " + "  ".join(cells))
    chosen = selection.selected
    if chosen is None:
        print("\nno configuration meets the objective")
    else:
        c = chosen.configuration
        print(f"\nselected: U={c.insulation.u_value} W/m2K, u={c.utilization}")
    print(f"{len(results)} configurations x {len(seasons)} seasons in {elapsed:.2f} s")
    if args.out:
        design.write_sweep(selection, args.out, base.enclosure)


if __name__ == "__main__":
    main()
