"""Warm-up curve families for the three model presets.

    python3 scripts/model_curves.py [--out-dir curves/]

Prints the temperature of each curve at a few checkpoints and writes one
long-format CSV per preset.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from enclosim import config, validation
from enclosim.units import k_to_c

CHECKPOINTS_H = (0.5, 1, 2, 4, 12)


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out-dir", type=Path, default=None)
    args = parser.parse_args(argv)
    base = config.load_scenario("prototype")
    print(f"UA = {base.enclosure.ua:.4f} W/K, heat capacity = {base.heat_capacity:.1f} J/K")
    for preset in validation.PRESETS:
        curves = validation.preset_curves(preset, base)
        print(f"\n{preset}: T_enc (C) at " + ", ".join(f"{h:g} h" for h in CHECKPOINTS_H))
        for c in curves:
            dt = c.times[1] - c.times[0]
            temps = [k_to_c(c.t_enc[int(round(h * 3600 / dt))]) for h in CHECKPOINTS_H]
            print(f"  {c.label:<28}" + "".join(f"{t:8.2f}" for t in temps))
        if args.out_dir:
            args.out_dir.mkdir(parents=True, exist_ok=True)
            validation.write_curves(curves, args.out_dir / f"{preset}.csv")
    print(f"\n10 W steady state at 10 C ambient: {validation.steady_state_c(base, 10.0):.2f} C")


if __name__ == "__main__":
    main()
