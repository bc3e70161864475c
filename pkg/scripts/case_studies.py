"""Data-acquisition rates and multi-exit stage histograms per season.

    python3 scripts/case_studies.py
"""

from __future__ import annotations

from enclosim import case_studies


def main() -> None:
    cmp = case_studies.data_rate_comparison()
    print("data acquisition (units per hour)")
    print("  season   agnostic    aware     gain")
    for s in cmp.seasons:
        print(f"  {s.season:<7}{s.agnostic_rate:10.1f}{s.aware_rate:10.1f}{s.gain_percent:+8.2f}%")
    print(f"  annual gain {cmp.annual_gain_percent:+.2f}%")

    print("\nmulti-exit rounds per stage (0 = skipped or failed)")
    for season in case_studies.SEASON_NAMES:
        c = case_studies.exit_stage_comparison(season)
        print(f"  {season:<7} agnostic {c.agnostic.tolist()} mean {c.agnostic_mean:.2f}")
        print(f"  {'':<7} aware    {c.aware.tolist()} mean {c.aware_mean:.2f}")


if __name__ == "__main__":
    main()
