"""Run the built-in reproduction suite and write report.md / report.csv."""

import argparse
import sys
from pathlib import Path

from stabilizer_lab.reproduce import run_scenarios, select, to_csv, to_markdown


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("reproduction"))
    parser.add_argument("--filter", default=None, help="substring of a scenario name, or a scenario kind")
    args = parser.parse_args()

    scenarios = select("paper", args.filter)
    if not scenarios:
        print(f"no scenario matches {args.filter!r}", file=sys.stderr)
        return 2
    rows = run_scenarios(scenarios)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "report.csv").write_text(to_csv(rows))
    (args.out / "report.md").write_text(to_markdown(rows))
    failed = [r for r in rows if not r.passed]
    print(f"{len(rows)} rows, {len(failed)} failed -> {args.out}")
    for r in failed:
        print(f"  FAIL {r.scenario}: {r.quantity} computed={r.computed} expected={r.expected}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
