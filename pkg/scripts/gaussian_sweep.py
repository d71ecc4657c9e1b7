"""Sweep the two-mode Gaussian models over squeezing and write a CSV of
stationary symplectic eigenvalues, verdicts and log negativity."""

import argparse
from pathlib import Path

import numpy as np

from stabilizer_lab.gaussian import ScenarioPoint, sweep_csv


def build_points(r_values, alpha, delta, gamma_u):
    points = []
    for r in r_values:
        points.append(ScenarioPoint("i", r))
        points.append(ScenarioPoint("ii", r))
        points.append(ScenarioPoint("iii", r, alpha))
        points.append(ScenarioPoint("mixed", r, alpha, delta, 1.0, gamma_u))
    return points


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--r-max", type=float, default=2.0)
    parser.add_argument("--steps", type=int, default=21)
    parser.add_argument("--alpha", type=float, default=0.3)
    parser.add_argument("--delta", type=float, default=0.5)
    parser.add_argument("--gamma-u", type=float, default=0.1)
    parser.add_argument("--out", type=Path, default=Path("gaussian_sweep.csv"))
    args = parser.parse_args()

    r_values = np.linspace(0.0, args.r_max, args.steps)
    args.out.write_text(sweep_csv(build_points(r_values, args.alpha, args.delta, args.gamma_u)))
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
