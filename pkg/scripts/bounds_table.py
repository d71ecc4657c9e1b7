"""Print the GHZ and W constituent-probability bounds for a range of N."""

import argparse

from stabilizer_lab.constituent import bounds_table


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-min", type=int, default=2)
    parser.add_argument("--n-max", type=int, default=8)
    args = parser.parse_args()

    print(f"{'N':>3}  {'GHZ bound':>12}  {'W bound':>12}  {'zeta_max':>12}  certified")
    for row in bounds_table("ghz", args.n_min, args.n_max):
        print(f"{row['N']:>3}  {row['ghz_bound']:>12.8f}  {row['w_bound']:>12.8f}  {row['zeta_max']:>12.8f}  {row['certified']}")


if __name__ == "__main__":
    main()
