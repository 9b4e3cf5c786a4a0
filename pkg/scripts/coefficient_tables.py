#!/usr/bin/env python3
"""Print the boundary-coefficient tables and the gamma second-form diagnostic as Markdown."""
import argparse

from gbchern import combinat as cb
from gbchern.cli import coefficient_rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m-max", type=int, default=12)
    args = ap.parse_args()

    rows, problems = coefficient_rows(args.m_max)
    print("| m | k | a | b | c | gamma |")
    print("|---|---|---|---|---|---|")
    for row in rows:
        for k in range(len(row["a"])):
            print(f"| {row['m']} | {k} | {row['a'][k]} | {row['b'][k]} | {row['c'][k]} | {row['gamma'][k]} |")
    print()
    print("| m | k | gamma | second form | ratio |")
    print("|---|---|---|---|---|")
    for d in cb.gamma_discrepancies(args.m_max):
        print(f"| {d['m']} | {d['k']} | {d['gamma']} | {d['gamma_alt']} | {d['ratio']} |")
    for p in problems:
        print(f"problem: {p}")


if __name__ == "__main__":
    main()
