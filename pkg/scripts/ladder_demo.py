#!/usr/bin/env python3
"""Approximate a non-periodic in-class deformation by maps with periodic
critical orbit: one continuation rung per period, distances shrinking."""

import argparse

from pexpand import FamilyTerm, MapFamily, continuation_ladder, full_tent, odd_field


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--periods", type=int, nargs="+", default=[7, 8, 9, 10])
    args = ap.parse_args()

    F = MapFamily(full_tent(), (FamilyTerm(odd_field()),))
    ladder = continuation_ladder(F, periods=tuple(args.periods))

    print(f"base map periodic: {ladder.base_period is not None}   "
          f"rungs: {len(ladder.rungs)}   partial: {ladder.partial}")
    print("  period    theta0            sup distance (C^{k-1} grid norm)")
    for r in ladder.rungs:
        print(f"  {r.period:>6}   {r.theta0:+.12e}   {r.distance:.6e}")
    print(f"strictly decreasing: {ladder.decreasing}")


if __name__ == "__main__":
    main()
