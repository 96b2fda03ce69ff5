#!/usr/bin/env python3
"""Recompute aggregate.csv of a bench output directory from its per-rep CSVs."""

import argparse
import csv
import glob
import math
import os
import statistics
import sys
from collections import defaultdict


def quartiles(values):
    if len(values) == 1:
        return values * 3
    return statistics.quantiles(values, n=4, method="inclusive")


def recompute(directory):
    groups = defaultdict(list)
    for path in sorted(glob.glob(os.path.join(directory, "records_rep*.csv"))):
        with open(path, newline="") as f:
            for row in csv.DictReader(f):
                for metric in ("r", "d"):
                    groups[(row["method"], int(row["n"]), metric)].append(float(row[metric]))
    return {key: quartiles(v) for key, v in groups.items()}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("directory")
    ap.add_argument("--rtol", type=float, default=1e-12)
    args = ap.parse_args()

    ours = recompute(args.directory)
    theirs = {}
    with open(os.path.join(args.directory, "aggregate.csv"), newline="") as f:
        for row in csv.DictReader(f):
            key = (row["method"], int(row["n"]), row["metric"])
            theirs[key] = [float(row["q25"]), float(row["median"]), float(row["q75"])]

    bad = 0
    for key in sorted(set(ours) | set(theirs)):
        a, b = ours.get(key), theirs.get(key)
        if a is None or b is None:
            print(f"missing row {key}")
            bad += 1
            continue
        for x, y in zip(a, b):
            if not math.isclose(x, y, rel_tol=args.rtol, abs_tol=1e-15):
                print(f"mismatch {key}: recomputed {a}, stored {b}")
                bad += 1
                break
    print(f"{len(ours)} aggregate rows checked, {bad} mismatches")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
