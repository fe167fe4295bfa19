"""Work-count sweeps for the three benchmark families.

Writes one CSV per family and prints the log-log slope of work units per strategy.

    python scripts/bench.py --out results/
"""

import argparse
import csv
import math
import statistics
from pathlib import Path

from condfact.cli import CSV_HEADER, bench_one

SWEEPS = {
    "exA5": ([100, 200, 400, 800], ["afp", "remainder"]),
    "exA71": ([64, 128, 256, 512], ["wfmst", "wfrem", "mafp", "mrem"]),
    "exA5loop": ([64, 128, 256, 512], ["wfmst", "wfrem", "mafp", "mrem"]),
}


def slope(ns, ws):
    return statistics.linear_regression([math.log(n) for n in ns], [math.log(w) for w in ws]).slope


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--family", choices=sorted(SWEEPS), action="append")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for family in args.family or SWEEPS:
        ns, strategies = SWEEPS[family]
        rows = [bench_one(family, n, s) for n in ns for s in strategies]
        with open(out / f"{family}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            w.writerows(r.cells() for r in rows)
        for s in strategies:
            work = [r.stats.work_units for r in rows if r.strategy == s]
            print(f"{family:9s} {s:9s} work={work} slope={slope(ns, work):.3f}")


if __name__ == "__main__":
    main()
