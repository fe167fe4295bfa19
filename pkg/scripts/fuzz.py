"""Run every fuzz mode of the CLI with the acceptance-sized counts."""

import argparse
import sys
import time

from condfact.cli import main as cli

RUNS = [("confluence", 1000), ("oracle", 500), ("magic", 200)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--scale", type=float, default=1.0, help="multiply every count")
    args = ap.parse_args()
    worst = 0
    for mode, count in RUNS:
        t0 = time.perf_counter()
        code = cli(["fuzz", "--mode", mode, "--count", str(max(1, int(count * args.scale))), "--seed", str(args.seed)])
        print(f"{mode}: exit {code} in {time.perf_counter() - t0:.1f} s")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
