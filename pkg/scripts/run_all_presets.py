"""Run every sweep preset and write each into its own subdirectory.

    python scripts/run_all_presets.py --out runs --seed 42
"""
import argparse
import sys
import time
from pathlib import Path

from qskr import cli
from qskr.sweep import PRESETS


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    status = 0
    for name in sorted(PRESETS):
        start = time.perf_counter()
        code = cli.main(["sweep", "--preset", name, "--seed", str(args.seed), "--out", str(Path(args.out) / name)])
        print(f"{name}: exit {code} in {time.perf_counter() - start:.2f} s")
        status = status or code
    return status


if __name__ == "__main__":
    sys.exit(main())
