#!/usr/bin/env python3
"""Fresh and incremental evaluation time against |T| for one or more presets.

    python scripts/bench.py --presets TOY,DESK,LARGE --sizes 2,4,8,16
"""
import argparse

from kih.bench import bench
from kih.entropy import Entropy
from kih.presets import get_preset
from kih.report import format_report


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--presets", default="TOY,DESK")
    ap.add_argument("--sizes", default="2,4,8,16")
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--entropy", default="01")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    for name in args.presets.split(","):
        fields = bench(get_preset(name), sizes, Entropy(args.entropy).child(name), args.reps)
        print(f"# {name}")
        print(format_report(fields))


if __name__ == "__main__":
    main()
