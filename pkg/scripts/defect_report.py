#!/usr/bin/env python3
"""Homomorphism-defect distribution per tree shape.

    python scripts/defect_report.py --preset TOY --trials 500 --verify
"""
import argparse

from kih.entropy import Entropy
from kih.harness import DEFAULT_SHAPES, defect_report
from kih.presets import get_preset
from kih.report import format_report


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", default=None)
    ap.add_argument("--shapes", default=",".join(DEFAULT_SHAPES))
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--entropy", default="00" * 31 + "01")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--verify", action="store_true")
    args = ap.parse_args()
    fields = defect_report(get_preset(args.preset), args.trials, Entropy(args.entropy), args.shapes.split(","),
                           jobs=args.jobs, verify=args.verify)
    print(format_report(fields), end="")


if __name__ == "__main__":
    main()
