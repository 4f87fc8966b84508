#!/usr/bin/env python3
"""Update-consistency defects for chains of 1..8 epochs, plus the reversion experiment.

    python scripts/ue_chain_report.py --preset DESK --trials 50 --max-chain 8
"""
import argparse

from kih.entropy import Entropy
from kih.kihprf import sample_instance
from kih.presets import get_preset
from kih.report import format_report
from kih.ue import unidirectionality_experiment, update_consistency_report


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", default=None)
    ap.add_argument("--tree", default=None)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--max-chain", type=int, default=8)
    ap.add_argument("--robust", type=int, default=None, help="message modulus t for robust mode")
    ap.add_argument("--entropy", default="00" * 31 + "01")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--verify", action="store_true")
    args = ap.parse_args()

    root = Entropy(args.entropy)
    inst = sample_instance(get_preset(args.preset, args.tree), root.child("instance"))
    fields = {}
    for length in range(1, args.max_chain + 1):
        rep = update_consistency_report(inst, args.trials, root.child(f"chain/{length}"), chain_length=length,
                                        t=args.robust, jobs=args.jobs, verify=args.verify)
        rep.pop("defect.per_trial")
        fields.update({f"chain{length}.{k}": v for k, v in rep.items()})
    uni = unidirectionality_experiment(inst, args.trials, root.child("unidirectionality"), t=args.robust,
                                       jobs=args.jobs)
    fields.update({f"unidirectionality.{k}": v for k, v in uni.items()})
    print(format_report(fields), end="")


if __name__ == "__main__":
    main()
