"""``kih`` command-line front end.

Exit codes: 0 success, 2 usage, 3 data format, 4 invariant violation,
5 precondition. Every command is deterministic once ``--entropy`` is fixed.
"""
from __future__ import annotations

import argparse
import hashlib
import sys
from dataclasses import dataclass
from pathlib import Path

from . import fileformat as ff
from .bench import bench
from .cprf import Mode, Side, constrain, eval_constrained
from .entropy import Entropy
from .errors import EpochError, FormatError, KihError
from .harness import DEFAULT_SHAPES, defect_report
from .kihprf import SymbolString, keygen, prf_eval, prf_eval_prime, sample_instance
from .modmath import ModMatrix, Params
from .presets import PRESETS, describe, get_preset
from .report import format_report
from .selftest import run_selftest
from .ue import (Ciphertext, check_robust, EpochKey, Message, UpdateToken, ue_dec, ue_enc, ue_next, ue_setup, ue_upd,
                 unidirectionality_experiment, update_consistency_report)


def _hex(value: str) -> bytes:
    try:
        return bytes.fromhex(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a hex string: {value!r}") from None


def _positive(value: str) -> int:
    try:
        v = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {value!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _sizes(value: str) -> list[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {value!r}") from None


@dataclass(frozen=True)
class RunConfig:
    """What a subcommand needs besides its own file arguments."""

    command: str
    preset: str | None = None
    tree: str | None = None
    entropy_seed: bytes | None = None
    trials: int = 1
    jobs: int = 1

    def __post_init__(self):
        if self.trials < 1 or self.jobs < 1:
            raise argparse.ArgumentTypeError("trial and job counts must be >= 1")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        tree = getattr(args, "tree", None)
        return cls(command=args.command, preset=getattr(args, "preset", None),
                   tree=tree if isinstance(tree, str) else None, entropy_seed=getattr(args, "entropy", None),
                   trials=getattr(args, "trials", 1), jobs=getattr(args, "jobs", 1))

    @property
    def params(self) -> Params:
        return get_preset(self.preset, self.tree)

    def entropy(self, default: bytes | None = None) -> Entropy:
        seed = self.entropy_seed if self.entropy_seed is not None else default
        return Entropy(seed) if seed is not None else Entropy.system()


def matrix_report(m: ModMatrix, label: str) -> dict:
    return {
        f"{label}.shape": f"{m.rows}x{m.cols}",
        f"{label}.modulus": m.modulus,
        f"{label}.sha256": hashlib.sha256(m.to_bytes()).hexdigest(),
        f"{label}.entries": [int(v) for v in m.entries.flat],
    }


# Subcommand handlers. Each returns the text to print.


def cmd_instance(args) -> str:
    params = args.cfg.params
    inst = sample_instance(params, args.cfg.entropy())
    ff.write(args.out, ff.dump_instance(inst))
    return format_report({"instance_id": inst.instance_id, "written": args.out, **describe(params)})


def cmd_keygen(args) -> str:
    params = ff.load_instance(ff.read(args.instance)).params if args.instance else args.cfg.params
    seed = keygen(params, args.cfg.entropy())
    ff.write(args.out, ff.dump_seed(params, seed))
    return format_report({"fingerprint": seed.fingerprint, "written": args.out})


def _inst_seed(args):
    inst = ff.load_instance(ff.read(args.instance))
    params, seed = ff.load_seed(ff.read(args.seed))
    inst.check_seed(seed)
    return inst, seed


def cmd_eval(args) -> str:
    inst, seed = _inst_seed(args)
    out = prf_eval(inst, seed, args.input)
    return format_report({"input": args.input, **matrix_report(out, "output")})


def cmd_eval_prime(args) -> str:
    inst, seed = _inst_seed(args)
    out = prf_eval_prime(inst, seed, args.z0, SymbolString(args.z1))
    return format_report({"z0": args.z0, "z1": args.z1, **matrix_report(out, "output")})


def cmd_defect(args) -> str:
    params = args.cfg.params
    shapes = args.tree or list(DEFAULT_SHAPES)
    fields = defect_report(params, args.trials, args.cfg.entropy(), shapes, jobs=args.jobs, verify=args.verify)
    return format_report(fields)


def cmd_cprf_constrain(args) -> str:
    inst, seed = _inst_seed(args)
    ck = constrain(inst, seed, args.x0, args.side, args.mode)
    ff.write(args.out, ff.dump_constrained(ck))
    return format_report({"side": ck.side.value, "mode": ck.mode.value, "x0": ck.x0, "written": args.out})


def cmd_cprf_eval(args) -> str:
    inst, seed = _inst_seed(args)
    ck = ff.load_constrained(ff.read(args.key))
    target = args.target if ck.mode == Mode.ONES else SymbolString(args.target)
    out = eval_constrained(ck, inst, seed, target)
    return format_report({"target": args.target, **matrix_report(out, "output")})


# Updatable encryption keeps its state in a store directory:
#   instance.kih, key.kih (owner), token-<e>.kih, ct-<id>.kih (host)


def _store(args) -> Path:
    p = Path(args.store)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _store_instance(store: Path):
    return ff.load_instance(ff.read(store / "instance.kih"))


def _store_key(store: Path) -> EpochKey:
    return ff.load_ue(ff.read(store / "key.kih"), EpochKey)


def _parse_message(text: str, inst, t: int | None) -> Message:
    nd = inst.params.nd
    if t is not None:
        check_robust(t, inst.params.p)
    modulus = t or inst.params.p
    try:
        vals = [int(v) for v in text.split(",") if v.strip()] if text else []
    except ValueError:
        raise FormatError(f"message must be comma-separated integers, got {text!r}") from None
    if len(vals) > nd * nd or any(not 0 <= v < modulus for v in vals):
        raise FormatError(f"message needs at most {nd * nd} entries in [0, {modulus})")
    vals += [0] * (nd * nd - len(vals))
    return Message(ModMatrix([vals[r * nd:(r + 1) * nd] for r in range(nd)], modulus), t)


def cmd_ue_setup(args) -> str:
    store = _store(args)
    entropy = args.cfg.entropy()
    inst = sample_instance(args.cfg.params, entropy.child("instance"))
    key = ue_setup(inst, entropy.child("setup"))
    ff.write(store / "instance.kih", ff.dump_instance(inst))
    ff.write(store / "key.kih", ff.dump_ue(key))
    return format_report({"epoch": key.epoch, "instance_id": inst.instance_id, "store": str(store)})


def cmd_ue_enc(args) -> str:
    store = _store(args)
    inst, key = _store_instance(store), _store_key(store)
    m = _parse_message(args.message, inst, args.robust)
    c = ue_enc(inst, key, m, args.id)
    path = store / f"ct-{c.data_id}.kih"
    ff.write(path, ff.dump_ue(c))
    return format_report({"epoch": c.epoch, "data_id": c.data_id, "written": str(path)})


def cmd_ue_dec(args) -> str:
    store = _store(args)
    inst, key = _store_instance(store), _store_key(store)
    c = ff.load_ue(ff.read(store / f"ct-{args.id}.kih"), Ciphertext)
    m = ue_dec(inst, key, c)
    return format_report({"epoch": c.epoch, "data_id": c.data_id, "mode": "raw" if m.t is None else f"robust:{m.t}",
                          "message": [int(v) for v in m.values.entries.flat]})


def cmd_ue_next(args) -> str:
    store = _store(args)
    inst, key = _store_instance(store), _store_key(store)
    new_key, token = ue_next(inst, key, args.cfg.entropy())
    tpath = store / f"token-{token.epoch}.kih"
    ff.write(tpath, ff.dump_ue(token))
    ff.write(store / "key.kih", ff.dump_ue(new_key))
    return format_report({"epoch": new_key.epoch, "token": str(tpath), "token.dN": token.dN.text,
                          "token.dN.bit_length": token.dN.bit_length})


def cmd_ue_upd(args) -> str:
    store = _store(args)
    inst = _store_instance(store)
    if args.token:
        token = ff.load_ue(ff.read(args.token), UpdateToken)
    else:
        tokens = sorted(store.glob("token-*.kih"), key=lambda p: int(p.stem.split("-")[1]))
        if not tokens:
            raise EpochError("no update token in the store")
        token = ff.load_ue(ff.read(tokens[-1]), UpdateToken)
    updated = skipped = 0
    for path in sorted(store.glob("ct-*.kih")):
        c = ff.load_ue(ff.read(path), Ciphertext)
        if c.epoch != token.epoch - 1:
            skipped += 1
            continue
        ff.write(path, ff.dump_ue(ue_upd(inst, token, c)))
        updated += 1
    return format_report({"token.epoch": token.epoch, "updated": updated, "skipped": skipped})


def cmd_ue_demo(args) -> str:
    entropy = args.cfg.entropy()
    params = args.cfg.params
    inst = sample_instance(params, entropy.child("instance"))
    fields = {f"consistency.{k}": v for k, v in update_consistency_report(
        inst, args.trials, entropy.child("consistency"), chain_length=args.epochs, t=args.robust,
        jobs=args.jobs, verify=args.verify).items() if k != "defect.per_trial"}
    fields.update({f"unidirectionality.{k}": v for k, v in unidirectionality_experiment(
        inst, args.trials, entropy.child("unidirectionality"), t=args.robust, jobs=args.jobs).items()})
    return format_report(fields)


def cmd_bench(args) -> str:
    if not args.sizes:
        raise argparse.ArgumentTypeError("empty size list")
    return format_report(bench(args.cfg.params, args.sizes, args.cfg.entropy(), args.reps))


def cmd_selftest(args) -> str:
    lines: list[str] = []
    ok = run_selftest(args.cfg.params, args.cfg.entropy(b"selftest"),
                      lines.append)
    text = "\n".join(lines) + "\n"
    if not ok:
        sys.stdout.write(text)
        raise _Fail(4)
    return text


class _Fail(Exception):
    def __init__(self, code):
        self.code = code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", choices=sorted(PRESETS), type=str.upper,
                        help="parameter preset (default: $KIH_PRESET or TOY)")
    common.add_argument("--entropy", type=_hex, help="hex seed for all randomness (default: OS entropy)")

    tree = argparse.ArgumentParser(add_help=False)
    tree.add_argument("--tree", help="tree descriptor overriding the preset's")

    ev = argparse.ArgumentParser(add_help=False)
    ev.add_argument("--instance", required=True)
    ev.add_argument("--seed", required=True)

    parser = argparse.ArgumentParser(prog="kih", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("instance", parents=[common, tree], help="sample public matrices A0, A1")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_instance)

    p = sub.add_parser("keygen", parents=[common, tree], help="sample a seed")
    p.add_argument("--instance")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("eval", parents=[ev], help="evaluate F_S(y)")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("eval-prime", parents=[ev], help="evaluate F'_S(z0, z1); z1 over 0/1/Z")
    p.add_argument("--z0", required=True)
    p.add_argument("--z1", required=True)
    p.set_defaults(func=cmd_eval_prime)

    p = sub.add_parser("defect", parents=[common], help="homomorphism-defect distribution per tree shape")
    p.add_argument("--tree", action="append", help="tree shape; repeatable (default: four standard shapes)")
    p.add_argument("--trials", type=_positive, default=100)
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--verify", action="store_true", help="recompute every defect with the reference evaluator")
    p.set_defaults(func=cmd_defect)

    cp = sub.add_parser("cprf", help="constrained PRF keys").add_subparsers(dest="cprf_command", required=True)
    p = cp.add_parser("constrain", parents=[ev])
    p.add_argument("--side", choices=[s.value for s in Side], required=True)
    p.add_argument("--mode", choices=[m.value for m in Mode], required=True)
    p.add_argument("--x0", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cprf_constrain)
    p = cp.add_parser("eval", parents=[ev])
    p.add_argument("--key", required=True)
    p.add_argument("--target", required=True, help="bits (ones mode) or symbols over 1/Z (zeros mode)")
    p.set_defaults(func=cmd_cprf_eval)

    up = sub.add_parser("ue", help="updatable encryption").add_subparsers(dest="ue_command", required=True)
    store = argparse.ArgumentParser(add_help=False)
    store.add_argument("--store", required=True)
    p = up.add_parser("setup", parents=[common, tree, store])
    p.set_defaults(func=cmd_ue_setup)
    p = up.add_parser("enc", parents=[store])
    p.add_argument("--id", required=True)
    p.add_argument("--message", default="", help="comma-separated entries, row-major, zero padded")
    p.add_argument("--robust", type=_positive, help="robust mode with message modulus t")
    p.set_defaults(func=cmd_ue_enc)
    p = up.add_parser("dec", parents=[store])
    p.add_argument("--id", required=True)
    p.set_defaults(func=cmd_ue_dec)
    p = up.add_parser("next", parents=[store])
    p.add_argument("--entropy", type=_hex)
    p.set_defaults(func=cmd_ue_next)
    p = up.add_parser("upd", parents=[store])
    p.add_argument("--token")
    p.set_defaults(func=cmd_ue_upd)
    p = up.add_parser("demo", parents=[common, tree])
    p.add_argument("--store", help="ignored; accepted for symmetry with the other ue commands")
    p.add_argument("--epochs", type=_positive, default=4)
    p.add_argument("--trials", type=_positive, default=20)
    p.add_argument("--robust", type=_positive)
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_ue_demo)

    p = sub.add_parser("bench", parents=[common], help="timing trend versus tree size")
    p.add_argument("--sizes", type=_sizes, default=[2, 4, 8, 16])
    p.add_argument("--reps", type=_positive, default=5)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("selftest", parents=[common, tree], help="run the invariant sweep")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.cfg = RunConfig.from_args(args)
        sys.stdout.write(args.func(args))
    except argparse.ArgumentTypeError as exc:
        parser.print_usage(sys.stderr)
        print(f"kih: error: {exc}", file=sys.stderr)
        return 2
    except _Fail as exc:
        return exc.code
    except KihError as exc:
        print(f"kih: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
