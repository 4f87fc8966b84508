#!/usr/bin/env python3
"""Regenerate tests/golden.json.

Inputs (instances, seeds, nonces, messages) come from fixed entropy streams;
every output value is computed by the pure-Python reference evaluator in
``kih.oracle``, never by the numpy library path. Run once, review the diff,
commit. The test suite only reads the frozen file.
"""
from __future__ import annotations

import json
from pathlib import Path

from kih.entropy import Entropy
from kih.kihprf import keygen, sample_instance
from kih.modmath import ModMatrix
from kih.oracle import Oracle, add, centered_norm, ginv, prg, scale, sub, to_lists
from kih.presets import get_preset
from kih.ue import random_message, ue_next, ue_setup

OUT = Path(__file__).resolve().parents[1] / "tests" / "golden.json"


def zsym(a: str, b: str) -> str:
    return "".join({"11": "0", "00": "Z"}.get(x + y, "1") for x, y in zip(a, b))


def main():
    g = {}

    e = Entropy(b"golden/add")
    A = to_lists(ModMatrix.uniform(3, 4, 16, e))
    B = to_lists(ModMatrix.uniform(3, 4, 16, e))
    g["add_q16"] = {"A": A, "B": B, "sum": add(A, B, 16)}

    e = Entropy(b"golden/decomp")
    M = to_lists(ModMatrix.uniform(2, 10, 256, e))
    g["decomp_q256"] = {"A": M, "decomp": ginv(M, 256)}

    toy = get_preset("TOY")
    inst = sample_instance(toy, Entropy(b"golden/instance"))
    o = Oracle(inst)
    q, p = toy.q, toy.p
    g["instance"] = {"entropy": "golden/instance", "A0": to_lists(inst.A0), "A1": to_lists(inst.A1)}
    g["prg_R"] = {"left_half": "10", "R": prg(toy.salt, "10", toy.n, toy.nd, q)}

    ent = Entropy(b"golden/seeds")
    S1 = to_lists(keygen(toy, ent).S)
    S2 = to_lists(keygen(toy, ent).S)
    g["seeds"] = {"entropy": "golden/seeds", "S1": S1, "S2": S2}
    g["eval_A_10"] = o.node_eval("A", S1, "10")
    g["eval_B_01"] = o.node_eval("B", S1, "01")
    g["eval_C_1Z"] = o.node_eval("C", S1, "1Z")
    g["F_1001"] = o.F(S1, "1001")
    g["Fprime_10_1Z"] = o.F_prime(S1, "10", "1Z")

    x, y = "1001", "1011"
    zero = [[0] * toy.nd for _ in range(toy.n)]
    g["defect"] = {
        "x": x, "y": y,
        "value": o.defect(S1, S2, x, y),
        "self_pair_value": o.defect(S1, zero, x, x),
    }

    # constrained PRF: ones mode, left side, x0 = "10", target "01"
    x0, target = "10", "01"
    x1p = "".join("1" if b == "0" else "0" for b in target)
    value = o.F(S1, x0 + "11")
    got = add(o.F(S2, x0 + x1p), value, p)
    direct = o.F_prime(add(S1, S2, q), x0, zsym(x1p, "11"))
    # degenerate: k1 = 0 and x1' equal to the padding
    got0 = add(o.F(zero, x0 + "11"), value, p)
    direct0 = o.F_prime(S1, x0, zsym("11", "11"))
    g["cprf"] = {
        "x0": x0, "target": target,
        "value": value,
        "output": got,
        "defect": centered_norm(sub(got, direct, p), p),
        "degenerate_defect": centered_norm(sub(got0, direct0, p), p),
    }

    ent = Entropy(b"golden/ue")
    ki = ue_setup(inst, ent)
    m = to_lists(random_message(inst, ent).values)
    i = "01"
    k = to_lists(ki.k.S)
    body = add(o.F_prime(k, i, ki.nonce), m, p)
    new_key, tok = ue_next(inst, ki, ent)
    k_next_oracle = sub(scale(2, k, q), to_lists(new_key.k.S), q)  # recovers the sampled k_{e+1}
    dk = sub(k_next_oracle, k, q)
    assert dk == to_lists(tok.dk.S)
    dN = zsym(ki.nonce, new_key.nonce)
    updated = o.upd(body, dk, i, dN)
    fresh = add(o.F_prime(sub(scale(2, k, q), k_next_oracle, q), i, new_key.nonce), m, p)
    degenerate = o.upd(body, zero, i, zsym(ki.nonce, ki.nonce))
    fresh_same = add(o.F_prime(k, i, ki.nonce), m, p)
    g["ue"] = {
        "entropy": "golden/ue",
        "k0": k, "nonce0": ki.nonce,
        "message": m, "data_id": i,
        "ciphertext": body,
        "token_dk": dk, "token_dN": dN,
        "k1": to_lists(new_key.k.S), "nonce1": new_key.nonce,
        "updated": updated,
        "update_defect": centered_norm(sub(updated, fresh, p), p),
        "degenerate_defect": centered_norm(sub(degenerate, fresh_same, p), p),
    }

    OUT.write_text(json.dumps(g, indent=1, sort_keys=True) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
