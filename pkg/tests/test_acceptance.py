"""Acceptance gate: twelve criteria, each with its tolerance and runtime limit.

Every criterion records one ``PASS``/``FAIL`` line; pytest prints them in the
terminal summary, and ``python tests/test_acceptance.py`` runs them directly.
Nothing here is relaxed to make a criterion pass.
"""
from __future__ import annotations

import itertools
import sys
import time

import numpy as np
import pytest

from kih.bench import bench, flip
from kih.cprf import Mode, Side, constrain, eval_constrained, solve_x1prime, target_symbols
from kih.entropy import Entropy
from kih.gadget import GadgetContext, mat_decompose, reconstruct
from kih.harness import DEFAULT_SHAPES, defect_report
from kih.kihprf import (EvalCache, almost_xor, combine, eval_incremental, flip_cost, homomorphism_defect, keygen,
                        prf_eval, prf_eval_prime, sample_instance)
from kih.modmath import ModMatrix, Params, round_matrix
from kih.oracle import Oracle, to_lists
from kih.presets import get_preset
from kih.report import format_report
from kih.ue import (random_message, ue_dec, ue_enc, ue_next, ue_setup, ue_upd, unidirectionality_experiment)

RESULTS: dict[int, str] = {}


def record(num: int, name: str, limit: float, fn):
    t0 = time.perf_counter()
    try:
        detail = fn()
    except AssertionError as exc:
        elapsed = time.perf_counter() - t0
        RESULTS[num] = f"FAIL  C{num:02d} {name} ({elapsed:.1f}s): {str(exc).splitlines()[0]}"
        raise
    elapsed = time.perf_counter() - t0
    if elapsed >= limit:
        RESULTS[num] = f"FAIL  C{num:02d} {name} ({elapsed:.1f}s): over the {limit:.0f}s limit"
        raise AssertionError(RESULTS[num])
    RESULTS[num] = f"PASS  C{num:02d} {name} ({elapsed:.1f}s): {detail}"


# criterion bodies; each returns a short detail string or raises AssertionError


def c01_gadget_reconstruction():
    for q in (16, 256):
        ctx = GadgetContext(Params(n=1, q=q, p=2))
        a = ModMatrix([list(range(q))], q)
        assert reconstruct(mat_decompose(a, ctx), ctx) == a, f"exhaustive reconstruction failed at q={q}"
    desk = get_preset("DESK")
    ctx = GadgetContext(desk)
    e = Entropy(b"acceptance/c01")
    for j in range(1000):
        a = ModMatrix.uniform(desk.n, desk.nd, desk.q, e)
        assert reconstruct(mat_decompose(a, ctx), ctx) == a, f"DESK matrix {j} did not reconstruct"
    return "all of Z_16 and Z_256; 1000 DESK matrices"


def c02_value_linearity():
    q = 256
    ctx = GadgetContext(Params(n=1, q=q, p=2))
    a, b = np.meshgrid(np.arange(q), np.arange(q), indexing="ij")
    A = ModMatrix(a.reshape(1, -1), q)
    B = ModMatrix(b.reshape(1, -1), q)
    total = mat_decompose(A, ctx) + mat_decompose(B, ctx)
    g = np.array(ctx.g, dtype=np.int64)
    inner = g @ total.entries
    assert np.array_equal(inner % q, (a + b).reshape(-1) % q), "<g, g^-1(a)+g^-1(b)> != a+b"
    return f"{q * q} pairs"


def c03_rounding_bound():
    q, p = 1 << 16, 1 << 8
    x = ModMatrix(np.arange(q, dtype=np.int64).reshape(1, -1), q)
    r = round_matrix(x, p).entries.astype(np.int64)
    err = (r * (q // p) - np.arange(q)) % q
    err = np.minimum(err, q - err)
    worst = int(err.max())
    assert worst <= q // (2 * p), f"max centered error {worst} > {q // (2 * p)}"
    return f"max centered error {worst} <= {q // (2 * p)}"


def c04_cache_coherence():
    checked = 0
    for preset in ("TOY", "DESK"):
        params = get_preset(preset)
        for shape in DEFAULT_SHAPES:
            inst = sample_instance(params.with_tree(shape), Entropy(f"acceptance/c04/{preset}/{shape}".encode()))
            e = Entropy(f"acceptance/c04/{preset}/{shape}/trials".encode())
            k = inst.tree.leaves
            for j in range(1000):
                seed = keygen(params, e)
                y = e.bits(2 * k)
                i = e.uniform(1, 2 * k)[0]
                y2 = flip(y, i)
                cache = EvalCache()
                prf_eval(inst, seed, y, cache)
                inc = eval_incremental(inst, seed, y2, i, cache)
                assert cache.recomputed == flip_cost(inst.tree, i), f"{preset} {shape} #{j}: recompute count"
                memo = prf_eval(inst, seed, y2, cache)
                fresh = prf_eval(inst, seed, y2)
                assert fresh == memo == inc, f"{preset} {shape} #{j}: fresh/memoized/incremental disagree"
                checked += 1
    return f"{checked} triples across TOY, DESK x {len(DEFAULT_SHAPES)} shapes"


def c05_oracle_equivalence():
    toy = get_preset("TOY")
    n = 0
    for shape in DEFAULT_SHAPES:
        inst = sample_instance(toy.with_tree(shape), Entropy(f"acceptance/c05/{shape}".encode()))
        o = Oracle(inst)
        e = Entropy(f"acceptance/c05/{shape}/tuples".encode())
        k = inst.tree.leaves
        for j in range(50):
            s1, s2 = keygen(toy, e), keygen(toy, e)
            S1, S2 = to_lists(s1.S), to_lists(s2.S)
            x = e.bits(2 * k)
            y = x[:k] + e.bits(k)
            z1 = almost_xor(e.bits(k), e.bits(k))
            where = f"{shape} #{j}"
            assert to_lists(prf_eval(inst, s1, x)) == o.F(S1, x), f"F mismatch at {where}"
            assert to_lists(prf_eval_prime(inst, s1, x[:k], z1)) == o.F_prime(S1, x[:k], z1), f"F' mismatch at {where}"
            assert homomorphism_defect(inst, s1, s2, x, y) == o.defect(S1, S2, x, y), f"defect mismatch at {where}"
            ki = ue_setup(inst, e)
            c = ue_enc(inst, ki, random_message(inst, e), x[:k])
            _, tok = ue_next(inst, ki, e)
            got = to_lists(ue_upd(inst, tok, c).body)
            assert got == o.upd(to_lists(c.body), to_lists(tok.dk.S), c.data_id, tok.dN.text), f"upd at {where}"
            n += 1
    return f"{n} tuples, 4 functions each"


def c06_defect_report():
    toy = get_preset("TOY")
    a = defect_report(toy, 500, Entropy(b"acceptance/c06"), DEFAULT_SHAPES, verify=True)
    b = defect_report(toy, 500, Entropy(b"acceptance/c06"), DEFAULT_SHAPES, jobs=4)
    assert a.pop("oracle.verified") is True
    assert format_report(a) == format_report(b), "report differs between runs"
    parts = [f"{s} max={a[f'{s}.defect.max']} le1={a[f'{s}.bound_le_1.fraction']:.3f}" for s in DEFAULT_SHAPES]
    return "deterministic, oracle-verified; " + ", ".join(parts)


def c07_ue_round_trip():
    for preset in ("TOY", "DESK"):
        params = get_preset(preset)
        inst = sample_instance(params, Entropy(f"acceptance/c07/{preset}".encode()))
        e = Entropy(f"acceptance/c07/{preset}/msgs".encode())
        ki = ue_setup(inst, e)
        for j in range(100):
            m = random_message(inst, e)
            assert ue_dec(inst, ki, ue_enc(inst, ki, m, e.bits(inst.tree.leaves))) == m, f"{preset} message {j}"
    return "100 messages each at TOY and DESK"


def c08_key_chain():
    inst = sample_instance(get_preset("TOY"), Entropy(b"acceptance/c08"))
    e = Entropy(b"acceptance/c08/chain")
    ki = ue_setup(inst, e)
    for j in range(100):
        new, tok = ue_next(inst, ki, e)
        assert new.k + tok.dk == ki.k, f"transition {j}"
        ki = new
    return "100 transitions"


def c09_unidirectionality():
    inst = sample_instance(get_preset("DESK"), Entropy(b"acceptance/c09"))
    r = unidirectionality_experiment(inst, 100, Entropy(b"acceptance/c09/trials"))
    detail = (f"add-back reversions {r['reversions.add_back']}/100, "
              f"subtract-again reversions {r['reversions.subtract_again']}/100")
    assert r["reversions.total"] == 0, detail
    return detail


def c10_almost_xor():
    table = {("0", "0"): "Z", ("0", "1"): "1", ("1", "0"): "1", ("1", "1"): "0"}
    for (a, b), z in table.items():
        assert almost_xor(a, b).text == z, f"{a} (+) {b}"
    words = ["".join(w) for w in itertools.product("01", repeat=4)]
    for x, y in itertools.product(words, repeat=2):
        bl = almost_xor(x, y).bit_length
        assert 4 <= bl <= 8, f"bit length {bl} for {x}, {y}"
    return "4-row table; 256 pairs of 4-bit words"


def c11_cprf_identity():
    toy = get_preset("TOY")
    inst = sample_instance(toy, Entropy(b"acceptance/c11"))
    e = Entropy(b"acceptance/c11/tuples")
    k = inst.tree.leaves
    modes = list(itertools.product(Side, Mode))
    for j in range(100):
        side, mode = modes[j % len(modes)]
        k0, k1 = keygen(toy, e), keygen(toy, e)
        ck = constrain(inst, k0, e.bits(k), side, mode)
        target = e.bits(k) if mode == Mode.ONES else e.bits(k).replace("0", "Z")
        x1p = solve_x1prime(ck, target)
        inp = ck.x0 + x1p if side == Side.LEFT else x1p + ck.x0
        assert eval_constrained(ck, inst, k1, target) == combine(prf_eval(inst, k1, inp), ck.value), f"tuple {j}"
    ck = constrain(inst, keygen(toy, e), "0" * k, "left", "ones")
    words = ["".join(w) for w in itertools.product("01", repeat=k)]
    pre = [solve_x1prime(ck, w) for w in words]
    assert sorted(pre) == sorted(words), "ones-mode map is not a bijection"
    assert all(target_symbols(ck, x).text == w for x, w in zip(pre, words))
    return "100 tuples over both sides and modes; ones-mode bijection"


def c12_bench_trend():
    r = bench(get_preset("DESK"), [2, 4, 8, 16], Entropy(b"acceptance/c12"), reps=5)
    for k in (2, 4, 8, 16):
        assert r[f"T{k:02d}.recompute_counts_exact"], f"|T|={k}: recompute count differs from leaf depth"
    trend = ", ".join(f"{k}:{r[f'T{k:02d}.fresh_seconds'] * 1e3:.2f}ms" for k in (2, 4, 8, 16))
    ratios = ", ".join(f"{r[f'T{k:02d}.ratio_vs_T{k // 2:02d}']:.2f}" for k in (4, 8, 16))
    return f"counts exact; fresh {trend}; doubling ratios {ratios}"


CRITERIA = [
    (1, "gadget reconstruction", 5, c01_gadget_reconstruction),
    (2, "value-linearity of decomposition", 5, c02_value_linearity),
    (3, "rounding error bound", 5, c03_rounding_bound),
    (4, "PRF determinism and cache coherence", 60, c04_cache_coherence),
    (5, "oracle equivalence", 60, c05_oracle_equivalence),
    (6, "homomorphism-defect report", 120, c06_defect_report),
    (7, "UE same-epoch round trip", 30, c07_ue_round_trip),
    (8, "UE key-chain identity", 5, c08_key_chain),
    (9, "unidirectionality experiment", 60, c09_unidirectionality),
    (10, "almost-XOR algebra", 1, c10_almost_xor),
    (11, "CPRF definitional identity", 30, c11_cprf_identity),
    (12, "bench trend", 120, c12_bench_trend),
]


@pytest.mark.parametrize("num,name,limit,fn", CRITERIA, ids=[f"C{c[0]:02d}" for c in CRITERIA])
def test_criterion(num, name, limit, fn):
    record(num, name, limit, fn)


if __name__ == "__main__":
    failed = 0
    for num, name, limit, fn in CRITERIA:
        try:
            record(num, name, limit, fn)
        except AssertionError:
            failed += 1
        print(RESULTS[num], flush=True)
    sys.exit(1 if failed else 0)
