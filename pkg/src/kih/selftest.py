"""Quick invariant sweep used by ``kih selftest``; stops at the first violation."""
from __future__ import annotations

import itertools

from .bench import flip
from .cprf import Mode, Side, constrain, eval_constrained, solve_x1prime
from .errors import InvariantError
from .gadget import GadgetContext, bit_decompose, inner_g, mat_decompose, reconstruct
from .kihprf import (EvalCache, almost_xor, derive, eval_A, eval_B, eval_incremental, flip_cost, keygen,
                     prf_eval, prf_eval_prime, sample_instance, unwind, unwound_shape, zero_seed)
from .modmath import ModMatrix, Params, round_to_p
from .oracle import Oracle, to_lists
from .treealg import balanced, expansion, leftspine, rightspine, sequentiality
from .ue import random_message, rotate, ue_dec, ue_enc, ue_next, ue_setup


def _check(cond, msg):
    if not cond:
        raise InvariantError(msg)


def check_params(params, entropy):
    _check(params.d == params.l + 1, "d != l + 1")
    _check(2 ** (params.l - 1) < params.q <= 2 ** params.l, "l is not ceil(log2 q)")


def check_rounding(params, entropy):
    q, p = params.q, params.p
    xs = range(q) if q <= 1 << 16 else entropy.uniform(4096, q)
    for x in xs:
        r = round_to_p(x, params)
        err = (r * (q // p) - x) % q
        err = min(err, q - err)
        _check(2 * p * err <= q, f"rounding error too large at x={x}")


def check_gadget(params, entropy):
    ctx = GadgetContext(params)
    for _ in range(20):
        a = ModMatrix.uniform(params.n, 3, params.q, entropy)
        _check(reconstruct(mat_decompose(a, ctx), ctx) == a, "G * G^-1(A) != A")
    for a, b in zip(entropy.uniform(256, params.q), entropy.uniform(256, params.q)):
        v = [x + y for x, y in zip(bit_decompose(a, ctx), bit_decompose(b, ctx))]
        _check(inner_g(v, ctx) % params.q == (a + b) % params.q, "value-linearity failed")
        _check(inner_g(v, ctx) < 2 ** (params.l + 1), "carry head-room exceeded")


def check_trees(params, entropy):
    for k in range(1, 17):
        _check(expansion(leftspine(k)) == k - 1 and sequentiality(leftspine(k)) == min(1, k - 1), "leftspine e/s")
        _check(expansion(rightspine(k)) == min(1, k - 1) and sequentiality(rightspine(k)) == k - 1, "rightspine e/s")
        for t in (leftspine(k), rightspine(k)) + ((balanced(k),) if k & (k - 1) == 0 else ()):
            _check(unwound_shape(unwind(t)) == (expansion(t) + 1, sequentiality(t)), "unwinding shape")


def check_almost_xor(params, entropy):
    _check(almost_xor("1", "1").text == "0" and almost_xor("0", "0").text == "Z", "table rows")
    _check(almost_xor("0", "1").text == "1" and almost_xor("1", "0").text == "1", "table rows")
    for x, y in itertools.product(["".join(b) for b in itertools.product("01", repeat=4)], repeat=2):
        z = almost_xor(x, y)
        _check(z == almost_xor(y, x), "commutativity")
        _check(z.bit_length == 4 + sum(a == b == "0" for a, b in zip(x, y)), "bit-length law")


def check_prf(params, entropy):
    inst = sample_instance(params, entropy)
    k = inst.tree.leaves
    seed = keygen(params, entropy)
    derived0 = derive(inst, zero_seed(params))
    cache = EvalCache()
    y = entropy.bits(2 * k)
    base = prf_eval(inst, seed, y, cache)
    _check(base == prf_eval(inst, seed, y), "memoized != fresh")
    for i in range(2 * k):
        y2 = flip(y, i)
        got = eval_incremental(inst, seed, y2, i, cache)
        _check(got == prf_eval(inst, seed, y2), "incremental != fresh")
        _check(cache.recomputed == flip_cost(inst.tree, i), "recompute count != leaf depth")
        y = y2
    x = entropy.bits(k)
    _check(eval_B(inst, derived0, None, x) == eval_A(inst, None, x), "zero seed: B != A")
    if params.nd <= 32:
        o = Oracle(inst)
        S = to_lists(seed.S)
        for _ in range(5):
            y = entropy.bits(2 * k)
            _check(to_lists(prf_eval(inst, seed, y)) == o.F(S, y), "F disagrees with oracle")
            z1 = almost_xor(entropy.bits(k), entropy.bits(k))
            _check(to_lists(prf_eval_prime(inst, seed, y[:k], z1)) == o.F_prime(S, y[:k], z1),
                   "F' disagrees with oracle")


def check_cprf(params, entropy):
    inst = sample_instance(params, entropy)
    k = inst.tree.leaves
    k0, k1 = keygen(params, entropy), keygen(params, entropy)
    for side, mode in itertools.product(Side, Mode):
        ck = constrain(inst, k0, entropy.bits(k), side, mode)
        target = entropy.bits(k) if mode == Mode.ONES else entropy.bits(k).replace("0", "Z")
        x1p = solve_x1prime(ck, target)
        inp = ck.x0 + x1p if side == Side.LEFT else x1p + ck.x0
        _check(eval_constrained(ck, inst, k1, target) == prf_eval(inst, k1, inp) + ck.value,
               "constrained evaluation != sum of components")


def check_ue(params, entropy):
    inst = sample_instance(params, entropy)
    ki = ue_setup(inst, entropy)
    for _ in range(5):
        m = random_message(inst, entropy)
        i = entropy.bits(inst.tree.leaves)
        _check(ue_dec(inst, ki, ue_enc(inst, ki, m, i)) == m, "same-epoch round trip")
        new, tok = ue_next(inst, ki, entropy)
        _check(new.k + tok.dk == ki.k, "key-chain identity")
        ki = new
    _check(rotate(ki, ki.k, ki.nonce)[1].dk.S.is_zero(), "degenerate rotation token")


CHECKS = [
    ("params", check_params),
    ("rounding", check_rounding),
    ("gadget", check_gadget),
    ("trees", check_trees),
    ("almost_xor", check_almost_xor),
    ("prf", check_prf),
    ("cprf", check_cprf),
    ("ue", check_ue),
]


def run_selftest(params: Params, entropy, emit=print) -> bool:
    for name, fn in CHECKS:
        try:
            fn(params, entropy.child(name))
        except InvariantError as exc:
            emit(f"{name}: FAIL ({exc})")
            return False
        emit(f"{name}: pass")
    return True
