"""Updatable encryption with unidirectional updates on top of ``F'``.

Owner side: :func:`ue_setup`, :func:`ue_enc`, :func:`ue_dec`, :func:`ue_next`.
Host side: :func:`ue_upd`, which sees only the token, the ciphertext and the
public instance.

Keys, tokens and ciphertexts all carry epoch numbers. A token for epoch
``e+1`` applies only to ciphertexts of epoch ``e``.

Messages come in two modes. ``raw`` adds an ``nd x nd`` matrix mod p
directly to the PRF output. ``robust`` embeds a matrix over Z_t as
``entry * floor(p/t)`` and decodes to the nearest multiple, so small
additive errors picked up during updates are absorbed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EpochError, IntegrityError, LengthError, PreconditionError, StructureError
from .kihprf import PrfInstance, Seed, SymbolString, almost_xor, as_bits, keygen, prf_eval_prime
from .modmath import ModMatrix, centered_inf_norm
from .oracle import Oracle, add as o_add, centered_norm, scale as o_scale, sub as o_sub, to_lists
from .report import histogram, run_trials


@dataclass(frozen=True, eq=False)
class EpochKey:
    epoch: int
    k: Seed
    nonce: str


@dataclass(frozen=True, eq=False)
class UpdateToken:
    epoch: int
    dk: Seed
    dN: SymbolString


@dataclass(frozen=True, eq=False)
class Message:
    """``values`` mod p in raw mode (``t is None``), or mod t in robust mode."""

    values: ModMatrix
    t: int | None = None

    def __eq__(self, other):
        return isinstance(other, Message) and self.t == other.t and self.values == other.values

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Ciphertext:
    epoch: int
    data_id: str
    body: ModMatrix
    t: int | None = None


def check_robust(t: int, p: int):
    if not 2 <= t <= p // 4:
        raise PreconditionError(f"robust mode needs 2 <= t <= p/4 = {p // 4}, got t={t}")


def encode(m: Message, p: int) -> ModMatrix:
    if m.t is None:
        if m.values.modulus != p:
            raise StructureError(f"raw messages live mod p={p}")
        return m.values
    check_robust(m.t, p)
    if m.values.modulus != m.t:
        raise StructureError(f"robust message must be mod t={m.t}")
    return ModMatrix.reduce(m.values.entries * (p // m.t), p)


def decode(v: ModMatrix, t: int) -> Message:
    """Nearest multiple of ``floor(p/t)``, halves rounded up, wrapping at p."""
    p = v.modulus
    check_robust(t, p)
    step = p // t
    out = []
    for row in v.tolist():
        dec_row = []
        for x in row:
            k = (2 * x + step) // (2 * step)
            residual = x - k * step
            if k >= t:
                k, residual = 0, x - p
            if 2 * abs(residual) >= step:
                raise IntegrityError(f"residual {residual} exceeds head-room {step / 2}")
            dec_row.append(k)
        out.append(dec_row)
    return Message(ModMatrix(out, t), t)


def random_message(inst: PrfInstance, entropy, t: int | None = None) -> Message:
    nd = inst.params.nd
    if t is None:
        return Message(ModMatrix.uniform(nd, nd, inst.params.p, entropy))
    check_robust(t, inst.params.p)
    return Message(ModMatrix.uniform(nd, nd, t, entropy), t)


def ue_setup(inst: PrfInstance, entropy) -> EpochKey:
    k0 = keygen(inst.params, entropy)
    nonce = entropy.bits(inst.tree.leaves)
    return EpochKey(0, k0, nonce)


def _pad_id(inst: PrfInstance, i: str) -> str:
    return as_bits(i, inst.tree.leaves)


def ue_enc(inst: PrfInstance, ki: EpochKey, m: Message, i: str) -> Ciphertext:
    i = _pad_id(inst, i)
    body = prf_eval_prime(inst, ki.k, i, SymbolString(ki.nonce)) + encode(m, inst.params.p)
    return Ciphertext(ki.epoch, i, body, m.t)


def ue_dec(inst: PrfInstance, ki: EpochKey, c: Ciphertext) -> Message:
    if ki.epoch != c.epoch:
        raise EpochError(f"key is for epoch {ki.epoch}, ciphertext for epoch {c.epoch}")
    v = c.body - prf_eval_prime(inst, ki.k, c.data_id, SymbolString(ki.nonce))
    return Message(v) if c.t is None else decode(v, c.t)


def rotate(ki: EpochKey, k_next: Seed, n_next: str) -> tuple[EpochKey, UpdateToken]:
    """Deterministic core of ``ue_next`` given the freshly sampled key and nonce."""
    if len(n_next) != len(ki.nonce):
        raise LengthError("nonce length changed across epochs")
    token = UpdateToken(ki.epoch + 1, k_next - ki.k, almost_xor(ki.nonce, n_next))
    new_key = EpochKey(ki.epoch + 1, 2 * ki.k - k_next, n_next)
    return new_key, token


def ue_next(inst: PrfInstance, ki: EpochKey, entropy) -> tuple[EpochKey, UpdateToken]:
    n_next = entropy.bits(inst.tree.leaves)
    k_next = keygen(inst.params, entropy)
    return rotate(ki, k_next, n_next)


def ue_upd(inst: PrfInstance, tok: UpdateToken, c: Ciphertext) -> Ciphertext:
    if tok.epoch != c.epoch + 1:
        raise EpochError(f"token for epoch {tok.epoch} cannot update a ciphertext of epoch {c.epoch}")
    body = c.body - prf_eval_prime(inst, tok.dk, c.data_id, tok.dN)
    return Ciphertext(tok.epoch, c.data_id, body, c.t)


# Measurements


@dataclass
class ChainTrace:
    """Everything sampled in one trial, enough to replay it independently."""

    data_id: str
    message: Message
    keys: list[EpochKey] = field(default_factory=list)
    sampled: list[tuple[Seed, str]] = field(default_factory=list)
    defects: list[int] = field(default_factory=list)
    decoded: bool | None = None


def consistency_chain(inst: PrfInstance, ki: EpochKey, m: Message, i: str,
                      steps: list[tuple[Seed, str]]) -> ChainTrace:
    """Encrypt under ``ki``, rotate through ``steps`` and update the ciphertext each time.

    After every update, records ``||C_updated - enc(new key, m)||`` centered mod p.
    """
    trace = ChainTrace(data_id=_pad_id(inst, i), message=m, keys=[ki], sampled=list(steps))
    c = ue_enc(inst, ki, m, i)
    for k_next, n_next in steps:
        ki, tok = rotate(ki, k_next, n_next)
        c = ue_upd(inst, tok, c)
        fresh = ue_enc(inst, ki, m, i)
        trace.keys.append(ki)
        trace.defects.append(centered_inf_norm(c.body - fresh.body))
    try:
        trace.decoded = ue_dec(inst, ki, c) == m
    except IntegrityError:
        trace.decoded = False
    return trace


def oracle_chain_defects(inst: PrfInstance, trace: ChainTrace) -> list[int]:
    """Replay a trace with the reference evaluator only."""
    o = Oracle(inst)
    q, p = inst.params.q, inst.params.p
    m = to_lists(encode(trace.message, p))
    k, nonce = to_lists(trace.keys[0].k.S), trace.keys[0].nonce
    body = o_add(o.F_prime(k, trace.data_id, nonce), m, p)
    out = []
    for k_next_seed, n_next in trace.sampled:
        k_next = to_lists(k_next_seed.S)
        dk = o_sub(k_next, k, q)
        dN = "".join({"11": "0", "00": "Z"}.get(a + b, "1") for a, b in zip(nonce, n_next))
        body = o.upd(body, dk, trace.data_id, dN)
        k = o_sub(o_scale(2, k, q), k_next, q)
        nonce = n_next
        expected = o_add(o.F_prime(k, trace.data_id, nonce), m, p)
        out.append(centered_norm(o_sub(body, expected, p), p))
    return out


def _consistency_trial(args) -> ChainTrace:
    inst, entropy, chain_length, t = args
    ki = ue_setup(inst, entropy)
    m = random_message(inst, entropy, t)
    i = entropy.bits(inst.tree.leaves)
    steps = []
    for _ in range(chain_length):
        n_next = entropy.bits(inst.tree.leaves)
        steps.append((keygen(inst.params, entropy), n_next))
    return consistency_chain(inst, ki, m, i, steps)


def update_consistency_report(inst: PrfInstance, trials: int, entropy, chain_length: int = 1,
                              t: int | None = None, jobs: int = 1, verify: bool = False) -> dict:
    """Run setup/enc/next/upd chains and measure how far updated ciphertexts sit from fresh ones.

    With ``verify`` every trace is replayed through the reference evaluator
    and mismatches are counted.
    """
    if trials < 1 or chain_length < 1:
        raise PreconditionError("trials and chain length must be >= 1")
    traces = run_trials(_consistency_trial, [(inst, entropy.child(j), chain_length, t) for j in range(trials)], jobs)
    final = [tr.defects[-1] for tr in traces]
    fields = {
        "chain_length": chain_length,
        "mode": "raw" if t is None else f"robust:{t}",
        "trials": trials,
        "p": inst.params.p,
        "tree": inst.params.tree,
        "defect.final.hist": histogram(final),
        "defect.final.max": max(final),
        "defect.final.zero_fraction": sum(d == 0 for d in final) / trials,
        "defect.per_trial": [",".join(map(str, tr.defects)) for tr in traces],
        "defect.mean_by_epoch": [sum(tr.defects[e] for tr in traces) / trials for e in range(chain_length)],
        "decode.success": sum(bool(tr.decoded) for tr in traces),
    }
    if verify:
        fields["oracle.mismatches"] = sum(oracle_chain_defects(inst, tr) != tr.defects for tr in traces)
    return fields


@dataclass
class ReversionTrial:
    c_prev: Ciphertext
    c_next: Ciphertext
    candidate_add: ModMatrix
    candidate_sub: ModMatrix

    @property
    def add_reverts(self) -> bool:
        return self.candidate_add == self.c_prev.body

    @property
    def sub_reverts(self) -> bool:
        return self.candidate_sub == self.c_prev.body


def reversion_attempt(inst: PrfInstance, c_next: Ciphertext, tok: UpdateToken) -> tuple[ModMatrix, ModMatrix]:
    """The two ways to undo an update with its token: add back, or subtract again."""
    f = prf_eval_prime(inst, tok.dk, c_next.data_id, tok.dN)
    return c_next.body + f, c_next.body - f


def _reversion_trial(args) -> ReversionTrial:
    inst, entropy, t = args
    ki = ue_setup(inst, entropy)
    m = random_message(inst, entropy, t)
    c_prev = ue_enc(inst, ki, m, entropy.bits(inst.tree.leaves))
    _, tok = ue_next(inst, ki, entropy)
    c_next = ue_upd(inst, tok, c_prev)
    cand_add, cand_sub = reversion_attempt(inst, c_next, tok)
    return ReversionTrial(c_prev, c_next, cand_add, cand_sub)


def unidirectionality_experiment(inst: PrfInstance, trials: int, entropy, t: int | None = None,
                                 jobs: int = 1) -> dict:
    """Try both token-based reversions against the true previous ciphertext.

    Reports how often each candidate equals ``C_e`` bit-exactly and how far
    each lands from it. Nothing is asserted here.
    """
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    res = run_trials(_reversion_trial, [(inst, entropy.child(j), t) for j in range(trials)], jobs)
    dist_add = [centered_inf_norm(r.candidate_add - r.c_prev.body) for r in res]
    dist_sub = [centered_inf_norm(r.candidate_sub - r.c_prev.body) for r in res]
    return {
        "trials": trials,
        "tree": inst.params.tree,
        "p": inst.params.p,
        "reversions.add_back": sum(r.add_reverts for r in res),
        "reversions.subtract_again": sum(r.sub_reverts for r in res),
        "reversions.total": sum(r.add_reverts or r.sub_reverts for r in res),
        "distance.add_back.hist": histogram(dist_add),
        "distance.subtract_again.hist": histogram(dist_sub),
        "distance.subtract_again.min": min(dist_sub),
    }
