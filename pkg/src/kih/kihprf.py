"""The bi-homomorphic PRF: tree recursions, the two PRF families, almost-XOR.

Inputs are bit strings (``str`` over ``"01"``); the homomorphic input domain
uses :class:`SymbolString` over ``"01Z"`` where ``Z`` stands for the two-bit
symbol produced by ``0 (+) 0``.

Conventions fixed here (the construction leaves them open):

* the selector ``A_{x[0]}`` at an internal node uses the first symbol of the
  input segment owned by that node;
* the symbol ``Z`` selects ``A0``;
* a symbol string for an ``|T|``-leaf tree has exactly ``|T|`` symbols, one per leaf.
"""
from __future__ import annotations

import hashlib
import struct
import threading
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Sequence

from .entropy import XofStream
from .errors import InvariantError, LengthError, PreconditionError, StaleCacheError, StructureError
from .gadget import GadgetContext, times_ginv
from .modmath import ModMatrix, Params, centered_inf_norm, mat_add, round_matrix
from .treealg import FullBinaryTree, Leaf, leaf_depths, parse_tree


class Symbol(str, Enum):
    S0 = "0"
    S1 = "1"
    SZ = "Z"


@dataclass(frozen=True)
class SymbolString:
    """String over {0, 1, Z}; ``Z`` counts as two bits."""

    text: str

    def __post_init__(self):
        if not isinstance(self.text, str) or set(self.text) - set("01Z"):
            raise PreconditionError(f"symbol strings use the alphabet 0/1/Z, got {self.text!r}")

    @classmethod
    def of(cls, value: "SymbolString | str | Sequence[Symbol]") -> "SymbolString":
        if isinstance(value, SymbolString):
            return value
        if isinstance(value, str):
            return cls(value)
        return cls("".join(Symbol(s).value for s in value))

    @property
    def symbols(self) -> tuple[Symbol, ...]:
        return tuple(Symbol(c) for c in self.text)

    @property
    def bit_length(self) -> int:
        return len(self.text) + self.text.count("Z")

    def render_bits(self) -> str:
        return self.text.replace("Z", "00")

    def __len__(self):
        return len(self.text)

    def __str__(self):
        return self.text


def as_bits(x, length: int | None = None) -> str:
    if not isinstance(x, str):
        x = "".join(str(int(b)) for b in x)
    if set(x) - set("01"):
        raise PreconditionError(f"not a bit string: {x!r}")
    if length is not None and len(x) != length:
        raise LengthError(f"expected {length} bits, got {len(x)}")
    return x


_AXOR = {("1", "1"): "0", ("0", "0"): "Z", ("0", "1"): "1", ("1", "0"): "1"}


def almost_xor(x: str, y: str) -> SymbolString:
    x, y = as_bits(x), as_bits(y)
    if len(x) != len(y):
        raise LengthError(f"almost-XOR operands differ in length ({len(x)} vs {len(y)})")
    return SymbolString("".join(_AXOR[a, b] for a, b in zip(x, y)))


@dataclass(frozen=True, eq=False)
class Seed:
    S: ModMatrix

    def __add__(self, other: "Seed") -> "Seed":
        return Seed(self.S + other.S)

    def __sub__(self, other: "Seed") -> "Seed":
        return Seed(self.S - other.S)

    def __rmul__(self, k: int) -> "Seed":
        return Seed(k * self.S)

    def __neg__(self) -> "Seed":
        return Seed(-self.S)

    def __eq__(self, other):
        return isinstance(other, Seed) and self.S == other.S

    __hash__ = None

    @cached_property
    def fingerprint(self) -> str:
        return hashlib.sha256(self.S.to_bytes()).hexdigest()[:32]


@dataclass(frozen=True, eq=False)
class PrfInstance:
    """Public parameters: ``Params`` plus the uniformly sampled ``A0, A1``."""

    params: Params
    A0: ModMatrix
    A1: ModMatrix

    def __post_init__(self):
        shape = (self.params.n, self.params.nd)
        for name, m in (("A0", self.A0), ("A1", self.A1)):
            if m.shape != shape or m.modulus != self.params.q:
                raise InvariantError(f"{name} must be {shape[0]}x{shape[1]} mod {self.params.q}")
        if self.A0 == self.A1:
            raise InvariantError("A0 and A1 must differ")
        self.tree  # parse eagerly so a bad descriptor fails here

    @cached_property
    def tree(self) -> FullBinaryTree:
        return parse_tree(self.params.tree)

    @cached_property
    def ctx(self) -> GadgetContext:
        return GadgetContext(self.params)

    @cached_property
    def instance_id(self) -> str:
        h = hashlib.sha256()
        h.update(repr((self.params.n, self.params.q, self.params.p, self.params.tree)).encode())
        h.update(self.params.salt)
        h.update(self.A0.to_bytes())
        h.update(self.A1.to_bytes())
        return h.hexdigest()[:32]

    def check_seed(self, seed: Seed):
        if seed.S.shape != (self.params.n, self.params.nd) or seed.S.modulus != self.params.q:
            raise StructureError(f"seed must be {self.params.n}x{self.params.nd} mod {self.params.q}")


@dataclass(frozen=True)
class DerivedMatrices:
    B0: ModMatrix
    B1: ModMatrix
    C0: ModMatrix
    C1: ModMatrix
    Cbar0: ModMatrix


def derive(inst: PrfInstance, seed: Seed) -> DerivedMatrices:
    inst.check_seed(seed)
    B0 = inst.A0 + seed.S
    B1 = inst.A1 + seed.S
    return DerivedMatrices(B0=B0, B1=B1, C0=inst.A1 + B1, C1=inst.A0 + B1, Cbar0=inst.A0 + B0)


def sample_instance(params: Params, entropy) -> PrfInstance:
    n, nd, q = params.n, params.nd, params.q
    parse_tree(params.tree)
    A0 = ModMatrix.uniform(n, nd, q, entropy)
    A1 = ModMatrix.uniform(n, nd, q, entropy)
    while A1 == A0:
        A1 = ModMatrix.uniform(n, nd, q, entropy)
    return PrfInstance(params, A0, A1)


def keygen(params: Params, entropy) -> Seed:
    return Seed(ModMatrix.uniform(params.n, params.nd, params.q, entropy))


def zero_seed(params: Params) -> Seed:
    return Seed(ModMatrix.zeros(params.n, params.nd, params.q))


def prg_key(salt: bytes, left_half: str) -> bytes:
    return b"kih/prg-R\x00" + struct.pack("<I", len(salt)) + salt + left_half.encode()


def prg_R(inst: PrfInstance, left_half: str) -> ModMatrix:
    """Public pseudorandom ``nd x n`` matrix keyed by (salt, left half)."""
    p = inst.params
    left_half = as_bits(left_half, inst.tree.leaves)
    vals = XofStream(prg_key(p.salt, left_half)).uniform(p.nd * p.n, p.q)
    return ModMatrix.reduce([vals[i * p.n:(i + 1) * p.n] for i in range(p.nd)], p.q)


class EvalCache:
    """Saved intermediate node matrices for incremental re-evaluation.

    One slot per (recursion, tree node): the input segment last seen there and
    the matrix it produced. A slot is reused only when its segment matches, so
    after a single-bit flip just the leaf-to-root path is recomputed.
    ``recomputed`` counts internal-node computations since the last reset.
    Writes are serialized by a lock; sharing one cache between threads is
    safe but gains nothing.
    """

    def __init__(self):
        self._slots: dict = {}
        self._lock = threading.Lock()
        self.recomputed = 0
        self.last: tuple | None = None

    def lookup(self, key, segment):
        slot = self._slots.get(key)
        if slot is not None and slot[0] == segment:
            return slot[1]
        return None

    def store(self, key, segment, value, counted: bool = True):
        with self._lock:
            self._slots[key] = (segment, value)
            if counted:
                self.recomputed += 1

    def reset_counter(self):
        with self._lock:
            self.recomputed = 0

    def __len__(self):
        return len(self._slots)


_SELECT = {"0": "A0", "1": "A1", "Z": "A0"}


def _eval_tree(t, seg: str, leaves: dict, inst: PrfInstance, cache, tag, path: str) -> ModMatrix:
    if isinstance(t, Leaf):
        return leaves[seg]
    if cache is not None:
        hit = cache.lookup((tag, path), seg)
        if hit is not None:
            return hit
    k = t.left.leaves
    left = _eval_tree(t.left, seg[:k], leaves, inst, cache, tag, path + "l")
    right = _eval_tree(t.right, seg[k:], leaves, inst, cache, tag, path + "r")
    selector = getattr(inst, _SELECT[seg[0]])
    value = mat_add(left, times_ginv(selector, right, inst.ctx))
    if cache is not None:
        cache.store((tag, path), seg, value)
    return value


def _tree_arg(inst: PrfInstance, t: FullBinaryTree | None) -> FullBinaryTree:
    return inst.tree if t is None else t


def eval_A(inst: PrfInstance, t: FullBinaryTree | None, x: str, cache: EvalCache | None = None) -> ModMatrix:
    t = _tree_arg(inst, t)
    x = as_bits(x, t.leaves)
    return _eval_tree(t, x, {"0": inst.A0, "1": inst.A1}, inst, cache, ("A", inst.instance_id, str(t)), "")


def eval_B(inst: PrfInstance, derived: DerivedMatrices, t: FullBinaryTree | None, x: str,
           cache: EvalCache | None = None, seed_tag: str = "") -> ModMatrix:
    t = _tree_arg(inst, t)
    x = as_bits(x, t.leaves)
    if cache is not None and not seed_tag:
        seed_tag = hashlib.sha256(derived.B0.to_bytes()).hexdigest()
    tag = ("B", inst.instance_id, str(t), seed_tag)
    return _eval_tree(t, x, {"0": derived.B0, "1": derived.B1}, inst, cache, tag, "")


def eval_C(inst: PrfInstance, derived: DerivedMatrices, t: FullBinaryTree | None, z,
           cache: EvalCache | None = None, seed_tag: str = "") -> ModMatrix:
    t = _tree_arg(inst, t)
    z = SymbolString.of(z)
    if len(z) != t.leaves:
        raise LengthError(f"expected {t.leaves} symbols, got {len(z)}")
    if cache is not None and not seed_tag:
        seed_tag = hashlib.sha256(derived.B0.to_bytes()).hexdigest()
    tag = ("C", inst.instance_id, str(t), seed_tag)
    leaves = {"0": derived.C0, "1": derived.C1, "Z": derived.Cbar0}
    return _eval_tree(t, z.text, leaves, inst, cache, tag, "")


def R0(inst: PrfInstance, left_half: str, cache: EvalCache | None = None) -> ModMatrix:
    """``R(left_half) . A_{left_half[0]}``."""
    key = ("R0", inst.instance_id)
    if cache is not None:
        hit = cache.lookup(key, left_half)
        if hit is not None:
            return hit
    value = prg_R(inst, left_half) @ getattr(inst, _SELECT[left_half[0]])
    if cache is not None:
        cache.store(key, left_half, value, counted=False)
    return value


def _finish(inst: PrfInstance, seed: Seed, a_t: ModMatrix, r0: ModMatrix, inner: ModMatrix) -> ModMatrix:
    exact = mat_add(seed.S.T @ a_t, times_ginv(r0, inner, inst.ctx))
    return round_matrix(exact, inst.params.p)


def prf_eval(inst: PrfInstance, seed: Seed, y: str, cache: EvalCache | None = None) -> ModMatrix:
    """``F_S(y)`` for ``|y| = 2|T|``; an ``nd x nd`` matrix mod p."""
    k = inst.tree.leaves
    y = as_bits(y, 2 * k)
    lh, rh = y[:k], y[k:]
    derived = derive(inst, seed)
    a_t = eval_A(inst, None, lh, cache)
    b_t = eval_B(inst, derived, None, rh, cache, seed.fingerprint)
    out = _finish(inst, seed, a_t, R0(inst, lh, cache), b_t)
    if cache is not None:
        cache.last = ("F", inst.instance_id, seed.fingerprint, y)
    return out


def prf_eval_prime(inst: PrfInstance, seed: Seed, z0: str, z1, cache: EvalCache | None = None) -> ModMatrix:
    """``F'_S(z0, z1)`` with ``z0`` a ``|T|``-bit string and ``z1`` a ``|T|``-symbol string."""
    k = inst.tree.leaves
    z0 = as_bits(z0, k)
    z1 = SymbolString.of(z1)
    if len(z1) != k:
        raise LengthError(f"expected {k} symbols, got {len(z1)}")
    derived = derive(inst, seed)
    a_t = eval_A(inst, None, z0, cache)
    c_t = eval_C(inst, derived, None, z1, cache, seed.fingerprint)
    out = _finish(inst, seed, a_t, R0(inst, z0, cache), c_t)
    if cache is not None:
        cache.last = ("F'", inst.instance_id, seed.fingerprint, z0 + z1.text)
    return out


def combine(o1: ModMatrix, o2: ModMatrix) -> ModMatrix:
    return mat_add(o1, o2)


def homomorphism_defect(inst: PrfInstance, s1: Seed, s2: Seed, x: str, y: str) -> int:
    """``||F'_{S1+S2}(x_lh, x_rh (+) y_rh) - (F_S1(x) + F_S2(y))||_inf``, centered mod p."""
    k = inst.tree.leaves
    x, y = as_bits(x, 2 * k), as_bits(y, 2 * k)
    if x[:k] != y[:k]:
        raise PreconditionError("inputs must share their left halves")
    z1 = almost_xor(x[k:], y[k:])
    direct = prf_eval_prime(inst, s1 + s2, x[:k], z1)
    combined = combine(prf_eval(inst, s1, x), prf_eval(inst, s2, y))
    return centered_inf_norm(direct - combined)


def eval_incremental(inst: PrfInstance, seed: Seed, y: str, flipped_index: int, cache: EvalCache) -> ModMatrix:
    """Re-evaluate ``F_S(y)`` reusing a cache filled by an input one bit away."""
    k = inst.tree.leaves
    y = as_bits(y, 2 * k)
    if cache is None or cache.last is None:
        raise StaleCacheError("no cached evaluation to start from")
    kind, iid, fp, prev = cache.last
    if kind != "F" or iid != inst.instance_id or fp != seed.fingerprint:
        raise StaleCacheError("cache was filled for a different instance, seed or function")
    diff = [i for i in range(2 * k) if prev[i] != y[i]]
    if diff != [flipped_index]:
        raise StaleCacheError(f"cached input differs at {diff}, expected exactly [{flipped_index}]")
    cache.reset_counter()
    return prf_eval(inst, seed, y, cache)


def flip_cost(tree: FullBinaryTree, index: int) -> int:
    """Internal nodes recomputed after flipping bit ``index`` of a ``2|T|``-bit input."""
    return leaf_depths(tree)[index % tree.leaves]


def unwind(t: FullBinaryTree):
    """Symbolic unwinding of ``A_T``: a sum is a list of terms, ``("ginv", sum)`` a decomposition."""
    if isinstance(t, Leaf):
        return ["leaf"]
    return unwind(t.left) + [("ginv", unwind(t.right))]


def unwound_shape(expr) -> tuple[int, int]:
    """(most terms added in one sum, leaf term included; deepest decomposition nesting).

    The first number equals ``e(T) + 1`` on balanced and spine trees. On other
    shapes the recurrence for ``e`` can exceed it, since it also charges a
    left subtree for sums nested inside its right children.
    """
    width = len(expr)
    depth = 0
    for term in expr:
        if term != "leaf":
            w, dd = unwound_shape(term[1])
            width, depth = max(width, w), max(depth, dd + 1)
    return width, depth
