"""Gadget vector/matrix and carry-padded binary decomposition.

``g = (0, 1, 2, ..., 2**(l-1))`` has ``d = l + 1`` slots; slot 0 of every
block is the spare carry slot and is always 0 in a fresh decomposition.
Decompositions live over the integers: adding two of them is plain
component-wise integer addition, never reduced.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import FormatError, StructureError
from .modmath import ModMatrix, Params, decode_array, encode_array, matmul_mod


class Decomp:
    """``nd x m`` matrix of small non-negative integers (no modulus)."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        arr = np.asarray(entries, dtype=np.int64)
        if arr.ndim != 2 or 0 in arr.shape:
            raise StructureError(f"expected a non-empty 2-d array, got shape {arr.shape}")
        if int(arr.min()) < 0:
            raise StructureError("decomposition entries must be non-negative")
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Decomp is immutable")

    def __reduce__(self):
        return (Decomp, (self.entries,))

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self):
        return self.entries.shape

    def __eq__(self, other):
        if not isinstance(other, Decomp):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.entries, other.entries))

    __hash__ = None

    def __add__(self, other):
        return decomp_add(self, other)

    def __repr__(self):
        return f"Decomp({self.rows}x{self.cols})"

    def to_bytes(self) -> bytes:
        return encode_array(self.entries, 0)

    @classmethod
    def from_bytes(cls, data: bytes) -> "Decomp":
        arr, modulus, used = decode_array(data)
        if modulus != 0:
            raise FormatError("a decomposition container must carry modulus 0")
        if used != len(data):
            raise FormatError("trailing bytes after decomposition payload")
        return cls(arr)


@dataclass(frozen=True)
class GadgetContext:
    params: Params

    @cached_property
    def g(self) -> np.ndarray:
        l = self.params.l
        return np.array([0] + [1 << i for i in range(l)], dtype=object)

    @cached_property
    def G(self) -> ModMatrix:
        n, d, q = self.params.n, self.params.d, self.params.q
        block = np.zeros((n, n * d), dtype=object)
        for i in range(n):
            block[i, i * d:(i + 1) * d] = self.g
        return ModMatrix(block % q, q)


def bit_decompose(a: int, ctx: GadgetContext) -> list[int]:
    q, l = ctx.params.q, ctx.params.l
    if not 0 <= a < q:
        raise ValueError(f"{a} is not a residue mod {q}")
    return [0] + [(a >> i) & 1 for i in range(l)]


def mat_decompose(a: ModMatrix, ctx: GadgetContext) -> Decomp:
    """Entry-wise ``g^-1``: row ``i`` of ``a`` becomes rows ``i*d .. i*d+d-1``."""
    n, d, l = ctx.params.n, ctx.params.d, ctx.params.l
    if a.rows != n:
        raise StructureError(f"G^-1 expects {n} rows, got {a.rows}")
    if a.modulus != ctx.params.q:
        raise StructureError(f"G^-1 expects residues mod {ctx.params.q}")
    return Decomp(_decompose(a.entries, n, d, l))


def _decompose(e: np.ndarray, n: int, d: int, l: int) -> np.ndarray:
    m = e.shape[1]
    out = np.zeros((n, d, m), dtype=np.int64)
    if e.dtype == object:
        bits = np.array([[[(int(v) >> i) & 1 for v in row] for i in range(l)] for row in e], dtype=np.int64)
    else:
        bits = (e[:, None, :] >> np.arange(l, dtype=np.int64)[None, :, None]) & 1
    out[:, 1:, :] = bits
    return out.reshape(n * d, m)


def decomp_add(x: Decomp, y: Decomp) -> Decomp:
    if x.shape != y.shape:
        raise StructureError(f"shape mismatch {x.shape} vs {y.shape}")
    return Decomp(x.entries + y.entries)


def reconstruct(x: Decomp, ctx: GadgetContext) -> ModMatrix:
    """``G . x`` computed over Z and reduced mod q."""
    return mul_decomp(ctx.G, x)


def inner_g(vec, ctx: GadgetContext) -> int:
    """Un-reduced integer inner product ``<g, vec>``."""
    return sum(int(gi) * int(v) for gi, v in zip(ctx.g, vec))


def mul_decomp(a: ModMatrix, x: Decomp) -> ModMatrix:
    """``a . x`` with the integer entries of ``x`` lifted into Z_q."""
    if a.cols != x.rows:
        raise StructureError(f"cannot multiply {a.shape} by {x.shape}")
    return ModMatrix._wrap(matmul_mod(a.entries, x.entries, a.modulus), a.modulus)


def times_ginv(a: ModMatrix, b: ModMatrix, ctx: GadgetContext) -> ModMatrix:
    """``a . G^-1(b)``, the step every internal tree node performs."""
    return mul_decomp(a, mat_decompose(b, ctx))
