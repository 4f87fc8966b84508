"""Exact integer matrices over Z_q / Z_p and the rounding map between them.

Residues are kept canonical in ``[0, modulus)``. Moduli up to 2**62 use
int64 numpy storage; anything larger falls back to Python integers in object
arrays. Results never depend on which path was taken.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import FormatError, ParamsError, StructureError

FAST_LIMIT = 1 << 62
_I64 = (1 << 63) - 1
_F53 = 1 << 53

MATRIX_MAGIC = b"KIHM"
MATRIX_VERSION = 1
_HEADER = struct.Struct("<4sIQQQ")


@dataclass(frozen=True)
class Params:
    """Dimensions, moduli, tree descriptor and public PRG salt.

    ``l = ceil(log2 q)`` and ``d = l + 1`` are derived; the extra slot in each
    decomposition block is the carry head-room.
    """

    n: int
    q: int
    p: int
    tree: str = "balanced:2"
    salt: bytes = b""
    l: int = field(init=False)
    d: int = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ParamsError(f"n must be >= 1, got {self.n}")
        if not 2 <= self.q < (1 << 64):
            raise ParamsError(f"q must satisfy 2 <= q < 2**64, got {self.q}")
        if not 2 <= self.p <= self.q:
            raise ParamsError(f"p must satisfy 2 <= p <= q, got {self.p}")
        l = (self.q - 1).bit_length()
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "d", l + 1)
        if self.n * self.d > 1 << 20:
            raise ParamsError("n*d exceeds 2**20")

    @property
    def nd(self) -> int:
        return self.n * self.d

    def with_tree(self, tree: str) -> "Params":
        return replace(self, tree=tree)


def _dtype(modulus: int):
    return np.int64 if modulus <= FAST_LIMIT else object


def _to_obj(arr: np.ndarray) -> np.ndarray:
    out = np.empty(arr.shape, dtype=object)
    out[...] = [[int(v) for v in row] for row in arr.reshape(arr.shape[0], -1)]
    return out.reshape(arr.shape)


def _canon(arr, modulus: int) -> np.ndarray:
    arr = np.asarray(arr)
    if modulus > FAST_LIMIT:
        arr = _to_obj(arr) if arr.dtype != object else arr
        return arr % modulus
    if arr.dtype == object:
        arr = _to_obj(arr) % modulus
    return np.asarray(arr % modulus, dtype=np.int64)


class ModMatrix:
    """Dense ``rows x cols`` matrix with entries in ``[0, modulus)``. Immutable."""

    __slots__ = ("entries", "modulus")

    def __init__(self, entries, modulus: int):
        modulus = int(modulus)
        if modulus < 2:
            raise StructureError(f"modulus must be >= 2, got {modulus}")
        # nested lists go through object dtype so large ints never become floats
        arr = entries if isinstance(entries, np.ndarray) else np.array(entries, dtype=object)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise StructureError(f"expected a non-empty 2-d array, got shape {arr.shape}")
        if arr.dtype != object and not np.issubdtype(arr.dtype, np.integer):
            raise StructureError(f"integer entries required, got {arr.dtype}")
        if arr.dtype == object or modulus > FAST_LIMIT:
            if arr.dtype == object and any(not isinstance(v, (int, np.integer)) for v in arr.flat):
                raise StructureError("integer entries required")
            arr = _to_obj(arr)
            if modulus <= FAST_LIMIT:
                if any(not 0 <= v < modulus for v in arr.flat):
                    raise StructureError("entries out of range")
                arr = arr.astype(np.int64)
        else:
            arr = arr.astype(np.int64)
        lo, hi = (min(arr.flat), max(arr.flat)) if arr.dtype == object else (int(arr.min()), int(arr.max()))
        if lo < 0 or hi >= modulus:
            raise StructureError(f"entries must lie in [0, {modulus})")
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "modulus", modulus)

    def __setattr__(self, name, value):
        raise AttributeError("ModMatrix is immutable")

    def __reduce__(self):
        return (ModMatrix, (self.entries, self.modulus))

    @classmethod
    def _wrap(cls, arr: np.ndarray, modulus: int) -> "ModMatrix":
        # trusted constructor for already-canonical arrays
        m = object.__new__(cls)
        arr.flags.writeable = False
        object.__setattr__(m, "entries", arr)
        object.__setattr__(m, "modulus", modulus)
        return m

    @classmethod
    def reduce(cls, arr, modulus: int) -> "ModMatrix":
        """Reduce an arbitrary integer array into canonical form."""
        return cls._wrap(_canon(arr, modulus), modulus)

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: int) -> "ModMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), modulus)

    @classmethod
    def identity(cls, size: int, modulus: int) -> "ModMatrix":
        return cls(np.eye(size, dtype=np.int64), modulus)

    @classmethod
    def uniform(cls, rows: int, cols: int, modulus: int, entropy) -> "ModMatrix":
        vals = entropy.uniform(rows * cols, modulus)
        arr = np.array(vals, dtype=_dtype(modulus)).reshape(rows, cols)
        return cls._wrap(arr, modulus)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def T(self) -> "ModMatrix":
        return ModMatrix._wrap(self.entries.T.copy(), self.modulus)

    def tolist(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self.entries]

    def is_zero(self) -> bool:
        return not any(int(v) for v in self.entries.flat)

    def __eq__(self, other):
        if not isinstance(other, ModMatrix):
            return NotImplemented
        return (self.modulus == other.modulus and self.shape == other.shape
                and bool(np.array_equal(self.entries, other.entries)))

    __hash__ = None

    def __repr__(self):
        return f"ModMatrix({self.rows}x{self.cols} mod {self.modulus})"

    def __add__(self, other):
        return mat_add(self, other)

    def __sub__(self, other):
        return mat_sub(self, other)

    def __neg__(self):
        return ModMatrix.reduce(-self.entries, self.modulus)

    def __matmul__(self, other):
        return mat_mul(self, other)

    def __mul__(self, k: int):
        return scalar_mul(k, self)

    __rmul__ = __mul__

    def to_bytes(self) -> bytes:
        return encode_array(self.entries, self.modulus)

    @classmethod
    def from_bytes(cls, data: bytes) -> "ModMatrix":
        arr, modulus, used = decode_array(data)
        if used != len(data):
            raise FormatError("trailing bytes after matrix payload")
        if modulus == 0:
            raise FormatError("modulus 0 marks an integer decomposition, not a ModMatrix")
        try:
            return cls(arr, modulus)
        except StructureError as exc:
            raise FormatError(str(exc)) from exc


def _check_same(a: ModMatrix, b: ModMatrix):
    if a.shape != b.shape:
        raise StructureError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.modulus != b.modulus:
        raise StructureError(f"modulus mismatch {a.modulus} vs {b.modulus}")


def mat_add(a: ModMatrix, b: ModMatrix) -> ModMatrix:
    _check_same(a, b)
    return ModMatrix._wrap((a.entries + b.entries) % a.modulus, a.modulus)


def mat_sub(a: ModMatrix, b: ModMatrix) -> ModMatrix:
    _check_same(a, b)
    return ModMatrix._wrap((a.entries - b.entries) % a.modulus, a.modulus)


def scalar_mul(k: int, a: ModMatrix) -> ModMatrix:
    k = int(k) % a.modulus
    if a.modulus <= FAST_LIMIT and k * (a.modulus - 1) <= _I64:
        return ModMatrix._wrap((a.entries * k) % a.modulus, a.modulus)
    return ModMatrix.reduce(_to_obj(a.entries) * k, a.modulus)


def _amax(arr: np.ndarray) -> int:
    return int(max(arr.flat)) if arr.dtype == object else int(arr.max())


def matmul_mod(a: np.ndarray, b: np.ndarray, modulus: int) -> np.ndarray:
    """``a @ b mod modulus`` for non-negative integer arrays, without overflow.

    Uses a direct int64 product when the worst-case accumulator fits, a
    limb-split of ``a`` with Horner recombination when it does not, and
    Python integers as the last resort.
    """
    inner = a.shape[1]
    amax = _amax(a)
    bmax = _amax(b)
    fast = modulus <= FAST_LIMIT and a.dtype != object and b.dtype != object
    if fast and amax * bmax * inner < _F53:
        # every partial sum is an integer below 2**53, so BLAS float64 is exact
        prod = a.astype(np.float64) @ b.astype(np.float64)
        return prod.astype(np.int64) % modulus
    if fast and amax * bmax * inner <= _I64:
        return (a @ b) % modulus
    if fast and bmax * inner > 0:
        w = 0
        while ((1 << (w + 1)) - 1) * bmax * inner <= _I64 and modulus << (w + 1) <= _I64:
            w += 1
        if w >= 1:
            nlimbs = -(-max(amax.bit_length(), 1) // w)
            mask = (1 << w) - 1
            acc = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
            for k in reversed(range(nlimbs)):
                limb = (a >> (k * w)) & mask
                acc = ((acc << w) % modulus + (limb @ b) % modulus) % modulus
            return acc
    res = (_to_obj(a) @ _to_obj(b)) % modulus
    return res if modulus > FAST_LIMIT else res.astype(np.int64)


def mat_mul(a: ModMatrix, b: ModMatrix) -> ModMatrix:
    if a.cols != b.rows:
        raise StructureError(f"cannot multiply {a.shape} by {b.shape}")
    if a.modulus != b.modulus:
        raise StructureError(f"modulus mismatch {a.modulus} vs {b.modulus}")
    return ModMatrix._wrap(matmul_mod(a.entries, b.entries, a.modulus), a.modulus)


def round_to_p(x: int, params: Params) -> int:
    """Nearest-integer rounding of ``p*x/q``, halves rounded up, result mod p."""
    q, p = params.q, params.p
    if not 0 <= x < q:
        raise ValueError(f"{x} is not a residue mod {q}")
    return ((2 * p * x + q) // (2 * q)) % p


def round_matrix(a: ModMatrix, p: int) -> ModMatrix:
    q = a.modulus
    if 2 * p * q + q <= _I64 and a.entries.dtype != object:
        out = ((2 * p * a.entries + q) // (2 * q)) % p
        return ModMatrix._wrap(out.astype(_dtype(p)), p)
    out = ((2 * p * _to_obj(a.entries) + q) // (2 * q)) % p
    return ModMatrix.reduce(out, p)


def centered(a: ModMatrix) -> np.ndarray:
    """Lift residues into ``(-m/2, m/2]`` (as an object array when needed)."""
    m = a.modulus
    e = a.entries
    return np.where(e > m // 2, e - m, e)


def centered_inf_norm(a: ModMatrix) -> int:
    m = a.modulus
    return max(v if v <= m // 2 else m - v for v in (int(x) for x in a.entries.flat))


# Serialization: 32-byte little-endian header then one u64 per entry, row-major.

def encode_array(arr: np.ndarray, modulus: int) -> bytes:
    rows, cols = arr.shape
    head = _HEADER.pack(MATRIX_MAGIC, MATRIX_VERSION, rows, cols, modulus)
    if arr.dtype == object:
        body = b"".join(int(v).to_bytes(8, "little") for v in arr.flat)
    else:
        body = np.ascontiguousarray(arr, dtype="<u8").tobytes()
    return head + body


def decode_array(data: bytes, offset: int = 0) -> tuple[np.ndarray, int, int]:
    """Parse one matrix container at ``offset``; returns (array, modulus, end offset)."""
    if len(data) - offset < _HEADER.size:
        raise FormatError("truncated matrix header")
    magic, version, rows, cols, modulus = _HEADER.unpack_from(data, offset)
    if magic != MATRIX_MAGIC:
        raise FormatError(f"bad matrix magic {magic!r}")
    if version != MATRIX_VERSION:
        raise FormatError(f"unsupported matrix version {version}")
    if rows == 0 or cols == 0 or rows * cols > 1 << 28:
        raise FormatError(f"implausible matrix shape {rows}x{cols}")
    start = offset + _HEADER.size
    end = start + 8 * rows * cols
    if len(data) < end:
        raise FormatError("truncated matrix payload")
    raw = np.frombuffer(data[start:end], dtype="<u8").reshape(rows, cols)
    if modulus == 0 or modulus <= FAST_LIMIT:
        if int(raw.max()) > _I64:
            raise FormatError("entry exceeds int64 range")
        arr = raw.astype(np.int64)
    else:
        arr = _to_obj(raw)
    return arr, modulus, end
