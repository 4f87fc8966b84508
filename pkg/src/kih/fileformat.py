"""Binary file formats.

* ``KIHP``: instance (A0, A1) or seed (S) together with its parameters.
* ``KIHC``: constrained key.
* ``KIHU``: updatable-encryption objects (epoch key, update token, ciphertext).

Every file starts with a 4-byte magic, a u32 version and a u32 kind tag, so a
token can never be parsed as a key. Integers are little-endian; matrices use
the shared ``KIHM`` container.
"""
from __future__ import annotations

import struct
from pathlib import Path

from .cprf import ConstrainedKey, Mode, Side
from .errors import FormatError, InvariantError, KihError, StructureError
from .kihprf import PrfInstance, Seed, SymbolString
from .modmath import ModMatrix, Params, decode_array
from .ue import Ciphertext, EpochKey, UpdateToken

VERSION = 1

KIND_INSTANCE, KIND_SEED = 1, 2
KIND_EPOCH_KEY, KIND_TOKEN, KIND_CIPHERTEXT = 1, 2, 3


class _Reader:
    def __init__(self, data: bytes):
        self.data, self.pos = data, 0

    def take(self, fmt: str):
        s = struct.Struct(fmt)
        if self.pos + s.size > len(self.data):
            raise FormatError("truncated file")
        vals = s.unpack_from(self.data, self.pos)
        self.pos += s.size
        return vals if len(vals) > 1 else vals[0]

    def blob(self) -> bytes:
        n = self.take("<I")
        if self.pos + n > len(self.data):
            raise FormatError("truncated string field")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def text(self) -> str:
        try:
            return self.blob().decode("ascii")
        except UnicodeDecodeError:
            raise FormatError("non-ascii text field") from None

    def matrix(self) -> ModMatrix:
        arr, modulus, self.pos = decode_array(self.data, self.pos)
        if modulus == 0:
            raise FormatError("expected a modular matrix, found an integer decomposition")
        try:
            return ModMatrix(arr, modulus)
        except StructureError as exc:
            raise FormatError(str(exc)) from exc

    def end(self):
        if self.pos != len(self.data):
            raise FormatError("trailing bytes")


def _blob(b: bytes) -> bytes:
    return struct.pack("<I", len(b)) + b


def _header(magic: bytes, kind: int) -> bytes:
    return magic + struct.pack("<II", VERSION, kind)


def _open(data: bytes, magic: bytes) -> tuple[_Reader, int]:
    if data[:4] != magic:
        raise FormatError(f"expected magic {magic!r}, got {data[:4]!r}")
    r = _Reader(data)
    r.pos = 4
    version, kind = r.take("<II")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    return r, kind


def encode_params(p: Params) -> bytes:
    return struct.pack("<QQQ", p.n, p.q, p.p) + _blob(p.tree.encode()) + _blob(p.salt)


def _read_params(r: _Reader) -> Params:
    n, q, p = r.take("<QQQ")
    tree, salt = r.text(), r.blob()
    try:
        return Params(n, q, p, tree, salt)
    except InvariantError as exc:
        raise FormatError(f"invalid parameters: {exc}") from exc


def dump_instance(inst: PrfInstance) -> bytes:
    return _header(b"KIHP", KIND_INSTANCE) + encode_params(inst.params) + inst.A0.to_bytes() + inst.A1.to_bytes()


def dump_seed(params: Params, seed: Seed) -> bytes:
    return _header(b"KIHP", KIND_SEED) + encode_params(params) + seed.S.to_bytes()


def load_instance(data: bytes) -> PrfInstance:
    r, kind = _open(data, b"KIHP")
    if kind != KIND_INSTANCE:
        raise FormatError("file holds a seed, not an instance")
    params = _read_params(r)
    a0, a1 = r.matrix(), r.matrix()
    r.end()
    try:
        return PrfInstance(params, a0, a1)
    except InvariantError as exc:
        raise FormatError(str(exc)) from exc


def load_seed(data: bytes) -> tuple[Params, Seed]:
    r, kind = _open(data, b"KIHP")
    if kind != KIND_SEED:
        raise FormatError("file holds an instance, not a seed")
    params = _read_params(r)
    s = r.matrix()
    r.end()
    if s.shape != (params.n, params.nd) or s.modulus != params.q:
        raise FormatError("seed dimensions do not match its parameters")
    return params, Seed(s)


_SIDES = {Side.LEFT: 0, Side.RIGHT: 1}
_MODES = {Mode.ONES: 0, Mode.ZEROS: 1}


def dump_constrained(ck: ConstrainedKey) -> bytes:
    return (_header(b"KIHC", 1) + _blob(ck.instance_id.encode()) + struct.pack("<BB", _SIDES[ck.side], _MODES[ck.mode])
            + _blob(ck.x0.encode()) + ck.value.to_bytes())


def load_constrained(data: bytes) -> ConstrainedKey:
    r, kind = _open(data, b"KIHC")
    if kind != 1:
        raise FormatError(f"unknown constrained-key kind {kind}")
    iid = r.text()
    side, mode = r.take("<BB")
    if side > 1 or mode > 1:
        raise FormatError("bad side/mode tag")
    x0 = r.text()
    value = r.matrix()
    r.end()
    return ConstrainedKey(list(_SIDES)[side], list(_MODES)[mode], x0, value, iid)


def dump_ue(obj) -> bytes:
    if isinstance(obj, EpochKey):
        return (_header(b"KIHU", KIND_EPOCH_KEY) + struct.pack("<Q", obj.epoch) + _blob(obj.nonce.encode())
                + obj.k.S.to_bytes())
    if isinstance(obj, UpdateToken):
        return (_header(b"KIHU", KIND_TOKEN) + struct.pack("<Q", obj.epoch) + _blob(obj.dN.text.encode())
                + obj.dk.S.to_bytes())
    if isinstance(obj, Ciphertext):
        return (_header(b"KIHU", KIND_CIPHERTEXT) + struct.pack("<QQ", obj.epoch, obj.t or 0)
                + _blob(obj.data_id.encode()) + obj.body.to_bytes())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def load_ue(data: bytes, expect: type | None = None):
    r, kind = _open(data, b"KIHU")
    if kind == KIND_EPOCH_KEY:
        epoch = r.take("<Q")
        nonce = r.text()
        obj = EpochKey(epoch, Seed(r.matrix()), nonce)
    elif kind == KIND_TOKEN:
        epoch = r.take("<Q")
        dn = r.text()
        try:
            obj = UpdateToken(epoch, Seed(r.matrix()), SymbolString(dn))
        except KihError as exc:
            raise FormatError(str(exc)) from exc
    elif kind == KIND_CIPHERTEXT:
        epoch, t = r.take("<QQ")
        data_id = r.text()
        obj = Ciphertext(epoch, data_id, r.matrix(), t or None)
    else:
        raise FormatError(f"unknown KIHU kind {kind}")
    r.end()
    if expect is not None and not isinstance(obj, expect):
        raise FormatError(f"expected {expect.__name__}, file holds {type(obj).__name__}")
    return obj


def write(path, data: bytes):
    Path(path).write_bytes(data)


def read(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
