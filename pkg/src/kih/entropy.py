"""Deterministic randomness built on SHAKE-256 in counter mode.

Every random draw in the library goes through an :class:`XofStream`, so a
fixed seed reproduces instances, keys, nonces and whole experiment traces
bit-for-bit on any platform.
"""
from __future__ import annotations

import hashlib
import os

import numpy as np

BLOCK = 1024


class XofStream:
    """Sequential byte stream: block i = SHAKE256(key || u64le(i)) truncated to 1024 bytes."""

    def __init__(self, key: bytes):
        self.key = bytes(key)
        self._block = 0
        self._buf = b""
        self._pos = 0

    def read(self, n: int) -> bytes:
        out = bytearray()
        while len(out) < n:
            if self._pos == len(self._buf):
                self._buf = hashlib.shake_256(self.key + self._block.to_bytes(8, "little")).digest(BLOCK)
                self._block += 1
                self._pos = 0
            take = min(n - len(out), len(self._buf) - self._pos)
            out += self._buf[self._pos:self._pos + take]
            self._pos += take
        return bytes(out)

    def words(self, count: int) -> np.ndarray:
        return np.frombuffer(self.read(8 * count), dtype="<u8")

    def uniform(self, count: int, modulus: int) -> list[int]:
        """``count`` uniform residues mod ``modulus``: 64-bit words, masked, rejection-sampled."""
        if modulus < 1:
            raise ValueError("modulus must be positive")
        mask = (1 << (modulus - 1).bit_length()) - 1
        out: list[int] = []
        while len(out) < count:
            need = count - len(out)
            w = self.words(need) & np.uint64(mask)
            out.extend(int(v) for v in w if int(v) < modulus)
        return out[:count]


class Entropy:
    """Caller-supplied randomness source.

    ``Entropy(seed)`` is fully deterministic; ``Entropy.system()`` draws a
    fresh 32-byte seed from the OS. ``child(label)`` derives an independent
    sub-stream, which keeps parallel trials reproducible.
    """

    def __init__(self, seed: bytes | str):
        if isinstance(seed, str):
            seed = bytes.fromhex(seed)
        self.seed = bytes(seed)
        self._stream = XofStream(b"kih/entropy\x00" + self.seed)

    @classmethod
    def system(cls) -> "Entropy":
        return cls(os.urandom(32))

    def child(self, label: str | int) -> "Entropy":
        return Entropy(hashlib.sha256(self.seed + b"/" + str(label).encode()).digest())

    def uniform(self, count: int, modulus: int) -> list[int]:
        return self._stream.uniform(count, modulus)

    def bits(self, k: int) -> str:
        return "".join(str(b) for b in self._stream.uniform(k, 2))

    def __repr__(self) -> str:
        return f"Entropy({self.seed.hex()!r})"
