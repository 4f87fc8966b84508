"""Straight-line reference evaluator.

Scalar loops over nested lists, no caches, no numpy, exact rational rounding.
It shares nothing with the fast path except the tree shapes and the PRG
definition (re-derived here from hashlib), so agreement between the two is
meaningful evidence. Slow by design: use TOY-sized parameters.
"""
from __future__ import annotations

import hashlib
import math
import struct
from fractions import Fraction

from .treealg import Leaf


def to_lists(m) -> list[list[int]]:
    return [[int(v) for v in row] for row in m.entries]


def add(a, b, q):
    return [[(a[i][j] + b[i][j]) % q for j in range(len(a[0]))] for i in range(len(a))]


def sub(a, b, q):
    return [[(a[i][j] - b[i][j]) % q for j in range(len(a[0]))] for i in range(len(a))]


def scale(k, a, q):
    return [[(k * v) % q for v in row] for row in a]


def matmul(a, b, q):
    rows, inner, cols = len(a), len(b), len(b[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = 0
            for t in range(inner):
                acc += a[i][t] * b[t][j]
            row.append(acc % q)
        out.append(row)
    return out


def transpose(a):
    return [list(col) for col in zip(*a)]


def log_ceil(q):
    l = 0
    while 2 ** l < q:
        l += 1
    return l


def ginv(a, q):
    """Carry-padded bit decomposition: each entry -> (0, b0, b1, ..., b_{l-1}) down a column block."""
    l = log_ceil(q)
    out = []
    for row in a:
        block = [[0] * len(row)]
        for i in range(l):
            block.append([(v // 2 ** i) % 2 for v in row])
        out.extend(block)
    return out


def gadget(n, q):
    l = log_ceil(q)
    g = [0] + [2 ** i for i in range(l)]
    d = l + 1
    return [[g[c - r * d] if r * d <= c < (r + 1) * d else 0 for c in range(n * d)] for r in range(n)]


def round_p(x, q, p):
    return math.floor(Fraction(p * x, q) + Fraction(1, 2)) % p


def round_mat(a, q, p):
    return [[round_p(v, q, p) for v in row] for row in a]


def centered_norm(a, m):
    best = 0
    for row in a:
        for v in row:
            c = v - m if v > m / 2 else v
            best = max(best, abs(c))
    return best


def prg(salt: bytes, bits: str, n: int, nd: int, q: int):
    key = b"kih/prg-R\x00" + struct.pack("<I", len(salt)) + salt + bits.encode()
    bitlen = (q - 1).bit_length()
    vals, block = [], 0
    while len(vals) < nd * n:
        chunk = hashlib.shake_256(key + block.to_bytes(8, "little")).digest(1024)
        block += 1
        for off in range(0, 1024, 8):
            w = int.from_bytes(chunk[off:off + 8], "little") % (2 ** bitlen)
            if w < q and len(vals) < nd * n:
                vals.append(w)
    return [vals[r * n:(r + 1) * n] for r in range(nd)]


def tree_eval(t, seg, leaf_mats, A0, A1, q):
    if isinstance(t, Leaf):
        return leaf_mats[seg]
    k = t.left.leaves
    left = tree_eval(t.left, seg[:k], leaf_mats, A0, A1, q)
    right = tree_eval(t.right, seg[k:], leaf_mats, A0, A1, q)
    sel = A1 if seg[0] == "1" else A0
    return add(left, matmul(sel, ginv(right, q), q), q)


class Oracle:
    """Reference evaluator bound to one public instance."""

    def __init__(self, inst):
        pr = inst.params
        self.n, self.q, self.p, self.nd = pr.n, pr.q, pr.p, pr.nd
        self.salt = pr.salt
        self.tree = inst.tree
        self.A0 = to_lists(inst.A0)
        self.A1 = to_lists(inst.A1)

    def _mats(self, S):
        q = self.q
        B0, B1 = add(self.A0, S, q), add(self.A1, S, q)
        return {
            "A": {"0": self.A0, "1": self.A1},
            "B": {"0": B0, "1": B1},
            "C": {"0": add(self.A1, B1, q), "1": add(self.A0, B1, q), "Z": add(self.A0, B0, q)},
        }

    def node_eval(self, kind, S, seg):
        return tree_eval(self.tree, seg, self._mats(S)[kind], self.A0, self.A1, self.q)

    def _outer(self, S, z0, inner):
        q = self.q
        A_sel = self.A1 if z0[0] == "1" else self.A0
        r0 = matmul(prg(self.salt, z0, self.n, self.nd, q), A_sel, q)
        a_t = self.node_eval("A", S, z0)
        total = add(matmul(transpose(S), a_t, q), matmul(r0, ginv(inner, q), q), q)
        return round_mat(total, q, self.p)

    def F(self, S, y):
        k = self.tree.leaves
        return self._outer(S, y[:k], self.node_eval("B", S, y[k:]))

    def F_prime(self, S, z0, z1):
        return self._outer(S, z0, self.node_eval("C", S, str(z1)))

    def defect(self, S1, S2, x, y):
        k = self.tree.leaves
        z1 = "".join({"11": "0", "00": "Z"}.get(a + b, "1") for a, b in zip(x[k:], y[k:]))
        lhs = self.F_prime(add(S1, S2, self.q), x[:k], z1)
        rhs = add(self.F(S1, x), self.F(S2, y), self.p)
        return centered_norm(sub(lhs, rhs, self.p), self.p)

    def upd(self, body, dk, data_id, dN):
        return sub(body, self.F_prime(dk, data_id, str(dN)), self.p)
