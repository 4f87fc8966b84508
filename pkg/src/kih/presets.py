"""Named parameter sets.

All three are functional test sizes. None reaches provable security: that
needs the dimension to grow like ``e(T) * lambda`` and ``log q`` like ``e(T)``
(each up to polylog factors), with the LWE error width ``r >= 3*sqrt(n)``
and ``q/r ~ (n log q)^e(T)``. The error distribution and ``r`` play no role
at runtime since the construction is deterministic.
"""
from __future__ import annotations

import os

from .errors import ParamsError
from .modmath import Params
from .treealg import expansion, parse_tree, sequentiality

PRESETS = {
    "TOY": Params(n=1, q=1 << 4, p=1 << 2, tree="balanced:2", salt=b"kih/TOY"),
    "DESK": Params(n=4, q=1 << 16, p=1 << 8, tree="balanced:8", salt=b"kih/DESK"),
    "LARGE": Params(n=16, q=1 << 32, p=1 << 16, tree="balanced:16", salt=b"kih/LARGE"),
}

ENV_VAR = "KIH_PRESET"


def get_preset(name: str | None = None, tree: str | None = None) -> Params:
    name = (name or os.environ.get(ENV_VAR) or "TOY").upper()
    if name not in PRESETS:
        raise ParamsError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    params = PRESETS[name]
    return params.with_tree(tree) if tree else params


def describe(params: Params) -> dict:
    t = parse_tree(params.tree)
    e = expansion(t)
    return {
        "n": params.n,
        "q": params.q,
        "p": params.p,
        "l": params.l,
        "d": params.d,
        "tree": params.tree,
        "leaves": t.leaves,
        "expansion": e,
        "sequentiality": sequentiality(t),
        "input_bits": 2 * t.leaves,
        "output_shape": f"{params.nd}x{params.nd}",
        "secure_sizing": f"n ~ {e}*lambda, log2(q) ~ {e} (polylog factors omitted); not met",
    }
