"""Left/right key-homomorphic constrained PRFs built from the base PRF.

A constrained key pins one half of the input and stores a single PRF output
under the master key ``k0``: ``F_k0(x0 || pad)`` (left) or ``F_k0(pad || x0)``
(right), with ``pad`` all ones or all zeros. ``k0`` itself is never kept.
Anyone holding the constrained key and a second key ``k1`` evaluates towards
``F'_{k0+k1}`` by adding ``F_k1`` at a matching input.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import LengthError, PreconditionError, StructureError
from .kihprf import PrfInstance, Seed, SymbolString, almost_xor, as_bits, combine, prf_eval, prf_eval_prime
from .modmath import ModMatrix, centered_inf_norm


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


class Mode(str, Enum):
    ONES = "ones"
    ZEROS = "zeros"


@dataclass(frozen=True, eq=False)
class ConstrainedKey:
    side: Side
    mode: Mode
    x0: str
    value: ModMatrix
    instance_id: str

    def __eq__(self, other):
        return (isinstance(other, ConstrainedKey) and self.side == other.side and self.mode == other.mode
                and self.x0 == other.x0 and self.value == other.value and self.instance_id == other.instance_id)

    __hash__ = None


def _pad(mode: Mode, k: int) -> str:
    return ("1" if mode == Mode.ONES else "0") * k


def _join(side: Side, fixed: str, free: str) -> str:
    return fixed + free if side == Side.LEFT else free + fixed


def constrain(inst: PrfInstance, k0: Seed, x0: str, side: Side | str, mode: Mode | str) -> ConstrainedKey:
    side, mode = Side(side), Mode(mode)
    k = inst.tree.leaves
    x0 = as_bits(x0, k)
    value = prf_eval(inst, k0, _join(side, x0, _pad(mode, k)))
    return ConstrainedKey(side, mode, x0, value, inst.instance_id)


def target_symbols(ck: ConstrainedKey, x1prime: str) -> SymbolString:
    """The free-half symbol string reached by ``x1prime (+) pad``."""
    return almost_xor(x1prime, _pad(ck.mode, len(ck.x0)))


def solve_x1prime(ck: ConstrainedKey, target) -> str:
    """Bit string ``x1'`` with ``x1' (+) pad == target``.

    Ones mode: every bit string is reachable (almost-XOR with 1 is XOR).
    Zeros mode: only ``{1, Z}`` symbol strings are reachable.
    """
    k = len(ck.x0)
    if ck.mode == Mode.ONES:
        bits = as_bits(target, k) if not isinstance(target, SymbolString) else target.text
        if set(bits) - set("01") or len(bits) != k:
            raise LengthError(f"ones-mode target must be {k} bits")
        return "".join("1" if b == "0" else "0" for b in bits)
    sym = SymbolString.of(target)
    if len(sym) != k:
        raise LengthError(f"zeros-mode target must have {k} symbols")
    if "0" in sym.text:
        raise PreconditionError(f"target {sym.text!r} is outside the reachable set {{1,Z}}^{k}")
    return "".join("1" if c == "1" else "0" for c in sym.text)


def _check_instance(ck: ConstrainedKey, inst: PrfInstance):
    if ck.instance_id != inst.instance_id:
        raise StructureError("constrained key belongs to a different instance")


def eval_constrained(ck: ConstrainedKey, inst: PrfInstance, k1: Seed, x1target) -> ModMatrix:
    _check_instance(ck, inst)
    x1prime = solve_x1prime(ck, x1target)
    return combine(prf_eval(inst, k1, _join(ck.side, ck.x0, x1prime)), ck.value)


def constrained_defect(ck: ConstrainedKey, inst: PrfInstance, k0: Seed, k1: Seed, x1target) -> int:
    """Distance between the constrained evaluation and ``F'_{k0+k1}(x0, target)``.

    Test-only: needs the master key. Right-side keys are compared against the
    same ``F'`` with ``x0`` as its bit half.
    """
    got = eval_constrained(ck, inst, k1, x1target)
    target = target_symbols(ck, solve_x1prime(ck, x1target))
    direct = prf_eval_prime(inst, k0 + k1, ck.x0, target)
    return centered_inf_norm(got - direct)
