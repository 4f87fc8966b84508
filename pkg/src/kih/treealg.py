"""Full binary tree shapes.

Descriptors: ``balanced:k`` (k a power of two), ``leftspine:k``,
``rightspine:k``, or a literal such as ``((.,.),.)`` where ``.`` is a leaf.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParamsError


@dataclass(frozen=True)
class Leaf:
    leaves: int = field(default=1, init=False, repr=False)

    def __str__(self):
        return "."


@dataclass(frozen=True)
class Node:
    left: "Leaf | Node"
    right: "Leaf | Node"
    leaves: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "leaves", self.left.leaves + self.right.leaves)

    def __str__(self):
        return f"({self.left},{self.right})"


FullBinaryTree = Leaf | Node

LEAF = Leaf()


def balanced(k: int) -> FullBinaryTree:
    if k < 1 or k & (k - 1):
        raise ParamsError(f"balanced:k needs k a power of two, got {k}")
    if k == 1:
        return LEAF
    half = balanced(k // 2)
    return Node(half, half)


def leftspine(k: int) -> FullBinaryTree:
    if k < 1:
        raise ParamsError("spine needs at least one leaf")
    t: FullBinaryTree = LEAF
    for _ in range(k - 1):
        t = Node(t, LEAF)
    return t


def rightspine(k: int) -> FullBinaryTree:
    if k < 1:
        raise ParamsError("spine needs at least one leaf")
    t: FullBinaryTree = LEAF
    for _ in range(k - 1):
        t = Node(LEAF, t)
    return t


_FAMILIES = {"balanced": balanced, "leftspine": leftspine, "rightspine": rightspine}


def parse_tree(descriptor: str) -> FullBinaryTree:
    desc = descriptor.strip()
    if ":" in desc:
        kind, _, count = desc.partition(":")
        if kind not in _FAMILIES:
            raise ParamsError(f"unknown tree family {kind!r}")
        try:
            k = int(count)
        except ValueError:
            raise ParamsError(f"bad leaf count in {descriptor!r}") from None
        return _FAMILIES[kind](k)
    tree, pos = _parse_literal(desc, 0)
    if pos != len(desc):
        raise ParamsError(f"trailing characters in tree literal {descriptor!r}")
    return tree


def _parse_literal(s: str, i: int) -> tuple[FullBinaryTree, int]:
    if i >= len(s):
        raise ParamsError("unexpected end of tree literal")
    if s[i] == ".":
        return LEAF, i + 1
    if s[i] != "(":
        raise ParamsError(f"unexpected {s[i]!r} at position {i} in tree literal")
    left, i = _parse_literal(s, i + 1)
    if i >= len(s) or s[i] != ",":
        raise ParamsError(f"expected ',' at position {i} in tree literal")
    right, i = _parse_literal(s, i + 1)
    if i >= len(s) or s[i] != ")":
        raise ParamsError(f"expected ')' at position {i} in tree literal")
    return Node(left, right), i + 1


def expansion(t: FullBinaryTree) -> int:
    if isinstance(t, Leaf):
        return 0
    return max(expansion(t.left) + 1, expansion(t.right))


def sequentiality(t: FullBinaryTree) -> int:
    if isinstance(t, Leaf):
        return 0
    return max(sequentiality(t.left), sequentiality(t.right) + 1)


def leaf_depths(t: FullBinaryTree) -> list[int]:
    """Number of internal ancestors of each leaf, left to right."""
    if isinstance(t, Leaf):
        return [0]
    return [d + 1 for d in leaf_depths(t.left)] + [d + 1 for d in leaf_depths(t.right)]


def internal_nodes(t: FullBinaryTree) -> int:
    return t.leaves - 1
