"""Logical-form trees: parsing, rendering, and atom/compound extraction.

Logical forms are labeled s-expressions such as

    ( lambda $0 e ( and ( state:t $0 ) ( next_to:t $0 s0 ) ) )

Every node carries a token label; atoms are node labels, compounds are
two-level sub-trees (a node label plus the labels of its immediate
children).
"""
from __future__ import annotations

from dataclasses import dataclass


class LfParseError(ValueError):
    """Raised for malformed logical-form strings."""


@dataclass(frozen=True)
class LfNode:
    """One node of an LF tree; the root node stands for the whole tree."""

    label: str
    children: tuple[LfNode, ...] = ()

    def __post_init__(self):
        if not self.label:
            raise LfParseError("empty node label")
        if any(c in self.label for c in "() \t\r\n"):
            raise LfParseError(f"invalid node label: {self.label!r}")


LfTree = LfNode


@dataclass(frozen=True)
class Compound:
    """A two-level sub-tree: a head label plus its children's labels."""

    head: str
    child_heads: tuple[str, ...]

    def __post_init__(self):
        if not self.child_heads:
            raise ValueError("a compound needs at least one child head")

    def serialize(self) -> str:
        return "( " + " ".join((self.head,) + self.child_heads) + " )"

    def __str__(self) -> str:
        return self.serialize()


def _tokenize(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def parse_lf(text: str) -> LfTree:
    """Parse an LF string into its tree.

    The input must be a single balanced s-expression whose first token
    after each "(" is the node label; bare tokens are leaf nodes.
    Raises LfParseError on empty input, unbalanced parentheses, or an
    unlabeled "( )" node.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise LfParseError("empty LF string")

    pos = 0

    def parse_node() -> LfNode:
        nonlocal pos
        tok = tokens[pos]
        if tok == ")":
            raise LfParseError("unexpected ')'")
        if tok != "(":
            # bare token: a leaf node
            pos += 1
            return LfNode(tok)
        pos += 1
        if pos >= len(tokens):
            raise LfParseError("unbalanced parentheses: unclosed '('")
        if tokens[pos] == ")":
            raise LfParseError("unlabeled node: '(' immediately followed by ')'")
        if tokens[pos] == "(":
            raise LfParseError("missing node label before '('")
        label = tokens[pos]
        pos += 1
        children = []
        while True:
            if pos >= len(tokens):
                raise LfParseError("unbalanced parentheses: unclosed '('")
            if tokens[pos] == ")":
                pos += 1
                return LfNode(label, tuple(children))
            children.append(parse_node())

    if tokens[0] != "(":
        raise LfParseError("LF must start with '('")
    tree = parse_node()
    if pos != len(tokens):
        raise LfParseError("trailing tokens after the closing ')'")
    return tree


def render_lf(tree: LfTree) -> str:
    """Serialize a tree back to its canonical LF string.

    The root is always parenthesized; childless inner nodes render as
    bare tokens, so parse_lf(render_lf(t)) is structurally equal to t.
    """

    def render_node(node: LfNode) -> str:
        if not node.children:
            return node.label
        parts = [node.label] + [render_node(c) for c in node.children]
        return "( " + " ".join(parts) + " )"

    if not tree.children:
        return f"( {tree.label} )"
    return render_node(tree)


def extract_atoms(tree: LfTree) -> list[str]:
    """All node labels in pre-order; one entry per node occurrence."""
    atoms: list[str] = []
    stack = [tree]
    while stack:
        node = stack.pop()
        atoms.append(node.label)
        stack.extend(reversed(node.children))
    return atoms


def extract_compounds(tree: LfTree) -> list[Compound]:
    """One compound per internal node, in pre-order.

    A compound pairs a node's label with the labels of its immediate
    children; leaf nodes contribute none.
    """
    compounds: list[Compound] = []
    stack = [tree]
    while stack:
        node = stack.pop()
        if node.children:
            compounds.append(
                Compound(node.label, tuple(c.label for c in node.children))
            )
        stack.extend(reversed(node.children))
    return compounds


def lf_units(tree: LfTree, unit: str = "both") -> list[str]:
    """Atoms, serialized compounds, or both, as diversity-feature keys.

    Compound keys start with "( " so they can never collide with atom
    labels (which contain no parentheses or whitespace).
    """
    if unit == "atoms":
        return extract_atoms(tree)
    if unit == "compounds":
        return [c.serialize() for c in extract_compounds(tree)]
    if unit == "both":
        return extract_atoms(tree) + [c.serialize() for c in extract_compounds(tree)]
    raise ValueError(f"unknown unit {unit!r} (expected atoms, compounds or both)")
