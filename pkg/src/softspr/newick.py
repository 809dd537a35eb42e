"""Newick reading and writing for rooted multifurcating trees.

Only topology is kept: branch lengths and internal node labels are accepted by
the grammar and dropped.  Parsing and writing are iterative so that very deep
trees (long caterpillars) do not hit the recursion limit.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

__all__ = [
    "NewickError",
    "NewickNode",
    "NewickTree",
    "parse_newick",
    "write_newick",
    "leaf_set",
    "LABEL_RE",
]

LABEL_RE = re.compile(r"[A-Za-z0-9_.|\-]+")
_LENGTH_RE = re.compile(r"[0-9eE.+\-]+")
_SPACE = " \t\r\n"


class NewickError(ValueError):
    """Raised for any malformed Newick input."""


@dataclass(eq=False)
class NewickNode:
    label: str | None = None
    children: list[NewickNode] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(eq=False)
class NewickTree:
    root: NewickNode

    def nodes(self):
        """Yield all nodes in preorder."""
        stack = [self.root]
        while stack:
            v = stack.pop()
            yield v
            stack.extend(reversed(v.children))

    def leaves(self) -> list[str]:
        return [v.label for v in self.nodes() if not v.children]

    def is_binary(self) -> bool:
        return all(len(v.children) in (0, 2) for v in self.nodes())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NewickTree):
            return NotImplemented
        return write_newick(self) == write_newick(other)

    def __hash__(self) -> int:
        return hash(write_newick(self))

    def __str__(self) -> str:
        return write_newick(self)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_space(self) -> None:
        text, pos = self.text, self.pos
        while pos < len(text) and text[pos] in _SPACE:
            pos += 1
        self.pos = pos

    def peek(self) -> str:
        self.skip_space()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def label(self) -> str | None:
        self.skip_space()
        m = LABEL_RE.match(self.text, self.pos)
        if m is None:
            return None
        self.pos = m.end()
        return m.group()

    def length(self) -> None:
        if self.peek() != ":":
            return
        self.pos += 1
        self.skip_space()
        m = _LENGTH_RE.match(self.text, self.pos)
        if m is None:
            raise NewickError(f"missing branch length at offset {self.pos}")
        try:
            float(m.group())
        except ValueError:
            raise NewickError(f"bad branch length {m.group()!r}") from None
        self.pos = m.end()

    def error(self, what: str) -> NewickError:
        return NewickError(f"{what} at offset {self.pos}")


def parse_newick(text: str, strict: bool = False) -> NewickTree:
    """Parse one tree terminated by ';'.

    In strict mode a node with a single child is an error; otherwise such
    chains are contracted.
    """
    sc = _Scanner(text)
    seen: set[str] = set()
    # stack of open internal nodes
    stack: list[NewickNode] = []
    root: NewickNode | None = None
    expect_subtree = True
    while True:
        ch = sc.peek()
        if expect_subtree:
            if ch == "(":
                sc.pos += 1
                stack.append(NewickNode())
                continue
            name = sc.label()
            if name is None:
                if ch in (",", ")", ";", ""):
                    raise sc.error("empty leaf label")
                raise sc.error(f"unexpected character {ch!r}")
            if name in seen:
                raise NewickError(f"duplicate leaf label {name!r}")
            seen.add(name)
            node = NewickNode(name)
            sc.length()
        else:
            if ch == ",":
                if not stack:
                    raise sc.error("',' outside parentheses")
                sc.pos += 1
                expect_subtree = True
                continue
            if ch != ")":
                break
            if not stack:
                raise sc.error("unbalanced parentheses")
            sc.pos += 1
            node = stack.pop()
            sc.label()
            sc.length()
            if len(node.children) == 1:
                if strict:
                    raise sc.error("node with a single child")
                node = node.children[0]
        if stack:
            stack[-1].children.append(node)
            expect_subtree = False
        else:
            root = node
            break
    if stack:
        raise NewickError("unbalanced parentheses")
    if sc.peek() != ";":
        if sc.peek() == ")":
            raise sc.error("unbalanced parentheses")
        if sc.peek() == "":
            raise NewickError("missing ';'")
        raise sc.error("trailing garbage")
    sc.pos += 1
    if sc.peek() != "":
        raise sc.error("trailing garbage")
    assert root is not None
    return NewickTree(root)


def _min_labels(root: NewickNode) -> dict[int, str]:
    low: dict[int, str] = {}
    stack = [(root, False)]
    while stack:
        v, done = stack.pop()
        if not v.children:
            low[id(v)] = v.label
        elif done:
            low[id(v)] = min(low[id(c)] for c in v.children)
        else:
            stack.append((v, True))
            stack.extend((c, False) for c in v.children)
    return low


def write_newick(tree: NewickTree | NewickNode) -> str:
    """Canonical Newick: children in ascending order of their smallest leaf."""
    root = tree.root if isinstance(tree, NewickTree) else tree
    low = _min_labels(root)
    out: list[str] = []
    stack: list[object] = [root]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        if not item.children:
            out.append(item.label)
            continue
        kids = sorted(item.children, key=lambda c: low[id(c)])
        out.append("(")
        stack.append(")")
        for i in range(len(kids) - 1, -1, -1):
            stack.append(kids[i])
            if i:
                stack.append(",")
    out.append(";")
    return "".join(out)


def leaf_set(tree: NewickTree) -> set[str]:
    return set(tree.leaves())
