"""Mutable rooted forests and the paired search state.

Nodes live in parallel arrays indexed by dense integer ids.  Labels are small
integers: leaves are numbered in sorted name order, the root marker rho gets
the next number, and every resolved sibling pair gets a fresh number.

Inside the search only the part of each forest above the labelled nodes is
stored.  A labelled node stands for an agreeing subtree whose shape is kept in
a composition table (label -> pair of child labels), so labelled nodes are
always leaves here.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .newick import NewickNode, NewickTree, leaf_set

__all__ = [
    "RHO",
    "LabelMismatchError",
    "ForestError",
    "LabelSpace",
    "RootedForest",
    "ForestPair",
    "build_pair",
]

RHO = "ρ"
NONE = -1


class LabelMismatchError(ValueError):
    """The two input trees do not have the same leaf set."""


class ForestError(RuntimeError):
    """An editing primitive was called outside its precondition."""


@dataclass
class LabelSpace:
    """Names for the leaf labels plus the shared composition table.

    The table is append-only and shared by every copy of a search state, so
    fresh labels come from one counter.
    """

    names: list[str]
    comp: dict[int, tuple[int, int]] = field(default_factory=dict)
    minleaf: dict[int, int] = field(default_factory=dict)
    next_label: int = 0

    @classmethod
    def from_trees(cls, *trees: NewickTree) -> LabelSpace:
        leaves = leaf_set(trees[0])
        for t in trees[1:]:
            other = leaf_set(t)
            if other != leaves:
                diff = sorted(leaves ^ other)[:5]
                raise LabelMismatchError(f"leaf sets differ, e.g. {diff}")
        if RHO in leaves:
            raise LabelMismatchError(f"{RHO!r} is reserved")
        names = sorted(leaves) + [RHO]
        space = cls(names)
        space.minleaf = {i: i for i in range(len(names))}
        space.next_label = len(names)
        return space

    @property
    def n(self) -> int:
        """Number of input leaves (rho excluded)."""
        return len(self.names) - 1

    @property
    def rho(self) -> int:
        return len(self.names) - 1

    def index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def fresh(self, a: int, b: int) -> int:
        lab = self.next_label
        self.next_label += 1
        self.comp[lab] = (a, b)
        self.minleaf[lab] = min(self.minleaf[a], self.minleaf[b])
        return lab

    def leaves_of(self, lab: int) -> list[int]:
        out, stack = [], [lab]
        while stack:
            x = stack.pop()
            if x in self.comp:
                stack.extend(self.comp[x])
            else:
                out.append(x)
        return out

    def expand(self, lab: int) -> NewickNode:
        """Binary subtree encoded by a label."""
        root = NewickNode()
        stack = [(lab, root)]
        while stack:
            x, node = stack.pop()
            if x in self.comp:
                for y in self.comp[x]:
                    child = NewickNode()
                    node.children.append(child)
                    stack.append((y, child))
            else:
                node.label = self.names[x]
        return root


class RootedForest:
    """Rooted forest over integer node ids with integer labels (-1 = none)."""

    __slots__ = ("parent", "children", "label", "nunl", "alive", "where")

    def __init__(self) -> None:
        self.parent: list[int] = []
        self.children: list[list[int]] = []
        self.label: list[int] = []
        self.nunl: list[int] = []
        self.alive: list[bool] = []
        self.where: dict[int, int] = {}

    # construction -----------------------------------------------------
    def add_node(self, parent: int = NONE, label: int = NONE) -> int:
        v = len(self.parent)
        self.parent.append(parent)
        self.children.append([])
        self.label.append(label)
        self.nunl.append(0)
        self.alive.append(True)
        if label != NONE:
            if label in self.where:
                raise ForestError(f"label {label} already present")
            self.where[label] = v
        if parent != NONE:
            self.children[parent].append(v)
            if label == NONE:
                self.nunl[parent] += 1
        return v

    @classmethod
    def from_newick(cls, tree: NewickTree, index: dict[str, int], rho: int | None = None) -> RootedForest:
        """Build from a tree; with `rho` set, the tree root and a rho leaf
        hang below a synthetic top node."""
        f = cls()
        parent_of_root = NONE
        if rho is not None:
            parent_of_root = f.add_node()
        stack = [(tree.root, parent_of_root)]
        while stack:
            node, par = stack.pop()
            if node.children:
                v = f.add_node(par)
                stack.extend((c, v) for c in reversed(node.children))
            else:
                if node.label not in index:
                    raise LabelMismatchError(f"unknown label {node.label!r}")
                f.add_node(par, index[node.label])
        if rho is not None:
            f.add_node(parent_of_root, rho)
        return f

    def copy(self) -> RootedForest:
        g = RootedForest.__new__(RootedForest)
        g.parent = self.parent[:]
        g.children = [c[:] for c in self.children]
        g.label = self.label[:]
        g.nunl = self.nunl[:]
        g.alive = self.alive[:]
        g.where = dict(self.where)
        return g

    # queries ----------------------------------------------------------
    def roots(self) -> list[int]:
        return [v for v, p in enumerate(self.parent) if p == NONE and self.alive[v]]

    def is_root(self, v: int) -> bool:
        return self.parent[v] == NONE

    def siblings(self, v: int) -> list[int]:
        p = self.parent[v]
        if p == NONE:
            return []
        return [c for c in self.children[p] if c != v]

    def depth(self, v: int) -> int:
        d = 0
        while self.parent[v] != NONE:
            v = self.parent[v]
            d += 1
        return d

    def postorder(self, roots: list[int] | None = None) -> list[int]:
        order: list[int] = []
        stack = list(self.roots() if roots is None else roots)
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(self.children[v])
        order.reverse()
        return order

    def leaf_labels(self, v: int) -> list[int]:
        out, stack = [], [v]
        while stack:
            x = stack.pop()
            if self.label[x] != NONE:
                out.append(self.label[x])
            stack.extend(self.children[x])
        return out

    # primitives -------------------------------------------------------
    def _kill(self, v: int) -> None:
        self.alive[v] = False
        self.parent[v] = NONE
        self.children[v] = []
        lab = self.label[v]
        if lab != NONE and self.where.get(lab) == v:
            del self.where[lab]

    def cut_edge(self, v: int) -> int:
        """Detach v from its parent; return the former parent."""
        p = self.parent[v]
        if p == NONE:
            raise ForestError(f"node {v} is already a root")
        self.children[p].remove(v)
        if self.label[v] == NONE:
            self.nunl[p] -= 1
        self.parent[v] = NONE
        return p

    def contract_node(self, v: int) -> int:
        """Remove unlabelled v with one child; the child takes its place."""
        if self.label[v] != NONE or len(self.children[v]) != 1:
            raise ForestError(f"node {v} is not an unlabelled unary node")
        c = self.children[v][0]
        p = self.parent[v]
        self.parent[c] = p
        if p != NONE:
            kids = self.children[p]
            kids[kids.index(v)] = c
            if self.label[c] != NONE:
                self.nunl[p] -= 1
        self._kill(v)
        return c

    def expand_subset(self, p: int, subset) -> int:
        """Insert a new unlabelled child of p adopting `subset`."""
        subset = list(subset)
        kids = self.children[p]
        members = set(subset)
        if not members or len(members) >= len(kids) or not members <= set(kids):
            raise ForestError("subset must be a proper nonempty subset of the children")
        n = self.add_node()
        pos = min(kids.index(x) for x in members)
        self.children[p] = [x for x in kids if x not in members]
        self.children[p].insert(pos, n)
        self.parent[n] = p
        moved_unl = 0
        for x in kids:
            if x in members:
                self.parent[x] = n
                self.children[n].append(x)
                if self.label[x] == NONE:
                    moved_unl += 1
        self.nunl[n] = moved_unl
        self.nunl[p] += 1 - moved_unl
        return n

    def merge_pair(self, u: int, v: int, lab: int) -> int:
        """Replace sibling leaves u, v by one node labelled `lab`.

        If they are the only children, their parent takes the label itself,
        which is the same as expanding {u, v} and contracting the parent.
        Returns the node now carrying `lab`.
        """
        p = self.parent[u]
        if p == NONE or self.parent[v] != p or u == v:
            raise ForestError("nodes are not siblings")
        kids = self.children[p]
        if len(kids) == 2:
            self._kill(u)
            self._kill(v)
            self.children[p] = []
            self.label[p] = lab
            self.where[lab] = p
            self.nunl[p] = 0
            pp = self.parent[p]
            if pp != NONE:
                self.nunl[pp] -= 1
            return p
        n = len(self.parent)
        self.parent.append(p)
        self.children.append([])
        self.label.append(lab)
        self.nunl.append(0)
        self.alive.append(True)
        self.where[lab] = n
        kids[kids.index(u)] = n
        kids.remove(v)
        self._kill(u)
        self._kill(v)
        return n

    def normalize(self, dirty, on_contract=None) -> list[int]:
        """Delete unlabelled leaves and contract unlabelled unary nodes,
        starting from the candidate nodes in `dirty`.

        Returns the nodes that became roots by contraction.
        """
        new_roots: list[int] = []
        work = list(dirty)
        while work:
            v = work.pop()
            if not self.alive[v] or self.label[v] != NONE:
                continue
            kids = self.children[v]
            if not kids:
                p = self.parent[v]
                if p != NONE:
                    self.children[p].remove(v)
                    self.nunl[p] -= 1
                    work.append(p)
                self._kill(v)
            elif len(kids) == 1:
                p = self.parent[v]
                c = self.contract_node(v)
                if on_contract is not None:
                    on_contract(v, c)
                if p == NONE:
                    new_roots.append(c)
        return new_roots

    def cut_all(self, nodes) -> list[int]:
        """Cut the parent edges of `nodes`, then normalize.

        Returns every labelled node that became a root.
        """
        dirty = [self.cut_edge(v) for v in nodes]
        roots = [v for v in nodes if self.label[v] != NONE]
        roots.extend(v for v in self.normalize(dirty) if self.label[v] != NONE)
        return roots

    def yield_forest(self, nodes) -> RootedForest:
        """Copy with the parent edges of `nodes` cut and normalized (F / E)."""
        out = self.copy()
        out.cut_all(nodes)
        return out

    def check(self) -> None:
        """Full consistency scan; raises AssertionError on any violation."""
        for v, alive in enumerate(self.alive):
            if not alive:
                continue
            unl = 0
            for c in self.children[v]:
                assert self.alive[c] and self.parent[c] == v, (v, c)
                if self.label[c] == NONE:
                    unl += 1
            assert unl == self.nunl[v], (v, unl, self.nunl[v])
            p = self.parent[v]
            if p != NONE:
                assert v in self.children[p]
            if self.label[v] != NONE:
                assert self.where[self.label[v]] == v
        for lab, v in self.where.items():
            assert self.alive[v] and self.label[v] == lab

    def is_normal(self) -> bool:
        return all(
            self.label[v] != NONE or len(self.children[v]) >= 2
            for v, a in enumerate(self.alive)
            if a
        )

    def to_newick_nodes(self, v: int, space: LabelSpace) -> NewickNode:
        """Subtree of v with labelled nodes expanded to their full shape."""
        root = NewickNode()
        stack = [(v, root)]
        while stack:
            x, node = stack.pop()
            lab = self.label[x]
            if lab != NONE:
                sub = space.expand(lab)
                node.label, node.children = sub.label, sub.children
                continue
            for c in self.children[x]:
                child = NewickNode()
                node.children.append(child)
                stack.append((c, child))
        return root

    def dump(self, space: LabelSpace) -> list[str]:
        """One canonical Newick string per component, sorted."""
        from .newick import write_newick

        out = [write_newick(self.to_newick_nodes(r, space)) for r in self.roots()]
        return sorted(out)


class ForestPair:
    """State of one search invocation.

    f1 holds the unresolved top of the first tree, f2 the top of the current
    forest of the second tree.  Labels in `rt` are agreeing subtrees still in
    play; `rd` holds those moved to the frozen part.  `groups` is the FIFO of
    f1 nodes whose children are all labelled, `pending` the FIFO of labels
    that became roots of f2.
    """

    __slots__ = ("space", "f1", "f2", "rt", "rd", "pending", "groups", "a0", "last_l", "trace")

    def __init__(self, space: LabelSpace, f1: RootedForest, f2: RootedForest):
        self.space = space
        self.f1 = f1
        self.f2 = f2
        self.rt: set[int] = set(f1.where)
        self.rd: list[int] = []
        self.pending: deque[int] = deque()
        self.groups: deque[int] = deque()
        self.a0: int | None = None
        self.last_l: int = NONE
        self.trace: tuple = ()
        for v in f1.postorder():
            if f1.children[v] and f1.nunl[v] == 0:
                self.groups.append(v)

    def copy(self) -> ForestPair:
        g = ForestPair.__new__(ForestPair)
        g.space = self.space
        g.f1 = self.f1.copy()
        g.f2 = self.f2.copy()
        g.rt = set(self.rt)
        g.rd = self.rd[:]
        g.pending = deque(self.pending)
        g.groups = deque(self.groups)
        g.a0 = self.a0
        g.last_l = self.last_l
        g.trace = self.trace
        return g

    # Step 3 -------------------------------------------------------------
    def prune_agreeing_root(self, r: int) -> None:
        f1, f2 = self.f1, self.f2
        if r not in self.rt or not f2.is_root(f2.where[r]):
            raise ForestError(f"label {r} is not an agreeing root of the second forest")
        self.rt.remove(r)
        self.rd.append(r)
        v = f1.where[r]
        if f1.is_root(v):
            return
        p = f1.cut_edge(v)
        if len(f1.children[p]) == 1:
            only = f1.children[p][0]
            if self.a0 is not None and f1.label[only] == self.a0:
                self.a0 = None
            pp = f1.parent[p]
            f1.contract_node(p)
            if pp != NONE and f1.nunl[pp] == 0 and f1.label[only] != NONE:
                self.groups.append(pp)

    def drain_pending(self) -> bool:
        """Prune every waiting agreeing root; True if any was pruned."""
        done = False
        while self.pending and len(self.rt) > 1:
            r = self.pending.popleft()
            if r in self.rt and self.f2.is_root(self.f2.where[r]):
                self.prune_agreeing_root(r)
                done = True
        return done

    # Step 4 -------------------------------------------------------------
    def current_group(self) -> int:
        f1 = self.f1
        while self.groups:
            g = self.groups[0]
            if f1.alive[g] and f1.label[g] == NONE and len(f1.children[g]) >= 2 and f1.nunl[g] == 0:
                return g
            self.groups.popleft()
        raise ForestError("no sibling group available")

    def members(self, g: int) -> list[int]:
        lab = self.f1.label
        return [lab[c] for c in self.f1.children[g]]

    # Step 5 -------------------------------------------------------------
    def resolve_sibling_pair(self, ai: int, aj: int) -> int:
        f1, f2 = self.f1, self.f2
        u1, v1 = f1.where[ai], f1.where[aj]
        u2, v2 = f2.where[ai], f2.where[aj]
        if f1.parent[u1] != f1.parent[v1] or f1.parent[u1] == NONE:
            raise ForestError("labels are not siblings in the first forest")
        if f2.parent[u2] != f2.parent[v2] or f2.parent[u2] == NONE:
            raise ForestError("labels are not siblings in the second forest")
        lab = self.space.fresh(ai, aj)
        p1 = f1.parent[u1]
        n1 = f1.merge_pair(u1, v1, lab)
        n2 = f2.merge_pair(u2, v2, lab)
        self.rt.discard(ai)
        self.rt.discard(aj)
        self.rt.add(lab)
        if self.a0 in (ai, aj):
            self.a0 = None
        # the group parent took the label: its own parent may now be a group
        if n1 == p1:
            pp = f1.parent[n1]
            if pp != NONE and f1.nunl[pp] == 0:
                self.groups.append(pp)
        if f2.is_root(n2):
            self.pending.append(lab)
        return lab

    def merge_group(self, g: int) -> None:
        """Resolve every pair of members that are siblings in f2."""
        f2 = self.f2
        marks: dict[int, int] = {}
        work = deque(self.members(g))
        while work:
            x = work.popleft()
            p = f2.parent[f2.where[x]]
            if p == NONE:
                continue
            y = marks.pop(p, None)
            if y is None:
                marks[p] = x
                continue
            work.append(self.resolve_sibling_pair(y, x))

    # edge cuts in f2 --------------------------------------------------------
    def cut_f2(self, edges, after: int | None = None) -> None:
        """Cut a set of edges of f2 given as nodes or (parent, children) sets.

        A set of two or more children is first expanded so that one edge
        separates it.  With `after` set, the siblings of that label are then
        cut as one more set, computed on the normalized result.
        """
        f2 = self.f2
        nodes = []
        for e in edges:
            if isinstance(e, tuple):
                p, kids = e
                nodes.append(kids[0] if len(kids) == 1 else f2.expand_subset(p, kids))
            else:
                nodes.append(e)
        self.trace = self.trace + tuple(self._describe(v) for v in nodes)
        self._note_roots(f2.cut_all(nodes))
        if after is not None:
            v = f2.where[after]
            p = f2.parent[v]
            sibs = [c for c in f2.children[p] if c != v] if p != NONE else []
            if sibs:
                self.cut_f2([(p, tuple(sibs))])

    def _describe(self, v: int) -> tuple[int, ...]:
        return tuple(self.f2.leaf_labels(v))

    def _note_roots(self, nodes) -> None:
        f2 = self.f2
        for v in nodes:
            if f2.alive[v] and f2.is_root(v) and f2.label[v] in self.rt:
                self.pending.append(f2.label[v])

    # results ----------------------------------------------------------------
    def component_labels(self) -> list[int]:
        return self.rd + sorted(self.rt)


def build_pair(t1: NewickTree, t2: NewickTree, space: LabelSpace | None = None) -> ForestPair:
    if space is None:
        space = LabelSpace.from_trees(t1, t2)
    elif leaf_set(t1) != leaf_set(t2):
        raise LabelMismatchError("leaf sets differ")
    index = space.index()
    f1 = RootedForest.from_newick(t1, index, rho=space.rho)
    f2 = RootedForest.from_newick(t2, index, rho=space.rho)
    return ForestPair(space, f1, f2)
