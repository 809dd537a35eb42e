"""Brute-force references for small trees.

Trees are handled as sets of clusters (bitmasks over leaf indices, rho being
the highest bit).  A forest is a frozenset of components, each component a
frozenset of clusters, so equal forests compare equal regardless of how they
were produced.

oracle_ecut enumerates, for each input tree, every forest reachable by cutting
edges of any binary resolution, and returns the smallest component count the
two trees have in common, minus one.  oracle_spr_bfs walks the graph of
rooted SPR moves between binary trees.
"""
from __future__ import annotations

import itertools
from collections import deque
from functools import lru_cache
from math import prod

from .forest import RHO, LabelSpace
from .newick import NewickNode, NewickTree

__all__ = [
    "OracleBoundError",
    "OracleTable",
    "tree_clusters",
    "clusters_to_tree",
    "enumerate_resolutions",
    "oracle_ecut",
    "oracle_is_agreement_forest",
    "oracle_spr_bfs",
    "spr_neighbours",
]

DEFAULT_RESOLUTION_LIMIT = 10**4
DEFAULT_MAX_LEAVES = 7


class OracleBoundError(ValueError):
    """The instance is too large for exhaustive enumeration."""


def _bits(x: int):
    while x:
        low = x & -x
        yield low
        x ^= low


def tree_clusters(tree: NewickTree, index: dict[str, int], rho: int | None = None) -> frozenset[int]:
    """All clusters of the tree; with `rho`, the tree hangs below a top node
    whose other child is rho."""
    out = []
    mask = {}
    order, stack = [], [tree.root]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(v.children)
    for v in reversed(order):
        if v.children:
            m = 0
            for c in v.children:
                m |= mask[id(c)]
        else:
            m = 1 << index[v.label]
        mask[id(v)] = m
        out.append(m)
    if rho is not None:
        out.append(1 << rho)
        out.append(mask[id(tree.root)] | 1 << rho)
    return frozenset(out)


def _children_map(clusters) -> dict[int, list[int]]:
    """Map each cluster to its maximal proper subclusters."""
    kids: dict[int, list[int]] = {c: [] for c in clusters}
    owner: dict[int, int] = {}
    for c in sorted(clusters, key=lambda x: -x.bit_count()):
        par = None
        for low in _bits(c):
            par = owner.get(low)
            break
        if par is not None:
            kids[par].append(c)
        for low in _bits(c):
            owner[low] = c
    return kids


def clusters_to_tree(clusters, names: list[str]) -> NewickNode:
    """NewickNode for a single-rooted cluster set."""
    kids = _children_map(clusters)
    top = max(clusters, key=int.bit_count)
    root = NewickNode()
    stack = [(top, root)]
    while stack:
        c, node = stack.pop()
        if c.bit_count() == 1:
            node.label = names[c.bit_length() - 1]
            continue
        for k in kids[c]:
            child = NewickNode()
            node.children.append(child)
            stack.append((k, child))
    return root


@lru_cache(maxsize=None)
def _binary_shapes(d: int) -> tuple[frozenset[int], ...]:
    """Every rooted binary tree on items 0..d-1 as a set of index masks."""
    trees = [frozenset({1})]
    for k in range(1, d):
        bk = 1 << k
        nxt = []
        for t in trees:
            for c in t:
                new = {x | bk if x & c == c else x for x in t}
                new.add(c)
                new.add(bk)
                nxt.append(frozenset(new))
        trees = nxt
    return tuple(trees)


def _shape_count(d: int) -> int:
    """Rooted binary trees on d labelled leaves: (2d - 3)!!."""
    return prod(range(1, 2 * d - 2, 2)) if d > 1 else 1


def _resolutions(clusters: frozenset[int], limit: int) -> list[frozenset[int]]:
    kids = _children_map(clusters)
    count = prod(_shape_count(len(ks)) for ks in kids.values() if len(ks) > 2)
    if count > limit:
        raise OracleBoundError(f"{count} resolutions exceed the limit {limit}")
    options = []
    for c, ks in kids.items():
        if len(ks) > 2:
            shapes = _binary_shapes(len(ks))
            extra = []
            for shape in shapes:
                add = []
                for mask in shape:
                    if mask.bit_count() >= 2 and mask != (1 << len(ks)) - 1:
                        u = 0
                        for i, k in enumerate(ks):
                            if mask >> i & 1:
                                u |= k
                        add.append(u)
                extra.append(add)
            options.append(extra)
    out = []
    for combo in itertools.product(*options):
        s = set(clusters)
        for add in combo:
            s.update(add)
        out.append(frozenset(s))
    return out


def enumerate_resolutions(tree: NewickTree, limit: int = DEFAULT_RESOLUTION_LIMIT) -> list[NewickTree]:
    """All binary resolutions of a tree, canonical and duplicate-free."""
    names = sorted(tree.leaves())
    index = {x: i for i, x in enumerate(names)}
    res = _resolutions(tree_clusters(tree, index), limit)
    return [NewickTree(clusters_to_tree(r, names)) for r in res]


def _forests_of_binary(clusters: frozenset[int]) -> set[frozenset]:
    """Every forest obtained by cutting edges of a binary cluster tree."""
    kids = _children_map(clusters)
    top = max(clusters, key=int.bit_count)
    memo: dict[int, set] = {}
    for c in sorted(clusters, key=int.bit_count):
        ks = kids[c]
        if not ks:
            memo[c] = {((c, frozenset({c})), frozenset())}
            continue
        a, b = ks
        sa, sb = memo.pop(a), memo.pop(b)
        states = set()
        for oa, ca in sa:
            for ob, cb in sb:
                closed = ca | cb
                # keep both edges, cut one, or cut both
                if oa is not None and ob is not None:
                    states.add(((oa[0] | ob[0], oa[1] | ob[1] | {oa[0] | ob[0]}), closed))
                    states.add((ob, closed | {oa[1]}))
                    states.add((oa, closed | {ob[1]}))
                    states.add((None, closed | {oa[1], ob[1]}))
                elif oa is not None:
                    states.add((oa, closed))
                    states.add((None, closed | {oa[1]}))
                elif ob is not None:
                    states.add((ob, closed))
                    states.add((None, closed | {ob[1]}))
                else:
                    states.add((None, closed))
        memo[c] = states
    out = set()
    for o, closed in memo[top]:
        out.add(closed | {o[1]} if o is not None else closed)
    return out


class OracleTable:
    """Cache of forest sets per tree, bucketed by component count."""

    def __init__(self, limit: int = DEFAULT_RESOLUTION_LIMIT, max_leaves: int = DEFAULT_MAX_LEAVES):
        self.limit = limit
        self.max_leaves = max_leaves
        self._ids: dict[frozenset, int] = {}
        self._cache: dict[frozenset[int], dict[int, frozenset[int]]] = {}

    def _intern(self, forest: frozenset) -> int:
        i = self._ids.get(forest)
        if i is None:
            i = self._ids[forest] = len(self._ids)
        return i

    def forests(self, clusters: frozenset[int]) -> dict[int, frozenset[int]]:
        hit = self._cache.get(clusters)
        if hit is not None:
            return hit
        by_q: dict[int, set[int]] = {}
        for res in _resolutions(clusters, self.limit):
            for f in _forests_of_binary(res):
                by_q.setdefault(len(f), set()).add(self._intern(f))
        out = {q: frozenset(s) for q, s in by_q.items()}
        self._cache[clusters] = out
        return out

    def check_size(self, n: int) -> None:
        if n > self.max_leaves:
            raise OracleBoundError(f"{n} leaves exceed the oracle limit of {self.max_leaves}")

    def ecut(self, t1: NewickTree, t2: NewickTree) -> int:
        space = LabelSpace.from_trees(t1, t2)
        self.check_size(space.n)
        index = space.index()
        a = self.forests(tree_clusters(t1, index, space.rho))
        b = self.forests(tree_clusters(t2, index, space.rho))
        for q in sorted(a):
            if q in b and not a[q].isdisjoint(b[q]):
                return q - 1
        raise AssertionError("singleton forest is always shared")

    def is_agreement_forest(self, components: list[NewickTree], t1: NewickTree, t2: NewickTree) -> bool:
        space = LabelSpace.from_trees(t1, t2)
        self.check_size(space.n)
        index = space.index()
        index[RHO] = space.rho
        a = self.forests(tree_clusters(t1, index, space.rho))
        b = self.forests(tree_clusters(t2, index, space.rho))
        q = len(components)
        if q not in a or q not in b:
            return False
        parts = []
        for i, comp in enumerate(components):
            root = comp.root
            if i == 0 and not (not root.children and root.label == RHO):
                cl = tree_clusters(comp, index, space.rho)
            else:
                cl = tree_clusters(comp, index)
            parts.append(_resolutions(cl, self.limit))
        seen_labels = 0
        for p in parts:
            top = max(p[0], key=int.bit_count)
            if top & seen_labels:
                return False
            seen_labels |= top
        if seen_labels != (1 << len(space.names)) - 1:
            return False
        for combo in itertools.product(*parts):
            i = self._ids.get(frozenset(combo))
            if i is not None and i in a[q] and i in b[q]:
                return True
        return False


_default = OracleTable()


def oracle_ecut(t1: NewickTree, t2: NewickTree, table: OracleTable | None = None) -> int:
    """Exact soft SPR distance by exhaustive enumeration."""
    return (table or _default).ecut(t1, t2)


def oracle_is_agreement_forest(components: list[NewickTree], t1: NewickTree, t2: NewickTree,
                               table: OracleTable | None = None) -> bool:
    """Definitional check: some resolution of the components is obtained by
    cutting a binary resolution of each tree.  components[0] holds rho."""
    return (table or _default).is_agreement_forest(components, t1, t2)


_neighbours: dict[frozenset[int], tuple[frozenset[int], ...]] = {}


def spr_neighbours(tree: frozenset[int]) -> tuple[frozenset[int], ...]:
    """Binary trees one rooted SPR move away.  The top cluster joins the tree
    and rho; subtrees may be regrafted onto any edge of the remaining tree,
    including the edge from its root up to the top."""
    hit = _neighbours.get(tree)
    if hit is not None:
        return hit
    top = max(tree, key=int.bit_count)
    rho = 1 << (top.bit_length() - 1)
    main = top ^ rho
    out = set()
    for x in tree:
        if x in (top, rho, main):
            continue
        inside = [c for c in tree if c & x == c]
        rest = {c & ~x for c in tree if c & x != c}
        rest.discard(0)
        for y in rest:
            if y & rho:
                continue  # the top and rho stay put
            new = {c | x if c & y == y else c for c in rest}
            new.add(y)
            new.update(inside)
            new = frozenset(new)
            if new != tree:
                out.add(new)
    res = tuple(out)
    _neighbours[tree] = res
    return res


def oracle_spr_bfs(t1: NewickTree, t2: NewickTree, max_leaves: int = DEFAULT_MAX_LEAVES) -> int:
    """Rooted SPR distance between binary trees by breadth-first search."""
    if not (t1.is_binary() and t2.is_binary()):
        raise ValueError("SPR search needs binary trees")
    space = LabelSpace.from_trees(t1, t2)
    if space.n > max_leaves:
        raise OracleBoundError(f"{space.n} leaves exceed the oracle limit of {max_leaves}")
    index = space.index()
    src = tree_clusters(t1, index, space.rho)
    dst = tree_clusters(t2, index, space.rho)
    if src == dst:
        return 0
    dist = {src: 0}
    queue = deque([src])
    while queue:
        t = queue.popleft()
        d = dist[t] + 1
        for u in spr_neighbours(t):
            if u not in dist:
                if u == dst:
                    return d
                dist[u] = d
                queue.append(u)
    raise AssertionError("SPR graph is connected")

