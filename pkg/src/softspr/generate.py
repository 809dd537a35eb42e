"""Tree generators: exhaustive enumeration for small leaf sets and seeded
random trees, SPR moves, contractions and resolutions for property tests and
experiments.  Random operations work in linear time so 10^4-leaf trees are
cheap.
"""
from __future__ import annotations

import random
from functools import lru_cache

from .newick import NewickNode, NewickTree
from .oracle import clusters_to_tree

__all__ = [
    "leaf_names",
    "all_trees",
    "all_binary_trees",
    "MutableTree",
    "random_binary_tree",
    "random_spr_moves",
    "random_contractions",
    "random_resolution",
    "random_pair",
    "random_resolution_pair",
]


def leaf_names(n: int) -> list[str]:
    return [str(i + 1) for i in range(n)]


@lru_cache(maxsize=None)
def _all_cluster_trees(n: int, binary: bool) -> tuple[frozenset[int], ...]:
    trees = [frozenset({1})]
    for k in range(1, n):
        bk = 1 << k
        nxt = []
        for t in trees:
            for c in t:
                # new leaf as sibling of cluster c
                new = {x | bk if x & c == c else x for x in t}
                new.update((c, bk))
                nxt.append(frozenset(new))
                if not binary and c.bit_count() > 1:
                    # new leaf as an extra child of internal cluster c
                    new = {x | bk if x & c == c else x for x in t}
                    new.add(bk)
                    nxt.append(frozenset(new))
        trees = nxt
    return tuple(trees)


def all_trees(n: int, names: list[str] | None = None) -> list[NewickTree]:
    """Every rooted tree on n labelled leaves, multifurcations included."""
    names = names or leaf_names(n)
    return [NewickTree(clusters_to_tree(c, names)) for c in _all_cluster_trees(n, False)]


def all_binary_trees(n: int, names: list[str] | None = None) -> list[NewickTree]:
    names = names or leaf_names(n)
    return [NewickTree(clusters_to_tree(c, names)) for c in _all_cluster_trees(n, True)]


class MutableTree:
    """Parent/children arrays for cheap random edits; node 0 is the root."""

    def __init__(self) -> None:
        self.parent: list[int] = []
        self.children: list[list[int]] = []
        self.name: list[str | None] = []
        self.alive: list[bool] = []
        self.root = 0

    def add(self, parent: int, name: str | None = None) -> int:
        v = len(self.parent)
        self.parent.append(parent)
        self.children.append([])
        self.name.append(name)
        self.alive.append(True)
        if parent >= 0:
            self.children[parent].append(v)
        return v

    @classmethod
    def from_newick(cls, tree: NewickTree) -> MutableTree:
        t = cls()
        stack = [(tree.root, -1)]
        while stack:
            node, par = stack.pop()
            v = t.add(par, node.label if not node.children else None)
            stack.extend((c, v) for c in reversed(node.children))
        t.root = 0
        return t

    def to_newick(self) -> NewickTree:
        nodes = {}
        stack = [self.root]
        order = []
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(self.children[v])
        for v in reversed(order):
            nodes[v] = NewickNode(self.name[v], [nodes[c] for c in self.children[v]])
        return NewickTree(nodes[self.root])

    def _insert_above(self, y: int, x: int) -> None:
        """Make x a sibling of y under a new node placed on y's parent edge."""
        u = self.add(-1)
        p = self.parent[y]
        if p >= 0:
            kids = self.children[p]
            kids[kids.index(y)] = u
        else:
            self.root = u
        self.parent[u] = p
        self.children[u] = [y, x]
        self.parent[y] = u
        self.parent[x] = u

    def _detach(self, x: int) -> None:
        """Remove x with its subtree, suppressing a parent left with one child."""
        p = self.parent[x]
        self.children[p].remove(x)
        self.parent[x] = -1
        if len(self.children[p]) == 1:
            c = self.children[p][0]
            pp = self.parent[p]
            self.parent[c] = pp
            if pp >= 0:
                kids = self.children[pp]
                kids[kids.index(p)] = c
            else:
                self.root = c
            self.alive[p] = False
            self.children[p] = []

    def live_nodes(self) -> list[int]:
        return [v for v, a in enumerate(self.alive) if a and (v == self.root or self.parent[v] >= 0)]

    def is_below(self, y: int, x: int) -> bool:
        while y >= 0:
            if y == x:
                return True
            y = self.parent[y]
        return False


def random_binary_tree(n: int, rng: random.Random, names: list[str] | None = None) -> MutableTree:
    """Uniform random rooted binary tree by random edge insertion."""
    names = names or leaf_names(n)
    order = names[:]
    rng.shuffle(order)
    t = MutableTree()
    t.add(-1, order[0])
    for name in order[1:]:
        y = rng.randrange(len(t.parent))
        while not t.alive[y]:
            y = rng.randrange(len(t.parent))
        x = t.add(-1, name)
        t._insert_above(y, x)
    return t


def random_spr_moves(t: MutableTree, moves: int, rng: random.Random) -> MutableTree:
    """Apply random rooted SPR moves in place (regrafting above the root allowed)."""
    for _ in range(moves):
        nodes = t.live_nodes()
        if len(nodes) < 3:
            break
        x = rng.choice(nodes)
        if x == t.root:
            continue
        t._detach(x)
        nodes = t.live_nodes()
        y = rng.choice(nodes)
        while t.is_below(y, x):
            y = rng.choice(nodes)
        t._insert_above(y, x)
    return t


def random_contractions(t: MutableTree, prob: float, rng: random.Random) -> MutableTree:
    """Contract each internal non-root edge independently with probability `prob`."""
    for v in t.live_nodes():
        if v == t.root or not t.children[v] or rng.random() >= prob:
            continue
        p = t.parent[v]
        kids = t.children[p]
        i = kids.index(v)
        kids[i:i + 1] = t.children[v]
        for c in t.children[v]:
            t.parent[c] = p
        t.children[v] = []
        t.alive[v] = False
        t.parent[v] = -1
    return t


def random_resolution(tree: NewickTree, rng: random.Random) -> NewickTree:
    """A uniformly chosen binary resolution of every multifurcation."""
    t = MutableTree.from_newick(tree)
    for v in t.live_nodes():
        kids = t.children[v]
        if len(kids) <= 2:
            continue
        kids = kids[:]
        rng.shuffle(kids)
        # build a random binary tree over the children below v
        sub = MutableTree()
        sub.add(-1, str(0))
        for i in range(1, len(kids)):
            y = rng.randrange(len(sub.parent))
            while not sub.alive[y]:
                y = rng.randrange(len(sub.parent))
            sub._insert_above(y, sub.add(-1, str(i)))
        mapping = {}
        stack = [sub.root]
        while stack:
            w = stack.pop()
            if sub.name[w] is not None:
                mapping[w] = kids[int(sub.name[w])]
                continue
            mapping[w] = v if w == sub.root else t.add(-1)
            stack.extend(sub.children[w])
        for w, target in mapping.items():
            if sub.name[w] is None:
                t.children[target] = [mapping[c] for c in sub.children[w]]
                for c in t.children[target]:
                    t.parent[c] = target
    return t.to_newick()


def random_pair(n: int, rng: random.Random, moves: int, contract: float = 0.0,
                names: list[str] | None = None) -> tuple[NewickTree, NewickTree]:
    """A random binary tree and a copy perturbed by `moves` SPR moves; each
    tree then has internal edges contracted with probability `contract`."""
    t1 = random_binary_tree(n, rng, names)
    t2 = MutableTree.from_newick(t1.to_newick())
    random_spr_moves(t2, moves, rng)
    if contract:
        random_contractions(t1, contract, rng)
        random_contractions(t2, contract, rng)
    return t1.to_newick(), t2.to_newick()


def random_resolution_pair(n: int, rng: random.Random, contract: float = 0.5) -> tuple[NewickTree, NewickTree]:
    """A random multifurcating tree and one of its random binary resolutions."""
    t = random_binary_tree(n, rng)
    random_contractions(t, contract, rng)
    t1 = t.to_newick()
    return t1, random_resolution(t1, rng)
