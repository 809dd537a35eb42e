"""Sibling-group analysis and agreement-forest predicates."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .forest import NONE, RHO, ForestPair, LabelSpace, RootedForest
from .newick import NewickTree

__all__ = [
    "LcaAnalysis",
    "CaseKind",
    "CaseLabel",
    "analyze_group",
    "classify",
    "triple_of",
    "check_agreement_forest",
    "is_agreement_forest",
]


@dataclass
class LcaAnalysis:
    """Members a_1..a_m ordered around the minimal LCA `l` of the second forest.

    `paths[i]` lists, for each node x_j strictly between a_i and l, the pair
    (x_j, children of x_j off the path), i.e. the pendant set B_ij.
    `sibs[i]` is (parent of a_i, siblings of a_i), i.e. B_i.
    """

    l: int
    order: list[int]
    r: int
    s: list[int]
    paths: list[list[tuple[int, tuple[int, ...]]]] = field(default_factory=list)
    sibs: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)
    b_l: tuple[int, ...] = ()

    @property
    def m(self) -> int:
        return len(self.order)

    @property
    def isolated(self) -> bool:
        return self.l == NONE


class CaseKind(enum.Enum):
    ISOLATED_SIBLINGS = "isolated siblings"
    AT_MOST_ONE_PENDANT = "at most one pendant subtree"
    ONE_PENDANT = "one pendant subtree"
    MULTI_PENDANT_M2 = "multiple pendant subtrees, m = 2"
    MULTI_PENDANT_MGT2 = "multiple pendant subtrees, m > 2"


@dataclass(frozen=True)
class CaseLabel:
    kind: CaseKind
    case: str


def analyze_group(pair: ForestPair, members: list[int]) -> LcaAnalysis:
    """Find the minimal LCA and order the group by pendant path length.

    The LCA chosen by the caller's invocation (pair.last_l) is kept while it
    is still a minimal LCA of two or more members; otherwise the candidate
    with the smallest member leaf wins.  pair.last_l is updated.
    """
    if len(members) < 2:
        raise ValueError("a sibling group needs at least two members")
    f2 = pair.f2
    minleaf = pair.space.minleaf
    member_set = set(members)
    count: dict[int, int] = {}
    low: dict[int, int] = {}
    for v in f2.postorder():
        lab = f2.label[v]
        if lab != NONE:
            if lab in member_set:
                count[v] = 1
                low[v] = minleaf[lab]
            continue
        c, lo = 0, None
        for y in f2.children[v]:
            cy = count.get(y, 0)
            if cy:
                c += cy
                ly = low[y]
                lo = ly if lo is None or ly < lo else lo
        if c:
            count[v] = c
            low[v] = lo

    def minimal(x: int) -> bool:
        return count.get(x, 0) >= 2 and all(count.get(y, 0) <= 1 for y in f2.children[x])

    l = pair.last_l
    if not (l != NONE and l < len(f2.alive) and f2.alive[l] and f2.label[l] == NONE and minimal(l)):
        l = NONE
        best = None
        for x, c in count.items():
            if c >= 2 and minimal(x) and (best is None or low[x] < best):
                l, best = x, low[x]
    by_leaf = sorted(members, key=minleaf.__getitem__)
    if l == NONE:
        pair.last_l = NONE
        return LcaAnalysis(NONE, by_leaf, 0, [])
    pair.last_l = l

    found: list[tuple[int, int, list]] = []
    stack = [(y, [(l, y)]) for y in f2.children[l] if count.get(y, 0)]
    while stack:
        y, path = stack.pop()
        lab = f2.label[y]
        if lab != NONE:
            # path holds (node, child toward y) from l down to y's parent
            pend = [
                (x, tuple(c for c in f2.children[x] if c != toward))
                for x, toward in reversed(path[1:])
            ]
            found.append((len(pend), lab, pend))
            continue
        for c in f2.children[y]:
            if count.get(c, 0):
                stack.append((c, path + [(y, c)]))
    found.sort(key=lambda t: (-t[0], minleaf[t[1]]))
    under = [lab for _, lab, _ in found]
    rest = [a for a in by_leaf if a not in set(under)]
    sibs = []
    for lab in under:
        v = f2.where[lab]
        p = f2.parent[v]
        sibs.append((p, tuple(c for c in f2.children[p] if c != v)))
    b_l = tuple(y for y in f2.children[l] if not count.get(y, 0))
    return LcaAnalysis(
        l,
        under + rest,
        len(under),
        [t[0] for t in found],
        [t[2] for t in found],
        sibs,
        b_l,
    )


def _kind(an: LcaAnalysis, m: int) -> tuple[CaseKind, str]:
    """First matching case of the unconstrained branching step."""
    if an.isolated:
        return CaseKind.ISOLATED_SIBLINGS, "8.1"
    r, s = an.r, an.s
    if all(x == 1 for x in s[: r - 1]) and s[r - 1] == 0:
        return CaseKind.AT_MOST_ONE_PENDANT, "8.2"
    if m == 2 and s[0] + s[1] >= 2:
        return CaseKind.MULTI_PENDANT_M2, "8.3"
    if r == 2 and s[0] == s[1] == 1:
        return CaseKind.ONE_PENDANT, "8.4"
    if r > 2 and all(x == 1 for x in s):
        return CaseKind.ONE_PENDANT, "8.5"
    if s[0] >= 2:
        return CaseKind.MULTI_PENDANT_MGT2, "8.6/8.7"
    raise AssertionError(f"no case applies to r={r} s={s} m={m}")


def l_is_root_or_parent_has_member(f2: RootedForest, l: int, members: set[int]) -> bool:
    p = f2.parent[l]
    if p == NONE:
        return True
    return any(f2.label[c] in members for c in f2.children[p])


def ladder_extra_calls(f2: RootedForest, l: int, members: set[int]) -> bool:
    """Side condition for the two extra calls of the r = 2, s = (1, 1) case."""
    p = f2.parent[l]
    if p == NONE:
        return True
    if any(c != l and f2.label[c] not in members for c in f2.children[p]):
        return True
    g = f2.parent[p]
    if g == NONE:
        return False
    return any(c != p and f2.label[c] not in members for c in f2.children[g])


def classify(an: LcaAnalysis, m: int, a0: int | None = None, f2: RootedForest | None = None) -> CaseLabel:
    """Structural case plus the branching sub-case that fires.

    With `a0` set the two-way branching cases apply; they need `f2` to test
    the neighbourhood of l.
    """
    kind, case = _kind(an, m)
    if a0 is None:
        if case == "8.6/8.7":
            members = set(an.order)
            ladder = an.r == 2 and an.s[1] == 0 and l_is_root_or_parent_has_member(f2, an.l, members)
            case = "8.6" if ladder else "8.7"
        return CaseLabel(kind, case)
    if an.isolated:
        return CaseLabel(kind, "7.1")
    under = an.order[: an.r]
    if a0 not in under:
        return CaseLabel(kind, "7.2")
    x = 0 if an.order[0] != a0 else 1
    if an.r == 2 and an.s[x] == 0 and l_is_root_or_parent_has_member(f2, an.l, set(an.order)):
        return CaseLabel(kind, "7.3")
    return CaseLabel(kind, "7.4")


# triples and agreement forests -------------------------------------------


def triple_of(forest: RootedForest, a: int, b: int, c: int) -> str:
    """Classify labels a, b, c as 'ab|c', 'ac|b', 'bc|a', 'fan' or 'disconnected'."""
    anc = {}
    for x in (a, b, c):
        v = forest.where[x]
        chain = []
        while v != NONE:
            chain.append(v)
            v = forest.parent[v]
        anc[x] = chain

    def lca(x, y):
        seen = set(anc[x])
        for v in anc[y]:
            if v in seen:
                return v
        return NONE

    ab, ac, bc = lca(a, b), lca(a, c), lca(b, c)
    if NONE in (ab, ac, bc):
        return "disconnected"
    depth = {v: len(anc[a]) - i for i, v in enumerate(anc[a])}
    depth.update({v: len(anc[b]) - i for i, v in enumerate(anc[b])})
    depth.update({v: len(anc[c]) - i for i, v in enumerate(anc[c])})
    if ab == ac == bc:
        return "fan"
    deepest = max((ab, "ab|c"), (ac, "ac|b"), (bc, "bc|a"), key=lambda t: depth[t[0]])
    return deepest[1]


def _tree_nodes(root):
    """Postorder list of (node, children) for a NewickNode tree."""
    order, stack = [], [root]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(v.children)
    order.reverse()
    return order


def _clusters(root, index: dict[str, int]) -> tuple[list[int], list[tuple[int, list[int]]]]:
    """Bitmask clusters of every node and (cluster, child clusters) per node."""
    mask = {}
    allc, nodes = [], []
    for v in _tree_nodes(root):
        if v.children:
            m = 0
            for c in v.children:
                m |= mask[id(c)]
            nodes.append((m, [mask[id(c)] for c in v.children]))
        else:
            if v.label not in index:
                raise ValueError(f"unknown label {v.label!r}")
            m = 1 << index[v.label]
        mask[id(v)] = m
        allc.append(m)
    return allc, nodes


def _laminar(family: set[int], universe: int) -> bool:
    """Clusters (bitmasks) form a hierarchy: any two are nested or disjoint."""
    owner: dict[int, int] = {}
    for c in sorted(family, key=lambda x: -x.bit_count()):
        bits = c
        own = None
        while bits:
            low = bits & -bits
            o = owner.get(low, universe)
            if own is None:
                own = o
            elif o != own:
                return False
            owner[low] = c
            bits ^= low
        if own is not None and c & ~own:
            return False
    return True


def _with_rho(t: NewickTree):
    from .newick import NewickNode

    return NewickNode(None, [t.root, NewickNode(RHO)])


def check_agreement_forest(components: list[NewickTree], t1: NewickTree, t2: NewickTree) -> str | None:
    """Return None if the components form an agreement forest, else the
    violated condition: 'containment', 'triple' or 'overlap'.

    components[0] is the rho component, given as the subtree hanging below
    rho, or as the single leaf 'ρ' when rho is alone.  Multifurcating
    components are accepted when some resolution of them works.
    """
    space = LabelSpace.from_trees(t1, t2)
    index = space.index()
    universe = (1 << len(space.names)) - 1
    comps = []
    for i, comp in enumerate(components):
        root = comp.root
        if i == 0:
            root = root if (not root.children and root.label == RHO) else _with_rho(comp)
        try:
            comps.append(_clusters(root, index))
        except ValueError:
            return "containment"  # label outside the leaf set
    union = 0
    total = 0
    for allc, _ in comps:
        top = allc[-1]
        union |= top
        total += top.bit_count()
    if union != universe or total != len(space.names) or (components and not comps[0][0][-1] >> space.rho & 1):
        return "containment"
    if len(components) == 0:
        return "containment"
    trees = [_clusters(_with_rho(t), index) for t in (t1, t2)]
    for allc, _ in comps:
        top = allc[-1]
        if top.bit_count() < 3:
            continue
        fam = set(allc)
        for tall, _ in trees:
            fam.update(c & top for c in tall if c & top)
        if not _laminar(fam, top):
            return "triple"
    comp_of = {}
    size = {}
    for i, (allc, _) in enumerate(comps):
        top = allc[-1]
        size[i] = top.bit_count()
        bits = top
        while bits:
            low = bits & -bits
            comp_of[low.bit_length() - 1] = i
            bits ^= low
    for t in (t1, t2):
        if _overlaps(_with_rho(t), index, comp_of, size):
            return "overlap"
    return None


def _overlaps(root, index, comp_of, size) -> bool:
    """True if two components use a common edge of the tree."""
    open_at: dict[int, dict[int, int]] = {}
    for v in _tree_nodes(root):
        if not v.children:
            i = comp_of[index[v.label]]
            open_at[id(v)] = {i: 1} if size[i] > 1 else {}
            continue
        acc: dict[int, int] = {}
        for c in v.children:
            for i, k in open_at.pop(id(c)).items():
                acc[i] = acc.get(i, 0) + k
        acc = {i: k for i, k in acc.items() if k < size[i]}
        if len(acc) > 1:
            return True
        open_at[id(v)] = acc
    return False


def is_agreement_forest(components: list[NewickTree], t1: NewickTree, t2: NewickTree) -> bool:
    return check_agreement_forest(components, t1, t2) is None
