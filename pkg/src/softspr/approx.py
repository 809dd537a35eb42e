"""O(n log n) 3-approximation of the soft SPR distance.

The search of fpt_search is followed along a single branch.  Instead of the
linear-time LCA analysis, group members are ordered by a depth estimate kept
in a max-heap, and sibling pairs that appear after edge cuts are merged
through per-node representatives instead of a fresh marking pass.
"""
from __future__ import annotations

import heapq
import time
from collections import Counter, deque
from dataclasses import dataclass, field

from .forest import NONE, ForestPair, build_pair
from .fpt_search import extract_maf
from .newick import NewickTree
from .structure import analyze_group

__all__ = ["DepthQueue", "ApproxResult", "approx_distance"]


class DepthQueue:
    """Max-priority queue of labels keyed by depth estimate.

    Stale entries are skipped lazily; `valid(label, dest)` decides whether an
    entry still describes a live member with its current estimate.
    """

    def __init__(self, minleaf: dict[int, int], dest_of):
        self._heap: list[tuple[int, int, int]] = []
        self._minleaf = minleaf
        self._dest_of = dest_of
        self.ops = 0

    def clear(self) -> None:
        self._heap = []

    def push(self, label: int, dest: int) -> None:
        self.ops += 1
        heapq.heappush(self._heap, (-dest, self._minleaf[label], label))

    def pop(self, valid) -> int:
        while True:
            self.ops += 1
            d, _, lab = heapq.heappop(self._heap)
            if valid(lab, -d):
                return lab

    def top_two(self, valid) -> tuple[int, int]:
        a = self.pop(valid)
        b = self.pop(valid)
        self.push(a, self._dest_of(a))
        self.push(b, self._dest_of(b))
        return a, b

    def __len__(self) -> int:
        return len(self._heap)


@dataclass
class ApproxResult:
    distance: int
    components: list[NewickTree]
    queue_ops: int = 0
    cuts_made: int = 0
    charged: int = 0
    cuts: list[tuple[int, ...]] = field(default_factory=list)
    cases: Counter = field(default_factory=Counter)
    elapsed: float = 0.0

    @property
    def lower_bound(self) -> int:
        return -(-self.distance // 3)


class _Approx:
    def __init__(self, pair: ForestPair, check: bool = False):
        self.pair = pair
        self.f1, self.f2 = pair.f1, pair.f2
        self.check = check
        f2 = self.f2
        self.dest = [0] * len(f2.parent)
        for v in reversed(f2.postorder()):
            p = f2.parent[v]
            self.dest[v] = 0 if p == NONE else self.dest[p] + 1
        self.rep: dict[int, int] = {}
        self.group = NONE
        self.queue = DepthQueue(pair.space.minleaf, self.dest_of)
        self.k = 0
        self.charged = 0
        self.cuts: list[tuple[int, ...]] = []
        self.cases: Counter = Counter()

    # helpers ------------------------------------------------------------
    def is_member(self, lab: int) -> bool:
        v = self.f1.where.get(lab)
        return v is not None and self.f1.parent[v] == self.group and lab in self.pair.rt

    def dest_of(self, lab: int) -> int:
        return self.dest[self.f2.where[lab]]

    def valid(self, lab: int, d: int) -> bool:
        return self.is_member(lab) and self.dest_of(lab) == d

    def merge(self, y: int, x: int) -> int:
        """Resolve members y, x (siblings in both forests) and queue the result."""
        f2 = self.f2
        d = self.dest_of(y)
        lab = self.pair.resolve_sibling_pair(y, x)
        v = f2.where[lab]
        while len(self.dest) < len(f2.parent):
            self.dest.append(d)
        if self.is_member(lab):
            self.queue.push(lab, self.dest[v])
        return lab

    # step 5 ---------------------------------------------------------------
    def start_group(self, g: int) -> None:
        self.group = g
        self.rep = {}
        self.queue.clear()
        f2 = self.f2
        work = deque(self.pair.members(g))
        for lab in work:
            self.queue.push(lab, self.dest_of(lab))
        while work:
            x = work.popleft()
            if not self.is_member(x):
                continue
            p = f2.parent[f2.where[x]]
            if p == NONE:
                continue
            y = self.rep.get(p)
            if y is None or not self._rep_ok(p, y):
                self.rep[p] = x
                continue
            del self.rep[p]
            work.append(self.merge(y, x))

    def _rep_ok(self, p: int, y: int) -> bool:
        v = self.f2.where.get(y)
        return v is not None and self.f2.parent[v] == p and self.is_member(y)

    # edge cuts ----------------------------------------------------------------
    def cut(self, nodes: list[int]) -> None:
        f2 = self.f2
        nodes = [v for v in nodes if f2.parent[v] != NONE]
        self.cuts.extend(tuple(f2.leaf_labels(v)) for v in nodes)
        self.k += len(nodes)
        moved: list[int] = []

        def on_contract(v: int, c: int) -> None:
            lab = f2.label[c]
            if lab != NONE and self.is_member(lab):
                if self.dest[c] != self.dest[v]:
                    self.queue.push(lab, self.dest[v])
                moved.append(lab)
            self.dest[c] = self.dest[v]

        dirty = [f2.cut_edge(v) for v in nodes]
        roots = [v for v in nodes if f2.label[v] != NONE]
        roots += [v for v in f2.normalize(dirty, on_contract) if f2.label[v] != NONE]
        self.pair._note_roots(roots)
        work = deque(moved)
        while work:
            lab = work.popleft()
            if not self.is_member(lab):
                continue
            v = f2.where[lab]
            p = f2.parent[v]
            if p == NONE:
                continue
            y = self.rep.get(p)
            if y is None or y == lab or not self._rep_ok(p, y):
                self.rep[p] = lab
                continue
            del self.rep[p]
            z = self.merge(y, lab)
            if f2.where[z] == p:
                work.append(z)
            else:
                self.rep[p] = z

    # step 7 -------------------------------------------------------------------
    def step(self, fresh: bool) -> None:
        f2 = self.f2
        m = len(self.f1.children[self.group])
        par = lambda lab: f2.parent[f2.where[lab]]  # noqa: E731
        node = lambda lab: f2.where[lab]  # noqa: E731
        if m == 2:
            a1, a2 = self.queue.top_two(self.valid)
            if fresh:
                self.cases["A.1"] += 1
                self.charged += 3
                self.cut([node(a1), par(a1), node(a2)])
            else:
                self.cases["A.2"] += 1
                self.charged += 4
                self.cut([node(a1), par(a1), node(a2), par(a2)])
            return
        self.charged += 2
        if fresh:
            self.cases["A.3"] += 1
            a1, a2 = self.queue.top_two(self.valid)
            ax = a2 if self._prefer_second(a1, a2) else a1
        else:
            self.cases["A.4"] += 1
            ax = self.queue.pop(self.valid)
        self.cut([node(ax), par(ax)])

    def _prefer_second(self, a1: int, a2: int) -> bool:
        f2 = self.f2
        q2 = f2.parent[f2.where[a2]]
        g2 = f2.parent[q2] if q2 != NONE else NONE
        if g2 == NONE or len(f2.children[g2]) != 2:
            return False
        w = f2.children[g2][0] if f2.children[g2][1] == q2 else f2.children[g2][1]
        if f2.label[w] == NONE or not self.is_member(f2.label[w]):
            return False
        q1 = f2.parent[f2.where[a1]]
        g1 = f2.parent[q1]
        if g1 == NONE:
            return True
        return any(c != q1 and not (f2.label[c] != NONE and self.is_member(f2.label[c]))
                   for c in f2.children[g1])

    def check_estimates(self) -> None:
        """Estimates bound true depths, and below the minimal LCA l a member
        that is not a child of l is estimated deeper than every child of l."""
        f2 = self.f2
        for v, alive in enumerate(f2.alive):
            if alive:
                assert self.dest[v] >= f2.depth(v), (v, self.dest[v], f2.depth(v))
        members = [x for x in self.pair.members(self.group) if self.is_member(x)]
        if len(members) < 2:
            return
        last = self.pair.last_l
        an = analyze_group(self.pair, members)
        self.pair.last_l = last
        under = list(zip(an.order[: an.r], an.s))
        top = [self.dest_of(x) for x, s in under if s == 0]
        deep = [self.dest_of(y) for y, s in under if s > 0]
        if top and deep:
            assert min(deep) > max(top), (top, deep)

    def run(self) -> None:
        pair = self.pair
        fresh = False
        while True:
            if len(pair.rt) == 1:
                return
            if pair.drain_pending():
                continue
            g = pair.current_group()
            if g != self.group:
                self.start_group(g)
                fresh = True
                continue
            if self.check:
                self.check_estimates()
            self.step(fresh)
            fresh = False
            if self.check:
                self.check_estimates()


def approx_distance(t1: NewickTree, t2: NewickTree, check: bool = False) -> ApproxResult:
    """k'' with e <= k'' <= 3e, plus the agreement forest it reaches."""
    start = time.perf_counter()
    pair = build_pair(t1, t2)
    run = _Approx(pair, check)
    run.run()
    comps = extract_maf(pair)
    # a cut that empties its old component adds nothing, so count components;
    # a missing parent edge of a root is charged but not cut
    assert len(comps) - 1 <= run.k <= run.charged, (len(comps), run.k, run.charged)
    space = pair.space
    cuts = [tuple(sorted(space.names[x] for lab in c for x in space.leaves_of(lab))) for c in run.cuts]
    return ApproxResult(
        distance=len(comps) - 1,
        components=comps,
        queue_ops=run.queue.ops,
        cuts_made=run.k,
        charged=run.charged,
        cuts=cuts,
        cases=run.cases,
        elapsed=time.perf_counter() - start,
    )
