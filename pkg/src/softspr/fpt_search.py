"""Bounded search for the soft SPR distance.

`maf_decide` answers "is the distance at most k?" by the branching procedure
over sibling groups; `maf_distance` raises k from 0 until the answer is yes
and returns the accepting forest.  Branches are explored in a fixed order, so
the witness is deterministic.
"""
from __future__ import annotations

import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .forest import NONE, RHO, ForestPair, build_pair
from .newick import NewickTree, write_newick
from .structure import (
    LcaAnalysis,
    analyze_group,
    l_is_root_or_parent_has_member,
    ladder_extra_calls,
)

__all__ = [
    "BudgetExhausted",
    "SearchStats",
    "MafResult",
    "invocation_bound",
    "branch_specs",
    "maf_decide",
    "maf_distance",
    "extract_maf",
]

DEFAULT_K_MAX = 50


class BudgetExhausted(RuntimeError):
    """No agreement forest within the allowed number of cuts."""


@dataclass
class SearchStats:
    """Invocation count, branching cases fired, and (parent case, case) pairs."""

    invocations: int = 0
    cases: Counter = field(default_factory=Counter)
    transitions: Counter = field(default_factory=Counter)

    def merge(self, other: SearchStats) -> None:
        self.invocations += other.invocations
        self.cases.update(other.cases)
        self.transitions.update(other.transitions)


@dataclass
class MafResult:
    distance: int
    components: list[NewickTree]
    cut_trace: list[tuple[str, ...]]
    stats: SearchStats
    total_invocations: int = 0
    elapsed: float = 0.0

    def newick_lines(self) -> list[str]:
        return [write_newick(c) for c in self.components]


def invocation_bound(k: int) -> float:
    """Closed-form cap on the number of invocations of one decision run."""
    return (1 + math.sqrt(2)) ** (k + 5)


@dataclass(frozen=True)
class Branch:
    edges: tuple
    after: int | None
    cost: int
    a0: int | None
    case: str


def _e(pair: ForestPair, lab: int) -> int:
    return pair.f2.where[lab]


def _pend(an: LcaAnalysis, i: int) -> list:
    return list(an.paths[i])


def branch_specs(pair: ForestPair, an: LcaAnalysis) -> list[Branch]:
    """Recursive calls of the two-way (a0 set) or unconstrained step."""
    a = an.order
    m, r, s = an.m, an.r, an.s
    a0 = pair.a0
    f2 = pair.f2
    members = set(a)
    E = lambda i: _e(pair, a[i])  # noqa: E731
    B = lambda i: an.sibs[i]  # noqa: E731
    out: list[Branch] = []

    def call(edges, cost, a0_, case, after=None):
        out.append(Branch(tuple(edges), after, cost, a0_, case))

    if a0 is not None:
        x = 0 if a[0] != a0 else 1
        if an.isolated:
            call([E(x)], 1, a0, "7.1")
        elif a0 not in a[:r]:
            call(_pend(an, 0), s[0], a0, "7.2")
            if s[0] > 1 or s[r - 1] > 0:
                call([E(0)], 1, a0, "7.2")
        elif r == 2 and s[x] == 0 and l_is_root_or_parent_has_member(f2, an.l, members):
            call([B(x)], 1, a0, "7.3")
        else:
            call([E(x)], 1, a0, "7.4")
            if m > 2 and r > 2:
                call(_pend(an, x), s[x], a0, "7.4")
            elif m > 2:
                call(_pend(an, x), s[x] + 1, a0, "7.4", after=a[x])
        return out

    if an.isolated:
        call([E(0)], 1, None, "8.1")
        call([E(1)], 1, None, "8.1")
    elif all(v == 1 for v in s[: r - 1]) and s[r - 1] == 0:
        call([B(i) for i in range(r - 1)], r - 1, None, "8.2")
        for i in range(r - 1):
            call([B(j) for j in range(r - 1) if j != i], r - 2, a[i], "8.2")
    elif m == 2 and s[0] + s[1] >= 2:
        call([E(0)], 1, None, "8.3")
        call([E(1)], 1, None, "8.3")
        call(_pend(an, 0) + _pend(an, 1), s[0] + s[1], None, "8.3")
    elif r == 2 and s[0] == s[1] == 1:
        call([E(0), E(1)], 2, None, "8.4")
        call([B(0), B(1)], 2, None, "8.4")
        call([B(0)], 2, a[1], "8.4", after=a[0])
        call([B(1)], 2, a[0], "8.4", after=a[1])
        if ladder_extra_calls(f2, an.l, members):
            call([E(0)], 1, a[1], "8.4")
            call([E(1)], 1, a[0], "8.4")
    elif r > 2 and all(v == 1 for v in s):
        call([E(i) for i in range(r)], r, None, "8.5")
        call([B(i) for i in range(r)], r, None, "8.5")
        for i in range(r):
            call([E(j) for j in range(r) if j != i], r - 1, a[i], "8.5")
        for i in range(r):
            call([B(j) for j in range(r) if j != i], r - 1, a[i], "8.5")
    elif r == 2 and s[0] >= 2 and s[1] == 0 and l_is_root_or_parent_has_member(f2, an.l, members):
        call([E(0)], 1, None, "8.6")
        call(_pend(an, 0), s[0], None, "8.6")
        call([B(1)], 1, None, "8.6")
    elif s[0] >= 2:
        call([E(0)], 1, None, "8.7")
        call([E(1)], 1, a[0], "8.7")
        call(_pend(an, 0), s[0], None, "8.7")
        if r > 2:
            call(_pend(an, 1), s[1], a[0], "8.7")
        else:
            call(_pend(an, 1), s[1] + 1, a[0], "8.7", after=a[1])
    else:
        raise AssertionError(f"no branching case for r={r} s={s} m={m}")
    return out


def _prepare(pair: ForestPair) -> LcaAnalysis | None:
    """Steps 2 to 6.  Returns None when the pair already agrees."""
    while True:
        if len(pair.rt) == 1:
            return None
        if pair.drain_pending():
            continue
        g = pair.current_group()
        members = pair.members(g)
        if pair.a0 is not None and pair.a0 not in members:
            pair.a0 = None
        pair.merge_group(g)
        if pair.pending or not pair.f1.alive[g] or pair.f1.label[g] != NONE:
            continue
        members = pair.members(g)
        if len(members) < 2:
            continue
        if pair.a0 is not None and pair.a0 not in members:
            pair.a0 = None
        return analyze_group(pair, members)


def _apply(pair: ForestPair, br: Branch) -> ForestPair:
    child = pair.copy()
    child.cut_f2(br.edges, br.after)
    child.a0 = br.a0
    return child


def _search(pair: ForestPair, k: int, stats: SearchStats, pool=None,
            parent_case: str | None = None) -> ForestPair | None:
    stats.invocations += 1
    if k < 0:
        return None
    an = _prepare(pair)
    if an is None:
        return pair
    branches = branch_specs(pair, an)
    case = branches[0].case
    stats.cases[case] += 1
    stats.transitions[parent_case, case] += 1
    if pool is not None and len(branches) > 1:
        futures = [pool.submit(_child_task, pair, br, k) for br in branches]
        try:
            for br, fut in zip(branches, futures):
                found, sub = fut.result()
                stats.merge(sub)
                if found is not None:
                    return found
        finally:
            for fut in futures:
                fut.cancel()
        return None
    for br in branches:
        found = _search(_apply(pair, br), k - br.cost, stats, parent_case=case)
        if found is not None:
            return found
    return None


def _child_task(pair: ForestPair, br: Branch, k: int):
    stats = SearchStats()
    found = _search(_apply(pair, br), k - br.cost, stats, parent_case=br.case)
    return found, stats


def maf_decide(pair: ForestPair, k: int, a0: int | None = None,
               stats: SearchStats | None = None, pool=None) -> ForestPair | None:
    """Return an accepting state (its forests form an agreement forest) if
    the distance is at most k, else None.  `pair` is not modified."""
    stats = stats if stats is not None else SearchStats()
    start = pair.copy()
    if a0 is not None:
        start.a0 = a0
    return _search(start, k, stats, pool)


def extract_maf(witness: ForestPair) -> list[NewickTree]:
    """Components of an accepting state; the rho component comes first as the
    subtree below rho (or the single leaf 'ρ' when rho is alone)."""
    space = witness.space
    rho = space.rho
    first = None
    others = []
    for lab in witness.component_labels():
        node = space.expand(lab)
        if rho in space.leaves_of(lab):
            if node.children:
                rest = [c for c in node.children if not (not c.children and c.label == RHO)]
                assert len(rest) == 1, "rho must hang directly below its component root"
                node = rest[0]
            first = NewickTree(node)
        else:
            others.append(NewickTree(node))
    assert first is not None
    others.sort(key=write_newick)
    return [first] + others


def maf_distance(t1: NewickTree, t2: NewickTree, k_max: int = DEFAULT_K_MAX,
                 threads: int = 1, k_min: int = 0) -> MafResult:
    """Smallest k with an agreement forest of k + 1 components."""
    start = time.perf_counter()
    pair = build_pair(t1, t2)
    total = 0
    pool = ProcessPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for k in range(k_min, k_max + 1):
            stats = SearchStats()
            found = maf_decide(pair, k, stats=stats, pool=pool)
            total += stats.invocations
            if found is not None:
                space = found.space
                trace = [
                    tuple(sorted((space.names[x] for lab in cut for x in space.leaves_of(lab))))
                    for cut in found.trace
                ]
                return MafResult(
                    distance=k,
                    components=extract_maf(found),
                    cut_trace=trace,
                    stats=stats,
                    total_invocations=total,
                    elapsed=time.perf_counter() - start,
                )
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    raise BudgetExhausted(f"no agreement forest with at most {k_max} cuts")

