"""Cross-checks between the search, the approximation and the oracles.

Shared by the `selftest` command, the acceptance tests and the scripts.  Each
suite counts its cases and keeps the first few failures as Newick text.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable

from .approx import approx_distance
from .forest import build_pair
from .fpt_search import invocation_bound, maf_decide, maf_distance
from .generate import all_binary_trees, all_trees, random_pair, random_resolution_pair
from .newick import NewickTree, write_newick
from .oracle import OracleTable, oracle_spr_bfs
from .structure import check_agreement_forest

__all__ = [
    "SuiteResult",
    "PairReport",
    "check_pair",
    "exhaustive_pairs",
    "binary_pairs",
    "sampled_pairs",
    "random_suite",
    "resolution_suite",
    "run_suites",
]

MAX_EXAMPLES = 3


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: int = 0
    examples: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, ok: bool, t1: NewickTree, t2: NewickTree, detail: str = "") -> None:
        self.cases += 1
        if not ok:
            self.failures += 1
            if len(self.examples) < MAX_EXAMPLES:
                self.examples.append(f"{write_newick(t1)} {write_newick(t2)} {detail}".rstrip())


@dataclass
class PairReport:
    """Outcome of every check on one pair; None means not checked."""

    fpt: int
    invocations: int
    approx: int | None = None
    ecut: int | None = None
    bfs: int | None = None
    witness: str | None = None
    components: int = 0
    monotone: bool | None = None

    @property
    def bound_ok(self) -> bool:
        return self.invocations <= invocation_bound(self.fpt)

    @property
    def ratio_ok(self) -> bool:
        return self.approx is None or self.fpt <= self.approx <= 3 * self.fpt

    @property
    def witness_ok(self) -> bool:
        return self.witness is None and self.components == self.fpt + 1


def check_pair(t1: NewickTree, t2: NewickTree, table: OracleTable | None = None,
               bfs: bool = False, approx: bool = True, monotone: bool = False) -> PairReport:
    res = maf_distance(t1, t2)
    rep = PairReport(
        fpt=res.distance,
        invocations=res.stats.invocations,
        witness=check_agreement_forest(res.components, t1, t2),
        components=len(res.components),
    )
    if approx:
        rep.approx = approx_distance(t1, t2).distance
    if table is not None:
        rep.ecut = table.ecut(t1, t2)
    if bfs:
        rep.bfs = oracle_spr_bfs(t1, t2)
    if monotone:
        pair = build_pair(t1, t2)
        below = res.distance == 0 or maf_decide(pair, res.distance - 1) is None
        rep.monotone = below and maf_decide(pair, res.distance + 1) is not None
    return rep


def exhaustive_pairs(n: int) -> Iterable[tuple[NewickTree, NewickTree]]:
    trees = all_trees(n)
    for a in trees:
        for b in trees:
            yield a, b


def binary_pairs(n: int) -> Iterable[tuple[NewickTree, NewickTree]]:
    trees = all_binary_trees(n)
    for a in trees:
        for b in trees:
            yield a, b


def sampled_pairs(trees: list[NewickTree], count: int, rng: random.Random):
    for _ in range(count):
        yield rng.choice(trees), rng.choice(trees)


def random_suite(count: int, rng: random.Random, max_leaves: int = 10, max_moves: int = 5):
    """Random binary trees perturbed by up to `max_moves` SPR moves, then
    randomly contracted."""
    for _ in range(count):
        n = rng.randint(2, max_leaves)
        yield random_pair(n, rng, rng.randint(0, max_moves), contract=rng.choice((0.0, 0.2, 0.5)))


def resolution_suite(count: int, rng: random.Random, max_leaves: int = 12):
    for _ in range(count):
        yield random_resolution_pair(rng.randint(2, max_leaves), rng)


def run_suites(pairs, table: OracleTable | None = None, bfs: bool = False,
               monotone: bool = False) -> list[SuiteResult]:
    """Run every applicable check over `pairs`; one SuiteResult per check."""
    names = ["oracle equivalence", "monotonicity", "ratio", "invocation bound", "witness"]
    if bfs:
        names.insert(1, "binary identity")
    out = {name: SuiteResult(name) for name in names}
    for t1, t2 in pairs:
        r = check_pair(t1, t2, table, bfs=bfs, monotone=monotone)
        if table is not None:
            out["oracle equivalence"].record(r.fpt == r.ecut, t1, t2, f"fpt={r.fpt} ecut={r.ecut}")
        if bfs:
            out["binary identity"].record(r.fpt == r.bfs == r.ecut, t1, t2, f"fpt={r.fpt} bfs={r.bfs}")
        if monotone:
            out["monotonicity"].record(bool(r.monotone), t1, t2, f"fpt={r.fpt}")
        out["ratio"].record(r.ratio_ok, t1, t2, f"fpt={r.fpt} approx={r.approx}")
        out["invocation bound"].record(r.bound_ok, t1, t2, f"k={r.fpt} calls={r.invocations}")
        out["witness"].record(r.witness_ok, t1, t2, f"{r.witness} components={r.components}")
    return [s for s in out.values() if s.cases]
