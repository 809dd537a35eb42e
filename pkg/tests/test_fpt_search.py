import random
from collections import Counter

import pytest
from hypothesis import given

from conftest import tree_pairs
from softspr.forest import build_pair
from softspr.fpt_search import (
    BudgetExhausted,
    SearchStats,
    invocation_bound,
    maf_decide,
    maf_distance,
)
from softspr.generate import all_binary_trees, random_pair
from softspr.newick import parse_newick
from softspr.oracle import oracle_ecut
from softspr.structure import check_agreement_forest

P = parse_newick

ALL_CASES = {"7.1", "7.2", "7.3", "7.4", "8.1", "8.2", "8.3", "8.4", "8.5", "8.6", "8.7"}


@pytest.mark.parametrize(
    "t1, t2, d",
    [
        ("((1,2),3);", "((1,2),3);", 0),
        ("((1,2),3);", "((1,3),2);", 1),
        ("(1,2,3,4);", "(((1,2),3),4);", 0),
        ("(((1,2),3),4);", "(((4,3),2),1);", 2),
        ("((1,2,3),(4,5,6));", "((1,4),(2,5),(3,6));", 3),
        ("(1,2);", "(2,1);", 0),
        ("a;", "a;", 0),
    ],
)
def test_distance_examples(t1, t2, d):
    res = maf_distance(P(t1), P(t2))
    assert res.distance == d
    assert len(res.components) == d + 1
    assert check_agreement_forest(res.components, P(t1), P(t2)) is None


def test_witness_is_deterministic_with_rho_component_first():
    res = maf_distance(P("(((1,2),3),4);"), P("(((4,3),2),1);"))
    assert res.newick_lines() == ["ρ;", "(1,2);", "(3,4);"]
    assert len(res.cut_trace) == res.distance
    res = maf_distance(P("((1,2),3);"), P("((1,3),2);"))
    assert res.newick_lines() == ["(1,2);", "3;"]


def test_budget_exhausted():
    with pytest.raises(BudgetExhausted):
        maf_distance(P("(((1,2),3),4);"), P("(((4,3),2),1);"), k_max=1)


def test_decision_is_monotone_in_k():
    t1, t2 = random_pair(12, random.Random(11), 4, 0.3)
    d = maf_distance(t1, t2).distance
    pair = build_pair(t1, t2)
    assert maf_decide(pair, d - 1) is None
    for k in (d, d + 1, d + 3):
        assert maf_decide(pair, k) is not None


def test_invocation_bound_values():
    assert invocation_bound(0) == pytest.approx((1 + 2**0.5) ** 5)
    assert invocation_bound(3) > invocation_bound(2)


@given(tree_pairs())
def test_search_properties(pair):
    t1, t2 = pair
    res = maf_distance(t1, t2)
    assert res.stats.invocations <= invocation_bound(res.distance)
    assert len(res.components) == res.distance + 1
    assert check_agreement_forest(res.components, t1, t2) is None
    assert maf_distance(t2, t1).distance == res.distance


@given(tree_pairs(max_leaves=6, max_moves=3))
def test_matches_oracle_on_small_pairs(pair):
    t1, t2 = pair
    assert maf_distance(t1, t2).distance == oracle_ecut(t1, t2)


def test_binary_inputs_only_reach_two_way_cases_through_the_ladder():
    # on binary trees only the isolated, ladder and m = 2 cases apply; the
    # two-way cases are entered solely from the zero-cut ladder call
    cases, moves = Counter(), Counter()
    trees = all_binary_trees(5)
    rng = random.Random(2)
    for _ in range(400):
        stats = SearchStats()
        t1, t2 = rng.choice(trees), rng.choice(trees)
        d = maf_distance(t1, t2).distance
        maf_decide(build_pair(t1, t2), d, stats=stats)
        cases.update(stats.cases)
        moves.update(stats.transitions)
    assert {c for c in cases if c.startswith("8")} <= {"8.1", "8.2", "8.3"}
    for (parent, case), _ in moves.items():
        if case.startswith("7"):
            assert parent == "8.2" or parent.startswith("7")


def test_every_branching_case_fires():
    seen = Counter()
    rng = random.Random(3)
    for _ in range(300):
        t1, t2 = random_pair(rng.randint(8, 14), rng, rng.randint(2, 5), 0.4)
        seen.update(maf_distance(t1, t2).stats.cases)
    seen.update(maf_distance(P("((1,2,3),(4,5,6));"), P("((1,4),(2,5),(3,6));")).stats.cases)
    assert set(seen) == ALL_CASES


def test_threads_do_not_change_the_answer():
    t1, t2 = random_pair(16, random.Random(4), 5, 0.2)
    one = maf_distance(t1, t2)
    two = maf_distance(t1, t2, threads=2)
    assert two.distance == one.distance
    assert two.newick_lines() == one.newick_lines()
