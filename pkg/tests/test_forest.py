import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import seeds
from softspr.forest import (
    NONE,
    RHO,
    ForestError,
    LabelMismatchError,
    LabelSpace,
    RootedForest,
    build_pair,
)
from softspr.generate import random_binary_tree, random_contractions
from softspr.newick import parse_newick, write_newick


def forest_of(text):
    t = parse_newick(text)
    space = LabelSpace.from_trees(t)
    return RootedForest.from_newick(t, space.index()), space


def test_label_space_numbers_sorted_leaves_then_rho():
    space = LabelSpace.from_trees(parse_newick("((b,a),c);"))
    assert space.names == ["a", "b", "c", RHO]
    assert space.n == 3 and space.rho == 3
    lab = space.fresh(2, 0)
    assert lab == 4 and space.minleaf[lab] == 0
    assert sorted(space.leaves_of(lab)) == [0, 2]
    assert write_newick(space.expand(lab)) == "(a,c);"


def test_label_space_rejects_mismatch_and_reserved_label():
    with pytest.raises(LabelMismatchError):
        LabelSpace.from_trees(parse_newick("(1,2);"), parse_newick("(1,3);"))
    t = parse_newick("(1,2);")
    t.root.children[0].label = RHO
    with pytest.raises(LabelMismatchError):
        LabelSpace.from_trees(t)


def test_rho_hangs_beside_the_root():
    t = parse_newick("((1,2),3);")
    space = LabelSpace.from_trees(t)
    f = RootedForest.from_newick(t, space.index(), rho=space.rho)
    (top,) = f.roots()
    assert sorted(f.label[c] for c in f.children[top]) == [NONE, space.rho]
    assert f.dump(space) == ["(((1,2),3),ρ);"]


def test_cut_and_normalize_contracts_unary_nodes():
    f, space = forest_of("(((1,2),3),4);")
    v3 = f.where[2]
    assert f.cut_all([v3]) == [v3]
    f.check()
    assert f.is_normal()
    assert f.dump(space) == ["((1,2),4);", "3;"]


def test_normalize_reports_contracted_roots():
    f, space = forest_of("((1,2),3);")
    roots = f.cut_all([f.where[2]])
    assert sorted(f.label[v] for v in roots) == [2]
    # cutting the sibling of (1,2) leaves the pair as its own root tree
    f2, _ = forest_of("((1,2),3);")
    top = f2.roots()[0]
    inner = next(c for c in f2.children[top] if f2.label[c] == NONE)
    assert f2.cut_all([inner]) == [f2.where[2]]
    f2.check()


def test_expand_subset_and_merge_pair():
    f, space = forest_of("(1,2,3,4);")
    top = f.roots()[0]
    n = f.expand_subset(top, [f.where[0], f.where[1]])
    f.check()
    assert f.dump(space) == ["((1,2),3,4);"]
    lab = space.fresh(0, 1)
    assert f.merge_pair(f.where[0], f.where[1], lab) == n
    assert f.label[n] == lab
    f.check()
    with pytest.raises(ForestError):
        f.expand_subset(top, list(f.children[top]))


def test_merge_pair_adds_node_under_multifurcation():
    f, space = forest_of("(1,2,3);")
    lab = space.fresh(0, 2)
    v = f.merge_pair(f.where[0], f.where[2], lab)
    assert v not in f.roots() and f.label[v] == lab
    f.check()
    assert f.dump(space) == ["((1,3),2);"]


def test_editing_preconditions():
    f, _ = forest_of("((1,2),3);")
    top = f.roots()[0]
    with pytest.raises(ForestError):
        f.cut_edge(top)
    with pytest.raises(ForestError):
        f.contract_node(top)
    with pytest.raises(ForestError):
        f.merge_pair(f.where[0], f.where[2], 99)


@given(seeds, st.integers(2, 30), st.floats(0, 0.7))
def test_random_cuts_keep_forest_consistent(seed, n, p):
    rng = random.Random(seed)
    t = random_contractions(random_binary_tree(n, rng), p, rng).to_newick()
    space = LabelSpace.from_trees(t)
    f = RootedForest.from_newick(t, space.index(), rho=space.rho)
    for _ in range(rng.randint(1, n)):
        edges = [v for v, a in enumerate(f.alive) if a and f.parent[v] != NONE]
        if not edges:
            break
        f.cut_all(rng.sample(edges, min(len(edges), rng.randint(1, 3))))
        f.check()
        assert f.is_normal()
    labels = sorted(x for r in f.roots() for x in f.leaf_labels(r))
    assert labels == list(range(n + 1))


@given(seeds, st.integers(2, 20))
def test_pair_copy_is_independent(seed, n):
    rng = random.Random(seed)
    t1 = random_binary_tree(n, rng).to_newick()
    t2 = random_binary_tree(n, rng).to_newick()
    pair = build_pair(t1, t2)
    before = pair.f2.dump(pair.space)
    other = pair.copy()
    edges = [v for v, a in enumerate(other.f2.alive) if a and other.f2.parent[v] != NONE]
    other.cut_f2([edges[0]])
    assert pair.f2.dump(pair.space) == before
    assert len(other.trace) == 1 and not pair.trace


def test_pair_groups_and_sibling_resolution():
    pair = build_pair(parse_newick("((1,2),3);"), parse_newick("((1,2),3);"))
    g = pair.current_group()
    assert sorted(pair.members(g)) == [0, 1]
    pair.merge_group(g)
    # both trees collapse to one agreeing label after two merges
    while len(pair.rt) > 1:
        pair.drain_pending()
        g = pair.current_group()
        pair.merge_group(g)
    (lab,) = pair.rt
    assert sorted(pair.space.leaves_of(lab)) == [0, 1, 2, 3]


def test_agreeing_root_is_pruned_from_both_forests():
    pair = build_pair(parse_newick("((1,2),3);"), parse_newick("((1,3),2);"))
    pair.cut_f2([pair.f2.where[1]])
    assert list(pair.pending) == [1]
    assert pair.drain_pending()
    assert pair.rd == [1] and 1 not in pair.rt
    assert pair.f1.is_root(pair.f1.where[1])
    pair.f1.check()


@pytest.mark.parametrize(
    "text, cut, expect",
    [
        ("((1,2),3);", ["3"], ["(1,2);", "3;"]),
        ("((1,2),3);", [], ["((1,2),3);"]),
        ("((1,2),(3,4));", ["1", "2"], ["(3,4);", "1;", "2;"]),
    ],
)
def test_yield_forest(text, cut, expect):
    f, space = forest_of(text)
    index = space.index()
    out = f.yield_forest([f.where[index[x]] for x in cut])
    out.check()
    assert out.is_normal()
    assert out.dump(space) == sorted(expect)
    assert f.dump(space) == [write_newick(parse_newick(text))]
