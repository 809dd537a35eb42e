import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import clusters, seeds
from softspr.generate import (
    all_binary_trees,
    all_trees,
    random_binary_tree,
    random_pair,
    random_resolution,
    random_resolution_pair,
    random_spr_moves,
)


@pytest.mark.parametrize("n, count", [(1, 1), (2, 1), (3, 4), (4, 26), (5, 236)])
def test_all_trees_counts(n, count):
    trees = all_trees(n)
    assert len(trees) == count
    assert len({str(t) for t in trees}) == count


@pytest.mark.parametrize("n, count", [(2, 1), (3, 3), (4, 15), (5, 105), (6, 945)])
def test_all_binary_trees_counts(n, count):
    trees = all_binary_trees(n)
    assert len(trees) == count and all(t.is_binary() for t in trees)


@given(seeds, st.integers(1, 60))
def test_random_binary_tree_shape(seed, n):
    t = random_binary_tree(n, random.Random(seed)).to_newick()
    assert t.is_binary()
    assert sorted(t.leaves(), key=int) == [str(i) for i in range(1, n + 1)]


@given(seeds, st.integers(2, 40), st.integers(0, 6))
def test_spr_moves_keep_leaves_and_binarity(seed, n, moves):
    rng = random.Random(seed)
    t = random_binary_tree(n, rng)
    random_spr_moves(t, moves, rng)
    out = t.to_newick()
    assert out.is_binary() and len(out.leaves()) == n


@given(seeds, st.integers(2, 40))
def test_random_resolution_refines(seed, n):
    t1, t2 = random_resolution_pair(n, random.Random(seed))
    assert t2.is_binary()
    assert clusters(t1) <= clusters(t2)
    assert clusters(random_resolution(t2, random.Random(seed))) == clusters(t2)


def test_generators_are_seeded():
    a = random_pair(30, random.Random(5), 4, 0.3)
    b = random_pair(30, random.Random(5), 4, 0.3)
    assert [str(t) for t in a] == [str(t) for t in b]
