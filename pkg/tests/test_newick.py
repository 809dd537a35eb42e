import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import clusters, seeds
from softspr.generate import MutableTree, random_binary_tree, random_contractions
from softspr.newick import NewickError, parse_newick, write_newick


@pytest.mark.parametrize(
    "text, canon",
    [
        ("((1,2),3);", "((1,2),3);"),
        ("(3,(2,1));", "((1,2),3);"),
        ("(a:1.5,(b:2,c:3e-2)x:0.1)root;", "(a,(b,c));"),
        (" ( 1 , 2 , 3 ) ; ", "(1,2,3);"),
        ("((1));", "1;"),
        ("(((1,2)),3);", "((1,2),3);"),
        ("x;", "x;"),
    ],
)
def test_parse_canonical(text, canon):
    assert write_newick(parse_newick(text)) == canon


@pytest.mark.parametrize(
    "text, msg",
    [
        ("((1,2),3)", "missing ';'"),
        ("((1,2),3;", "unbalanced"),
        ("((1,2),3));", "unbalanced"),
        ("((1,),3);", "empty leaf label"),
        ("((1,1),3);", "duplicate"),
        ("((1,2),3);x", "trailing garbage"),
        ("((1,2),3)#;", "trailing garbage"),
        ("", "empty leaf label"),
        ("(1:,2);", "branch length"),
    ],
)
def test_parse_errors(text, msg):
    with pytest.raises(NewickError, match=msg):
        parse_newick(text)


def test_strict_rejects_unary_nodes():
    with pytest.raises(NewickError, match="single child"):
        parse_newick("((1),2);", strict=True)
    assert write_newick(parse_newick("((1,2),3);", strict=True)) == "((1,2),3);"


def test_deep_caterpillar_has_no_recursion_limit():
    n = 20000
    text = "(" * (n - 1) + "0" + "".join(f",{i})" for i in range(1, n)) + ";"
    tree = parse_newick(text)
    assert len(tree.leaves()) == n
    assert parse_newick(write_newick(tree)) == tree


def test_tree_equality_ignores_child_order():
    assert parse_newick("((1,2),3);") == parse_newick("(3,(2,1));")
    assert parse_newick("((1,2),3);") != parse_newick("((1,3),2);")
    assert parse_newick("((1,2),3);").is_binary()
    assert not parse_newick("(1,2,3);").is_binary()


@given(seeds, st.integers(1, 40), st.floats(0, 1))
def test_round_trip_preserves_clusters(seed, n, p):
    rng = random.Random(seed)
    t = random_contractions(random_binary_tree(n, rng), p, rng).to_newick()
    again = parse_newick(write_newick(t))
    assert clusters(again) == clusters(t)
    assert write_newick(again) == write_newick(t)


@given(st.text(alphabet="(),;:ab1 .", max_size=30))
def test_arbitrary_text_only_raises_newick_error(text):
    try:
        parse_newick(text)
    except NewickError:
        pass


def test_mutable_tree_conversion_is_lossless():
    t = parse_newick("((1,2,3),(4,(5,6)),7);")
    assert MutableTree.from_newick(t).to_newick() == t
