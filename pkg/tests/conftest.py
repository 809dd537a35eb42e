import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from softspr.generate import random_pair, random_resolution_pair
from softspr.newick import NewickTree

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def clusters(tree: NewickTree) -> frozenset[frozenset[str]]:
    """Leaf sets below every node; equal exactly for equal topologies."""
    out = set()
    below = {}
    order = list(tree.nodes())
    for v in reversed(order):
        s = frozenset([v.label]) if not v.children else frozenset().union(*(below[id(c)] for c in v.children))
        below[id(v)] = s
        out.add(s)
    return frozenset(out)


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def tree_pairs(draw, max_leaves=9, max_moves=4):
    """Seeded random pair: SPR-perturbed binary trees, then contracted."""
    seed = draw(seeds)
    n = draw(st.integers(2, max_leaves))
    moves = draw(st.integers(0, max_moves))
    contract = draw(st.sampled_from([0.0, 0.3, 0.6]))
    return random_pair(n, random.Random(seed), moves, contract)


@st.composite
def resolution_pairs(draw, max_leaves=14):
    seed = draw(seeds)
    n = draw(st.integers(2, max_leaves))
    return random_resolution_pair(n, random.Random(seed))


_acceptance: dict[str, str] = {}


@pytest.fixture(scope="session")
def acceptance_log():
    return _acceptance


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_acceptance, key=lambda k: int(k.split(".")[0])):
        terminalreporter.write_line(_acceptance[key])
