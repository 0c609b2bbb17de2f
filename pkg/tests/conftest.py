import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from treeshift.corpus import generate_corpus, random_hbs_spec  # noqa: E402
from treeshift.tree import Homogeneous, LevelPeriodic, TreeSpec, TreeView  # noqa: E402


def homog(d):
    return TreeView(TreeSpec.homogeneous(d))


@pytest.fixture
def homog2():
    return homog(2)


@pytest.fixture
def level1_tree():
    return TreeView(TreeSpec.sectors_at_level_one([3, 3]))


@pytest.fixture
def free_end_tree():
    return TreeView(TreeSpec({(): 2}, {(0,): Homogeneous(1), (1,): Homogeneous(2)}))


@pytest.fixture
def leafy_tree():
    # root -> (0: one child which is a leaf), (1: binary sector)
    return TreeView(TreeSpec({(): 2, (0,): 1}, {(1,): Homogeneous(2), (0, 0): Homogeneous(0)}))


@pytest.fixture
def periodic23():
    return TreeView(TreeSpec({}, {(): LevelPeriodic((2, 3))}))


def corpus_trees(seed=11, count=24, kinds=("hbs", "free_end", "non_hbs")):
    return [(name, TreeView(spec)) for name, kind, spec in generate_corpus(seed, count) if kind in kinds]


def hbs_no_free_end_trees(seed, count, max_prefix_depth=3):
    import random

    rng = random.Random(seed)
    return [TreeView(random_hbs_spec(rng, max_prefix_depth, 4, leafless=True, free_ends=False)) for _ in range(count)]


def small_trees(seed=5, count=16, free_ends=True):
    """HBS trees with degrees <= 2, small enough to rebuild by brute force to depth ~12."""
    import random

    rng = random.Random(seed)
    return [TreeView(random_hbs_spec(rng, 3, 2, free_ends=free_ends)) for _ in range(count)]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
