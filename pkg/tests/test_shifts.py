import random
from fractions import Fraction

import pytest

from conftest import corpus_trees, hbs_no_free_end_trees, homog
from oracles import BruteTree, backward, forward_value
from treeshift.corpus import random_finite_support
from treeshift.functions import Eigen, FiniteSupport, Indicator, LevelFunction, derivative, lip_norm
from treeshift.shifts import (
    ScaledLevel,
    ShiftOperator,
    apply_backward,
    apply_forward,
    commutes_with_derivative,
    duality_pair,
    forward_eigen_defect,
    orbit,
)


def test_examples(homog2):
    f = apply_backward(homog2, Indicator((0,)))
    assert dict(f.items()) == {(): 1}
    g = apply_forward(homog2, Indicator(()))
    assert dict(g.items()) == {(0,): 1, (1,): 1}
    assert lip_norm(homog2, g).value == 1


def test_backward_against_oracle():
    for name, t in corpus_trees():
        bt = BruteTree(t.spec.to_dict(), 7)
        rng = random.Random(name)
        for _ in range(4):
            f = random_finite_support(rng, t, 5)
            fd = dict(f.items())
            for n in (1, 2, 3):
                out = apply_backward(t, f, n)
                for v in bt.vertices(4):
                    assert out.get(v) == backward(bt, fd, n, v)


def test_forward_against_oracle():
    for name, t in corpus_trees():
        bt = BruteTree(t.spec.to_dict(), 7)
        rng = random.Random(name)
        f = random_finite_support(rng, t, 3)
        fd = dict(f.items())
        for n in (1, 2):
            out = apply_forward(t, f, n)
            for v in bt.vertices(6):
                assert out.get(v) == forward_value(fd, n, v)


def test_powers_compose(homog2):
    rng = random.Random(4)
    for _ in range(10):
        f = random_finite_support(rng, homog2, 5)
        assert apply_backward(homog2, f, 3) == apply_backward(homog2, apply_backward(homog2, f, 2), 1)
        assert apply_forward(homog2, f, 2) == apply_forward(homog2, apply_forward(homog2, f), 1)


def test_backward_inverts_forward_up_to_degree(homog2):
    f = FiniteSupport({(): 1, (1, 0): Fraction(2, 3)})
    assert apply_backward(homog2, apply_forward(homog2, f)) == f.scale(2)


def test_operator_objects(homog2):
    op = ShiftOperator("backward", 2)
    assert op.label() == "B^2"
    assert ShiftOperator("forward").label() == "S"
    seq = orbit(homog2, Indicator((0, 0)), op, 2)
    assert [dict(g.items()) for g in seq[1:]] == [{(): 1}, {}]
    with pytest.raises(ValueError):
        ShiftOperator("sideways")
    with pytest.raises(ValueError):
        apply_backward(homog2, Indicator(()), 0)


def test_lazy_forms(homog2, level1_tree):
    e = Eigen(Fraction(3, 2), 2)
    out = apply_backward(homog2, e, 2)
    assert isinstance(out, ScaledLevel)
    for L in range(6):
        v = homog2.first_at_level(L)
        assert out.value(homog2, v) == Fraction(9, 4) * e.value(homog2, v)
    lazy = apply_backward(level1_tree, LevelFunction(), 1)
    assert lazy.value(level1_tree, (0,)) == 3 * 2
    s = apply_forward(homog2, LevelFunction(), 2)
    assert s.value(homog2, (0,)) == 0 and s.value(homog2, (0, 1, 1)) == 1


def test_forward_commutes_and_isometry():
    for t in hbs_no_free_end_trees(3, 10):
        rng = random.Random(t.spec.fingerprint())
        for _ in range(5):
            f = random_finite_support(rng, t, 4)
            assert commutes_with_derivative(t, f)
            assert lip_norm(t, apply_forward(t, f)).value == lip_norm(t, f).value


def test_isometry_fails_with_leaves(leafy_tree):
    f = Indicator((0, 0))
    assert lip_norm(leafy_tree, f).value == 1
    assert lip_norm(leafy_tree, apply_forward(leafy_tree, f)).value == 0


def test_duality():
    for name, t in corpus_trees():
        rng = random.Random(name + "dual")
        for _ in range(4):
            f = random_finite_support(rng, t, 4)
            g = random_finite_support(rng, t, 4)
            assert duality_pair(t, f, apply_forward(t, g)) == duality_pair(t, apply_backward(t, f), g)


def test_duality_with_closed_form(homog2):
    f = FiniteSupport({(0, 1): 2, (1,): -1})
    g = LevelFunction()
    assert duality_pair(homog2, f, apply_forward(homog2, g)) == duality_pair(homog2, apply_backward(homog2, f), g)


def test_forward_has_no_finite_eigenvector():
    t = homog(3)
    rng = random.Random(9)
    for _ in range(20):
        f = random_finite_support(rng, t, 3)
        if f.values:
            assert forward_eigen_defect(t, f, Fraction(rng.randint(-4, 4), 3)).values
    assert derivative(t, FiniteSupport({})).values == {}
