import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import corpus_trees, homog
from oracles import BruteTree, derivative as d_oracle, harmonic, lip_norm_dict
from treeshift.corpus import random_finite_support
from treeshift.errors import PreconditionError, SpecError
from treeshift.functions import (
    G1,
    G2,
    G3,
    H,
    ZERO,
    Derivative,
    Eigen,
    FiniteSupport,
    HarmonicLevel,
    Indicator,
    LevelFunction,
    Membership,
    PathSum,
    Resolvent,
    antiderivative,
    derivative,
    function_from_dict,
    growth_check,
    in_little_lipschitz,
    lip_norm,
    m_membership,
)

values = st.fractions(min_value=-10, max_value=10, max_denominator=6)


def random_supports(tree, seed, count, depth=4):
    rng = random.Random(seed)
    return [random_finite_support(rng, tree, depth) for _ in range(count)]


class TestFiniteSupport:
    def test_zeros_dropped(self):
        f = FiniteSupport({(0,): 0, (): Fraction(1, 2)})
        assert dict(f.items()) == {(): Fraction(1, 2)}
        assert FiniteSupport({(1,): 0}) == ZERO

    def test_arithmetic(self):
        f = FiniteSupport({(): 1, (0,): 2})
        g = FiniteSupport({(0,): 2, (1,): 3})
        assert f - g == FiniteSupport({(): 1, (1,): -3})
        assert (f + f) == f.scale(2)

    def test_literal_round_trip(self):
        f = FiniteSupport({(): Fraction(-3, 4), (1, 0): 2})
        obj = json.loads(json.dumps(f.to_dict()))
        assert obj["values"][""] == "-3/4"
        assert function_from_dict(obj) == f

    def test_complex_literal(self):
        f = function_from_dict({"kind": "finite", "values": {"0": "1+2i"}})
        assert f.get((0,)) == complex(1, 2)


class TestDerivative:
    def test_examples(self, homog2):
        # constant 1 on levels 0..2 has derivative 1 at the root, -1 on level 3
        f = FiniteSupport({v: 1 for v in homog2.iter_vertices(2)})
        d = derivative(homog2, f)
        assert d.get(()) == 1
        assert all(d.get(v) == 0 for v in homog2.iter_vertices(2) if v)
        assert all(d.get(v) == -1 for v in homog2.level(3))

    def test_matches_oracle(self):
        for name, t in corpus_trees():
            bt = BruteTree(t.spec.to_dict(), 5)
            for f in random_supports(t, name, 5, depth=4):
                d = derivative(t, f)
                fd = dict(f.items())
                for v in bt.vertices(5):
                    assert d.get(v) == d_oracle(fd, v)

    def test_antiderivative_inverts(self):
        for name, t in corpus_trees():
            for f in random_supports(t, 7, 5):
                assert antiderivative(t, derivative(t, f)) == f

    def test_infinite_antiderivative(self, homog2):
        g = FiniteSupport({(0,): 1})
        f = antiderivative(homog2, g)
        assert isinstance(f, PathSum)
        assert f.value(homog2, (0, 1, 1, 0)) == 1 and f.value(homog2, (1,)) == 0
        assert derivative(homog2, f) is g

    def test_lazy_derivative(self, homog2):
        d = derivative(homog2, LevelFunction())
        assert isinstance(d, Derivative)
        assert d.value(homog2, (1, 1)) == 1 and d.value(homog2, ()) == 0


class TestNorms:
    def test_indicator(self, homog2):
        r = lip_norm(homog2, Indicator(()))
        assert r.value == 1 and r.exact

    def test_level_families(self, homog2):
        assert lip_norm(homog2, LevelFunction()).value == 1
        assert lip_norm(homog2, HarmonicLevel()).value == 1
        assert in_little_lipschitz(homog2, HarmonicLevel()) is Membership.YES
        assert in_little_lipschitz(homog2, LevelFunction()) is Membership.NO
        assert HarmonicLevel().phi(6) == harmonic(6)

    def test_matches_oracle(self):
        for name, t in corpus_trees():
            bt = BruteTree(t.spec.to_dict(), 6)
            for f in random_supports(t, 3, 5):
                r = lip_norm(t, f)
                assert r.exact
                assert r.value == lip_norm_dict(bt, dict(f.items()), 6)
                if r.attained_at is not None:
                    assert abs(d_oracle(dict(f.items()), r.attained_at)) == r.value

    def test_truncated_lower_bound(self, homog2):
        f = FiniteSupport({(0, 0, 0, 0): 5})
        r = lip_norm(homog2, f, depth=2)
        assert r.value == 0 and not r.exact and r.exactness == "lower-bound"

    def test_eigen_norms(self):
        assert Eigen(2, 2).sup_derivative()[0] == 1
        assert Eigen(Fraction(1), 2).sup_derivative()[0] == 1
        value, _ = Eigen(-2, 2).sup_derivative()
        assert value == 2
        assert Eigen(3, 2).sup_derivative()[0] == float("inf")

    def test_eigen_derivative_direct(self, homog2):
        for lam in [Fraction(1, 3), Fraction(-3, 2), 2, -2, 1]:
            f = Eigen(lam, 2)
            best = max(abs(f.derivative_at(homog2, homog2.first_at_level(L))) for L in range(30))
            assert best == f.sup_derivative()[0]

    def test_resolvent_norm(self, homog2):
        assert lip_norm(homog2, Resolvent(Fraction(1, 2))).value == float("inf")
        r = Resolvent(2)
        best = max(abs(r.dphi(k)) for k in range(40))
        assert lip_norm(homog2, r).value == best
        with pytest.raises(PreconditionError):
            Resolvent(0)


class TestExtremalFunctions:
    def test_witness_norms_level1(self, level1_tree):
        assert lip_norm(level1_tree, G1()).value == 1
        assert lip_norm(level1_tree, G2((0,))).value == 1
        assert lip_norm(level1_tree, G3((0,))).value == 1

    def test_h_is_unit(self):
        for d in (1, 2, 3):
            t = homog(d)
            for n in range(1, 5):
                assert lip_norm(t, H(n, (0,))).value == 1

    def test_g2_needs_nonroot(self, homog2):
        with pytest.raises(PreconditionError):
            G2(()).finite(homog2)

    def test_family_literals(self):
        for f in [G1(), G2((0, 1)), G3((1,)), H(3, (0,)), Indicator((2,)), Eigen(Fraction(1, 2), 3), Resolvent(2), LevelFunction(), HarmonicLevel()]:
            assert function_from_dict(json.loads(json.dumps(f.to_dict()))) == f

    @pytest.mark.parametrize("obj", [
        {"kind": "family", "name": "nope"},
        {"kind": "family", "name": "h", "params": {"n": "x", "u_star": "0"}},
        {"kind": "finite", "values": {"a": 1}},
        {"kind": "finite", "values": {}, "extra": 1},
        [],
    ])
    def test_bad_literals(self, obj):
        with pytest.raises(SpecError):
            function_from_dict(obj)


class TestGrowth:
    def test_growth_bound_corpus(self):
        for name, t in corpus_trees():
            for f in random_supports(t, 21, 5):
                assert growth_check(t, f, 6)

    def test_growth_level(self, homog2):
        assert growth_check(homog2, LevelFunction(), 10)

    def test_growth_needs_lipschitz(self, homog2):
        with pytest.raises(PreconditionError):
            growth_check(homog2, Eigen(3, 2), 4)


class TestMSpace:
    def test_leafless(self, homog2):
        assert m_membership(homog2, Indicator(()))

    def test_leaf_ancestors_checked(self, leafy_tree):
        assert not m_membership(leafy_tree, Indicator((0,)))
        assert not m_membership(leafy_tree, Indicator(()))
        assert m_membership(leafy_tree, Indicator((1,)))


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(st.lists(st.integers(0, 1), max_size=4).map(tuple), values, max_size=8))
def test_derivative_round_trip_binary(raw):
    t = homog(2)
    f = FiniteSupport(raw)
    d = derivative(t, f)
    assert antiderivative(t, d) == f
    assert lip_norm(t, f).value == max((abs(x) for _, x in d.items()), default=0)
