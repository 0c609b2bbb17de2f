import random
from fractions import Fraction

import pytest

from conftest import corpus_trees, hbs_no_free_end_trees, homog
from oracles import BruteTree, backward
from treeshift.corpus import random_finite_support
from treeshift.errors import ContractError, PreconditionError
from treeshift.functions import FiniteSupport, Indicator, lip_norm
from treeshift.shifts import apply_backward
from treeshift.hypercyclic import (
    OBSTRUCTION,
    SATISFIED,
    apply_Rn,
    beta,
    beta_decay_rate,
    criterion_run,
    forward_not_hypercyclic_probe,
    free_end_obstruction,
    rn_identity_defect,
    rn_norm,
    sup_beta,
)


def small_norm_function(rng, tree, depth):
    """Random finite support with ``||f|| < 1/2``."""
    f = random_finite_support(rng, tree, depth, lo=-4, hi=4, denominators=(7, 9, 11))
    norm = lip_norm(tree, f).value
    if norm >= Fraction(1, 2):
        f = f.scale(Fraction(2, 5) / norm)
    return f


def test_root_indicator_rows(homog2):
    run = criterion_run(homog2, Indicator(()), 10)
    assert [(r.bn_norm, r.rn_norm, r.identity_defect) for r in run.rows] == [(0, Fraction(1, 2 ** n), 0) for n in range(1, 11)]
    assert run.verdict == SATISFIED and run.failing_columns == []


def test_beta_values(homog2, level1_tree):
    assert beta(homog2, (0, 1, 1), 2) == Fraction(1, 4)
    assert beta(homog2, (0,), 2) == 0
    assert beta(level1_tree, (0, 2), 1) == Fraction(1, 3)
    assert sup_beta(homog2, 3) == Fraction(1, 8)


def test_rn_is_right_inverse():
    for t in hbs_no_free_end_trees(2, 10):
        rng = random.Random(t.spec.fingerprint())
        bt = BruteTree(t.spec.to_dict(), 7)
        f = random_finite_support(rng, t, 3)
        for n in (1, 2, 3):
            rn = dict(apply_Rn(t, f, n).items())
            for v in bt.vertices(3):
                assert backward(bt, rn, n, v) == f.get(v)


def test_closed_forms_match_materialized(leafy_tree):
    trees = [leafy_tree] + [t for _, t in corpus_trees(kinds=("hbs", "free_end"))][:8]
    for t in trees:
        rng = random.Random(t.spec.fingerprint())
        for _ in range(3):
            f = random_finite_support(rng, t, 3)
            for n in (1, 2, 3):
                rn = apply_Rn(t, f, n)
                assert rn_norm(t, f, n) == lip_norm(t, rn).value
                assert rn_identity_defect(t, f, n) == apply_backward(t, rn, n) - f


def test_envelope_on_corpus():
    trees = hbs_no_free_end_trees(8, 20)
    for t in trees:
        assert t.free_end_vertex() is None
        rng = random.Random(t.spec.fingerprint())
        f = random_finite_support(rng, t, 3)
        run = criterion_run(t, f, 10)
        assert run.envelope_holds()
        assert all(r.identity_defect == 0 for r in run.rows)
        rn = [r.rn_norm for r in run.rows]
        assert all(a >= b for a, b in zip(rn, rn[1:]))
        if f.support_depth < 10:
            assert run.verdict == SATISFIED, run.failing_columns


def test_mu(homog2, level1_tree):
    assert beta_decay_rate(homog2) == 2
    assert beta_decay_rate(level1_tree) == 3


def test_free_end_verdict(free_end_tree):
    run = criterion_run(free_end_tree, Indicator((0,)), 6)
    assert run.verdict == OBSTRUCTION and run.free_end == (0, 0)
    # on the free end R_n keeps the mass, so the R_n column never decays
    assert all(r.rn_norm == 1 for r in run.rows)


def test_obstruction_certified(free_end_tree):
    rng = random.Random(0)
    for _ in range(30):
        f = small_norm_function(rng, free_end_tree, 5)
        w = free_end_obstruction(free_end_tree, None, f, rng.randint(1, 8))
        assert w.certified and w.lower_bound > Fraction(1, 2)


def test_obstruction_preconditions(free_end_tree, homog2):
    with pytest.raises(PreconditionError):
        free_end_obstruction(free_end_tree, (0,), Indicator((0,)), 3)
    with pytest.raises(PreconditionError):
        free_end_obstruction(free_end_tree, (1,), FiniteSupport({}), 3)
    with pytest.raises(PreconditionError):
        free_end_obstruction(homog2, None, FiniteSupport({}), 3)


def test_forward_probe():
    for name, t in corpus_trees():
        rng = random.Random(name)
        f = random_finite_support(rng, t, 4)
        for N in (1, 3):
            assert forward_not_hypercyclic_probe(t, f, N) == 1


def test_criterion_needs_hbs(periodic23):
    with pytest.raises(ContractError):
        criterion_run(periodic23, Indicator(()), 3)
