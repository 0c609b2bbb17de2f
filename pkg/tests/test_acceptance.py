"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are collected in ``RESULTS`` and echoed by the terminal-summary hook
in ``conftest.py``, so they show up even when pytest captures output. Run as a
script (``python3 tests/test_acceptance.py``) for the same report.
"""

import itertools
import random
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import homog
from oracles import homogeneous_backward_norm
from treeshift import kernels
from treeshift.corpus import generate_corpus, random_finite_support, random_hbs_spec
from treeshift.functions import H, Indicator, derivative, lip_norm
from treeshift.hypercyclic import criterion_run, forward_not_hypercyclic_probe, free_end_obstruction
from treeshift.norms import coefficient_matrix, divergence_certificate, operator_norm, spectral_radius_estimate
from treeshift.shifts import apply_backward, apply_forward, duality_pair
from treeshift.spectral import eigen_check, rational_grid, resolvent_probe
from treeshift.tree import Homogeneous, TreeSpec, TreeView, bound_constants

RESULTS = {}


def record(number, title):
    """Run the decorated check, store PASS/FAIL with timing, and re-raise failures."""
    def wrap(fn):
        def test():
            t0 = time.perf_counter()
            try:
                detail = fn()
            except BaseException as exc:
                RESULTS[number] = f"FAIL  criterion {number:>2}  {title}  ({type(exc).__name__}: {exc})"
                print(RESULTS[number])
                raise
            took = time.perf_counter() - t0
            RESULTS[number] = f"PASS  criterion {number:>2}  {title}  [{took:.2f}s]" + (f"  {detail}" if detail else "")
            print(RESULTS[number])
        test.__name__ = fn.__name__
        return test
    return wrap


def leafless_trees(seed, count):
    rng = random.Random(seed)
    return [TreeView(random_hbs_spec(rng, 3, 4, leafless=True)) for _ in range(count)]


@record(1, "exact ||B|| on homogeneous trees is 2, 4, 7, 10")
def test_criterion_01_homogeneous_norm():
    got = []
    for gamma, want in zip((1, 2, 3, 4), (2, 4, 7, 10)):
        t0 = time.perf_counter()
        value = operator_norm(homog(gamma), 1).exact_value
        assert time.perf_counter() - t0 < 1.0
        assert value == want, (gamma, value)
        got.append(value)
    return f"values={got}"


@record(2, "exact ||B^n|| for gamma 1..3, n 1..6")
def test_criterion_02_powers():
    t0 = time.perf_counter()
    for gamma in (1, 2, 3):
        tree = homog(gamma)
        for n in range(1, 7):
            want = n + 1 if gamma == 1 else (2 * n + 1) * gamma ** n - 2 * n * gamma ** (n - 1)
            assert operator_norm(tree, n, witnesses=False).exact_value == want, (gamma, n)
    took = time.perf_counter() - t0
    assert took < 10.0
    return "18 cases"


@record(3, "lip_norm(B^n h_n) attains ||B^n|| for gamma 2, n <= 4")
def test_criterion_03_extremal():
    tree = homog(2)
    vals = []
    for n in range(1, 5):
        h = H(n, (0,)).finite(tree)
        assert lip_norm(tree, h).value == 1
        bh = apply_backward(tree, h, n)
        value = lip_norm(tree, bh, h.support_depth + 1).value
        assert value == operator_norm(tree, n).exact_value == homogeneous_backward_norm(2, n)
        vals.append(value)
    return f"values={vals}"


@record(4, "norm sandwich on 50 seeded HBS specs")
def test_criterion_04_sandwich():
    t0 = time.perf_counter()
    rng = random.Random(2024)
    tight = 0
    for _ in range(50):
        tree = TreeView(random_hbs_spec(rng, 3, 4))
        bc = bound_constants(tree)
        comp = operator_norm(tree, 1)
        g = bc.root_degree
        lower = max([2 * g, 3 * bc.GammaPrime - 2, bc.GammaDoublePrime + 2 * g - 2] + [v for _, _, v in comp.lower_bound_witnesses])
        upper = max(2 * g, bc.Lambda)
        coarse = max(2 * g, 3 * bc.Gamma - 2 + bc.Omega)
        assert lower <= comp.exact_value <= upper <= coarse, tree.spec.to_json()
        tight += comp.exact_value == upper
    assert time.perf_counter() - t0 < 30.0
    return f"upper bound attained on {tight}/50"


@record(5, "level-1 exactness: ||B|| = max{2 gamma(o), Lambda}")
def test_criterion_05_level_one():
    cases = 0
    for root in range(1, 5):
        for degrees in itertools.product(range(5), repeat=root):
            if not any(degrees):
                continue
            tree = TreeView(TreeSpec.sectors_at_level_one(list(degrees)))
            bc = bound_constants(tree)
            assert operator_norm(tree, 1, witnesses=False).exact_value == max(2 * root, bc.Lambda), degrees
            cases += 1
    return f"{cases} trees"


@record(6, "divergence certificates on LevelPeriodic [2,3] and [1,2]")
def test_criterion_06_divergence():
    for degrees in ([2, 3], [1, 2]):
        tree = TreeView(TreeSpec.level_periodic(degrees))
        cert = divergence_certificate(tree, 50)
        assert cert.exceeds_linear(10, 50), degrees
        assert cert.exceeds_harmonic(10, 50), degrees
        for r in cert.rows:
            if r.level >= 10:
                assert r.max_row_l1 > r.level - cert.gamma_sup
                assert abs(r.level_witness) > r.level - cert.gamma_sup
    return "L = 10..50"


@record(7, "(Sf)' = Sf', ||Sf|| = ||f|| and Phi_f(Sg) = Phi_{Bf}(g) over 200 seeds each")
def test_criterion_07_isometry_adjoint():
    trees = leafless_trees(77, 20)
    for seed in range(200):
        rng = random.Random(seed)
        tree = trees[seed % len(trees)]
        f = random_finite_support(rng, tree, 4)
        sf = apply_forward(tree, f)
        assert derivative(tree, sf) == apply_forward(tree, derivative(tree, f))
    for seed in range(200):
        rng = random.Random(10_000 + seed)
        tree = trees[seed % len(trees)]
        f = random_finite_support(rng, tree, 4)
        assert lip_norm(tree, apply_forward(tree, f)).value == lip_norm(tree, f).value
    for seed in range(200):
        rng = random.Random(20_000 + seed)
        tree = trees[seed % len(trees)]
        f = random_finite_support(rng, tree, 4)
        g = random_finite_support(rng, tree, 4)
        assert duality_pair(tree, f, apply_forward(tree, g)) == duality_pair(tree, apply_backward(tree, f), g)
    return "600 exact checks"


@record(8, "eigen grid, resolvent growth and spectral-radius trend")
def test_criterion_08_spectral():
    for gamma in (2, 3):
        tree = homog(gamma)
        grid = rational_grid(gamma)
        assert len(grid) == 24 and all(abs(lam) <= gamma for lam in grid)
        for lam in grid:
            v = eigen_check(tree, lam)
            assert v.residual == 0
            want_l0 = abs(lam) < gamma or lam == gamma
            assert v.in_L and v.in_L0 == want_l0, (gamma, lam)
    for lam in (Fraction(1, 2), Fraction(9, 10)):
        probe = resolvent_probe(homog(2), lam, 12)
        assert all(abs(float(r) - 1 / float(lam)) <= 1e-12 for r in probe.growth_ratios)
    rows = spectral_radius_estimate(homog(2), 10)
    ratio = rows[-1].ratio
    assert abs(ratio - 2) < 0.2
    return f"ratio at n=10: {ratio:.4f}"


@record(9, "hypercyclicity dichotomy")
def test_criterion_09_hypercyclic():
    t0 = time.perf_counter()
    tree = homog(2)
    run = criterion_run(tree, Indicator(()), 10)
    assert [(r.bn_norm, r.rn_norm, r.identity_defect) for r in run.rows] == [(0, Fraction(1, 2 ** n), 0) for n in range(1, 11)]

    rng = random.Random(99)
    checked = 0
    while checked < 20:
        t = TreeView(random_hbs_spec(rng, 3, 4, leafless=True, free_ends=False))
        if t.free_end_vertex() is not None:
            continue
        f = random_finite_support(rng, t, 3)
        r = criterion_run(t, f, 12)
        assert r.envelope_holds(), t.spec.to_json()
        checked += 1

    fe = TreeView(TreeSpec({(): 2}, {(0,): Homogeneous(1), (1,): Homogeneous(2)}))
    rng = random.Random(5)
    for _ in range(100):
        f = random_finite_support(rng, fe, 5, lo=-6, hi=6, denominators=(5, 7, 9))
        norm = lip_norm(fe, f).value
        if norm >= Fraction(1, 2):
            f = f.scale(Fraction(49, 100) / norm)
        assert lip_norm(fe, f).value < Fraction(1, 2)
        w = free_end_obstruction(fe, None, f, rng.randint(1, 10))
        assert w.lower_bound > Fraction(1, 2)

    for seed in range(50):
        rng = random.Random(seed)
        t = leafless_trees(seed, 1)[0]
        assert forward_not_hypercyclic_probe(t, random_finite_support(rng, t, 4), rng.randint(1, 6)) == 1
    assert time.perf_counter() - t0 < 30.0
    return f"backend={kernels.backend()}"


@record(10, "row-oracle equivalence to level 6, n <= 3, 100 supports")
def test_criterion_10_row_oracle():
    corpus = generate_corpus(10, 8)
    max_level = 6
    checked = 0
    for name, kind, spec in corpus:
        tree = TreeView(spec)
        rng = random.Random(name)
        for n in (1, 2, 3):
            flat = tree.flat(max_level + n)
            indptr, indices, data = coefficient_matrix(tree, flat, n, max_level)
            rows = indptr.shape[0] - 1
            supports = [random_finite_support(rng, tree, max_level + n, size=8) for _ in range(100)]
            for lo in range(0, 100, 25):
                chunk = supports[lo:lo + 25]
                denom = int(np.lcm.reduce([x.denominator for f in chunk for _, x in f.items()] or [1]))
                F = np.stack([flat.dense({v: int(x * denom) for v, x in f.items()}) for f in chunk])
                lhs = kernels.csr_dot(indptr, indices, data, kernels.derivative_dense(flat, F))
                rhs = kernels.derivative_dense(flat, kernels.backward_power_dense(flat, F, n))[:, :rows]
                assert np.array_equal(lhs, rhs), (name, n)
                checked += lhs.size
    return f"{checked} row evaluations, backend={kernels.backend()}"


if __name__ == "__main__":
    code = pytest.main([__file__, "-q"])
    for k in sorted(RESULTS):
        print(RESULTS[k])
    sys.exit(code)
