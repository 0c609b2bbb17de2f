"""Exact norms of powers of the backward shift.

Under ``f -> f'`` the Lipschitz space is isometric to bounded functions, so
``(B^n f)'(v)`` is a linear functional of ``f'`` with an integer coefficient
row. ``||B^n||`` is the supremum of the rows' l1 norms; each row is attained
by the sign pattern of its coefficients. On a tree homogeneous by sectors at
level ``N`` rows are constant per sector type beyond level ``N + 1``, so the
supremum is a finite maximum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import ContractError, PreconditionError
from .functions import (
    G1,
    G2,
    G3,
    BackwardShift,
    FiniteSupport,
    HarmonicLevel,
    LevelFunction,
    TreeFunction,
    antiderivative,
    lip_norm,
)
from .shifts import ShiftOperator, apply_backward
from .tree import Path, TreeView, bound_constants

DIVERGENCE_LEVELS = 50
WITNESS_ROW_LIMIT = 20000
MAX_SPECTRAL_POWER = 12


@dataclass(frozen=True)
class CoeffRow:
    """``(B^n f)'(v) = sum over u of c(u) f'(u)``."""

    target: Path
    power: int
    coefficients: dict

    @property
    def l1(self) -> int:
        return sum(abs(c) for c in self.coefficients.values())

    def evaluate(self, tree: TreeView, fprime: TreeFunction):
        return sum((c * fprime.value(tree, u) for u, c in self.coefficients.items()), 0)

    def attaining_derivative(self) -> FiniteSupport:
        """``f'`` with ``f'(u) = sign c(u)``: norm one and ``(B^n f)'(v) = l1``."""
        return FiniteSupport({u: (1 if c > 0 else -1) for u, c in self.coefficients.items()})

    def attaining_function(self, tree: TreeView) -> TreeFunction:
        return antiderivative(tree, self.attaining_derivative())


def coeff_row(tree: TreeView, v: Path, n: int) -> CoeffRow:
    """Explicit coefficient row by descendant counting."""
    if n < 1:
        raise ValueError("power must be >= 1")
    v = tuple(v)
    tree.state(v)
    g = tree.gamma_n
    coeffs = {}
    if not v:
        for k in range(n + 1):
            for u in tree.descendants((), k):
                coeffs[u] = g(u, n - k)
    else:
        p = v[:-1]
        a = g(v, n) - g(p, n)
        for k in range(len(v)):
            coeffs[v[:k]] = a
        for k in range(n + 1):
            for u in tree.descendants(v, k):
                coeffs[u] = g(u, n - k) - g(u, n - k - 1) if k < n else 1
        for s in tree.children(p):
            if s == v:
                continue
            for j in range(1, n + 1):
                for u in tree.descendants(s, j - 1):
                    coeffs[u] = -g(u, n - j)
    return CoeffRow(v, n, {u: c for u, c in coeffs.items() if c})


def coefficient_matrix(tree: TreeView, flat, n: int, max_level: int):
    """CSR arrays ``(indptr, indices, data)`` of the rows of every vertex up to ``max_level``.

    Row ``r`` belongs to flat vertex ``r``; column indices refer to ``flat``,
    which must be realized to depth ``max_level + n``.
    """
    if max_level + n > flat.depth:
        raise ValueError(f"rows at level {max_level} for power {n} need depth {max_level + n}")
    last = int(flat.level_start[max_level + 1])
    indptr = np.zeros(last + 1, dtype=np.int64)
    indices, data = [], []
    for r in range(last):
        row = coeff_row(tree, flat.paths[r], n).coefficients
        cols = sorted(flat.index[u] for u in row)
        indices.extend(cols)
        data.extend(row[flat.paths[c]] for c in cols)
        indptr[r + 1] = len(indices)
    return indptr, np.asarray(indices, dtype=np.int64), np.asarray(data, dtype=np.int64)


class _RowL1:
    """Row l1 norms from sector states alone (no vertex enumeration)."""

    def __init__(self, tree: TreeView, n: int):
        self.tree, self.n = tree, n
        self._p = {}

    def sector_part(self, s, m):
        # sum of |c(u)| over the sector of a vertex in state s down to depth m
        if m == 0:
            return 1
        key = (s, m)
        hit = self._p.get(key)
        if hit is None:
            t = self.tree
            hit = abs(t.count(s, m) - t.count(s, m - 1))
            hit += sum(self.sector_part(t.child_state(s, i), m - 1) for i in range(t.degree_of_state(s)))
            self._p[key] = hit
        return hit

    def root(self):
        return (self.n + 1) * self.tree.count(self.tree.root_state, self.n)

    def __call__(self, level, state, parent_state):
        if parent_state is None:
            return self.root()
        t, n = self.tree, self.n
        total = level * abs(t.count(state, n) - t.count(parent_state, n))
        total += self.sector_part(state, n)
        total += n * (t.count(parent_state, n) - t.count(state, n - 1))
        return total


def row_l1(tree: TreeView, v: Path, n: int) -> int:
    v = tuple(v)
    parent_state = tree.state(v[:-1]) if v else None
    return _RowL1(tree, n)(len(v), tree.state(v), parent_state)


@dataclass
class NormComputation:
    operator: ShiftOperator
    status: str  # exact | diverges | truncated
    exact_value: Optional[int]
    scan_level: int
    witness_vertex: Optional[Path] = None
    witness_row: Optional[CoeffRow] = None
    level_l1: list = field(default_factory=list)
    lower_bound_witnesses: list = field(default_factory=list)
    upper_bounds: dict = field(default_factory=dict)


def operator_norm(tree: TreeView, n: int = 1, witnesses: bool = True) -> NormComputation:
    """``||B^n||`` exactly, or a diverging sequence of row norms when B is unbounded."""
    if n < 1:
        raise ValueError("power must be >= 1")
    op = ShiftOperator("backward", n)
    rows = _RowL1(tree, n)
    N = tree.hbs_level()
    if N is None:
        levels = min(DIVERGENCE_LEVELS, tree.max_depth)
        per_level = [(L, max(rows(L, c.state, c.parent_state) for c in tree.level_classes(L))) for L in range(1, levels + 1)]
        return NormComputation(op, "diverges", None, levels, level_l1=per_level)

    scan = N + n + 1
    best, where = -1, None
    per_level = []
    for L in range(scan + 1):
        lvl_best = -1
        for c in tree.level_classes(L):
            val = rows(L, c.state, c.parent_state)
            lvl_best = max(lvl_best, val)
            if val > best:
                best, where = val, c.rep
        per_level.append((L, lvl_best))
    _assert_stable(tree, rows, scan)

    row = None
    if _row_size(tree, where, n) <= WITNESS_ROW_LIMIT:
        row = coeff_row(tree, where, n)
    out = NormComputation(op, "exact", best, scan, where, row, per_level)
    if n == 1:
        bc = bound_constants(tree)
        out.upper_bounds = {"lambda": bc.upper_lambda, "gamma_omega": bc.upper_gamma_omega}
        if witnesses:
            out.lower_bound_witnesses = lower_bound_witnesses(tree)
    return out


def _stable_key(tree, c):
    return (tree.sector_degree(c.parent_state), tree.sector_degree(c.state))


def _assert_stable(tree: TreeView, rows: _RowL1, scan: int) -> None:
    a = {_stable_key(tree, c): rows(scan, c.state, c.parent_state) for c in tree.level_classes(scan)}
    b = {_stable_key(tree, c): rows(scan + 1, c.state, c.parent_state) for c in tree.level_classes(scan + 1)}
    if any(k not in a or a[k] != val for k, val in b.items()):
        raise RuntimeError(f"row norms did not stabilize between levels {scan} and {scan + 1}: {a} vs {b}")


def _row_size(tree: TreeView, v: Path, n: int) -> int:
    anchor = v[:-1] if v else v
    return len(v) + sum(tree.gamma_n(anchor, j) for j in range(n + 2))


def lower_bound_witnesses(tree: TreeView) -> list:
    """``[(tag, g, ||B g||)]`` for the three norm-one test functions."""
    if tree.hbs_level() is None:
        raise ContractError("B unbounded: tree not homogeneous by sectors")
    bc = bound_constants(tree)
    out = [("g1", G1())]
    depth_cap = max(bc.hbs_level, 1)
    u2 = None
    for L in range(1, depth_cap + 1):
        for c in tree.level_classes(L):
            if tree.degree_of_state(c.state) == bc.GammaPrime:
                u2 = c.rep
                break
        if u2 is not None:
            break
    out.append(("g2", G2(u_star=u2)))
    u3 = next(c.rep for c in tree.level_classes(1) if tree.degree_of_state(c.state) == bc.GammaDoublePrime)
    out.append(("g3", G3(u_star=u3)))
    result = []
    for tag, g in out:
        fin = g.finite(tree)
        bg = apply_backward(tree, fin, 1)
        rep = lip_norm(tree, bg, fin.support_depth + 1)
        result.append((tag, g, rep.value))
    return result


# ---------------------------------------------------------------------------
# unbounded case
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DivergenceRow:
    level: int
    max_row_l1: int
    level_witness: int
    harmonic_witness: Fraction
    vertex: Path


@dataclass
class DivergenceCertificate:
    rows: list
    gamma_sup: int
    certified: bool

    def exceeds_linear(self, lo: int, hi: int) -> bool:
        """Row norms and level witness beat ``L - Gamma`` on ``lo <= L <= hi``."""
        sel = [r for r in self.rows if lo <= r.level <= hi]
        return bool(sel) and all(r.max_row_l1 > r.level - self.gamma_sup and abs(r.level_witness) > r.level - self.gamma_sup for r in sel)

    def exceeds_harmonic(self, lo: int, hi: int) -> bool:
        sel = [r for r in self.rows if lo <= r.level <= hi]
        return bool(sel) and all(abs(r.harmonic_witness) > _harmonic(r.level) - self.gamma_sup for r in sel)


def _harmonic(m: int) -> Fraction:
    return sum((Fraction(1, k) for k in range(1, m + 1)), Fraction(0))


def divergence_certificate(tree: TreeView, levels: int = DIVERGENCE_LEVELS) -> DivergenceCertificate:
    """Per level: the largest row l1 and ``(B g)'`` for ``g = |v|`` and its harmonic variant."""
    if tree.hbs_level() is not None:
        raise ContractError("divergence certificate requested for a tree homogeneous by sectors (B is bounded)")
    if levels > tree.max_depth:
        raise PreconditionError(f"levels {levels} exceeds TREESHIFT_MAX_DEPTH={tree.max_depth}")
    rows_l1 = _RowL1(tree, 1)
    bg = BackwardShift(LevelFunction(), 1)
    bh = BackwardShift(HarmonicLevel(), 1)
    rows = []
    for L in range(1, levels + 1):
        classes = tree.level_classes(L)
        best_row = max(rows_l1(L, c.state, c.parent_state) for c in classes)
        pick = max(classes, key=lambda c: abs(bg.derivative_at(tree, c.rep)))
        rows.append(DivergenceRow(L, best_row, bg.derivative_at(tree, pick.rep), bh.derivative_at(tree, pick.rep), pick.rep))
    gamma_sup = bound_constants(tree).Gamma
    # certified when the row norms set a new record inside the last third of the window
    cut = len(rows) - max(1, len(rows) // 3)
    record = max((r.max_row_l1 for r in rows[:cut]), default=-1)
    certified = any(r.max_row_l1 > record for r in rows[cut:])
    return DivergenceCertificate(rows, gamma_sup, certified)


# ---------------------------------------------------------------------------
# spectral radius
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadiusRow:
    n: int
    norm: int
    root: float
    ratio: float
    witness: Optional[Path]


def spectral_radius_estimate(tree: TreeView, n_max: int) -> list:
    """``(n, ||B^n||, ||B^n||^(1/n), ||B^(n+1)|| / ||B^n||)`` for ``n = 1..n_max``."""
    if not 1 <= n_max <= MAX_SPECTRAL_POWER:
        raise PreconditionError(f"n_max must be in 1..{MAX_SPECTRAL_POWER}")
    if tree.hbs_level() is None:
        raise ContractError("B unbounded: tree not homogeneous by sectors")
    comps = [operator_norm(tree, n, witnesses=False) for n in range(1, n_max + 2)]
    out = []
    for i in range(n_max):
        a, b = comps[i], comps[i + 1]
        n = i + 1
        out.append(RadiusRow(n, a.exact_value, a.exact_value ** (1.0 / n), b.exact_value / a.exact_value, a.witness_vertex))
    return out
