"""The hypercyclicity criterion for ``B`` on the little Lipschitz space.

``R_n`` spreads ``f(u)`` evenly over ``Chi^n(u)``, so ``B^n R_n f = f`` exactly;
with no free ends the weights ``beta(v, n) = 1/gamma(par^n v, n)`` decay
geometrically and the criterion holds on finite supports. A free end blocks
hypercyclicity, and ``S`` is never hypercyclic because ``(S^n f)(o) = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import ContractError, PreconditionError
from .functions import FiniteSupport, TreeFunction, derivative, lip_norm
from .scalars import modulus
from .shifts import apply_backward, apply_forward
from .tree import Path, TreeView, format_path, is_free_end

SATISFIED = "criterion-satisfied-on-window"
OBSTRUCTION = "obstruction"


def beta(tree: TreeView, v: Path, n: int) -> Fraction:
    if n < 1:
        raise ValueError("n must be positive")
    v = tuple(v)
    tree.state(v)
    if len(v) < n:
        return Fraction(0)
    return Fraction(1, tree.gamma_n(v[: len(v) - n], n))


def apply_Rn(tree: TreeView, f: TreeFunction, n: int) -> FiniteSupport:
    """``(R_n f)(v) = beta(v, n) f(par^n v)``."""
    if n < 1:
        raise ValueError("n must be positive")
    fin = f.finite(tree)
    if fin is None:
        raise PreconditionError("R_n is applied to finitely supported functions")
    out = {}
    for u, x in fin.items():
        share = x / Fraction(tree.gamma_n(u, n)) if tree.gamma_n(u, n) else None
        if share is None:
            continue  # u has no n-children
        for w in tree.descendants(u, n):
            out[w] = share
    return FiniteSupport(out)


def rn_norm(tree: TreeView, f: FiniteSupport, n: int) -> Fraction:
    """``||R_n f||`` without materializing ``R_n f``.

    ``(R_n f)'`` is constant on each ``Chi^n(u)``, equal to
    ``f(u)/gamma(u, n) - f(par u)/gamma(par u, n)`` (no second term at the root),
    so only ``u`` in the support or just below it matter.
    """
    def share(u):
        c = tree.gamma_n(u, n)
        return Fraction(0) if c == 0 else f.get(u) / Fraction(c)

    cands = set(f.values)
    for u in f.values:
        cands.update(tree.children(u))
    best = Fraction(0)
    for u in cands:
        if tree.gamma_n(u, n) == 0:
            continue
        d = share(u) - (share(u[:-1]) if u else 0)
        best = max(best, modulus(d))
    return best


def rn_identity_defect(tree: TreeView, f: FiniteSupport, n: int) -> FiniteSupport:
    """``B^n R_n f - f``: ``-f`` on vertices without ``n``-children, zero elsewhere."""
    return FiniteSupport({u: -x for u, x in f.items() if tree.gamma_n(u, n) == 0})


def sup_beta(tree: TreeView, n: int) -> Fraction:
    """``sup_v beta(v, n)`` from sector counts (exact)."""
    N = tree.hbs_level()
    if N is None:
        raise ContractError("B unbounded: tree not homogeneous by sectors")
    counts = [tree.count(c.state, n) for L in range(N + 2) for c in tree.level_classes(L)]
    return Fraction(1, min(c for c in counts if c > 0))


def beta_decay_rate(tree: TreeView) -> int:
    """``mu``: smallest positive sector degree among level-``M`` sectors."""
    M = tree.hbs_level()
    if M is None:
        raise ContractError("B unbounded: tree not homogeneous by sectors")
    return min(d for d in (tree.sector_degree(c.state) for c in tree.level_classes(M)) if d)


@dataclass(frozen=True)
class CriterionRow:
    n: int
    bn_norm: Fraction
    rn_norm: Fraction
    identity_defect: Fraction
    envelope: Optional[Fraction]


@dataclass
class CriterionRun:
    f: FiniteSupport
    n_max: int
    rows: list
    verdict: str
    hbs_level: int
    mu: int
    sup_f: object
    free_end: Optional[Path]
    failing_columns: list = field(default_factory=list)

    def envelope_holds(self) -> bool:
        return run_envelope(self.rows)


def _norm(tree, g):
    fin = g.finite(tree)
    return lip_norm(tree, fin, max(fin.support_depth + 1, 0)).value


def criterion_run(tree: TreeView, f: TreeFunction, n_max: int) -> CriterionRun:
    """Rows ``(n, ||B^n f||, ||R_n f||, ||B^n R_n f - f||)`` for ``n = 1..n_max``."""
    M = tree.hbs_level()
    if M is None:
        raise ContractError("B unbounded: tree not homogeneous by sectors")
    fin = f.finite(tree)
    if fin is None:
        raise PreconditionError("criterion runs need a finitely supported f")
    fin.check_in(tree)
    mu = beta_decay_rate(tree)
    sup_f = max((modulus(x) for x in fin.values.values()), default=0)
    rows = []
    bn = fin
    for n in range(1, n_max + 1):
        bn = apply_backward(tree, bn, 1)
        defect = rn_identity_defect(tree, fin, n)
        env = 2 * sup_f * Fraction(1, mu ** (n - M)) if n > 2 * M else None
        rows.append(CriterionRow(n, _norm(tree, bn), rn_norm(tree, fin, n), _norm(tree, defect), env))

    free_end = tree.free_end_vertex()
    failing = []
    if any(r.identity_defect != 0 for r in rows):
        failing.append("identity_defect")
    # B^n f of a finite support vanishes once n passes its depth, but may grow first
    bn_col = [r.bn_norm for r in rows]
    if bn_col and bn_col[-1] != 0:
        failing.append("BnF_norm")
    rn_col = [r.rn_norm for r in rows]
    half = rn_col[(n_max - 1) // 2] if rows else 0
    decays = not rows or rn_col[-1] == 0 or rn_col[-1] < half
    if not (_nonincreasing(rn_col) and decays and run_envelope(rows)):
        failing.append("RnF_norm")
    if free_end is not None:
        verdict = OBSTRUCTION
    else:
        verdict = SATISFIED if not failing else "criterion-not-met-on-window"
    return CriterionRun(fin, n_max, rows, verdict, M, mu, sup_f, free_end, failing)


def _nonincreasing(col) -> bool:
    return all(a >= b for a, b in zip(col, col[1:]))


def run_envelope(rows) -> bool:
    return all(r.envelope is None or r.rn_norm <= r.envelope for r in rows)


@dataclass(frozen=True)
class ObstructionWitness:
    v_star: Path
    N: int
    lower_bound: object
    w_N: Path

    @property
    def certified(self) -> bool:
        return self.lower_bound > Fraction(1, 2)


def free_end_obstruction(tree: TreeView, v_star: Optional[Path], f: TreeFunction, N: int) -> ObstructionWitness:
    """``||B^N f - chi_{v*}|| >= |f(w_N) - f(par w_N) - 1| > 1/2`` whenever ``||f|| < 1/2``."""
    if N < 1:
        raise ValueError("N must be positive")
    if v_star is None:
        v_star = tree.free_end_vertex()
        if v_star is None:
            raise PreconditionError("tree has no free end")
    v_star = tuple(v_star)
    if not v_star or not is_free_end(tree, v_star) or tree.gamma(v_star[:-1]) != 1:
        raise PreconditionError(f"{format_path(v_star)!r} is not on a free end with gamma(v*) = gamma(par v*) = 1")
    fin = f.finite(tree)
    report = lip_norm(tree, f, fin.support_depth + 1 if fin is not None else len(v_star) + N + 1)
    if not report.exact or not report.value < Fraction(1, 2):
        raise PreconditionError("obstruction needs ||f|| < 1/2")
    w_N = v_star + (0,) * N
    bound = modulus(f.value(tree, w_N) - f.value(tree, w_N[:-1]) - 1)
    # direct evaluation of (B^N f)'(v*) - chi'(v*)(v*) as a cross-check
    if fin is not None:
        bnf = apply_backward(tree, fin, N)
        direct = modulus(derivative(tree, bnf).value(tree, v_star) - 1)
        if direct != bound:
            raise RuntimeError(f"obstruction bound mismatch: {direct} != {bound}")
    return ObstructionWitness(v_star, N, bound, w_N)


def forward_not_hypercyclic_probe(tree: TreeView, f: TreeFunction, N: int) -> Fraction:
    """Lower bound ``|(S^N f)(o) - 1|`` for ``||S^N f - chi_o||``; always 1."""
    if N < 1:
        raise ValueError("N must be positive")
    snf = apply_forward(tree, f, N)
    return Fraction(modulus(snf.value(tree, ()) - 1))
