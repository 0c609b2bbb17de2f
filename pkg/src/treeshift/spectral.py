"""Spectral experiments for the shifts on homogeneous trees.

* eigenfunctions ``f_lam(v) = (lam/gamma)^{|v|}`` of ``B`` and their membership
  in the Lipschitz and little Lipschitz spaces;
* the boundary argument ruling out eigenvalues ``|lam| = gamma, lam != gamma`` on
  the little space, run on sampled data;
* the solution of ``(S - lam) f = chi_o`` for ``0 < |lam| < 1``, whose derivative
  grows like ``|lam|^{-|v|}``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import PreconditionError, UnsupportedInstanceError
from .functions import (
    Eigen,
    FiniteSupport,
    ForwardShift,
    Membership,
    NormReport,
    Resolvent,
    TreeFunction,
    in_little_lipschitz,
    lip_norm,
)
from .scalars import FLOAT_TOL, compare_modulus, is_exact, modulus
from .shifts import ShiftOperator, forward_eigen_defect
from .tree import Path, TreeView, vertex_key

EIGEN_L = "eigenvalue-on-L"
EIGEN_L0 = "eigenvalue-on-L0"
IN_SPECTRUM = "in-spectrum"
EXCLUDED_L0 = "excluded-from-point-spectrum-L0"


def _require_homogeneous(tree: TreeView) -> int:
    gamma = tree.homogeneous_degree()
    if gamma is None or gamma == 0:
        raise UnsupportedInstanceError("spectral claims are only available on homogeneous trees")
    return gamma


@dataclass(frozen=True)
class SpectralVerdict:
    lam: object
    operator: ShiftOperator
    claims: frozenset
    residual: float
    depth: int
    in_L: bool
    in_L0: bool
    exact: bool

    @property
    def classification(self) -> str:
        if self.in_L0:
            return "eigenvalue-L-and-L0"
        if self.in_L:
            return "eigenvalue-L-only"
        return "not-an-eigenvalue"


def eigen_check(tree: TreeView, lam, depth: int = 8) -> SpectralVerdict:
    """Check ``B f_lam = lam f_lam`` up to ``depth`` and classify ``f_lam``."""
    gamma = _require_homogeneous(tree)
    if depth < 2:
        raise PreconditionError("eigen_check needs depth >= 2")
    f = Eigen(lam, gamma)
    exact = is_exact(lam)
    residual = 0
    for L in range(depth + 1):
        v = tree.first_at_level(L)
        bf = sum((f.value(tree, w) for w in tree.children(v)), 0)
        residual = max(residual, modulus(bf - lam * f.value(tree, v)))
    in_L = lip_norm(tree, f, depth).finite
    in_L0 = in_little_lipschitz(tree, f) is Membership.YES
    ok = residual == 0 if exact else residual <= FLOAT_TOL
    claims = set()
    if ok and in_L:
        claims.add(EIGEN_L)
    if ok and in_L0:
        claims.add(EIGEN_L0)
    cmp = compare_modulus(lam, gamma)
    if cmp <= 0:
        claims.add(IN_SPECTRUM)
    if cmp == 0 and lam != gamma:
        claims.add(EXCLUDED_L0)
    return SpectralVerdict(lam, ShiftOperator("backward"), frozenset(claims), float(residual), depth, in_L, in_L0, exact)


def rational_grid(gamma: int, count: int = 24) -> list:
    """``count`` evenly spaced rationals from ``-gamma`` to ``gamma`` inclusive."""
    return [Fraction(-gamma) + Fraction(2 * gamma * k, count - 1) for k in range(count)]


def complex_grid(gamma: int, radii=(Fraction(1, 2), Fraction(1)), sectors: int = 8) -> list:
    out = []
    for r in radii:
        for k in range(sectors):
            z = cmath.rect(float(r) * gamma, 2 * math.pi * k / sectors)
            out.append(complex(round(z.real, 15), round(z.imag, 15)))
    return out


# ---------------------------------------------------------------------------
# boundary exclusion on the little Lipschitz space
# ---------------------------------------------------------------------------


@dataclass
class ExclusionProbe:
    outcome: str  # consistent | contradiction-found
    w_star: Optional[Path]
    threshold: float
    premise_level: Optional[int]
    check_a_fails_at: Optional[int]
    u_star: Optional[Path] = None
    check_b: dict = field(default_factory=dict)
    depth: int = 0


def boundary_exclusion_probe(tree: TreeView, lam, f: TreeFunction, depth: int) -> ExclusionProbe:
    """Run both quantitative steps of the boundary argument on ``f`` up to ``depth``.

    (a) for each ``n``, some ``v`` in ``Chi^n(w*)`` has ``|f(v)| >= |f(w*)|``;
    (b) past the level ``N`` where ``|f'| < |gamma - lam| / (2 gamma)``, a vertex
    ``u*`` with ``|f(u*)| >= 1`` would need ``|f(u*)| < 1/2``.
    Reports ``contradiction-found`` when the decay premise holds and either
    step breaks, i.e. ``f`` cannot be an eigenfunction in the little space.
    """
    gamma = _require_homogeneous(tree)
    if compare_modulus(lam, gamma) != 0 or lam == gamma:
        raise PreconditionError("boundary probe needs |lambda| = gamma and lambda != gamma")
    thr = abs(complex(gamma) - complex(lam)) / (2 * gamma)

    w_star = None
    for L in range(depth + 1):
        for v in tree.level(L):
            if abs(complex(f.value(tree, v))) > 0:
                w_star = v
                break
        if w_star is not None:
            break
    if w_star is None:
        return ExclusionProbe("consistent", None, thr, None, None, depth=depth)
    scale = 1 / complex(f.value(tree, w_star))

    def val(v):
        return abs(scale * complex(f.value(tree, v)))

    def dval(v):
        return abs(scale * complex(f.derivative_at(tree, v)))

    # (a): first n at which every n-child of w* drops below 1
    fails_at = None
    for n in range(1, depth - len(w_star) + 1):
        if not any(val(v) >= 1 - FLOAT_TOL for v in tree.descendants(w_star, n)):
            fails_at = n
            break

    # decay premise: smallest N with |f'| < thr on all levels N..depth
    premise = None
    for N in range(depth, -1, -1):
        if all(dval(v) < thr for v in tree.level(N)):
            premise = N
        else:
            break
    if premise is not None and premise >= depth:
        premise = None  # one level of evidence is not a tail

    check_b, u_star = {}, None
    if premise is not None:
        start = max(premise - len(w_star), 0)
        for k in range(start, depth - len(w_star)):
            cands = [v for v in tree.descendants(w_star, k) if val(v) >= 1 - FLOAT_TOL]
            if cands:
                u_star = cands[0]
                break
        if u_star is not None:
            lhs = abs(complex(lam) - gamma) * val(u_star)
            rhs = sum(dval(u) for u in tree.children(u_star))
            check_b = {"lhs": lhs, "rhs": rhs, "bound": gamma * thr, "collides": rhs < gamma * thr}
    collides = bool(check_b.get("collides"))
    outcome = "contradiction-found" if premise is not None and (fails_at is not None or collides) else "consistent"
    return ExclusionProbe(outcome, w_star, thr, premise, fails_at, u_star, check_b, depth)


def damped_eigen_sample(tree: TreeView, lam, cutoff: int) -> FiniteSupport:
    """``f_lam`` multiplied by ``1 - |v|/cutoff``: forced to decay, hence not an eigenfunction."""
    gamma = _require_homogeneous(tree)
    f = Eigen(lam, gamma)
    values = {}
    for L in range(cutoff):
        w = Fraction(cutoff - L, cutoff)
        for v in tree.level(L):
            values[v] = f.value(tree, v) * w
    return FiniteSupport(values)


# ---------------------------------------------------------------------------
# forward shift
# ---------------------------------------------------------------------------


@dataclass
class ResolventProbe:
    lam: object
    status: str  # solution-not-lipschitz | structural-no-solution
    function: Optional[TreeFunction]
    norm: Optional[NormReport]
    residual: float
    growth_ratios: list
    depth: int


def resolvent_probe(tree: TreeView, lam, depth: int = 10) -> ResolventProbe:
    """Solve ``(S - lam) f = chi_o`` and report the growth of ``f'``."""
    if lam == 0:
        # (S f)(o) = 0 for every f, so S f = chi_o fails at the root
        return ResolventProbe(lam, "structural-no-solution", None, None, 0.0, [], depth)
    if compare_modulus(lam, 1) >= 0:
        raise PreconditionError("resolvent probe needs 0 < |lambda| < 1")
    f = Resolvent(lam)
    sf = ForwardShift(f, 1)
    residual = 0
    for L in range(depth + 1):
        v = tree.first_at_level(L)
        chi = 1 if L == 0 else 0
        residual = max(residual, modulus(sf.value(tree, v) - lam * f.value(tree, v) - chi))
    ratios = []
    for L in range(1, depth):
        a = modulus(f.derivative_at(tree, tree.first_at_level(L)))
        b = modulus(f.derivative_at(tree, tree.first_at_level(L + 1)))
        ratios.append(b / a)
    return ResolventProbe(lam, "solution-not-lipschitz", f, lip_norm(tree, f, depth), float(residual), ratios, depth)


def forward_has_no_eigenvector(tree: TreeView, lam, f: FiniteSupport) -> bool:
    """``(S - lam) f != 0`` for a nonzero finitely supported ``f``."""
    if not f.values:
        raise PreconditionError("need a nonzero function")
    defect = forward_eigen_defect(tree, f, lam)
    return any(modulus(x) > (0 if is_exact(x) else FLOAT_TOL) for x in defect.values.values())


def leaf_kernel_witness(tree: TreeView) -> Optional[Path]:
    """A leaf ``v`` (so ``S chi_v = 0``: zero is an eigenvalue of ``S``), if any."""
    leaves = tree.leaves()
    return min(leaves, key=vertex_key) if leaves else None
