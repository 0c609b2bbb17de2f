"""Forward and backward shifts, their powers, and the duality pairing.

``(S f)(v) = f(par v)`` with ``(S f)(o) = 0``, and ``(B f)(v)`` is the sum of
``f`` over the children of ``v``. Finite supports stay finite under both;
closed forms fall back to lazily evaluated wrappers.
"""

from __future__ import annotations

from dataclasses import dataclass

from .functions import (
    BackwardShift,
    Eigen,
    FiniteSupport,
    ForwardShift,
    LevelFamily,
    TreeFunction,
    derivative,
)
from .scalars import modulus
from .tree import TreeView


@dataclass(frozen=True)
class ShiftOperator:
    kind: str  # "forward" or "backward"
    power: int = 1

    def __post_init__(self):
        if self.kind not in ("forward", "backward"):
            raise ValueError(f"unknown shift kind {self.kind!r}")
        if self.power < 1:
            raise ValueError("power must be >= 1")

    def __call__(self, tree: TreeView, f: TreeFunction) -> TreeFunction:
        if self.kind == "forward":
            return apply_forward(tree, f, self.power)
        return apply_backward(tree, f, self.power)

    def label(self) -> str:
        sym = "S" if self.kind == "forward" else "B"
        return sym if self.power == 1 else f"{sym}^{self.power}"


def _check_power(n: int) -> None:
    if n < 1:
        raise ValueError("shift power must be a positive integer")


def apply_forward(tree: TreeView, f: TreeFunction, n: int = 1) -> TreeFunction:
    """``S^n f``: the value at ``v`` is ``f(par^n v)``, zero above level ``n``."""
    _check_power(n)
    fin = f.finite(tree)
    if fin is None:
        return ForwardShift(f, n)
    out = {}
    for v, x in fin.items():
        for w in tree.descendants(v, n):
            out[w] = x
    return FiniteSupport(out)


def apply_backward(tree: TreeView, f: TreeFunction, n: int = 1) -> TreeFunction:
    """``B^n f``: the value at ``v`` is the sum of ``f`` over ``Chi^n(v)``."""
    _check_power(n)
    fin = f.finite(tree)
    if fin is None:
        if isinstance(f, Eigen) and tree.homogeneous_degree() == f.gamma:
            return _scaled_eigen(f, n)
        return BackwardShift(f, n)
    out = {}
    for w, x in fin.items():
        if len(w) >= n:
            p = w[: len(w) - n]
            out[p] = out.get(p, 0) + x
    return FiniteSupport(out)


@dataclass(frozen=True)
class ScaledLevel(LevelFamily):
    """``c * base`` for a level family ``base``."""

    base: LevelFamily
    factor: object = 1

    def phi(self, k):
        return self.factor * self.base.phi(k)

    def sup_derivative(self):
        value, level = self.base.sup_derivative()
        if self.factor == 0:
            return 0, None
        return modulus(self.factor) * value, level

    def little_lipschitz(self):
        return self.factor == 0 or self.base.little_lipschitz()


def _scaled_eigen(f: Eigen, n: int) -> TreeFunction:
    return ScaledLevel(f, f.lam ** n)


def duality_pair(tree: TreeView, f: FiniteSupport, g: TreeFunction):
    """``Phi_f(g) = sum over v of f(v) g'(v)`` for a finitely supported ``f``."""
    fin = f.finite(tree)
    if fin is None:
        raise ValueError("the pairing is implemented for finitely supported f only")
    return sum((x * g.derivative_at(tree, v) for v, x in fin.items()), 0)


def orbit(tree: TreeView, f: TreeFunction, op: ShiftOperator, steps: int):
    """``[f, op f, op^2 f, ...]`` with ``steps + 1`` entries."""
    out = [f]
    for _ in range(steps):
        out.append(op(tree, out[-1]))
    return out


def forward_eigen_defect(tree: TreeView, f: FiniteSupport, lam) -> FiniteSupport:
    """``(S - lam) f`` as a finite support; nonzero whenever ``f`` is."""
    return apply_forward(tree, f, 1) - f.scale(lam)


def commutes_with_derivative(tree: TreeView, f: FiniteSupport) -> bool:
    """Exact check of ``(S f)' = S f'``."""
    lhs = derivative(tree, apply_forward(tree, f, 1))
    rhs = apply_forward(tree, derivative(tree, f), 1)
    return lhs == rhs

