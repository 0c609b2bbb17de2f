"""Functions on trees, the derivative ``f'`` and the Lipschitz norms.

Two representations are supported: :class:`FiniteSupport` (an exact map from
vertices to scalars, no stored zeros) and closed-form families. Families that
only depend on the level of a vertex derive from :class:`LevelFamily` and know
their derivative supremum and little-Lipschitz status analytically. The
extremal test functions (``G1``, ``G2``, ``G3``, ``H``) have finite support and
materialize through :meth:`TreeFunction.finite`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .errors import PreconditionError, SpecError
from .scalars import Scalar, compare_modulus, is_exact, modulus, scalar_from_json, scalar_to_json
from .tree import Path, TreeView, format_path, leaf_ancestor_set, parse_path, vertex_key

INF = math.inf


class Membership(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNDECIDED = "undecided-at-depth"


# ---------------------------------------------------------------------------
# base class and finite supports
# ---------------------------------------------------------------------------


class TreeFunction:
    """A scalar function on the vertices of a tree."""

    #: value depends only on ``|v|``
    level_only = False

    def value(self, tree: TreeView, v: Path) -> Scalar:
        raise NotImplementedError

    def finite(self, tree: TreeView) -> Optional["FiniteSupport"]:
        """Exact finite-support form, or ``None`` if the support is infinite."""
        return None

    def derivative_at(self, tree: TreeView, v: Path) -> Scalar:
        if not v:
            return self.value(tree, v)
        return self.value(tree, v) - self.value(tree, v[:-1])

    def to_dict(self) -> dict:
        raise SpecError(f"{type(self).__name__} has no literal form")


@dataclass(frozen=True, eq=False)
class FiniteSupport(TreeFunction):
    values: Mapping = field(default_factory=dict)

    def __post_init__(self):
        clean = {tuple(v): x for v, x in self.values.items() if x != 0}
        object.__setattr__(self, "values", dict(sorted(clean.items(), key=lambda kv: vertex_key(kv[0]))))

    def __eq__(self, other):
        if isinstance(other, FiniteSupport):
            return self.values == other.values
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self.values.items()))

    def __len__(self):
        return len(self.values)

    def value(self, tree, v):
        return self.values.get(tuple(v), 0)

    def get(self, v, default=0):
        return self.values.get(tuple(v), default)

    def items(self):
        return self.values.items()

    def finite(self, tree):
        return self

    @property
    def support_depth(self) -> int:
        """Deepest level carrying a nonzero value (-1 for the zero function)."""
        return max((len(v) for v in self.values), default=-1)

    def check_in(self, tree: TreeView) -> "FiniteSupport":
        for v in self.values:
            tree.state(v)
        return self

    def scale(self, c) -> "FiniteSupport":
        return FiniteSupport({v: c * x for v, x in self.values.items()})

    def __add__(self, other: "FiniteSupport") -> "FiniteSupport":
        out = dict(self.values)
        for v, x in other.values.items():
            out[v] = out.get(v, 0) + x
        return FiniteSupport(out)

    def __sub__(self, other: "FiniteSupport") -> "FiniteSupport":
        return self + other.scale(-1)

    def to_dict(self) -> dict:
        return {"kind": "finite", "values": {format_path(v): scalar_to_json(x) for v, x in self.values.items()}}


ZERO = FiniteSupport({})


@dataclass(frozen=True)
class _Materialized(TreeFunction):
    """Closed-form family with finite support, built once per tree."""

    _cache: dict = field(default_factory=dict, compare=False, repr=False, kw_only=True)

    def build(self, tree: TreeView) -> dict:
        raise NotImplementedError

    def finite(self, tree):
        hit = self._cache.get(tree)
        if hit is None:
            hit = FiniteSupport(self.build(tree))
            self._cache[tree] = hit
        return hit

    def value(self, tree, v):
        return self.finite(tree).get(v)


@dataclass(frozen=True)
class Indicator(_Materialized):
    vertex: Path = ()

    def build(self, tree):
        tree.state(self.vertex)
        return {tuple(self.vertex): 1}

    def to_dict(self):
        return {"kind": "family", "name": "indicator", "params": {"vertex": format_path(self.vertex)}}


@dataclass(frozen=True)
class G1(_Materialized):
    """1 at the root, 2 on its children, 1 on its grandchildren."""

    def build(self, tree):
        out = {(): 1}
        out.update((w, 2) for w in tree.descendants((), 1))
        out.update((w, 1) for w in tree.descendants((), 2))
        return out

    def to_dict(self):
        return {"kind": "family", "name": "g1", "params": {}}


@dataclass(frozen=True)
class G2(_Materialized):
    """1, 2, 3, 2, 1 on ``par u*``, ``u*`` and three generations below ``u*``."""

    u_star: Path = (0,)

    def build(self, tree):
        u = tuple(self.u_star)
        if not u:
            raise PreconditionError("g2 needs u* different from the root")
        out = {u[:-1]: 1, u: 2}
        for k, val in ((1, 3), (2, 2), (3, 1)):
            out.update((w, val) for w in tree.descendants(u, k))
        return out

    def to_dict(self):
        return {"kind": "family", "name": "g2", "params": {"u_star": format_path(self.u_star)}}


@dataclass(frozen=True)
class G3(_Materialized):
    """Level-1 witness: -1 at the root, 0 at ``u*``, 1 on ``Chi(u*)``, -2/-1 elsewhere near the root."""

    u_star: Path = (0,)

    def build(self, tree):
        u = tuple(self.u_star)
        if len(u) != 1:
            raise PreconditionError("g3 needs u* at level 1")
        tree.state(u)
        out = {(): -1}
        for w in tree.descendants((), 1):
            if w != u:
                out[w] = -2
        for w in tree.descendants((), 2):
            out[w] = 1 if w[:1] == u else -1
        return out

    def to_dict(self):
        return {"kind": "family", "name": "g3", "params": {"u_star": format_path(self.u_star)}}


@dataclass(frozen=True)
class H(_Materialized):
    """Extremal function for ``B^n``: a tent of height ``n+2`` in ``S_{u*}``, a valley elsewhere."""

    n: int = 1
    u_star: Path = (0,)

    def build(self, tree):
        n, u = self.n, tuple(self.u_star)
        if n < 1:
            raise PreconditionError("h_n needs n >= 1")
        if len(u) != 1:
            raise PreconditionError("h_n needs u* among the children of the root")
        tree.state(u)
        out = {(): 1}
        for L in range(1, 2 * n + 3):
            inside = tree.descendants(u, L - 1)
            val = L + 1 if L <= n + 1 else 2 * n + 3 - L
            out.update((w, val) for w in inside)
            if L <= 2 * n - 1:
                val = -L + 1 if L <= n else -(2 * n - 1) + L
                if val:
                    for other in tree.descendants((), 1):
                        if other != u:
                            out.update((w, val) for w in tree.descendants(other, L - 1))
        return out

    def to_dict(self):
        return {"kind": "family", "name": "h", "params": {"n": self.n, "u_star": format_path(self.u_star)}}


# ---------------------------------------------------------------------------
# families that depend only on the level
# ---------------------------------------------------------------------------


class LevelFamily(TreeFunction):
    """``f(v) = phi(|v|)``; subclasses give ``phi`` and the analytic facts."""

    level_only = True

    def phi(self, k: int) -> Scalar:
        raise NotImplementedError

    def dphi(self, k: int) -> Scalar:
        return self.phi(0) if k == 0 else self.phi(k) - self.phi(k - 1)

    def value(self, tree, v):
        return self.phi(len(v))

    def derivative_at(self, tree, v):
        return self.dphi(len(v))

    def sup_derivative(self):
        """``(sup |f'|, level where attained or None)``, exact."""
        raise NotImplementedError

    def little_lipschitz(self) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class LevelFunction(LevelFamily):
    """``g(v) = |v|``."""

    def phi(self, k):
        return k

    def sup_derivative(self):
        return 1, 1

    def little_lipschitz(self):
        return False

    def to_dict(self):
        return {"kind": "family", "name": "level", "params": {}}


@dataclass(frozen=True)
class HarmonicLevel(LevelFamily):
    """``g(v) = 1 + 1/2 + ... + 1/|v|``."""

    def phi(self, k):
        return sum((Fraction(1, j) for j in range(1, k + 1)), Fraction(0))

    def dphi(self, k):
        return Fraction(0) if k == 0 else Fraction(1, k)

    def sup_derivative(self):
        return Fraction(1), 1

    def little_lipschitz(self):
        return True

    def to_dict(self):
        return {"kind": "family", "name": "harmonic", "params": {}}


def _ratio(lam, gamma):
    if is_exact(lam):
        return Fraction(lam) / gamma
    return complex(lam) / gamma


@dataclass(frozen=True)
class Eigen(LevelFamily):
    """``f(v) = (lam/gamma)^{|v|}``; an eigenfunction of ``B`` on a homogeneous tree of order ``gamma``."""

    lam: Scalar = 1
    gamma: int = 1

    @property
    def r(self):
        return _ratio(self.lam, self.gamma)

    def phi(self, k):
        return self.r ** k

    def sup_derivative(self):
        # f'(o) = 1 and |f'(v)| = |r|^{|v|-1} |r - 1| on T*
        r = self.r
        step = modulus(r - 1)
        if step == 0:
            return 1, 0
        c = _cmp_one(r)
        if c > 0:
            return INF, None
        return (1, 0) if step <= 1 else (step, 1)

    def little_lipschitz(self):
        r = self.r
        return _cmp_one(r) < 0 or r == 1

    def to_dict(self):
        return {"kind": "family", "name": "eigen", "params": {"lambda": scalar_to_json(self.lam), "gamma": self.gamma}}


@dataclass(frozen=True)
class Resolvent(LevelFamily):
    """``f(v) = -1/lam^{|v|+1}``, the unique solution of ``(S - lam) f = chi_o``."""

    lam: Scalar = Fraction(1, 2)

    def __post_init__(self):
        if self.lam == 0:
            raise PreconditionError("resolvent family needs lambda != 0")

    def phi(self, k):
        lam = Fraction(self.lam) if is_exact(self.lam) else complex(self.lam)
        return -1 / lam ** (k + 1)

    def sup_derivative(self):
        if _cmp_one(self.lam) < 0:
            return INF, None
        # for |lam| >= 1 the modulus of f' is nonincreasing from level 1 on
        d0, d1 = modulus(self.dphi(0)), modulus(self.dphi(1))
        return (d0, 0) if d0 >= d1 else (d1, 1)

    def little_lipschitz(self):
        return _cmp_one(self.lam) > 0 or self.lam == 1

    def to_dict(self):
        return {"kind": "family", "name": "resolvent", "params": {"lambda": scalar_to_json(self.lam)}}


def _cmp_one(x) -> int:
    return compare_modulus(x, 1)


# ---------------------------------------------------------------------------
# lazily evaluated transforms (used when no closed or finite form applies)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Derivative(TreeFunction):
    base: TreeFunction

    @property
    def level_only(self):
        return self.base.level_only

    def value(self, tree, v):
        return self.base.derivative_at(tree, v)


@dataclass(frozen=True)
class PathSum(TreeFunction):
    """``f(v) = sum of g over the path from the root to v``."""

    base: TreeFunction

    @property
    def level_only(self):
        return self.base.level_only

    def value(self, tree, v):
        v = tuple(v)
        return sum((self.base.value(tree, v[:k]) for k in range(len(v) + 1)), 0)

    def derivative_at(self, tree, v):
        return self.base.value(tree, v)


@dataclass(frozen=True)
class ForwardShift(TreeFunction):
    base: TreeFunction
    n: int = 1

    @property
    def level_only(self):
        return self.base.level_only

    def value(self, tree, v):
        return self.base.value(tree, v[: len(v) - self.n]) if len(v) >= self.n else 0


@dataclass(frozen=True)
class BackwardShift(TreeFunction):
    """``(B^n f)(v) = sum of f over Chi^n(v)``; level families aggregate by counts."""

    base: TreeFunction
    n: int = 1

    @property
    def level_only(self):
        return False

    def value(self, tree, v):
        if self.base.level_only:
            return tree.gamma_n(v, self.n) * self.base.value(tree, tuple(v) + (0,) * self.n)
        return sum((self.base.value(tree, w) for w in tree.descendants(v, self.n)), 0)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def derivative(tree: TreeView, f: TreeFunction) -> TreeFunction:
    """``f'`` with ``f'(o) = f(o)`` and ``f'(v) = f(v) - f(par v)``."""
    if isinstance(f, PathSum):
        return f.base
    fin = f.finite(tree)
    if fin is not None:
        out = {}
        for v, x in fin.items():
            out[v] = out.get(v, 0) + x
            for w in tree.children(v):
                out[w] = out.get(w, 0) - x
        return FiniteSupport(out)
    return Derivative(f)


def antiderivative(tree: TreeView, g: TreeFunction) -> TreeFunction:
    """Inverse of :func:`derivative`: path sums from the root."""
    if isinstance(g, Derivative):
        return g.base
    fin = g.finite(tree)
    if fin is None:
        return PathSum(g)
    if not fin.values:
        return ZERO
    depth = fin.support_depth
    prefixes = {v[:k] for v in fin.values for k in range(len(v) + 1)}
    out = {}
    stack = [((), 0)]
    while stack:
        v, acc = stack.pop()
        acc = acc + fin.get(v)
        if acc != 0:
            if len(v) > depth:
                return PathSum(g)
            out[v] = acc
        if acc != 0 or v in prefixes:
            stack.extend((w, acc) for w in tree.children(v) if acc != 0 or w in prefixes)
    return FiniteSupport(out)


@dataclass(frozen=True)
class NormReport:
    value: object
    attained_at: Optional[Path]
    truncation_depth: int
    exact: bool

    @property
    def exactness(self) -> str:
        return "exact" if self.exact else "lower-bound"

    @property
    def finite(self) -> bool:
        return self.value != INF


def _sup_over(tree: TreeView, fin: FiniteSupport, depth: int):
    best, where = 0, None
    cands = set(fin.values)
    for v in fin.values:
        cands.update(tree.children(v))
    for v in sorted(cands, key=vertex_key):
        if len(v) > depth:
            continue
        m = modulus(fin.derivative_at(tree, v))
        if m > best:
            best, where = m, v
    return best, where


def lip_norm(tree: TreeView, f: TreeFunction, depth: int = 16) -> NormReport:
    """``sup |f'|`` over levels ``<= depth``, exact when provably attained there."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if isinstance(f, LevelFamily):
        value, level = f.sup_derivative()
        return NormReport(value, None if level is None else tree.first_at_level(level), depth, True)
    fin = f.finite(tree)
    if fin is not None:
        best, where = _sup_over(tree, fin, depth)
        return NormReport(best, where, depth, depth >= fin.support_depth + 1)
    best, where = 0, None
    for L in range(depth + 1):
        verts = (tree.first_at_level(L),) if f.level_only else tree.level(L)
        for v in verts:
            m = modulus(f.derivative_at(tree, v))
            if m > best:
                best, where = m, v
    return NormReport(best, where, depth, False)


def in_little_lipschitz(tree: TreeView, f: TreeFunction) -> Membership:
    if isinstance(f, LevelFamily):
        return Membership.YES if f.little_lipschitz() else Membership.NO
    if f.finite(tree) is not None:
        return Membership.YES
    return Membership.UNDECIDED


def growth_check(tree: TreeView, f: TreeFunction, depth: int) -> bool:
    """``|f(v)| <= (|v| + 1) ||f||`` for every vertex with ``|v| <= depth``."""
    norm = lip_norm(tree, f, depth + 1).value
    if norm == INF:
        raise PreconditionError("growth bound needs f in the Lipschitz space")
    for L in range(depth + 1):
        verts = (tree.first_at_level(L),) if f.level_only else tree.level(L)
        for v in verts:
            if modulus(f.value(tree, v)) > (L + 1) * norm:
                return False
    return True


def m_membership(tree: TreeView, f: TreeFunction) -> bool:
    """Whether ``f`` is Lipschitz and vanishes on every leaf and every ancestor of a leaf."""
    fin = f.finite(tree)
    depth = fin.support_depth + 1 if fin is not None else 16
    if lip_norm(tree, f, max(depth, 1)).value == INF:
        return False
    deepest = max((len(v) for v in tree.leaves()), default=0)
    return all(f.value(tree, v) == 0 for v in leaf_ancestor_set(tree, deepest))


# ---------------------------------------------------------------------------
# literal format
# ---------------------------------------------------------------------------


def _param(params, key, conv):
    if key not in params:
        raise SpecError(f"missing parameter {key!r}")
    try:
        return conv(params[key])
    except (TypeError, ValueError) as exc:
        raise SpecError(f"bad parameter {key!r}: {exc}") from None


def function_from_dict(obj) -> TreeFunction:
    if not isinstance(obj, dict):
        raise SpecError("function literal must be an object")
    kind = obj.get("kind")
    if kind == "finite":
        if set(obj) != {"kind", "values"} or not isinstance(obj["values"], dict):
            raise SpecError("finite literal takes exactly 'kind' and 'values'")
        try:
            return FiniteSupport({parse_path(k): scalar_from_json(x) for k, x in obj["values"].items()})
        except ValueError as exc:
            raise SpecError(str(exc)) from None
    if kind != "family":
        raise SpecError(f"unknown function kind {kind!r}")
    if set(obj) - {"kind", "name", "params"}:
        raise SpecError(f"unknown fields in {obj!r}")
    name, params = obj.get("name"), obj.get("params", {})
    if not isinstance(params, dict):
        raise SpecError("'params' must be an object")
    if name == "indicator":
        return Indicator(vertex=_param(params, "vertex", parse_path))
    if name == "level":
        return LevelFunction()
    if name == "harmonic":
        return HarmonicLevel()
    if name == "g1":
        return G1()
    if name == "g2":
        return G2(u_star=_param(params, "u_star", parse_path))
    if name == "g3":
        return G3(u_star=_param(params, "u_star", parse_path))
    if name == "h":
        return H(n=_param(params, "n", int), u_star=_param(params, "u_star", parse_path))
    if name == "eigen":
        return Eigen(lam=_param(params, "lambda", scalar_from_json), gamma=_param(params, "gamma", int))
    if name == "resolvent":
        return Resolvent(lam=_param(params, "lambda", scalar_from_json))
    raise SpecError(f"unknown family {name!r}")


def load_function(path) -> TreeFunction:
    import json

    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON in {path}: {exc}") from None
    return function_from_dict(obj)
