"""Rooted, countably infinite, locally finite trees described by finite data.

A tree is a :class:`TreeSpec`: an explicit prefix (path -> child count) plus a
tail rule on every frontier vertex that generates the sector hanging from it.
A :class:`TreeView` realizes a spec lazily and answers the combinatorial
queries (children counts, sectors, free ends, homogeneity by sectors, the
bound constants for the backward shift).

Vertices are identified by their child-index path from the root, as tuples of
ints; the root is ``()`` and ``len(v)`` is the level ``|v|``.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import threading
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterator, Mapping, NamedTuple, Optional, Union

import numpy as np

from .errors import DepthLimitError, SpecError, VertexError

Path = tuple
FORMAT_VERSION = "treeshift-1"
DEFAULT_MAX_DEPTH = 64


def parse_path(text: str) -> Path:
    if not isinstance(text, str):
        raise SpecError(f"path must be a string, got {text!r}")
    if text == "":
        return ()
    parts = text.split(".")
    if not all(p.isdigit() for p in parts):
        raise SpecError(f"bad vertex path {text!r}")
    return tuple(int(p) for p in parts)


def format_path(v: Path) -> str:
    return ".".join(str(i) for i in v)


def vertex_key(v: Path):
    """Canonical order: breadth first, then lexicographic by path."""
    return (len(v), v)


def max_depth_from_env() -> int:
    raw = os.environ.get("TREESHIFT_MAX_DEPTH")
    if raw is None:
        return DEFAULT_MAX_DEPTH
    try:
        value = int(raw)
    except ValueError:
        raise SpecError(f"TREESHIFT_MAX_DEPTH must be an integer, got {raw!r}") from None
    if value < 1:
        raise SpecError("TREESHIFT_MAX_DEPTH must be positive")
    return value


# ---------------------------------------------------------------------------
# tail rules and specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Homogeneous:
    """Every vertex of the governed sector has ``degree`` children."""

    degree: int

    def degree_at(self, k: int) -> int:
        return self.degree

    def to_dict(self) -> dict:
        return {"kind": "homogeneous", "degree": self.degree}


@dataclass(frozen=True)
class LevelPeriodic:
    """A vertex ``k`` levels below the frontier has ``degrees[k % p]`` children."""

    degrees: tuple

    def degree_at(self, k: int) -> int:
        return self.degrees[k % len(self.degrees)]

    def to_dict(self) -> dict:
        return {"kind": "level_periodic", "degrees": list(self.degrees)}


TailRule = Union[Homogeneous, LevelPeriodic]


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def tail_from_dict(obj) -> TailRule:
    if not isinstance(obj, dict):
        raise SpecError(f"tail rule must be an object, got {obj!r}")
    kind = obj.get("kind")
    if kind == "homogeneous":
        if set(obj) != {"kind", "degree"}:
            raise SpecError(f"homogeneous tail takes exactly 'kind' and 'degree': {obj!r}")
        d = obj["degree"]
        if not _is_int(d) or d < 0:
            raise SpecError(f"tail degree must be a nonnegative integer: {d!r}")
        return Homogeneous(d)
    if kind == "level_periodic":
        if set(obj) != {"kind", "degrees"}:
            raise SpecError(f"level_periodic tail takes exactly 'kind' and 'degrees': {obj!r}")
        ds = obj["degrees"]
        if not isinstance(ds, list) or not ds or not all(_is_int(d) for d in ds):
            raise SpecError(f"degrees must be a nonempty list of integers: {ds!r}")
        if any(d < 1 for d in ds):
            raise SpecError("level_periodic degrees must be positive (use the prefix for finite subtrees)")
        return LevelPeriodic(tuple(ds))
    raise SpecError(f"unknown tail kind {kind!r}")


@dataclass(frozen=True)
class TreeSpec:
    """Finite description of an infinite tree.

    ``prefix`` maps every explicit non-frontier vertex to its child count;
    every child of a prefix vertex is itself explicit (in ``prefix``) or a
    frontier vertex (in ``tails``). Frontier vertices carry exactly one tail
    rule, which also fixes their own child count.
    """

    prefix: Mapping = field(default_factory=dict)
    tails: Mapping = field(default_factory=dict)
    version: str = FORMAT_VERSION

    def __post_init__(self):
        prefix = {tuple(k): v for k, v in self.prefix.items()}
        tails = {tuple(k): v for k, v in self.tails.items()}
        object.__setattr__(self, "prefix", MappingProxyType(dict(sorted(prefix.items(), key=lambda kv: vertex_key(kv[0])))))
        object.__setattr__(self, "tails", MappingProxyType(dict(sorted(tails.items(), key=lambda kv: vertex_key(kv[0])))))
        self._validate()

    def _validate(self) -> None:
        if self.version != FORMAT_VERSION:
            raise SpecError(f"unsupported version {self.version!r}")
        prefix, tails = self.prefix, self.tails
        for v, c in prefix.items():
            if not _is_int(c) or c < 0:
                raise SpecError(f"child count at {format_path(v)!r} must be a nonnegative integer")
        for v, rule in tails.items():
            if not isinstance(rule, (Homogeneous, LevelPeriodic)):
                raise SpecError(f"bad tail rule at {format_path(v)!r}")
        both = set(prefix) & set(tails)
        if both:
            raise SpecError(f"vertices both explicit and frontier: {[format_path(v) for v in sorted(both)]}")
        if () not in prefix and () not in tails:
            raise SpecError("the root must be explicit or carry a tail rule")
        for v in list(prefix) + list(tails):
            if not v:
                continue
            p = v[:-1]
            if p in tails:
                raise SpecError(f"{format_path(v)!r} lies inside the tail sector of {format_path(p)!r}")
            if p not in prefix:
                raise SpecError(f"explicit region not prefix-closed at {format_path(v)!r}")
            if v[-1] >= prefix[p]:
                raise SpecError(f"{format_path(v)!r}: child index out of range for parent degree {prefix[p]}")
        for v, c in prefix.items():
            for i in range(c):
                if v + (i,) not in prefix and v + (i,) not in tails:
                    raise SpecError(f"child {format_path(v + (i,))!r} is neither explicit nor frontier")
        if not any(rule.degree_at(0) > 0 for rule in tails.values()):
            raise SpecError("tree is finite: at least one tail rule needs positive degree")

    # serialization -------------------------------------------------------

    @classmethod
    def from_dict(cls, obj) -> "TreeSpec":
        if not isinstance(obj, dict):
            raise SpecError("tree spec must be a JSON object")
        unknown = set(obj) - {"version", "prefix", "tails"}
        if unknown:
            raise SpecError(f"unknown fields {sorted(unknown)}")
        if obj.get("version") != FORMAT_VERSION:
            raise SpecError(f"unsupported version {obj.get('version')!r}")
        raw_prefix = obj.get("prefix", {})
        raw_tails = obj.get("tails", {})
        if not isinstance(raw_prefix, dict) or not isinstance(raw_tails, dict):
            raise SpecError("'prefix' and 'tails' must be objects")
        prefix = {parse_path(k): c for k, c in raw_prefix.items()}
        tails = {parse_path(k): tail_from_dict(t) for k, t in raw_tails.items()}
        return cls(prefix, tails)

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "prefix": {format_path(v): c for v, c in self.prefix.items()},
            "tails": {format_path(v): r.to_dict() for v, r in self.tails.items()},
        }

    @classmethod
    def from_json(cls, text: str) -> "TreeSpec":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc}") from None
        return cls.from_dict(obj)

    def to_json(self) -> str:
        """Canonical serialization (stable key order, two-space indent)."""
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def load(cls, path) -> "TreeSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    def fingerprint(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()

    # convenience constructors -------------------------------------------

    @classmethod
    def homogeneous(cls, degree: int) -> "TreeSpec":
        return cls({}, {(): Homogeneous(degree)})

    @classmethod
    def level_periodic(cls, degrees) -> "TreeSpec":
        return cls({}, {(): LevelPeriodic(tuple(degrees))})

    @classmethod
    def sectors_at_level_one(cls, child_degrees) -> "TreeSpec":
        """Root with one Homogeneous(d) sector per entry of ``child_degrees``."""
        child_degrees = list(child_degrees)
        return cls({(): len(child_degrees)}, {(i,): Homogeneous(d) for i, d in enumerate(child_degrees)})


# ---------------------------------------------------------------------------
# states: isomorphism classes of sectors
# ---------------------------------------------------------------------------
#
# ("x", path)            explicit prefix vertex
# ("h", d)               vertex of a Homogeneous(d) sector
# ("p", degrees, phase)  vertex of a non-constant LevelPeriodic sector
#
# Two vertices with the same state have isomorphic sectors.


def _rule_state(rule: TailRule, phase: int = 0):
    if isinstance(rule, Homogeneous):
        return ("h", rule.degree)
    if len(set(rule.degrees)) == 1:
        return ("h", rule.degrees[0])
    return ("p", rule.degrees, phase % len(rule.degrees))


class LevelClass(NamedTuple):
    """Vertices at one level sharing (parent state, state); ``rep`` is the first one."""

    rep: Path
    state: tuple
    parent_state: Optional[tuple]


@dataclass(frozen=True)
class FlatTree:
    """Breadth-first array layout of the tree truncated at ``depth``.

    ``child_start`` has length ``V + 1`` and is monotone, so the children of a
    contiguous block ``[lo, hi)`` of same-level vertices are exactly
    ``[child_start[lo], child_start[hi])``.
    """

    depth: int
    paths: tuple
    index: Mapping
    parent: np.ndarray
    level: np.ndarray
    degree: np.ndarray
    child_start: np.ndarray
    level_start: np.ndarray

    @property
    def size(self) -> int:
        return len(self.paths)

    def dense(self, f, dtype=np.int64) -> np.ndarray:
        """Sample a mapping path -> value onto the arrays (missing paths are 0)."""
        out = np.zeros(self.size, dtype=dtype)
        for v, x in f.items():
            i = self.index.get(v)
            if i is not None:
                out[i] = x
        return out


class TreeView:
    """Lazy, thread-safe realization of a :class:`TreeSpec`.

    Levels are expanded on demand and cached; anything already answered
    never changes when more levels are realized.
    """

    def __init__(self, spec: TreeSpec, max_depth: Optional[int] = None):
        self.spec = spec
        self.max_depth = max_depth_from_env() if max_depth is None else max_depth
        self._lock = threading.RLock()
        self._levels = [((),)]
        self._classes = [(LevelClass((), self.root_state, None),)]
        self._state_cache = {(): self.root_state}
        self._count_cache = {}
        self._sector_cache = {}
        self._hbs = _UNSET

    @classmethod
    def from_spec_file(cls, path) -> "TreeView":
        return cls(TreeSpec.load(path))

    def __repr__(self) -> str:
        return f"TreeView(fingerprint={self.spec.fingerprint()[:12]}, realized_depth={self.realized_depth})"

    # states ---------------------------------------------------------------

    @property
    def root_state(self):
        if () in self.spec.prefix:
            return ("x", ())
        return _rule_state(self.spec.tails[()], 0)

    def degree_of_state(self, s) -> int:
        if s[0] == "x":
            return self.spec.prefix[s[1]]
        if s[0] == "h":
            return s[1]
        return s[1][s[2]]

    def child_state(self, s, i: int):
        if s[0] == "x":
            w = s[1] + (i,)
            if w in self.spec.prefix:
                return ("x", w)
            return _rule_state(self.spec.tails[w], 0)
        if s[0] == "h":
            return s
        return ("p", s[1], (s[2] + 1) % len(s[1]))

    def states(self) -> set:
        """Every state that occurs in the tree."""
        seen, stack = set(), [self.root_state]
        while stack:
            s = stack.pop()
            if s in seen:
                continue
            seen.add(s)
            for i in range(self.degree_of_state(s) if s[0] == "x" else min(1, self.degree_of_state(s))):
                stack.append(self.child_state(s, i))
        return seen

    def state(self, v: Path):
        v = tuple(v)
        s = self._state_cache.get(v)
        if s is not None:
            return s
        s = self.root_state
        for depth, i in enumerate(v):
            if not 0 <= i < self.degree_of_state(s):
                raise VertexError(f"no vertex {format_path(v)!r} (index {i} at depth {depth})")
            s = self.child_state(s, i)
        with self._lock:
            self._state_cache[v] = s
        return s

    def contains(self, v: Path) -> bool:
        try:
            self.state(v)
        except VertexError:
            return False
        return True

    def count(self, s, n: int) -> int:
        """Number of ``n``-children of any vertex in state ``s``."""
        if n == 0:
            return 1
        if s[0] == "h":
            return s[1] ** n
        if s[0] == "p":
            degs, ph = s[1], s[2]
            return math.prod(degs[(ph + k) % len(degs)] for k in range(n))
        key = (s, n)
        hit = self._count_cache.get(key)
        if hit is None:
            hit = sum(self.count(self.child_state(s, i), n - 1) for i in range(self.degree_of_state(s)))
            with self._lock:
                self._count_cache[key] = hit
        return hit

    def sector_degree(self, s) -> Optional[int]:
        """``d`` if every vertex of the sector has ``d`` children, else ``None``."""
        if s[0] == "h":
            return s[1]
        if s[0] == "p":
            return None
        hit = self._sector_cache.get(s, _UNSET)
        if hit is _UNSET:
            c = self.degree_of_state(s)
            hit = c
            for i in range(c):
                if self.sector_degree(self.child_state(s, i)) != c:
                    hit = None
                    break
            with self._lock:
                self._sector_cache[s] = hit
        return hit

    # vertex queries ------------------------------------------------------

    def gamma(self, v: Path) -> int:
        return self.degree_of_state(self.state(v))

    def gamma_n(self, v: Path, n: int) -> int:
        if n < 0:
            raise ValueError("n must be nonnegative")
        return self.count(self.state(v), n)

    def children(self, v: Path) -> list:
        v = tuple(v)
        return [v + (i,) for i in range(self.gamma(v))]

    def descendants(self, v: Path, k: int) -> list:
        """``Chi^k(v)`` in canonical order."""
        out = [tuple(v)]
        self.state(v)
        self._check_depth(len(v) + k)
        for _ in range(k):
            nxt = []
            for w in out:
                nxt.extend(w + (i,) for i in range(self.gamma(w)))
            out = nxt
        return out

    def sector(self, v: Path, k: int) -> list:
        """Vertices of ``S_v`` down to ``k`` levels below ``v``."""
        out = []
        for j in range(k + 1):
            out.extend(self.descendants(v, j))
        return out

    @staticmethod
    def parent(v: Path) -> Optional[Path]:
        return tuple(v)[:-1] if v else None

    def is_leaf(self, v: Path) -> bool:
        return self.gamma(v) == 0

    # levels ----------------------------------------------------------------

    def _check_depth(self, depth: int) -> None:
        if depth > self.max_depth:
            raise DepthLimitError(f"requested depth {depth} exceeds TREESHIFT_MAX_DEPTH={self.max_depth}")

    @property
    def realized_depth(self) -> int:
        return len(self._levels) - 1

    def level(self, L: int) -> tuple:
        """All vertices at level ``L``, canonical order (realizes lazily)."""
        self._check_depth(L)
        with self._lock:
            while len(self._levels) <= L:
                nxt = []
                for v in self._levels[-1]:
                    nxt.extend(v + (i,) for i in range(self.gamma(v)))
                self._levels.append(tuple(nxt))
            return self._levels[L]

    def iter_vertices(self, depth: int) -> Iterator[Path]:
        for L in range(depth + 1):
            yield from self.level(L)

    def level_classes(self, L: int) -> tuple:
        """Level ``L`` grouped by (parent state, state); cheap even at large ``L``."""
        self._check_depth(L)
        with self._lock:
            while len(self._classes) <= L:
                seen = {}
                for cls in self._classes[-1]:
                    for i in range(self.degree_of_state(cls.state)):
                        s = self.child_state(cls.state, i)
                        key = (cls.state, s)
                        if key not in seen:
                            seen[key] = LevelClass(cls.rep + (i,), s, cls.state)
                self._classes.append(tuple(seen.values()))
            return self._classes[L]

    def first_at_level(self, L: int) -> Path:
        return self.level_classes(L)[0].rep

    def flat(self, depth: int) -> FlatTree:
        paths = []
        level_start = [0]
        for L in range(depth + 1):
            paths.extend(self.level(L))
            level_start.append(len(paths))
        V = len(paths)
        index = {v: i for i, v in enumerate(paths)}
        parent = np.full(V, -1, dtype=np.int64)
        level = np.zeros(V, dtype=np.int64)
        degree = np.zeros(V, dtype=np.int64)
        for i, v in enumerate(paths):
            level[i] = len(v)
            degree[i] = self.gamma(v)
            if v:
                parent[i] = index[v[:-1]]
        child_start = np.empty(V + 1, dtype=np.int64)
        child_start[0] = 1
        np.cumsum(degree, out=child_start[1:])
        child_start[1:] += 1
        return FlatTree(depth, tuple(paths), MappingProxyType(index), parent, level, degree,
                        child_start, np.asarray(level_start, dtype=np.int64))

    # global structure -----------------------------------------------------

    def homogeneous_degree(self) -> Optional[int]:
        """``γ`` if the tree is homogeneous of order ``γ``."""
        return self.sector_degree(self.root_state)

    def hbs_level(self) -> Optional[int]:
        if self._hbs is _UNSET:
            self._hbs = self._hbs_from(self.root_state, 0)
        return self._hbs

    def _hbs_from(self, s, depth: int) -> Optional[int]:
        if self.sector_degree(s) is not None:
            return depth
        if s[0] != "x":
            return None
        best = depth
        for i in range(self.degree_of_state(s)):
            h = self._hbs_from(self.child_state(s, i), depth + 1)
            if h is None:
                return None
            best = max(best, h)
        return best

    def leaves(self) -> list:
        """All leaves (only explicit ones can exist under the tail rules)."""
        out = [v for v, c in self.spec.prefix.items() if c == 0]
        out += [v for v, r in self.spec.tails.items() if r.degree_at(0) == 0]
        return sorted(out, key=vertex_key)

    def has_free_end(self) -> bool:
        return any(self.sector_degree(s) == 1 for s in self.states())

    def free_end_vertex(self) -> Optional[Path]:
        """A vertex ``v*`` with ``S_{v*}`` a free end and ``γ(par v*) = 1``."""
        for L in range(1, self.max_depth):
            for cls in self.level_classes(L):
                if self.sector_degree(cls.state) == 1 and self.sector_degree(cls.parent_state) == 1:
                    return cls.rep
            if L > len(self.spec.prefix) + len(self.spec.tails) + 2:
                return None
        return None


_UNSET = object()


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def parent_n(tree: TreeView, v: Path, n: int) -> Optional[Path]:
    """``par^n(v)`` or ``None`` when ``v`` is not in ``T^n`` (i.e. ``|v| < n``)."""
    if n < 1:
        raise ValueError("n must be positive")
    tree.state(v)
    return tuple(v)[:-n] if len(v) >= n else None


def gamma(tree: TreeView, v: Path) -> int:
    return tree.gamma(v)


def gamma_n(tree: TreeView, v: Path, n: int) -> int:
    return tree.gamma_n(v, n)


def is_free_end(tree: TreeView, v: Path) -> bool:
    return tree.sector_degree(tree.state(v)) == 1


def hbs_level(spec: Union[TreeSpec, TreeView]) -> Optional[int]:
    """Smallest ``N`` with every level-``N`` sector constant-degree, or ``None``."""
    tree = spec if isinstance(spec, TreeView) else TreeView(spec)
    return tree.hbs_level()


def leaf_ancestor_set(tree: TreeView, depth: int) -> frozenset:
    """Leaves up to ``depth`` together with all their ancestors."""
    out = set()
    for leaf in tree.leaves():
        if len(leaf) <= depth:
            out.update(leaf[:k] for k in range(len(leaf) + 1))
    return frozenset(out)


@dataclass(frozen=True)
class BoundConstants:
    """Combinatorial constants controlling the estimates for ``‖B‖``.

    ``Lambda`` and ``Omega`` are ``math.inf`` when the tree is not
    homogeneous by sectors.
    """

    Lambda: Union[int, float]
    Gamma: int
    Omega: Union[int, float]
    GammaPrime: int
    GammaDoublePrime: int
    hbs_level: Optional[int]
    root_degree: int

    @property
    def upper_lambda(self):
        return max(2 * self.root_degree, self.Lambda)

    @property
    def upper_gamma_omega(self):
        return max(2 * self.root_degree, 3 * self.Gamma - 2 + self.Omega)

    @property
    def lower_gamma_prime(self):
        return max(2 * self.root_degree, 3 * self.GammaPrime - 2)

    @property
    def lower_gamma_double_prime(self):
        return self.GammaDoublePrime + 2 * self.root_degree - 2


def lambda_term(g_v: int, g_par: int, level: int) -> int:
    return g_v + g_par - 1 + abs(g_v - 1) + abs(g_v - g_par) * level


def bound_constants(tree: TreeView) -> BoundConstants:
    N = tree.hbs_level()
    root_degree = tree.degree_of_state(tree.root_state)
    gamma_sup = max(tree.degree_of_state(s) for s in tree.states())
    if N is None:
        star = [tree.degree_of_state(s) for s in tree.states() if s != tree.root_state or s[0] != "x"]
        level1 = [tree.degree_of_state(c.state) for c in tree.level_classes(1)]
        return BoundConstants(math.inf, gamma_sup, math.inf, max(star), max(level1), None, root_degree)
    lam = omega = 0
    gamma_prime = 0
    gamma_max = root_degree
    # |v| = N + 1 is where every sector has frozen; one level past is harmless
    for L in range(1, N + 2):
        for cls in tree.level_classes(L):
            g_v = tree.degree_of_state(cls.state)
            g_p = tree.degree_of_state(cls.parent_state)
            lam = max(lam, lambda_term(g_v, g_p, L))
            omega = max(omega, abs(g_v - g_p) * L)
            gamma_max = max(gamma_max, g_v)
            if L <= max(N, 1):
                gamma_prime = max(gamma_prime, g_v)
    gamma_dp = max(tree.degree_of_state(c.state) for c in tree.level_classes(1))
    return BoundConstants(lam, gamma_max, omega, gamma_prime, gamma_dp, N, root_degree)
