"""Seeded generation of tree specs and test functions.

All randomness goes through a ``random.Random`` instance, so a seed fully
determines the output.
"""

from __future__ import annotations

import json
import os
import random
from fractions import Fraction

from .errors import PreconditionError
from .functions import FiniteSupport
from .tree import Homogeneous, LevelPeriodic, TreeSpec, TreeView

KINDS = ("hbs", "free_end", "non_hbs")
PERIODIC_RULES = ((2, 3), (1, 2), (3, 1, 2), (2, 4), (3, 2))


def random_hbs_spec(rng: random.Random, max_prefix_depth: int = 4, max_degree: int = 4,
                    leafless: bool = False, free_ends: bool = True) -> TreeSpec:
    """A random spec homogeneous by sectors at a level ``<= max_prefix_depth``.

    ``free_ends=False`` keeps every tail degree at least 2, which rules out
    free ends. ``leafless=True`` forbids explicit leaves and degree-0 tails.
    """
    low_tail = 2 if not free_ends else 1
    prefix, tails = {}, {}

    def tail_degree():
        if not leafless and rng.random() < 0.1:
            return 0
        return rng.randint(low_tail, max_degree) if low_tail <= max_degree else max_degree

    frontier = [()]
    while frontier:
        v = frontier.pop(0)
        depth = len(v)
        expand = depth < max_prefix_depth and rng.random() < (0.85 if depth == 0 else 0.55 / depth)
        if not expand:
            tails[v] = Homogeneous(tail_degree())
            continue
        if depth > 0 and not leafless and rng.random() < 0.08:
            prefix[v] = 0
            continue
        c = rng.randint(1, min(max_degree, 3 if depth >= 2 else max_degree))
        prefix[v] = c
        frontier.extend(v + (i,) for i in range(c))
    if not any(r.degree > 0 for r in tails.values()):
        first = min(tails, key=lambda p: (len(p), p))
        tails[first] = Homogeneous(max(low_tail, 2) if not free_ends else rng.randint(1, max_degree))
    return TreeSpec(prefix, tails)


def free_end_spec(rng: random.Random, max_prefix_depth: int = 3, max_degree: int = 4) -> TreeSpec:
    """HBS spec with at least one ``Homogeneous(1)`` tail."""
    base = random_hbs_spec(rng, max_prefix_depth, max_degree, leafless=True, free_ends=False)
    tails = dict(base.tails)
    pick = rng.choice(sorted(tails, key=lambda p: (len(p), p)))
    tails[pick] = Homogeneous(1)
    return TreeSpec(base.prefix, tails)


def non_hbs_spec(rng: random.Random, max_prefix_depth: int = 2, max_degree: int = 4) -> TreeSpec:
    """Spec with a non-constant level-periodic tail, so ``B`` is unbounded."""
    base = random_hbs_spec(rng, max_prefix_depth, max_degree, leafless=True)
    tails = dict(base.tails)
    pick = rng.choice(sorted(tails, key=lambda p: (len(p), p)))
    tails[pick] = LevelPeriodic(rng.choice(PERIODIC_RULES))
    return TreeSpec(base.prefix, tails)


def generate_corpus(seed: int, count: int) -> list:
    """``[(name, kind, spec)]``; kinds rotate hbs, hbs, free_end, non_hbs, hbs, ..."""
    if not 0 <= count <= 1000:
        raise PreconditionError("count must be between 0 and 1000")
    rng = random.Random(seed)
    pattern = ("hbs", "hbs", "free_end", "non_hbs")
    out = []
    for i in range(count):
        kind = pattern[i % len(pattern)]
        if kind == "hbs":
            spec = random_hbs_spec(rng)
        elif kind == "free_end":
            spec = free_end_spec(rng)
        else:
            spec = non_hbs_spec(rng)
        out.append((f"tree_{i:04d}_{kind}", kind, spec))
    return out


def write_corpus(seed: int, count: int, out_dir) -> dict:
    os.makedirs(out_dir, exist_ok=True)
    entries = []
    for name, kind, spec in generate_corpus(seed, count):
        path = os.path.join(out_dir, name + ".json")
        spec.dump(path)
        entries.append({
            "file": name + ".json",
            "kind": kind,
            "fingerprint": spec.fingerprint(),
            "hbs_level": TreeView(spec).hbs_level(),
        })
    manifest = {"seed": seed, "count": count, "files": entries}
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest


def random_finite_support(rng: random.Random, tree: TreeView, depth: int, size: int = 6,
                          lo: int = -5, hi: int = 5, denominators=(1, 2, 3)) -> FiniteSupport:
    """Up to ``size`` random exact values on vertices of level ``<= depth``."""
    values = {}
    for _ in range(size):
        v = ()
        target = rng.randint(0, depth)
        for _ in range(target):
            d = tree.gamma(v)
            if d == 0:
                break
            v = v + (rng.randrange(d),)
        values[v] = Fraction(rng.randint(lo, hi), rng.choice(denominators))
    return FiniteSupport(values)

