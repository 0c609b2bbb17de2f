"""Array kernels on breadth-first tree layouts (see :class:`treeshift.tree.FlatTree`).

Every kernel has a numba-compiled version and a pure numpy version with the
same signature. The numba versions are used when numba imports and the
environment variable ``TREESHIFT_DISABLE_NUMBA`` is unset or ``0``.

Arrays are ``int64`` throughout so results stay exact; batches of functions
are rows of a 2-D array indexed by flat vertex number.
"""

import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda fn: fn


def _numba_requested() -> bool:
    return os.environ.get("TREESHIFT_DISABLE_NUMBA", "0") in ("", "0")


USE_NUMBA = NUMBA_AVAILABLE and _numba_requested()


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def _derivative_nb(parent, F):
    out = F.copy()
    for b in range(F.shape[0]):
        for i in range(1, F.shape[1]):
            out[b, i] = F[b, i] - F[b, parent[i]]
    return out


@njit(cache=True)
def _backward_power_nb(parent, level, F, n):
    out = np.zeros_like(F)
    V = F.shape[1]
    for i in range(V):
        if level[i] < n:
            continue
        p = i
        for _ in range(n):
            p = parent[p]
        for b in range(F.shape[0]):
            out[b, p] += F[b, i]
    return out


@njit(cache=True)
def _count_nb(child_start, i, m):
    lo = i
    hi = i + 1
    for _ in range(m):
        lo = child_start[lo]
        hi = child_start[hi]
    return hi - lo


@njit(cache=True)
def _sector_part_nb(child_start, v, n):
    # sum over u in S_v down to depth n of |c(u)| for a non-root target v
    total = 0
    lo = v
    hi = v + 1
    for k in range(n):
        for u in range(lo, hi):
            total += abs(_count_nb(child_start, u, n - k) - _count_nb(child_start, u, n - k - 1))
        lo = child_start[lo]
        hi = child_start[hi]
    return total + (hi - lo)


@njit(cache=True)
def _row_l1_nb(parent, level, degree, child_start, n, max_level):
    V = parent.shape[0]
    out = np.full(V, -1, dtype=np.int64)
    for v in range(V):
        if level[v] > max_level:
            break
        if v == 0:
            out[0] = (n + 1) * _count_nb(child_start, 0, n)
            continue
        p = parent[v]
        total = level[v] * abs(_count_nb(child_start, v, n) - _count_nb(child_start, p, n))
        total += _sector_part_nb(child_start, v, n)
        first = child_start[p]
        for s in range(first, first + degree[p]):
            if s == v:
                continue
            lo = s
            hi = s + 1
            for j in range(1, n + 1):
                for u in range(lo, hi):
                    total += _count_nb(child_start, u, n - j)
                lo = child_start[lo]
                hi = child_start[hi]
        out[v] = total
    return out


@njit(cache=True)
def _csr_dot_nb(indptr, indices, data, X):
    R = indptr.shape[0] - 1
    out = np.zeros((X.shape[0], R), dtype=np.int64)
    for r in range(R):
        for k in range(indptr[r], indptr[r + 1]):
            c = data[k]
            j = indices[k]
            for b in range(X.shape[0]):
                out[b, r] += c * X[b, j]
    return out


# ---------------------------------------------------------------------------
# numpy versions
# ---------------------------------------------------------------------------


def _derivative_np(parent, F):
    out = F.copy()
    out[:, 1:] = F[:, 1:] - F[:, parent[1:]]
    return out


def _backward_power_np(parent, level, F, n):
    cur = F
    for _ in range(n):
        nxt = np.zeros_like(F)
        np.add.at(nxt.T, parent[1:], cur[:, 1:].T)
        cur = nxt
    return cur


def _counts_np(child_start, idx, m):
    lo = np.asarray(idx, dtype=np.int64)
    hi = lo + 1
    for _ in range(m):
        lo = child_start[lo]
        hi = child_start[hi]
    return hi - lo


def _row_l1_np(parent, level, degree, child_start, n, max_level):
    V = parent.shape[0]
    out = np.full(V, -1, dtype=np.int64)
    last = int(np.searchsorted(level, max_level, side="right"))
    out[0] = (n + 1) * _counts_np(child_start, [0], n)[0]
    for v in range(1, last):
        p = parent[v]
        total = int(level[v]) * abs(int(_counts_np(child_start, [v], n)[0] - _counts_np(child_start, [p], n)[0]))
        lo, hi = v, v + 1
        for k in range(n):
            u = np.arange(lo, hi)
            total += int(np.abs(_counts_np(child_start, u, n - k) - _counts_np(child_start, u, n - k - 1)).sum())
            lo, hi = child_start[lo], child_start[hi]
        total += int(hi - lo)
        first = child_start[p]
        sibs = np.array([s for s in range(first, first + degree[p]) if s != v], dtype=np.int64)
        for s in sibs:
            lo, hi = s, s + 1
            for j in range(1, n + 1):
                total += int(_counts_np(child_start, np.arange(lo, hi), n - j).sum())
                lo, hi = child_start[lo], child_start[hi]
        out[v] = total
    return out


def _csr_dot_np(indptr, indices, data, X):
    rows = np.repeat(np.arange(indptr.shape[0] - 1), np.diff(indptr))
    out = np.zeros((X.shape[0], indptr.shape[0] - 1), dtype=np.int64)
    np.add.at(out.T, rows, (X[:, indices] * data).T)
    return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def _as_batch(F):
    F = np.asarray(F, dtype=np.int64)
    return F[None, :] if F.ndim == 1 else F


def derivative_dense(flat, F, use_numba=None):
    """``f'`` for each row of ``F``."""
    F = _as_batch(F)
    fn = _derivative_nb if _pick(use_numba) else _derivative_np
    return fn(flat.parent, F)


def backward_power_dense(flat, F, n, use_numba=None):
    """``B^n f`` for each row of ``F``; exact at vertices whose ``n``-children are all realized."""
    F = _as_batch(F)
    fn = _backward_power_nb if _pick(use_numba) else _backward_power_np
    return fn(flat.parent, flat.level, F, int(n))


def row_l1_dense(flat, n, max_level, use_numba=None):
    """``l1`` of the coefficient row of every vertex up to ``max_level`` (``-1`` beyond)."""
    if max_level + n > flat.depth:
        raise ValueError(f"rows at level {max_level} for power {n} need depth {max_level + n}, have {flat.depth}")
    fn = _row_l1_nb if _pick(use_numba) else _row_l1_np
    return fn(flat.parent, flat.level, flat.degree, flat.child_start, int(n), int(max_level))


def csr_dot(indptr, indices, data, X, use_numba=None):
    """``out[b, r] = sum_k data[k] X[b, indices[k]]`` over row ``r`` of a CSR matrix."""
    X = _as_batch(X)
    fn = _csr_dot_nb if _pick(use_numba) else _csr_dot_np
    return fn(np.asarray(indptr, np.int64), np.asarray(indices, np.int64), np.asarray(data, np.int64), X)


def _pick(use_numba):
    if use_numba is None:
        return USE_NUMBA
    if use_numba and not NUMBA_AVAILABLE:
        raise RuntimeError("numba requested but not importable")
    return bool(use_numba)
