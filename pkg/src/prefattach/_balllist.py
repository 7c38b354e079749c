"""numba kernels for proportional selection via an append-only ball list.

One array entry per unit of weight; a uniform index picks an owner with
probability proportional to its weight, and an increment is one append. Both
operations are O(1), memory is O(total weight).
"""
from __future__ import annotations

import numba
import numpy as np


@numba.njit(nogil=True, cache=True)
def _draw(rng, balls, length):
    idx = int(rng.random() * length)
    if idx >= length:  # guards u * length rounding up to length
        idx = length - 1
    return balls[idx]


@numba.njit(nogil=True, cache=True)
def graph_run(looping, ell, weights0, n, r, rng, balls, record_path, record_edges, check):
    """One trajectory of Model N (looping=False) or Model L (looping=True).

    Vertices are 0-based. Returns (tracked weights of the first r vertices,
    final total weight, path (n+1, r) or empty, edges (n*ell, 2) or empty).
    ``balls`` is a caller-provided buffer of length >= sum(weights0) + (ell+1) n.
    """
    s = weights0.shape[0]
    length = 0
    for v in range(s):
        for _ in range(weights0[v]):
            balls[length] = v
            length += 1
    total0 = length
    tracked = np.zeros(r, dtype=np.int64)
    for v in range(min(r, s)):
        tracked[v] = weights0[v]
    path = np.empty((n + 1 if record_path else 0, r), dtype=np.int64)
    edges = np.empty((n * ell if record_edges else 0, 2), dtype=np.int64)
    if record_path:
        path[0, :] = tracked
    e = 0
    for step in range(1, n + 1):
        v = s + step - 1
        if looping:
            balls[length] = v
            length += 1
            if v < r:
                tracked[v] += 1
        for _ in range(ell):
            tgt = _draw(rng, balls, length)
            balls[length] = tgt
            length += 1
            if tgt < r:
                tracked[tgt] += 1
            if record_edges:
                edges[e, 0] = v
                edges[e, 1] = tgt
                e += 1
        if not looping:
            balls[length] = v
            length += 1
            if v < r:
                tracked[v] += 1
        if check and length != total0 + (ell + 1) * step:
            raise AssertionError("total weight bookkeeping violated")
        if record_path:
            path[step, :] = tracked
    return tracked, length, path, edges


@numba.njit(nogil=True, cache=True)
def graph_batch(looping, ell, weights0, n, r, reps, rng):
    cap = weights0.sum() + (ell + 1) * n
    balls = np.empty(cap, dtype=np.int32)
    out = np.empty((reps, r), dtype=np.int64)
    for i in range(reps):
        tracked, _, _, _ = graph_run(looping, ell, weights0, n, r, rng, balls, False, False, False)
        out[i, :] = tracked
    return out


@numba.njit(nogil=True, cache=True)
def urn_run(ell, counts0, n, r, rng, balls, record_path):
    """Infinite-color urn: after every ell-th draw a ball of a new color arrives.

    Returns (cumulative counts M_1..M_r at time n, path (n+1, r) or empty).
    """
    s = counts0.shape[0]
    length = 0
    for c in range(s):
        for _ in range(counts0[c]):
            balls[length] = c
            length += 1
    cnt = np.zeros(r, dtype=np.int64)
    for c in range(min(r, s)):
        cnt[c] = counts0[c]
    path = np.empty((n + 1 if record_path else 0, r), dtype=np.int64)
    if record_path:
        path[0, :] = np.cumsum(cnt)
    for step in range(1, n + 1):
        c = _draw(rng, balls, length)
        balls[length] = c
        length += 1
        if c < r:
            cnt[c] += 1
        if step % ell == 0:
            newc = s + step // ell - 1
            balls[length] = newc
            length += 1
            if newc < r:
                cnt[newc] += 1
        if record_path:
            path[step, :] = np.cumsum(cnt)
    return np.cumsum(cnt), path


@numba.njit(nogil=True, cache=True)
def urn_batch(ell, counts0, n, r, reps, rng):
    cap = counts0.sum() + n + n // ell
    balls = np.empty(cap, dtype=np.int32)
    out = np.empty((reps, r), dtype=np.int64)
    for i in range(reps):
        m, _ = urn_run(ell, counts0, n, r, rng, balls, False)
        out[i, :] = m
    return out
