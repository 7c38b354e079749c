"""Remy's algorithm for uniform binary plane trees and its bijection with Model L_1.

Trees are flat arrays (parent/left/right, -1 for none). The initial tree is a
root with two leaves; each step picks one of the 2j-1 vertices uniformly,
replaces it by a new internal vertex whose children are the old vertex and a
new leaf (the side decided by a fair coin).

Tree vertex ids line up with the ball list of Model L_1 started from a loop:
vertex x "belongs" to the smallest leaf label in its subtree, and the number of
vertices belonging to leaf j is the weight of graph vertex j. Hence the
spanning tree of leaves 1..j has exactly d_1 + ... + d_j vertices.
"""
from __future__ import annotations

import csv
import io
import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numba
import numpy as np

from .errors import ParameterError
from .rng import RngStream, as_generator


@numba.njit(nogil=True, cache=True)
def _cherry(parent, left, right, v, u, leaf, leaf_left):
    p = parent[v]
    parent[u] = p
    if p >= 0:
        if left[p] == v:
            left[p] = u
        else:
            right[p] = u
    parent[v] = u
    parent[leaf] = u
    left[leaf] = -1
    right[leaf] = -1
    if leaf_left:
        left[u] = leaf
        right[u] = v
    else:
        left[u] = v
        right[u] = leaf


@numba.njit(nogil=True, cache=True)
def _init_tree(m):
    size = 2 * m - 1
    parent = np.full(size, -1, dtype=np.int64)
    left = np.full(size, -1, dtype=np.int64)
    right = np.full(size, -1, dtype=np.int64)
    leaves = np.empty(m, dtype=np.int64)  # vertex id of leaf with label i+1
    left[0] = 1
    right[0] = 2
    parent[1] = 0
    parent[2] = 0
    leaves[0] = 1
    leaves[1] = 2
    return parent, left, right, leaves


@numba.njit(nogil=True, cache=True)
def _grow(m, rng):
    parent, left, right, leaves = _init_tree(m)
    for j in range(2, m):
        count = 2 * j - 1
        v = min(int(rng.random() * count), count - 1)
        _cherry(parent, left, right, v, count, count + 1, rng.random() < 0.5)
        leaves[j] = count + 1
    return parent, left, right, leaves


@numba.njit(nogil=True, cache=True)
def _spanning(parent, leaf_ids, root):
    marked = np.zeros(parent.shape[0], dtype=np.bool_)
    marked[root] = True
    out = np.empty(leaf_ids.shape[0], dtype=np.int64)
    total = 1
    for j in range(leaf_ids.shape[0]):
        x = leaf_ids[j]
        while not marked[x]:
            marked[x] = True
            total += 1
            x = parent[x]
        out[j] = total
    return out


@numba.njit(nogil=True, cache=True)
def _root(parent):
    x = 0
    while parent[x] >= 0:
        x = parent[x]
    return x


@numba.njit(nogil=True, cache=True)
def _spanning_batch(m, k, reps, rng):
    out = np.empty((reps, k), dtype=np.int64)
    for i in range(reps):
        parent, left, right, leaves = _grow(m, rng)
        # partial Fisher-Yates: a uniform k-subset in uniform order
        for j in range(k):
            t = j + min(int(rng.random() * (m - j)), m - j - 1)
            tmp = leaves[j]
            leaves[j] = leaves[t]
            leaves[t] = tmp
        out[i, :] = _spanning(parent, leaves[:k], _root(parent))
    return out


@numba.njit(nogil=True, cache=True)
def _coupled(n, k, rng):
    """One shared uniform per step drives a Remy tree and Model L_1 from a loop.

    Returns (T, S, tree arrays): T[t, j-1] is the spanning size of leaves 1..j
    after t steps (-1 if leaf j is absent), S[t, j-1] = d_1 + ... + d_j (-1 if
    vertex j is absent).
    """
    m = n + 2
    parent, left, right, leaves = _init_tree(m)
    # tree side: mark[x] = smallest label <= k among leaves below x (k+1 if none)
    size = 2 * m - 1
    mark = np.full(size, k + 1, dtype=np.int64)
    per_label = np.zeros(k + 2, dtype=np.int64)
    mark[0] = 1
    mark[1] = 1
    per_label[1] = 2
    if k >= 2:
        mark[2] = 2
        per_label[2] = 1
    # graph side: ball list and weights, vertices 0-based
    balls = np.empty(2 * n + 3, dtype=np.int64)
    weights = np.zeros(n + 2, dtype=np.int64)
    balls[0] = 0
    balls[1] = 0
    weights[0] = 2
    length = 2
    T = np.full((n + 1, k), -1, dtype=np.int64)
    S = np.full((n + 1, k), -1, dtype=np.int64)
    for t in range(n + 1):
        if t > 0:
            # graph: new vertex t (0-based) arrives with weight one, then draws
            balls[length] = t
            length += 1
            weights[t] += 1
            u01 = rng.random()
            idx = min(int(u01 * length), length - 1)
            tgt = balls[idx]
            balls[length] = tgt
            length += 1
            weights[tgt] += 1
            # tree: the same index selects the vertex receiving the cherry
            count = 2 * t + 1
            v = min(int(u01 * count), count - 1)
            u = count
            leaf = count + 1
            label = t + 2
            _cherry(parent, left, right, v, u, leaf, rng.random() < 0.5)
            leaves[t + 1] = leaf
            if label <= k:
                mark[leaf] = label
                per_label[label] += 1
            if mark[v] <= k or label > k:
                # u sits above v and inherits its smallest label
                mark[u] = mark[v]
                per_label[mark[u]] += 1
            else:
                # a newly marked leaf under unmarked v: walk up to the marked part
                x = u
                while x >= 0 and mark[x] > k:
                    mark[x] = label
                    per_label[label] += 1
                    x = parent[x]
        acc = 0
        for j in range(1, min(k, t + 2) + 1):
            acc += per_label[j]
            T[t, j - 1] = acc
        acc = 0
        for j in range(min(k, t + 1)):
            acc += weights[j]
            S[t, j] = acc
    return T, S, parent, left, right, leaves


@dataclass(frozen=True)
class PlaneTree:
    parent: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaves: np.ndarray  # vertex id of the leaf with insertion label i+1

    @property
    def m(self) -> int:
        return int(self.leaves.shape[0])

    @property
    def n_vertices(self) -> int:
        return int(self.parent.shape[0])

    @property
    def root(self) -> int:
        return int(_root(self.parent))

    def is_full_binary(self) -> bool:
        has_l, has_r = self.left >= 0, self.right >= 0
        return bool(np.all(has_l == has_r)) and int(np.count_nonzero(~has_l)) == self.m

    def to_parens(self) -> str:
        """Balanced-parenthesis form: a leaf is "()", an internal vertex "(" L R ")"."""
        out = []
        stack = [(self.root, 0)]
        while stack:
            x, state = stack.pop()
            if state == 1:
                out.append(")")
                continue
            out.append("(")
            stack.append((x, 1))
            if self.left[x] >= 0:
                stack.append((int(self.right[x]), 0))
                stack.append((int(self.left[x]), 0))
        return "".join(out)


def remy_grow(m: int, rng: RngStream | np.random.Generator) -> PlaneTree:
    """Uniform binary plane tree with ``m >= 2`` leaves, leaves labeled by insertion order."""
    if int(m) != m or m < 2:
        raise ParameterError("need at least 2 leaves")
    parent, left, right, leaves = _grow(int(m), as_generator(rng))
    return PlaneTree(parent, left, right, leaves)


def spanning_sizes(tree: PlaneTree, k: int, labels=None) -> np.ndarray:
    """T_1..T_k: vertex counts of the subtree spanned by the root and leaves 1..j.

    ``labels`` gives the vertex ids of leaves 1..k; default is insertion order.
    """
    if int(k) != k or not 1 <= k <= tree.m:
        raise ParameterError(f"k must lie in [1, {tree.m}]")
    ids = tree.leaves[:k] if labels is None else np.asarray(labels, dtype=np.int64)[:k]
    return _spanning(tree.parent, np.ascontiguousarray(ids), tree.root)


def spanning_sizes_random(tree: PlaneTree, k: int, rng: RngStream | np.random.Generator) -> np.ndarray:
    """Spanning sizes for a uniformly random k-subset of leaves in uniformly random order."""
    if int(k) != k or not 1 <= k <= tree.m:
        raise ParameterError(f"k must lie in [1, {tree.m}]")
    g = as_generator(rng)
    return spanning_sizes(tree, k, g.permutation(tree.leaves)[:k])


def spanning_sizes_batch(m: int, k: int, reps: int, rng: RngStream | np.random.Generator) -> np.ndarray:
    """``reps`` independent uniform trees with ``m`` leaves, random labeling; shape (reps, k)."""
    if m < 2 or not 1 <= k <= m:
        raise ParameterError("need m >= 2 and 1 <= k <= m")
    return _spanning_batch(int(m), int(k), int(reps), as_generator(rng))


@dataclass
class CoupledRemyTrace:
    spanning: np.ndarray  # (n+1, k), -1 where undefined
    cumulative_weights: np.ndarray  # (n+1, k), -1 where undefined
    tree: PlaneTree

    def mismatches(self) -> int:
        both = (self.spanning >= 0) & (self.cumulative_weights >= 0)
        return int(np.count_nonzero(self.spanning[both] != self.cumulative_weights[both]))

    def to_csv(self) -> str:
        """Rows (step, T_1..T_k, S_1..S_k); -1 marks entries not yet defined."""
        k = self.spanning.shape[1]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", *[f"T_{j}" for j in range(1, k + 1)], *[f"S_{j}" for j in range(1, k + 1)]])
        for t, (a, b) in enumerate(zip(self.spanning.tolist(), self.cumulative_weights.tolist())):
            w.writerow([t, *a, *b])
        return buf.getvalue()


def coupled_remy_modelL(n: int, k: int, rng: RngStream | np.random.Generator) -> CoupledRemyTrace:
    """Run Remy's algorithm and Model L_1 (loop seed) on one shared uniform per step."""
    if n < 1 or k < 1:
        raise ParameterError("need n >= 1 and k >= 1")
    T, S, parent, left, right, leaves = _coupled(int(n), int(k), as_generator(rng))
    return CoupledRemyTrace(T, S, PlaneTree(parent, left, right, leaves))


def plane_trees(m: int) -> list[str]:
    """All binary plane trees with ``m`` leaves in parenthesis form (Catalan(m-1) of them)."""
    if m == 1:
        return ["()"]
    out = []
    for i in range(1, m):
        for a in plane_trees(i):
            for b in plane_trees(m - i):
                out.append("(" + a + b + ")")
    return out


def _parse(tree: str):
    """Parenthesis string -> (parent list, leaf ids in left-to-right order, root)."""
    parent, leaves, stack = [], [], []
    for ch in tree:
        if ch == "(":
            parent.append(stack[-1] if stack else -1)
            stack.append(len(parent) - 1)
        else:
            x = stack.pop()
            if not any(p == x for p in parent[x + 1:]):
                leaves.append(x)
    return parent, leaves


def exact_spanning_law(m: int, k: int) -> dict[tuple[int, ...], Fraction]:
    """Exact law of (T_1..T_k) for a uniform plane tree with m leaves and a
    uniformly random ordered choice of k distinct leaves."""
    law: Counter = Counter()
    trees = plane_trees(m)
    for t in trees:
        parent, leaves = _parse(t)
        par = np.asarray(parent, dtype=np.int64)
        for choice in itertools.permutations(leaves, k):
            law[tuple(int(x) for x in _spanning(par, np.asarray(choice, dtype=np.int64), 0))] += 1
    total = sum(law.values())
    return {key: Fraction(c, total) for key, c in law.items()}
