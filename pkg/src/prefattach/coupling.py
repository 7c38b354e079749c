"""Explicit coupling of a Polya urn count X ~ Pol(b, w, n) with Y ~ Beta(w, b).

Base case (one black ball): with V_0..V_{w-1} iid uniform,
    Y = max V_k,   N(m) = max_k (k + ceil((m + w - k) V_k)),
and each N(m) has law Pol(1, w, m) with |N(m) - m Y| <= w + 1.

Level b splits the b black balls into b-1 black and one grey ball. The count of
non-grey balls is a one-black urn with w+b-1 whites, N'_b; given it, the white
count is a Pol(b-1, w, .) urn run for N'_b(m) - (w+b-1) draws:
    N_b(m) = N_{b-1}(N'_b(m) - (w+b-1)),   Y_b = Y_{b-1} Y'_b,  Y'_b ~ Beta(w+b-1, 1).
The resulting error satisfies |N_b(n) - n Y_b| <= b (4w + b + 1) / 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ParameterError
from .io import SampleBatch
from .rng import RngStream, as_generator

_TIE_TOL = 1e-12


def _exact_ceil(mult: int, v: float) -> int:
    return math.ceil(mult * Fraction(v))


def _ceil_products(mult: np.ndarray, V: np.ndarray) -> np.ndarray:
    """ceil(mult * V) elementwise; near-integer products are redone in exact arithmetic."""
    prod = mult * V
    out = np.ceil(prod)
    near = np.abs(prod - np.rint(prod)) < _TIE_TOL * np.maximum(1.0, prod)
    if near.any():
        for idx in zip(*np.nonzero(near)):
            out[idx] = _exact_ceil(int(mult[idx]), float(V[idx]))
    return out.astype(np.int64)


def _uniform_open(g: np.random.Generator, shape) -> np.ndarray:
    # (0, 1]: a zero would give N(m) < w
    return 1.0 - g.random(shape)


def base_eval(V: np.ndarray, m: np.ndarray) -> np.ndarray:
    """N(m) for a batch: V has shape (size, w), m has shape (size,) or is scalar."""
    V = np.atleast_2d(V)
    w = V.shape[1]
    k = np.arange(w)
    m = np.broadcast_to(np.asarray(m, dtype=np.int64), (V.shape[0],))
    if np.any(m < 0):
        raise ParameterError("number of draws must be nonnegative")
    mult = m[:, None] + w - k[None, :]
    return np.max(k[None, :] + _ceil_products(mult, V), axis=1)


@dataclass(frozen=True)
class CoupledPath:
    """Base-case coupling for one black ball and ``w`` white balls; N is evaluated lazily."""

    V: tuple[float, ...]

    @property
    def w(self) -> int:
        return len(self.V)

    @property
    def Y(self) -> float:
        return max(self.V)

    def N(self, m: int) -> int:
        if m < 0:
            raise ParameterError("number of draws must be nonnegative")
        return max(k + _exact_ceil(m + self.w - k, v) for k, v in enumerate(self.V))


def couple_base(w: int, rng: RngStream | np.random.Generator) -> CoupledPath:
    if int(w) != w or w < 1:
        raise ParameterError("w must be a positive integer")
    g = as_generator(rng)
    return CoupledPath(tuple(float(v) for v in _uniform_open(g, w)))


def coupling_bound(b: int, w: int) -> Fraction:
    return Fraction(b * (4 * w + b + 1), 2)


@dataclass(frozen=True)
class CoupledPair:
    X: int
    Y: float
    bound: Fraction
    n: int
    b: int
    w: int

    @property
    def violation(self) -> bool:
        return abs(Fraction(self.X) - self.n * Fraction(self.Y)) > self.bound


@dataclass
class CoupledBatch:
    X: np.ndarray
    Y: np.ndarray
    bound: Fraction
    n: int
    b: int
    w: int

    @property
    def errors(self) -> np.ndarray:
        return np.abs(self.X - self.n * self.Y)

    @property
    def violations(self) -> int:
        return int(np.count_nonzero(self.errors > float(self.bound)))

    def to_sample_batch(self, master_seed: int) -> SampleBatch:
        """Rows (X, Y, n, bound, violation) for export."""
        size = self.X.shape[0]
        data = np.column_stack([self.X, self.Y, np.full(size, self.n), np.full(size, float(self.bound)),
                                (self.errors > float(self.bound)).astype(np.float64)])
        return SampleBatch(data, ["X", "Y", "n", "bound", "violation"], master_seed,
                           {"b": self.b, "w": self.w, "n": self.n})


def couple_polya_beta_batch(b: int, w: int, n: int, rng: RngStream | np.random.Generator,
                            size: int, *, check: bool = True) -> CoupledBatch:
    """``size`` independent coupled pairs (X, Y).

    With ``check`` an AssertionError is raised on any |X - nY| > b(4w+b+1)/2.
    """
    for name, v, lo in (("b", b, 1), ("w", w, 1), ("n", n, 0)):
        if int(v) != v or v < lo:
            raise ParameterError(f"{name} must be an integer >= {lo}")
    g = as_generator(rng)
    # level j uses a base coupling with w + j - 1 white balls
    Vs = [_uniform_open(g, (size, w + j - 1)) for j in range(1, b + 1)]
    u = np.full(size, n, dtype=np.int64)
    for j in range(b, 1, -1):
        u = base_eval(Vs[j - 1], u) - (w + j - 1)
    X = base_eval(Vs[0], u)
    Y = np.prod([V.max(axis=1) for V in Vs], axis=0)
    batch = CoupledBatch(X, Y, coupling_bound(b, w), n, b, w)
    if check and batch.violations:
        raise AssertionError(f"coupling bound violated {batch.violations} times (b={b}, w={w}, n={n})")
    return batch


def couple_polya_beta(b: int, w: int, n: int, rng: RngStream | np.random.Generator) -> CoupledPair:
    batch = couple_polya_beta_batch(b, w, n, rng, 1)
    pair = CoupledPair(int(batch.X[0]), float(batch.Y[0]), batch.bound, n, b, w)
    # exact re-check of the float test above
    assert not pair.violation, "coupling bound violated"
    return pair
