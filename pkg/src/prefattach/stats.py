"""Empirical CDFs, Kolmogorov and total-variation distances, moments, rate fits."""
from __future__ import annotations

import math
from collections.abc import Callable, Mapping
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .errors import ParameterError


class Ecdf:
    """Right-continuous empirical CDF of a 1-d sample."""

    def __init__(self, samples):
        values = np.sort(np.asarray(samples, dtype=np.float64).ravel())
        if values.size == 0:
            raise ParameterError("empty sample")
        self.values = values
        self.count = values.size

    def __call__(self, t):
        return np.searchsorted(self.values, t, side="right") / self.count


def ks_one_sample(samples, cdf: Callable) -> float:
    """sup_t |F_n(t) - F(t)| for a continuous ``cdf`` (vectorized callable).

    Evaluated exactly at the jump points of the empirical CDF.
    """
    x = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    n = x.size
    if n == 0:
        raise ParameterError("empty sample")
    f = np.asarray(cdf(x), dtype=np.float64)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n), 0.0))


def ks_two_sample(a, b) -> float:
    """sup_t |F_a(t) - F_b(t)| over the pooled jump points."""
    a = np.sort(np.asarray(a, dtype=np.float64).ravel())
    b = np.sort(np.asarray(b, dtype=np.float64).ravel())
    if a.size == 0 or b.size == 0:
        raise ParameterError("empty sample")
    pooled = np.concatenate([a, b])
    fa = np.searchsorted(a, pooled, side="right") / a.size
    fb = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def _as_mapping(p) -> Mapping:
    return p.as_dict() if hasattr(p, "as_dict") else p


def tv_distance_exact(p, q) -> Fraction:
    """(1/2) sum |p_i - q_i| over the union of supports, in exact arithmetic.

    Accepts ``ExactPmf`` objects or plain ``{atom: Fraction}`` mappings (atoms
    may be tuples for joint laws).
    """
    p, q = _as_mapping(p), _as_mapping(q)
    total = Fraction(0)
    for atom in set(p) | set(q):
        total += abs(Fraction(p.get(atom, 0)) - Fraction(q.get(atom, 0)))
    return total / 2


def tv_distance_empirical(samples, pmf) -> float:
    """TV between the empirical law of integer samples and an exact pmf."""
    vals, counts = np.unique(np.asarray(samples).ravel(), return_counts=True)
    emp = {int(v): c / counts.sum() for v, c in zip(vals, counts)}
    pmf = _as_mapping(pmf)
    atoms = set(emp) | set(pmf)
    return 0.5 * sum(abs(emp.get(k, 0.0) - float(pmf.get(k, 0))) for k in atoms)


def tv_distance_samples(a, b) -> float:
    """TV between the empirical laws of two discrete samples."""
    va, ca = np.unique(np.asarray(a).ravel(), return_counts=True)
    vb, cb = np.unique(np.asarray(b).ravel(), return_counts=True)
    pa = dict(zip(va.tolist(), (ca / ca.sum()).tolist()))
    pb = dict(zip(vb.tolist(), (cb / cb.sum()).tolist()))
    return 0.5 * sum(abs(pa.get(k, 0.0) - pb.get(k, 0.0)) for k in set(pa) | set(pb))


@dataclass(frozen=True)
class RateFit:
    ns: tuple[float, ...]
    dks: tuple[float, ...]
    slope: float
    intercept: float
    residual: float


def rate_fit(ns, dks) -> RateFit:
    """Least-squares line through (log n, log d); residual is the RMS misfit."""
    ns = np.asarray(ns, dtype=np.float64)
    dks = np.asarray(dks, dtype=np.float64)
    if ns.size < 3 or ns.size != dks.size:
        raise ParameterError("rate_fit needs at least 3 matching (n, d) pairs")
    if np.any(dks <= 0) or np.any(ns <= 0):
        raise ParameterError("scales and distances must be positive")
    lx, ly = np.log(ns), np.log(dks)
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return RateFit(tuple(ns.tolist()), tuple(dks.tolist()), float(slope), float(intercept), residual)


def moment_estimate(samples, q: float) -> tuple[float, float]:
    """Plug-in E X^q with its CLT standard error."""
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size == 0:
        raise ParameterError("empty sample")
    if q < 0:
        raise ParameterError("moment order must be nonnegative")
    v = x**q
    se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else math.nan
    return float(v.mean()), se


def pearson(a, b) -> float:
    return float(np.corrcoef(np.asarray(a, float), np.asarray(b, float))[0, 1])


@dataclass
class CheckResult:
    """One verification record, serialized into JSON reports."""

    test_name: str
    statistic: float
    threshold: float
    passed: bool
    n_samples: int = 0
    seed: int | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = bool(d.pop("passed"))
        d["statistic"] = float(d["statistic"])
        d["threshold"] = float(d["threshold"])
        return d

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        s = f"[{tag}] {self.test_name}: statistic={self.statistic:.6g} threshold={self.threshold:.6g}"
        return s + (f" ({self.detail})" if self.detail else "")
