"""Classical Polya urns, urns with immigration, and the infinite-color urn.

Exact oracles work in ``fractions.Fraction`` and refuse state spaces beyond a
small guard. Simulators are vectorized over replicates.
"""
from __future__ import annotations

import csv
import io
import json
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _balllist
from .errors import CapacityError, ParameterError
from .graph_models import ModelVariant, SeedGraph
from .rng import RngStream, as_generator

MAX_DP_DRAWS = 25
MAX_DP_BALLS = 10


def _posint(name, v, minimum=1):
    if int(v) != v or v < minimum:
        raise ParameterError(f"{name} must be an integer >= {minimum}, got {v!r}")


@dataclass(frozen=True)
class ClassicalUrn:
    b: int
    w: int
    m: int = 0

    def __post_init__(self):
        _posint("b", self.b)
        _posint("w", self.w)
        _posint("m", self.m, 0)


@dataclass(frozen=True)
class ImmigrationUrn:
    """A black ball immigrates after every ``ell``-th draw."""

    ell: int
    b: int
    w: int
    m: int = 0

    def __post_init__(self):
        _posint("ell", self.ell)
        _posint("b", self.b)
        _posint("w", self.w)
        _posint("m", self.m, 0)


@dataclass(frozen=True)
class InfiniteUrnConfig:
    """Per-color initial counts m'_1..m'_s; a new color is born every ell draws."""

    ell: int
    initial_counts: tuple[int, ...]

    def __post_init__(self):
        _posint("ell", self.ell)
        counts = tuple(int(c) for c in self.initial_counts)
        if not counts or any(c < 1 for c in counts):
            raise ParameterError("every initial color needs at least one ball")
        object.__setattr__(self, "initial_counts", counts)

    @property
    def s(self) -> int:
        return len(self.initial_counts)

    @property
    def cumulative(self) -> tuple[int, ...]:
        """m_1..m_s, the number of balls of colors 1..k at time 0."""
        return tuple(int(x) for x in np.cumsum(self.initial_counts))

    @property
    def m_s(self) -> int:
        return sum(self.initial_counts)


@dataclass(frozen=True)
class CumulativeCounts:
    n: int
    M: tuple[int, ...]


@dataclass(frozen=True)
class ExactPmf:
    """Exact pmf on the integers offset, offset+1, ..."""

    offset: int
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        if sum(self.probs, Fraction(0)) != 1:
            raise ValueError("pmf does not sum to one")

    @classmethod
    def from_dict(cls, d: dict[int, Fraction]) -> "ExactPmf":
        lo, hi = min(d), max(d)
        return cls(lo, tuple(Fraction(d.get(k, 0)) for k in range(lo, hi + 1)))

    def as_dict(self) -> dict[int, Fraction]:
        return {self.offset + i: p for i, p in enumerate(self.probs) if p}

    def cdf(self, t: int) -> Fraction:
        return sum(self.probs[: max(0, t - self.offset + 1)], Fraction(0))

    def expect(self, f) -> Fraction:
        return sum((p * f(self.offset + i) for i, p in enumerate(self.probs)), Fraction(0))

    def to_json(self) -> str:
        return json.dumps({
            "offset": self.offset,
            "numerators": [p.numerator for p in self.probs],
            "denominators": [p.denominator for p in self.probs],
        })

    @classmethod
    def from_json(cls, text: str) -> "ExactPmf":
        d = json.loads(text)
        return cls(d["offset"], tuple(Fraction(a, b) for a, b in zip(d["numerators"], d["denominators"])))


def _guard(b, w, m):
    if m > MAX_DP_DRAWS or b + w > MAX_DP_BALLS:
        raise CapacityError(f"exact DP limited to m <= {MAX_DP_DRAWS}, b+w <= {MAX_DP_BALLS}")


def _white_dp(b: int, w: int, m: int, ell: int | None) -> ExactPmf:
    law = {w: Fraction(1)}
    for step in range(m):
        # total before draw step+1: b + w + step draws so far + immigrants so far
        total = b + w + step + (step // ell if ell else 0)
        nxt: dict[int, Fraction] = defaultdict(Fraction)
        for white, p in law.items():
            nxt[white + 1] += p * Fraction(white, total)
            nxt[white] += p * Fraction(total - white, total)
        law = nxt
    return ExactPmf.from_dict(law)


def polya_pmf_dp(u: ClassicalUrn) -> ExactPmf:
    """Exact law of the white count after ``m`` draws."""
    _guard(u.b, u.w, u.m)
    return _white_dp(u.b, u.w, u.m, None)


def polya_imm_pmf_dp(u: ImmigrationUrn) -> ExactPmf:
    """Exact law of the white count in the immigration urn after ``m`` steps."""
    _guard(u.b, u.w, u.m)
    return _white_dp(u.b, u.w, u.m, u.ell)


def polya_cdf_exact(w: int, t: int, m: int) -> Fraction:
    """P(W <= t) for one black ball: prod_{k<w} (t-k)/(m+w-k)."""
    _posint("w", w)
    _posint("m", m, 0)
    if not w <= t <= w + m:
        raise ParameterError(f"t must lie in [w, w+m] = [{w}, {w + m}], got {t}")
    out = Fraction(1)
    for k in range(w):
        out *= Fraction(t - k, m + w - k)
    return out


def simulate_polya(u: ClassicalUrn, rng: RngStream | np.random.Generator, size=None):
    g = as_generator(rng)
    shape = () if size is None else size
    white = np.full(shape, u.w, dtype=np.int64)
    for step in range(u.m):
        total = u.b + u.w + step
        white += g.random(shape) * total < white
    return int(white) if size is None else white


def simulate_polya_imm(u: ImmigrationUrn, rng: RngStream | np.random.Generator, size=None):
    g = as_generator(rng)
    shape = () if size is None else size
    white = np.full(shape, u.w, dtype=np.int64)
    for step in range(u.m):
        total = u.b + u.w + step + step // u.ell
        white += g.random(shape) * total < white
    return int(white) if size is None else white


def imm_factorial_moment_exact(ell: int, w: int, t: int) -> Fraction:
    """E[Y (Y+1) ... (Y+ell)] for Y ~ Pol_ell^imm(1, w, t), in closed form."""
    _posint("ell", ell)
    _posint("w", w)
    _posint("t", t, 0)
    if t == 0:
        return Fraction(math.prod(range(w, w + ell + 1)))
    T = (t - 1) // ell
    num = math.prod(range(w + 1 + T + t, w + 1 + T + t + ell + 1))
    return Fraction(w * num, w + 1 + (ell + 1) * T + ell)


def _check_color(cfg: InfiniteUrnConfig, n: int, r: int):
    if n < 0:
        raise ParameterError("n must be nonnegative")
    if r < 1:
        raise ParameterError("r must be >= 1")
    if r > cfg.s + n // cfg.ell:
        raise ParameterError(f"color {r} is not born by step {n}")


def simulate_infinite_urn(cfg: InfiniteUrnConfig, n: int, r: int,
                          rng: RngStream | np.random.Generator) -> CumulativeCounts:
    _check_color(cfg, n, r)
    balls = np.empty(cfg.m_s + n + n // cfg.ell, dtype=np.int32)
    M, _ = _balllist.urn_run(cfg.ell, np.asarray(cfg.initial_counts, np.int64), n, r,
                             as_generator(rng), balls, False)
    return CumulativeCounts(n, tuple(int(x) for x in M))


def simulate_infinite_urn_path(cfg: InfiniteUrnConfig, n: int, r: int,
                               rng: RngStream | np.random.Generator) -> np.ndarray:
    """M_1..M_r after each step 0..n, shape (n+1, r); unborn colors add 0."""
    _check_color(cfg, n, r)
    balls = np.empty(cfg.m_s + n + n // cfg.ell, dtype=np.int32)
    _, path = _balllist.urn_run(cfg.ell, np.asarray(cfg.initial_counts, np.int64), n, r,
                                as_generator(rng), balls, True)
    return path


def simulate_infinite_urn_batch(cfg: InfiniteUrnConfig, n: int, r: int, reps: int,
                                rng: RngStream | np.random.Generator) -> np.ndarray:
    _check_color(cfg, n, r)
    return _balllist.urn_batch(cfg.ell, np.asarray(cfg.initial_counts, np.int64), n, r, reps,
                               as_generator(rng))


def urn_scale_factor(ell: int, n: int) -> float:
    if n < 1:
        raise ParameterError("scaling needs n >= 1")
    return ell ** (ell / (ell + 1)) / ((ell + 1) * n ** (ell / (ell + 1)))


def scale_urn_counts(c: CumulativeCounts | np.ndarray, ell: int, n: int | None = None) -> np.ndarray:
    """Multiply by ell^(ell/(ell+1)) / ((ell+1) n^(ell/(ell+1)))."""
    if isinstance(c, CumulativeCounts):
        n, c = c.n, c.M
    if n is None:
        raise ParameterError("n is required for raw arrays")
    return np.asarray(c, dtype=np.float64) * urn_scale_factor(ell, n)


def graph_to_urn_params(model: ModelVariant, seed: SeedGraph) -> InfiniteUrnConfig:
    """Urn whose cumulative counts at time ell*n match the graph's cumulative weights at n."""
    counts = seed.weights + ((1,) if model.looping else ())
    return InfiniteUrnConfig(model.ell, counts)


def exact_infinite_urn_law(cfg: InfiniteUrnConfig, n: int, r: int) -> dict[tuple[int, ...], Fraction]:
    """Exact joint law of (M_1(n), ..., M_r(n)) by enumerating per-color counts."""
    _check_color(cfg, n, r)
    law = {cfg.initial_counts: Fraction(1)}
    for step in range(1, n + 1):
        nxt: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
        for st, p in law.items():
            tot = sum(st)
            for c, k in enumerate(st):
                new = st[:c] + (k + 1,) + st[c + 1:]
                if step % cfg.ell == 0:
                    new = new + (1,)
                nxt[new] += p * Fraction(k, tot)
        law = dict(nxt)
    out: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
    for st, p in law.items():
        out[tuple(int(x) for x in np.cumsum(st[:r]))] += p
    return dict(out)


def counts_to_csv(rows: list[CumulativeCounts]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    r = len(rows[0].M) if rows else 0
    w.writerow(["n", *[f"M_{i + 1}" for i in range(r)]])
    for c in rows:
        w.writerow([c.n, *c.M])
    return buf.getvalue()
