"""Models N_l (sequential, no loops) and L_l (looping) on vertex weights.

Only the weight vector is stored. A vertex's weight is its in-degree plus one;
each added vertex brings ``ell`` edges, so the total weight grows by ``ell + 1``
per step in both models.
"""
from __future__ import annotations

import csv
import enum
import io
import json
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _balllist
from .errors import ParameterError
from .rng import RngStream, as_generator


class ModelKind(enum.Enum):
    SEQUENTIAL_N = "N"
    LOOPING_L = "L"


@dataclass(frozen=True)
class ModelVariant:
    kind: ModelKind
    ell: int = 1

    def __post_init__(self) -> None:
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", ModelKind(self.kind))
        if int(self.ell) != self.ell or self.ell < 1:
            raise ParameterError(f"ell must be a positive integer, got {self.ell!r}")

    @property
    def looping(self) -> bool:
        return self.kind is ModelKind.LOOPING_L


@dataclass(frozen=True)
class SeedGraph:
    weights: tuple[int, ...]

    def __post_init__(self) -> None:
        w = tuple(int(x) for x in self.weights)
        if len(w) < 1 or any(x < 1 for x in w) or any(x != y for x, y in zip(w, self.weights)):
            raise ParameterError(f"seed weights must be >= 1 integers, got {self.weights!r}")
        object.__setattr__(self, "weights", w)

    @property
    def s(self) -> int:
        return len(self.weights)

    @property
    def total(self) -> int:
        return sum(self.weights)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=np.int64)


@dataclass(frozen=True)
class WeightTrace:
    n: int
    tracked: tuple[int, ...]
    total_weight: int

    def to_row(self) -> list[int]:
        return [self.n, *self.tracked, self.total_weight]

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "tracked": list(self.tracked), "total_weight": self.total_weight})


@dataclass(frozen=True)
class ScaledDegrees:
    values: tuple[float, ...]


def _check(seed: SeedGraph, n: int, r: int) -> None:
    if n < 1:
        raise ParameterError("n must be >= 1")
    if r < 1:
        raise ParameterError("r must be >= 1")
    if r > seed.s + n:
        raise ParameterError(f"r exceeds vertex count: r={r} > s+n={seed.s + n}")


def simulate(model: ModelVariant, seed: SeedGraph, n: int, r: int,
             rng: RngStream | np.random.Generator, *, check: bool = False) -> WeightTrace:
    """Grow the graph ``n`` steps and report the weights of vertices 1..r."""
    _check(seed, n, r)
    balls = np.empty(seed.total + (model.ell + 1) * n, dtype=np.int32)
    tracked, total, _, _ = _balllist.graph_run(
        model.looping, model.ell, seed.as_array(), n, r, as_generator(rng), balls, False, False, check)
    return WeightTrace(n, tuple(int(x) for x in tracked), int(total))


def simulate_path(model: ModelVariant, seed: SeedGraph, n: int, r: int,
                  rng: RngStream | np.random.Generator) -> np.ndarray:
    """Weights of vertices 1..r after each of steps 0..n, shape (n+1, r).

    Vertices not yet born show weight 0.
    """
    _check(seed, n, r)
    balls = np.empty(seed.total + (model.ell + 1) * n, dtype=np.int32)
    _, _, path, _ = _balllist.graph_run(
        model.looping, model.ell, seed.as_array(), n, r, as_generator(rng), balls, True, False, True)
    return path


def simulate_batch(model: ModelVariant, seed: SeedGraph, n: int, r: int, reps: int,
                   rng: RngStream | np.random.Generator) -> np.ndarray:
    """``reps`` independent trajectories; returns tracked weights, shape (reps, r)."""
    _check(seed, n, r)
    return _balllist.graph_batch(model.looping, model.ell, seed.as_array(), n, r, reps, as_generator(rng))


def total_weight(model: ModelVariant, seed: SeedGraph, n: int) -> int:
    return seed.total + (model.ell + 1) * n


def scale_weights(trace: WeightTrace | np.ndarray, ell: int, n: int | None = None):
    """Divide by (ell+1) n^(ell/(ell+1)).

    Takes a ``WeightTrace`` (returns ``ScaledDegrees``) or a raw weight array
    together with ``n`` (returns an array).
    """
    if isinstance(trace, WeightTrace):
        n = trace.n
    if n is None or n < 1:
        raise ParameterError("scaling needs n >= 1")
    factor = (ell + 1) * n ** (ell / (ell + 1))
    if isinstance(trace, WeightTrace):
        return ScaledDegrees(tuple(v / factor for v in trace.tracked))
    return np.asarray(trace, dtype=np.float64) / factor


def _lump_starts(seed: SeedGraph, ell: int, r: int, from_first_vertex: bool) -> list[int]:
    first = 0 if from_first_vertex else seed.s
    return [first + i * ell for i in range(r)]


def simulate_lumped(base: ModelVariant, seed: SeedGraph, ell: int, n: int, r: int,
                    rng: RngStream | np.random.Generator, *, from_first_vertex: bool = True,
                    record_edges: bool = False):
    """Run the ell=1 version of ``base`` for n*ell steps and sum blocks of ell vertices.

    Lump i collects vertices (i-1)*ell+1 .. i*ell counted from vertex 1
    (``from_first_vertex=True``), or from the first added vertex s+1 otherwise.
    The returned trace has ``n = n*ell`` base steps, so ``scale_weights(trace, 1)``
    gives the sqrt(n*ell) scaling of the lumped graph.

    With ``record_edges`` also returns ``{"loops": .., "multi_edges": ..}``
    counted on the lumped graph.
    """
    if int(ell) != ell or ell < 1:
        raise ParameterError("ell must be a positive integer")
    steps = n * ell
    starts = _lump_starts(seed, ell, r, from_first_vertex)
    need = starts[-1] + ell
    _check(seed, steps, need)
    balls = np.empty(seed.total + 2 * steps, dtype=np.int32)
    tracked, total, _, edges = _balllist.graph_run(
        ModelVariant(base.kind, 1).looping, 1, seed.as_array(), steps, need, as_generator(rng),
        balls, False, record_edges, False)
    lumps = tuple(int(tracked[a:a + ell].sum()) for a in starts)
    trace = WeightTrace(steps, lumps, int(total))
    if not record_edges:
        return trace
    first = 0 if from_first_vertex else seed.s

    def lump_of(v):
        return (v - first) // ell if v >= first else -1 - v

    pairs = defaultdict(int)
    loops = 0
    for src, tgt in edges:
        a, b = lump_of(int(src)), lump_of(int(tgt))
        if a == b:
            loops += 1
        pairs[(min(a, b), max(a, b))] += 1
    multi = sum(c - 1 for c in pairs.values() if c > 1)
    return trace, {"loops": loops, "multi_edges": multi}


def exact_weight_law(model: ModelVariant, seed: SeedGraph, n: int) -> dict[tuple[int, ...], Fraction]:
    """Exact law of the full weight vector after ``n`` steps, by enumeration."""
    law: dict[tuple[int, ...], Fraction] = {seed.weights: Fraction(1)}
    for _ in range(n):
        nxt: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
        for state, p in law.items():
            frontier = {(state + (1,) if model.looping else state): p}
            for _ in range(model.ell):
                after: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
                for st, q in frontier.items():
                    tot = sum(st)
                    for k, wk in enumerate(st):
                        new = st[:k] + (wk + 1,) + st[k + 1:]
                        after[new] += q * Fraction(wk, tot)
                frontier = after
            for st, q in frontier.items():
                nxt[st if model.looping else st + (1,)] += q
        law = dict(nxt)
    return law


def exact_cumulative_law(model: ModelVariant, seed: SeedGraph, n: int, r: int) -> dict[tuple[int, ...], Fraction]:
    """Exact joint law of (d_1, d_1+d_2, ..., d_1+...+d_r) after ``n`` steps."""
    if not 1 <= r <= seed.s + n:
        raise ParameterError(f"r exceeds vertex count: r={r} > s+n={seed.s + n}")
    out: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
    for state, p in exact_weight_law(model, seed, n).items():
        out[tuple(int(x) for x in np.cumsum(state[:r]))] += p
    return dict(out)


def traces_to_csv(traces: list[WeightTrace]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    r = len(traces[0].tracked) if traces else 0
    w.writerow(["n", *[f"d_{i + 1}" for i in range(r)], "total_weight"])
    for t in traces:
        w.writerow(t.to_row())
    return buf.getvalue()
