"""Gamma, beta, generalized gamma and Dirichlet samplers plus their CDFs/moments.

Every sampler takes ``size`` like numpy: ``None`` returns a scalar, an int or
tuple returns an array. Beta, GGa and Dirichlet are all built from gamma draws.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .rng import RngStream, as_generator
from .special import regularized_lower_incomplete_gamma


def _positive(name: str, value: float) -> None:
    if not (value > 0 and math.isfinite(value)):
        raise ParameterError(f"{name} must be a positive finite real, got {value!r}")


@dataclass(frozen=True)
class GammaParams:
    shape: float
    rate: float = 1.0

    def __post_init__(self) -> None:
        _positive("shape", self.shape)
        _positive("rate", self.rate)


@dataclass(frozen=True)
class BetaParams:
    a: float
    b: float

    def __post_init__(self) -> None:
        _positive("a", self.a)
        _positive("b", self.b)


@dataclass(frozen=True)
class GGaParams:
    """Generalized gamma: density proportional to x^(a-1) exp(-x^b)."""

    a: float
    b: float

    def __post_init__(self) -> None:
        _positive("a", self.a)
        _positive("b", self.b)


@dataclass(frozen=True)
class DirichletParams:
    alphas: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if len(self.alphas) < 1:
            raise ParameterError("Dirichlet needs at least one component")
        for a in self.alphas:
            _positive("alpha", a)


def sample_gamma(p: GammaParams, rng: RngStream | np.random.Generator, size=None):
    # numpy's sampler covers shape < 1 (needed for shapes like d_1/(l+1) = 1/2).
    g = as_generator(rng)
    return g.gamma(p.shape, 1.0 / p.rate, size=size)


def sample_beta(p: BetaParams, rng: RngStream | np.random.Generator, size=None):
    """Beta(a, b) as G_a / (G_a + G_b)."""
    g = as_generator(rng)
    ga = g.gamma(p.a, 1.0, size=size)
    gb = g.gamma(p.b, 1.0, size=size)
    return ga / (ga + gb)


def sample_gga(p: GGaParams, rng: RngStream | np.random.Generator, size=None):
    """GGa(a, b) as G^(1/b) with G ~ Gamma(a/b, 1)."""
    g = as_generator(rng)
    return g.gamma(p.a / p.b, 1.0, size=size) ** (1.0 / p.b)


def sample_dirichlet(p: DirichletParams, rng: RngStream | np.random.Generator, size=None):
    """Normalized independent gammas; the last axis indexes components."""
    g = as_generator(rng)
    shape = () if size is None else ((size,) if np.ndim(size) == 0 else tuple(size))
    gs = np.stack([g.gamma(a, 1.0, size=shape) for a in p.alphas], axis=-1)
    return gs / gs.sum(axis=-1, keepdims=True)


def gamma_cdf(p: GammaParams, x):
    return regularized_lower_incomplete_gamma(p.shape, np.maximum(np.asarray(x, float) * p.rate, 0.0))


def gga_cdf(p: GGaParams, x):
    """P(a/b, x^b); zero for x <= 0."""
    xs = np.maximum(np.asarray(x, dtype=np.float64), 0.0)
    out = regularized_lower_incomplete_gamma(p.a / p.b, xs ** p.b)
    return float(out) if np.ndim(out) == 0 else out


def beta_cdf_integer(a: int, b: int, x):
    """Beta(a, b) CDF for integer a, b: P(Binomial(a+b-1, x) >= a)."""
    if int(a) != a or int(b) != b or a < 1 or b < 1:
        raise ParameterError("beta_cdf_integer needs positive integer parameters")
    a, b = int(a), int(b)
    xs = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
    n = a + b - 1
    out = np.zeros_like(xs)
    for j in range(a, n + 1):
        out = out + math.comb(n, j) * xs**j * (1.0 - xs) ** (n - j)
    return np.minimum(out, 1.0)


def beta_a1_cdf(a: float, x):
    """Beta(a, 1) CDF, x^a on [0, 1]."""
    return np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0) ** a


def gamma_moment(shape: float, q: float, rate: float = 1.0) -> float:
    """E X^q = Gamma(shape+q) / (Gamma(shape) rate^q)."""
    return math.exp(math.lgamma(shape + q) - math.lgamma(shape)) / rate**q


def gga_moment(p: GGaParams, q: float) -> float:
    return math.exp(math.lgamma((p.a + q) / p.b) - math.lgamma(p.a / p.b))


def beta_moment(a: float, b: float, t: float) -> float:
    """E B^t for B ~ Beta(a, b); b == 0 is read as the point mass at 1."""
    if b == 0:
        return 1.0
    return math.exp(
        math.lgamma(a + t) + math.lgamma(a + b) - math.lgamma(a) - math.lgamma(a + b + t)
    )
