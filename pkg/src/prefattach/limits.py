"""Limit laws of the scaled cumulative weights and their alternative representations.

The beta-product construction draws Z_r ~ GGa(a_r, l+1) and independent betas
B_1..B_{r-1}, then Z_k = B_k ... B_{r-1} Z_r. Seeds (d_1, 1) under Model N and
(d_1,) under Model L also admit Z_k = (X_1 + ... + X_k)^(1/(l+1)) with
X_1 ~ Gamma(d_1/(l+1)) and X_k ~ Exp(1).

All samplers return arrays with replicates on axis 0.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import (BetaParams, DirichletParams, GGaParams, beta_moment, sample_beta,
                            sample_dirichlet, sample_gga)
from .errors import NumericalError, ParameterError
from .rng import RngStream, as_generator

DEFAULT_R_TRUNC = 64


class LimitVariant(enum.Enum):
    MODEL_N = "N"
    MODEL_L = "L"
    URN = "urn"


@dataclass(frozen=True)
class LimitSpec:
    """Parameters of the limit vector for a seed, model and number of tracked vertices.

    For ``URN`` the seed weights are the urn's initial per-color counts.
    """

    variant: LimitVariant
    ell: int
    seed_weights: tuple[int, ...]
    r: int

    def __post_init__(self):
        if isinstance(self.variant, str):
            object.__setattr__(self, "variant", LimitVariant(self.variant))
        object.__setattr__(self, "seed_weights", tuple(int(d) for d in self.seed_weights))
        if int(self.ell) != self.ell or self.ell < 1:
            raise ParameterError("ell must be a positive integer")
        if not self.seed_weights or min(self.seed_weights) < 1:
            raise ParameterError("seed weights must be positive integers")
        if self.variant is LimitVariant.URN and self.r <= self.s:
            raise ParameterError(f"urn limit needs r > s, got r={self.r}, s={self.s}")
        if self.r < self.s:
            raise ParameterError(f"r must be >= s, got r={self.r}, s={self.s}")

    @property
    def s(self) -> int:
        return len(self.seed_weights)

    @property
    def m(self) -> tuple[int, ...]:
        return tuple(int(x) for x in np.cumsum(self.seed_weights))

    @property
    def m_s(self) -> int:
        return sum(self.seed_weights)

    def a(self, k: int) -> int:
        if k < self.s:
            raise ParameterError(f"a_k is defined for k >= s = {self.s}")
        base = self.m_s + (self.ell + 1) * (k - self.s)
        return base if self.variant is LimitVariant.MODEL_L else base + self.ell

    def beta_params(self, k: int) -> BetaParams:
        """Law of B_k = Z_k / Z_{k+1}, 1 <= k < r."""
        if k < self.s:
            return BetaParams(self.m[k - 1], self.seed_weights[k])
        return BetaParams(self.a(k), 1)

    @property
    def gga(self) -> GGaParams:
        return GGaParams(self.a(self.r), self.ell + 1)


def increments(Z: np.ndarray) -> np.ndarray:
    """Y = (Z_1, Z_2 - Z_1, ..., Z_r - Z_{r-1}) along the last axis."""
    Z = np.asarray(Z, dtype=np.float64)
    return np.diff(Z, axis=-1, prepend=0.0)


@dataclass
class LimitVector:
    Z: np.ndarray
    Y: np.ndarray = field(init=False)

    def __post_init__(self):
        self.Z = np.atleast_2d(np.asarray(self.Z, dtype=np.float64))
        self.Y = increments(self.Z)


def sample_limit_z(spec: LimitSpec, rng: RngStream | np.random.Generator, size: int = 1) -> LimitVector:
    g = as_generator(rng)
    r = spec.r
    Z = np.empty((size, r))
    Z[:, r - 1] = sample_gga(spec.gga, g, size)
    for k in range(r - 1, 0, -1):
        Z[:, k - 1] = sample_beta(spec.beta_params(k), g, size) * Z[:, k]
    return LimitVector(Z)


@dataclass(frozen=True)
class GammaRep:
    """Seed (d_1, 1) under Model N or (d_1,) under Model L; the law depends on d_1, ell only."""

    d1: float
    ell: int

    def __post_init__(self):
        if not self.d1 > 0:
            raise ParameterError("d1 must be positive")
        if int(self.ell) != self.ell or self.ell < 1:
            raise ParameterError("ell must be a positive integer")

    def spec(self, variant: LimitVariant | str, r: int) -> LimitSpec:
        variant = LimitVariant(variant)
        if variant is LimitVariant.MODEL_N:
            return LimitSpec(variant, self.ell, (int(self.d1), 1), r)
        if variant is LimitVariant.MODEL_L:
            return LimitSpec(variant, self.ell, (int(self.d1),), r)
        raise ParameterError("gamma representation applies to graph models only")


def gamma_rep_for(spec: LimitSpec) -> GammaRep:
    """The gamma-sum representation matching ``spec``, if the seed is eligible."""
    w = spec.seed_weights
    if spec.variant is LimitVariant.MODEL_N and len(w) == 2 and w[1] == 1:
        return GammaRep(w[0], spec.ell)
    if spec.variant is LimitVariant.MODEL_L and len(w) == 1:
        return GammaRep(w[0], spec.ell)
    raise ParameterError(
        "gamma-sum representation needs Model N with seed (d1, 1) or Model L with seed (d1,)")


def _gamma_columns(rep: GammaRep, r: int, g: np.random.Generator, size: int):
    # One column at a time so that a longer run extends a shorter one under a shared seed.
    yield g.gamma(rep.d1 / (rep.ell + 1), 1.0, size)
    for _ in range(1, r):
        yield g.gamma(1.0, 1.0, size)


def sample_limit_gamma_rep(d1: float, ell: int, r: int, rng: RngStream | np.random.Generator,
                           size: int = 1) -> LimitVector:
    rep = GammaRep(d1, ell)
    g = as_generator(rng)
    X = np.column_stack(list(_gamma_columns(rep, r, g, size)))
    return LimitVector(np.cumsum(X, axis=1) ** (1.0 / (ell + 1)))


def sample_limit_ppp(ell: int, r: int, rng: RngStream | np.random.Generator, size: int = 1) -> LimitVector:
    """First ``r`` points of a Poisson process on (0, inf) with intensity (ell+1) t^ell dt.

    Unit-rate arrival times mapped through the inverse of t -> t^(ell+1); this is
    the limit for the gamma-sum seeds with d_1 = ell + 1.
    """
    if int(ell) != ell or ell < 1 or r < 1:
        raise ParameterError("need ell >= 1 and r >= 1")
    g = as_generator(rng)
    arrivals = np.cumsum(g.exponential(1.0, (size, r)), axis=1)
    return LimitVector(arrivals ** (1.0 / (ell + 1)))


def sample_limit_dirichlet_rep(spec: LimitSpec, rng: RngStream | np.random.Generator,
                               size: int = 1) -> np.ndarray:
    """Y = Z_s X with X ~ Dir(d_1..d_s) independent of Z_s ~ GGa(a_s, l+1); needs r = s."""
    if spec.variant is LimitVariant.URN or spec.r != spec.s:
        raise ParameterError("Dirichlet representation needs a graph model with r = s")
    g = as_generator(rng)
    zs = sample_gga(spec.gga, g, size)
    x = sample_dirichlet(DirichletParams(spec.seed_weights), g, size)
    return zs[:, None] * x


@dataclass
class MaxSample:
    values: np.ndarray
    argmax: np.ndarray  # 1-based index of the largest increment
    r_trunc: int


def sample_max_limit(source: LimitSpec | GammaRep, rng: RngStream | np.random.Generator,
                     size: int = 1, r_trunc: int = DEFAULT_R_TRUNC) -> MaxSample:
    """max(Y_1, ..., Y_{r_trunc}).

    A ``GammaRep`` source streams the gamma columns, so memory stays O(size) and
    a larger ``r_trunc`` extends the same draws (the max is monotone in r_trunc
    under a shared seed). A ``LimitSpec`` source is sampled by the beta product
    with r = r_trunc.
    """
    if r_trunc < 1:
        raise ParameterError("r_trunc must be >= 1")
    g = as_generator(rng)
    if isinstance(source, LimitSpec):
        spec = LimitSpec(source.variant, source.ell, source.seed_weights, max(r_trunc, source.s))
        Y = sample_limit_z(spec, g, size).Y[:, :r_trunc]
        return MaxSample(Y.max(axis=1), Y.argmax(axis=1) + 1, r_trunc)
    power = 1.0 / (source.ell + 1)
    total = np.zeros(size)
    prev = np.zeros(size)
    best = np.full(size, -np.inf)
    arg = np.zeros(size, dtype=np.int64)
    for k, x in enumerate(_gamma_columns(source, r_trunc, g, size), start=1):
        total += x
        z = total**power
        y = z - prev
        better = y > best
        best[better] = y[better]
        arg[better] = k
        prev = z
    return MaxSample(best, arg, r_trunc)


def mori_tau(Z: LimitVector | np.ndarray) -> np.ndarray:
    """Ratios tau_j = Z_j / Z_{j+1}, j = 1..r-1 (column j-1).

    In the Model N_1 seed-(1,1) setting these are the cumulative-degree ratios
    with tau_j ~ Beta(2j-1, 1), mutually independent.
    """
    Z = Z.Z if isinstance(Z, LimitVector) else np.atleast_2d(np.asarray(Z, dtype=np.float64))
    if Z.shape[1] < 2:
        return np.empty((Z.shape[0], 0))
    den = Z[:, 1:]
    if np.any(den <= 0):
        raise NumericalError("zero cumulative sum in tau ratio")
    return Z[:, :-1] / den


class IdentitySide(enum.Enum):
    LHS_N = "LHS_N"
    RHS_N = "RHS_N"
    LHS_L = "LHS_L"
    RHS_L = "RHS_L"


def _identity_beta_b(i: int, model: str) -> float:
    if model == "N":
        if i < 2:
            raise ParameterError("the Model N identity needs i >= 2")
        return i - 1.5
    if i < 1:
        raise ParameterError("the Model L identity needs i >= 1")
    return float(i - 1)


def identity_lhs(i: int, model: str, rng, size: int) -> np.ndarray:
    """sqrt(S_i) - sqrt(S_{i-1}) with S built from explicit gamma sums.

    Model N: S_i = X_{1/2} + X_1 + ... + X_{i-1}; Model L: S_i = X_1 + ... + X_i.
    """
    _identity_beta_b(i, model)
    g = as_generator(rng)
    if model == "N":
        prev = g.gamma(0.5, 1.0, size)
        terms = i - 2
    else:
        prev = np.zeros(size)
        terms = i - 1
    for _ in range(terms):
        prev = prev + g.gamma(1.0, 1.0, size)
    cur = prev + g.gamma(1.0, 1.0, size)
    return np.sqrt(cur) - np.sqrt(prev)


def identity_rhs(i: int, model: str, rng, size: int) -> np.ndarray:
    """sqrt(Gamma_1 * B_{1/2, b}) with b = i - 3/2 (Model N) or i - 1 (Model L; B = 1 if b = 0)."""
    b = _identity_beta_b(i, model)
    g = as_generator(rng)
    gam = g.gamma(1.0, 1.0, size)
    beta = np.ones(size) if b == 0 else sample_beta(BetaParams(0.5, b), g, size)
    return np.sqrt(gam * beta)


def identity_rhs_moment(i: int, model: str, q: float) -> float:
    """E[(Gamma_1 B_{1/2,b})^(q/2)] = Gamma(1 + q/2) * E B^(q/2)."""
    b = _identity_beta_b(i, model)
    return math.gamma(1 + q / 2) * beta_moment(0.5, b, q / 2)


def identity_sampler_and_moments(i: int, side: IdentitySide | str, q: float):
    """Return (sampler(rng, size), analytic moment of order q of the right-hand side)."""
    side = IdentitySide(side)
    model = side.value[-1]
    fn = identity_lhs if side.value.startswith("LHS") else identity_rhs
    _identity_beta_b(i, model)

    def sampler(rng, size):
        return fn(i, model, rng, size)

    return sampler, identity_rhs_moment(i, model, q)
