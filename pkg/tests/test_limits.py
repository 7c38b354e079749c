import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prefattach.distributions import GGaParams, beta_a1_cdf, gga_cdf, gga_moment
from prefattach.errors import NumericalError, ParameterError
from prefattach.limits import (GammaRep, IdentitySide, LimitSpec, LimitVariant, LimitVector, gamma_rep_for,
                               identity_lhs, identity_rhs, identity_rhs_moment, identity_sampler_and_moments,
                               increments, mori_tau, sample_limit_dirichlet_rep, sample_limit_gamma_rep,
                               sample_limit_ppp, sample_limit_z, sample_max_limit)
from prefattach.rng import RngStream
from prefattach.stats import ks_one_sample, ks_two_sample, moment_estimate, pearson

N = 1_000_000


def test_spec_parameters():
    spec = LimitSpec("N", 1, (1, 1), 5)
    assert [spec.a(k) for k in range(2, 6)] == [3, 5, 7, 9]
    assert spec.beta_params(3).a == 5 and spec.beta_params(3).b == 1
    assert spec.beta_params(1).a == 1 and spec.beta_params(1).b == 1
    assert LimitSpec("L", 1, (2,), 1).a(1) == 2
    urn = LimitSpec(LimitVariant.URN, 2, (3,), 2)
    assert urn.gga == GGaParams(8, 3)
    assert LimitSpec("N", 2, (2, 1, 1), 3).m == (2, 3, 4)


def test_spec_errors():
    with pytest.raises(ParameterError):
        LimitSpec("N", 1, (1, 1), 1)
    with pytest.raises(ParameterError):
        LimitSpec("urn", 1, (1,), 1)
    with pytest.raises(ParameterError):
        LimitSpec("L", 0, (1,), 1)
    with pytest.raises(ParameterError):
        LimitSpec("L", 1, (2,), 3).a(0)


@given(st.sampled_from(["N", "L", "urn"]), st.integers(1, 3), st.lists(st.integers(1, 4), min_size=1, max_size=3),
       st.integers(0, 4), st.integers(0, 2**32 - 1))
def test_limit_vector_invariants(variant, ell, weights, extra, s):
    r = len(weights) + extra + (variant == "urn")
    lv = sample_limit_z(LimitSpec(variant, ell, tuple(weights), r), RngStream(s).gen, 50)
    assert lv.Z.shape == lv.Y.shape == (50, r)
    assert np.all(lv.Y >= 0)
    assert np.allclose(lv.Y.sum(axis=1), lv.Z[:, -1])
    assert np.all(np.diff(lv.Z[:, len(weights) - 1:], axis=1) > 0)


def test_single_coordinate_mean(gen):
    z = sample_limit_z(LimitSpec("L", 1, (2,), 1), gen, N).Z[:, 0]
    est, se = moment_estimate(z, 1)
    assert abs(est - 0.886226925452758) < 4 * se


def test_ratio_structure(gen):
    spec = LimitSpec("L", 2, (3,), 4)
    Z = sample_limit_z(spec, gen, N).Z
    a = spec.a(3)
    assert ks_one_sample(Z[:, 2] / Z[:, 3], lambda x: beta_a1_cdf(a, x)) < 0.002
    assert ks_one_sample(Z[:, 3], lambda x: gga_cdf(spec.gga, x)) < 0.002


def test_gamma_rep_single_coordinate(gen):
    z = sample_limit_gamma_rep(2, 1, 1, gen, N).Z[:, 0]
    est, se = moment_estimate(z, 1)
    assert abs(est - math.sqrt(math.pi) / 2) < 4 * se


@pytest.mark.parametrize("ell", [1, 2])
def test_poisson_process_characterization(ell):
    g = RngStream(31, ell).gen
    Z = sample_limit_gamma_rep(ell + 1, ell, 4, g, N).Z
    E = np.diff(Z ** (ell + 1), axis=1, prepend=0.0)
    for k in range(4):
        assert ks_one_sample(E[:, k], lambda x: 1 - np.exp(-x)) < 0.002
    assert max(abs(pearson(E[:, k], E[:, k + 1])) for k in range(3)) < 0.005
    P = sample_limit_ppp(ell, 4, g, N).Z
    for k in range(4):
        assert ks_two_sample(P[:, k], Z[:, k]) < 0.01


def test_gamma_rep_eligibility():
    assert gamma_rep_for(LimitSpec("N", 2, (3, 1), 4)) == GammaRep(3, 2)
    assert gamma_rep_for(LimitSpec("L", 1, (2,), 2)) == GammaRep(2, 1)
    with pytest.raises(ParameterError):
        gamma_rep_for(LimitSpec("N", 1, (1, 1, 1), 3))
    with pytest.raises(ParameterError):
        GammaRep(2, 1).spec("urn", 3)


def test_gamma_rep_prefix_consistent():
    a = sample_limit_gamma_rep(2, 1, 3, RngStream(3).gen, 100).Z
    b = sample_limit_gamma_rep(2, 1, 6, RngStream(3).gen, 100).Z
    assert np.array_equal(a, b[:, :3])


def test_pairwise_sums_match(gen):
    spec = GammaRep(2, 1).spec("L", 4)
    Ya = sample_limit_z(spec, gen, N).Y
    Yb = sample_limit_gamma_rep(2, 1, 4, gen, N).Y
    for i, j in ((0, 1), (1, 3), (2, 3)):
        assert ks_two_sample(Ya[:, i] + Ya[:, j], Yb[:, i] + Yb[:, j]) < 0.01


def test_dirichlet_rep(gen):
    spec = LimitSpec("L", 1, (1, 1), 2)
    Y = sample_limit_dirichlet_rep(spec, gen, N)
    Yz = sample_limit_z(spec, gen, N).Y
    for k in range(2):
        assert ks_two_sample(Y[:, k], Yz[:, k]) < 0.01
    assert ks_one_sample(Y.sum(axis=1), lambda x: gga_cdf(spec.gga, x)) < 0.002
    with pytest.raises(ParameterError):
        sample_limit_dirichlet_rep(LimitSpec("L", 1, (1, 1), 3), gen)


def test_dirichlet_rep_single_vertex(gen):
    spec = LimitSpec("N", 2, (3,), 1)
    Y = sample_limit_dirichlet_rep(spec, gen, N)[:, 0]
    assert ks_one_sample(Y, lambda x: gga_cdf(GGaParams(3 + 2, 3), x)) < 0.002


def test_max_single_term():
    a = sample_max_limit(GammaRep(2, 1), RngStream(1).gen, 1000, r_trunc=1)
    b = sample_limit_gamma_rep(2, 1, 1, RngStream(1).gen, 1000).Z[:, 0]
    assert np.array_equal(a.values, b) and np.all(a.argmax == 1)
    with pytest.raises(ParameterError):
        sample_max_limit(GammaRep(2, 1), RngStream(1).gen, 10, r_trunc=0)


@given(st.integers(1, 3), st.integers(1, 30), st.integers(1, 30), st.integers(0, 2**32 - 1))
def test_max_monotone_in_truncation(d1, r1, r2, s):
    lo, hi = sorted((r1, r2))
    a = sample_max_limit(GammaRep(d1, 1), RngStream(s).gen, 200, lo)
    b = sample_max_limit(GammaRep(d1, 1), RngStream(s).gen, 200, hi)
    assert np.all(b.values >= a.values)
    assert a.r_trunc == lo and b.r_trunc == hi


def test_max_from_spec_matches_gamma_source(gen):
    a = sample_max_limit(LimitSpec("L", 1, (2,), 3), gen, 200_000, r_trunc=3).values
    b = sample_max_limit(GammaRep(2, 1), gen, 200_000, r_trunc=3).values
    assert ks_two_sample(a, b) < 0.01


@pytest.mark.parametrize("d1", [1, 2])
def test_default_truncation_tail(d1):
    ms = sample_max_limit(GammaRep(d1, 1), RngStream(41, d1).gen, 200_000, r_trunc=512)
    assert np.mean(ms.argmax > 64) < 1e-3


def test_mori(gen):
    tau = mori_tau(sample_limit_z(LimitSpec("N", 1, (1, 1), 5), gen, N))
    assert tau.shape == (N, 4)
    for j in (2, 3, 4):
        assert ks_one_sample(tau[:, j - 1], lambda x: beta_a1_cdf(2 * j - 1, x)) < 0.002
    assert abs(pearson(tau[:, 1] ** 3, tau[:, 2] ** 5)) < 0.005


def test_mori_degenerate_and_guard():
    assert mori_tau(LimitVector(np.ones((3, 1)))).shape == (3, 0)
    with pytest.raises(NumericalError):
        mori_tau(np.array([[0.0, 0.0]]))


def test_increments():
    assert np.array_equal(increments(np.array([[1.0, 3.0, 6.0]])), [[1.0, 2.0, 3.0]])


def test_identity_L_first_index(gen):
    a = identity_lhs(1, "L", gen, N)
    b = identity_rhs(1, "L", gen, N)
    assert ks_two_sample(a, b) < 0.003
    assert identity_rhs_moment(1, "L", 1) == pytest.approx(math.gamma(1.5))


def test_identity_N_second_moment(gen):
    exact = identity_rhs_moment(2, "N", 2)
    assert exact == pytest.approx(math.gamma(2) * 0.5)
    est, se = moment_estimate(identity_lhs(2, "N", gen, N), 2)
    assert abs(est - exact) < 3 * se


@pytest.mark.parametrize("side", list(IdentitySide))
def test_identity_sampler_and_moments(side):
    sampler, m0 = identity_sampler_and_moments(3, side, 0)
    assert m0 == 1.0
    sampler, m2 = identity_sampler_and_moments(3, side, 2)
    x = sampler(RngStream(12, list(IdentitySide).index(side)).gen, N)
    est, se = moment_estimate(x, 2)
    assert abs(est - m2) < 3 * se
    assert moment_estimate(x, 0) == (1.0, 0.0)


def test_identity_errors():
    with pytest.raises(ParameterError):
        identity_rhs_moment(1, "N", 1)
    with pytest.raises(ParameterError):
        identity_lhs(0, "L", RngStream(0).gen, 3)


def test_gga_marginal_mean_of_urn_limit(gen):
    spec = LimitSpec("urn", 2, (3,), 2)
    z = sample_limit_z(spec, gen, N).Z[:, 1]
    est, se = moment_estimate(z, 1)
    assert abs(est - gga_moment(spec.gga, 1)) < 4 * se
