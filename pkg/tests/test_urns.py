from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prefattach.errors import CapacityError, ParameterError
from prefattach.graph_models import ModelVariant, SeedGraph, exact_cumulative_law, scale_weights
from prefattach.rng import RngStream
from prefattach.stats import moment_estimate, tv_distance_empirical
from prefattach.urns import (ClassicalUrn, CumulativeCounts, ExactPmf, ImmigrationUrn, InfiniteUrnConfig,
                             counts_to_csv, exact_infinite_urn_law, graph_to_urn_params,
                             imm_factorial_moment_exact, polya_cdf_exact, polya_imm_pmf_dp, polya_pmf_dp,
                             scale_urn_counts, simulate_infinite_urn, simulate_infinite_urn_batch,
                             simulate_infinite_urn_path, simulate_polya, simulate_polya_imm, urn_scale_factor)

F = Fraction


# -- classical urn ---------------------------------------------------------------

def test_dp_examples():
    assert polya_pmf_dp(ClassicalUrn(1, 1, 2)).as_dict() == {1: F(1, 3), 2: F(1, 3), 3: F(1, 3)}
    assert polya_pmf_dp(ClassicalUrn(1, 2, 2)).as_dict() == {2: F(1, 6), 3: F(1, 3), 4: F(1, 2)}
    assert polya_pmf_dp(ClassicalUrn(2, 1, 1)).as_dict() == {1: F(2, 3), 2: F(1, 3)}


def test_feller_examples():
    assert polya_cdf_exact(2, 2, 2) == F(1, 6)
    assert polya_cdf_exact(2, 4, 2) == 1
    assert polya_cdf_exact(1, 3, 5) == F(1, 2)
    assert polya_pmf_dp(ClassicalUrn(1, 1, 5)).cdf(3) == F(1, 2)
    with pytest.raises(ParameterError):
        polya_cdf_exact(2, 1, 2)
    with pytest.raises(ParameterError):
        polya_cdf_exact(2, 5, 2)


@given(st.integers(1, 5), st.integers(0, 15))
def test_dp_equals_feller(w, m):
    pmf = polya_pmf_dp(ClassicalUrn(1, w, m))
    assert sum(pmf.probs) == 1
    assert all(pmf.cdf(t) == polya_cdf_exact(w, t, m) for t in range(w, w + m + 1))


def test_dp_guard():
    with pytest.raises(CapacityError):
        polya_pmf_dp(ClassicalUrn(1, 1, 26))
    with pytest.raises(CapacityError):
        polya_imm_pmf_dp(ImmigrationUrn(1, 5, 6, 3))


def test_simulate_polya(gen):
    u = ClassicalUrn(1, 1, 2)
    assert tv_distance_empirical(simulate_polya(u, gen, 100_000), polya_pmf_dp(u)) < 0.01
    assert simulate_polya(ClassicalUrn(3, 2, 0), gen) == 2
    x = simulate_polya(ClassicalUrn(2, 3, 7), gen, 1000)
    assert x.min() >= 3 and x.max() <= 10


# -- immigration urn -------------------------------------------------------------

def test_imm_examples(gen):
    u = ImmigrationUrn(1, 1, 2, 2)
    assert polya_imm_pmf_dp(u).as_dict() == {2: F(3, 15), 3: F(6, 15), 4: F(6, 15)}
    assert tv_distance_empirical(simulate_polya_imm(u, gen, 100_000), polya_imm_pmf_dp(u)) < 0.01
    assert simulate_polya_imm(ImmigrationUrn(2, 1, 4, 0), gen) == 4
    assert polya_imm_pmf_dp(ImmigrationUrn(2, 1, 1, 1)).as_dict() == {1: F(1, 2), 2: F(1, 2)}


def test_factorial_moment_examples():
    assert imm_factorial_moment_exact(1, 2, 2) == 14
    pmf = polya_imm_pmf_dp(ImmigrationUrn(1, 1, 1, 1))
    assert imm_factorial_moment_exact(1, 1, 1) == pmf.expect(lambda y: y * (y + 1))
    assert imm_factorial_moment_exact(2, 3, 0) == 3 * 4 * 5


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_factorial_moment_matches_dp(ell):
    for w in (1, 2, 3):
        for t in range(1, 9):
            pmf = polya_imm_pmf_dp(ImmigrationUrn(ell, 1, w, t))
            exact = pmf.expect(lambda y: np.prod(range(y, y + ell + 1), dtype=object))
            assert imm_factorial_moment_exact(ell, w, t) == exact


@pytest.mark.parametrize("ell,m_s,s,k", [(1, 2, 1, 1), (1, 2, 2, 3), (2, 3, 1, 2)])
def test_factorial_moment_asymptotic(ell, m_s, s, k):
    # E M_k(n)^(l+1 rising) / [a_k n^l ((l+1)/l)^l] = 1 + O(1/n)
    p = k - s + 1
    w = m_s + ell * p + (k - s)
    a_k = m_s + (ell + 1) * (k - s) + ell
    errs = []
    for n in (10**2, 10**3, 10**4, 10**5):
        ratio = imm_factorial_moment_exact(ell, w, n - ell * p) / (a_k * F(n) ** ell * F(ell + 1, ell) ** ell)
        errs.append(float(abs(ratio - 1)) * n)
    c = max(errs)
    assert c < 100
    assert errs[-1] <= 1.1 * errs[0]


def test_exact_pmf_roundtrip_and_sum():
    pmf = polya_imm_pmf_dp(ImmigrationUrn(2, 2, 3, 5))
    assert ExactPmf.from_json(pmf.to_json()) == pmf
    assert pmf.cdf(pmf.offset - 1) == 0 and pmf.cdf(100) == 1
    with pytest.raises(ValueError):
        ExactPmf(0, (F(1, 2), F(1, 3)))


# -- infinite urn ------------------------------------------------------------------

def test_no_immigration_before_ell(gen):
    cfg = InfiniteUrnConfig(3, (1, 2))
    for n in (0, 1, 2):
        c = simulate_infinite_urn(cfg, n, 2, gen)
        assert c.M[-1] == cfg.m_s + n


def test_color_not_born():
    with pytest.raises(ParameterError):
        simulate_infinite_urn(InfiniteUrnConfig(2, (1,)), 3, 3, RngStream(0).gen)
    with pytest.raises(ParameterError):
        InfiniteUrnConfig(1, (1, 0))


@given(st.integers(1, 3), st.lists(st.integers(1, 3), min_size=1, max_size=3), st.integers(0, 2**32 - 1))
def test_deterministic_prefix(ell, counts, s):
    cfg = InfiniteUrnConfig(ell, tuple(counts))
    r = cfg.s + 4
    path = simulate_infinite_urn_path(cfg, ell * 5, r, RngStream(s).gen)
    for k in range(cfg.s, r + 1):
        p = k - cfg.s + 1
        assert path[ell * p, k - 1] == cfg.m_s + ell * p + (k - cfg.s)
    assert np.all(np.diff(path, axis=0) >= 0)


@pytest.mark.parametrize("ell,counts,k,n", [(1, (2,), 1, 6), (1, (1, 1), 3, 9), (2, (1,), 2, 10),
                                            (2, (2, 1), 2, 12)])
def test_marginal_law(ell, counts, k, n):
    cfg = InfiniteUrnConfig(ell, counts)
    s, p = cfg.s, k - cfg.s + 1
    imm = ImmigrationUrn(ell, 1, cfg.m_s + ell * p + (k - s), n - ell * p)
    sims = simulate_infinite_urn_batch(cfg, n, k, 100_000, RngStream(k, n).gen)[:, k - 1]
    assert tv_distance_empirical(sims, polya_imm_pmf_dp(imm)) < 0.01
    direct = simulate_polya_imm(imm, RngStream(k, n + 1).gen, 100_000)
    assert tv_distance_empirical(direct, polya_imm_pmf_dp(imm)) < 0.01


@pytest.mark.parametrize("ell,counts,k,n", [(1, (2,), 1, 10), (2, (1, 1), 2, 14)])
def test_conditional_law(ell, counts, k, n):
    cfg = InfiniteUrnConfig(ell, counts)
    p = k - cfg.s + 1
    reps = 200_000
    sims = simulate_infinite_urn_batch(cfg, n, k + 1, reps, RngStream(99, k).gen)
    weighted = 0.0
    for j in np.unique(sims[:, k]):
        rows = sims[sims[:, k] == j, k - 1]
        draws = int(j) - cfg.m_s - (ell + 1) * p
        exact = polya_pmf_dp(ClassicalUrn(1, cfg.m_s + ell * p + (k - cfg.s), draws))
        weighted += len(rows) / reps * tv_distance_empirical(rows, exact)
    assert weighted < 0.01


def _moment_ratios(ell, q, fn):
    cfg = InfiniteUrnConfig(ell, (2, 1))
    out = []
    for e in range(6, 13):
        n = 2**e
        M = simulate_infinite_urn_batch(cfg, n, 2, 20_000, RngStream(e, q).gen)[:, 1].astype(float)
        out.append(moment_estimate(fn(M, n), q)[0])
    return np.array(out)


@pytest.mark.parametrize("ell", [1, 2])
def test_moment_growth(ell):
    for q in (1, 2, 3):
        r = _moment_ratios(ell, q, lambda M, n: M / n ** (ell / (ell + 1)))
        assert r.max() / r.min() < 3


@pytest.mark.parametrize("ell", [1, 2])
def test_inverse_moment_bounded(ell):
    r = _moment_ratios(ell, 1, lambda M, n: n ** (ell / (ell + 1)) / M)
    assert np.all(np.isfinite(r)) and r.max() / r.min() < 3


def test_scale_factor_examples():
    assert urn_scale_factor(1, 4) == pytest.approx(0.25)
    assert urn_scale_factor(2, 2) == pytest.approx(1 / 3)
    assert np.allclose(scale_urn_counts(CumulativeCounts(4, (4, 8)), 1), [1.0, 2.0])
    with pytest.raises(ParameterError):
        urn_scale_factor(1, 0)


@given(st.integers(1, 5), st.integers(1, 10**6))
def test_scaling_consistency(ell, n):
    w = np.array([3.0, 17.0])
    assert np.allclose(scale_urn_counts(w, ell, ell * n), scale_weights(w, ell, n), rtol=1e-12)


def test_graph_to_urn_params():
    assert graph_to_urn_params(ModelVariant("L", 1), SeedGraph((2,))).initial_counts == (2, 1)
    assert graph_to_urn_params(ModelVariant("N", 1), SeedGraph((1, 1))).initial_counts == (1, 1)
    cfg = graph_to_urn_params(ModelVariant("L", 2), SeedGraph((3,)))
    assert cfg.ell == 2


def test_graph_urn_one_step():
    urn = exact_infinite_urn_law(InfiniteUrnConfig(1, (2, 1)), 1, 1)
    assert urn == {(3,): F(2, 3), (2,): F(1, 3)}
    graph = exact_cumulative_law(ModelVariant("L", 1), SeedGraph((2,)), 1, 1)
    assert urn == graph


@pytest.mark.parametrize("kind,ell,seed,n", [("L", 1, (2,), 3), ("N", 1, (1, 1), 3), ("L", 2, (1,), 2),
                                             ("N", 2, (1, 2), 2)])
def test_graph_urn_exact_equivalence(kind, ell, seed, n):
    model, sg = ModelVariant(kind, ell), SeedGraph(seed)
    r = sg.s + n
    assert exact_cumulative_law(model, sg, n, r) == exact_infinite_urn_law(graph_to_urn_params(model, sg),
                                                                           ell * n, r)


def test_counts_csv():
    assert counts_to_csv([CumulativeCounts(5, (3, 7))]) == "n,M_1,M_2\n5,3,7\n"
