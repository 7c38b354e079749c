import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prefattach.errors import ParameterError
from prefattach.rng import RngStream
from prefattach.stats import (CheckResult, Ecdf, ks_one_sample, ks_two_sample, moment_estimate, pearson,
                              rate_fit, tv_distance_empirical, tv_distance_exact, tv_distance_samples)

small = st.lists(st.integers(-5, 5), min_size=1, max_size=30)


def test_ecdf():
    e = Ecdf([3, 1, 2, 2])
    assert e(0) == 0 and e(2) == 0.75 and e(3) == 1.0
    with pytest.raises(ParameterError):
        Ecdf([])


def test_ks_one_sample_examples(gen):
    n = 1000
    q = np.arange(1, n + 1) / (n + 1)
    assert ks_one_sample(q, lambda x: x) <= 1 / (n + 1) + 1e-12
    assert ks_one_sample(gen.random(1_000_000), lambda x: x) < 0.002
    assert ks_one_sample(np.zeros(10), lambda x: np.clip(x, 0, 1)) == 1.0
    with pytest.raises(ParameterError):
        ks_one_sample([], lambda x: x)


def test_ks_two_sample_examples(gen):
    a = gen.random(1000)
    assert ks_two_sample(a, a) == 0
    assert ks_two_sample(a, a + 2) == 1.0
    assert ks_two_sample(gen.random(1_000_000), gen.random(1_000_000)) < 0.003
    with pytest.raises(ParameterError):
        ks_two_sample([], [1.0])


@given(small, small)
def test_ks_two_sample_brute_force(a, b):
    grid = np.arange(-6, 6, 0.25)
    fa = np.array([np.mean(np.asarray(a) <= t) for t in grid])
    fb = np.array([np.mean(np.asarray(b) <= t) for t in grid])
    assert ks_two_sample(a, b) == pytest.approx(np.max(np.abs(fa - fb)))


@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=30))
def test_ks_one_sample_brute_force(xs):
    grid = np.linspace(0, 1, 20_001)
    f = np.array([np.mean(np.asarray(xs) <= t) for t in grid])
    # both one-sided limits at every jump: F_n(t) and F_n(t-)
    fm = np.array([np.mean(np.asarray(xs) < t) for t in grid])
    brute = max(np.max(np.abs(f - grid)), np.max(np.abs(fm - grid)))
    exact = ks_one_sample(xs, lambda x: x)
    assert exact >= brute - 1e-12
    assert exact <= brute + 1e-4


def test_tv_exact_examples():
    p = {1: Fraction(1, 3), 2: Fraction(2, 3)}
    q = {1: Fraction(1, 2), 2: Fraction(1, 2)}
    assert tv_distance_exact(p, q) == Fraction(1, 6)
    assert tv_distance_exact(p, p) == 0
    assert tv_distance_exact({0: Fraction(1)}, {1: Fraction(1)}) == 1


def _pmf(weights):
    tot = sum(weights)
    return {i: Fraction(w, tot) for i, w in enumerate(weights) if w}


pmfs = st.lists(st.integers(0, 6), min_size=4, max_size=4).filter(any).map(_pmf)


@given(pmfs, pmfs, pmfs)
def test_tv_exact_metric(p, q, r):
    d = tv_distance_exact
    assert d(p, q) == d(q, p)
    assert 0 <= d(p, q) <= 1
    assert d(p, r) <= d(p, q) + d(q, r)


def test_tv_empirical():
    assert tv_distance_empirical([1, 1, 2, 2], {1: Fraction(1, 2), 2: Fraction(1, 2)}) == 0
    assert tv_distance_samples([1, 2], [3, 4]) == 1.0


@pytest.mark.parametrize("slope", [-0.5, -2 / 3, -1.0])
def test_rate_fit_exact(slope):
    ns = [64, 256, 1024, 4096]
    fit = rate_fit(ns, [3.0 * n**slope for n in ns])
    assert fit.slope == pytest.approx(slope, abs=1e-12)
    assert fit.intercept == pytest.approx(np.log(3.0))
    assert fit.residual < 1e-12


def test_rate_fit_errors():
    with pytest.raises(ParameterError):
        rate_fit([1, 2], [1, 1])
    with pytest.raises(ParameterError):
        rate_fit([1, 2, 3], [1, 0, 1])


def test_moment_estimate(gen):
    assert moment_estimate(np.full(10, 3.0), 2) == (9.0, 0.0)
    x = gen.exponential(size=1_000_000)
    est, se = moment_estimate(x, 2)
    assert abs(est - 2) < 4 * se
    assert moment_estimate(x, 1)[0] == pytest.approx(x.mean())
    with pytest.raises(ParameterError):
        moment_estimate([], 1)


def test_pearson():
    assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)


def test_check_result_serialization():
    r = CheckResult("x", 0.001, 0.002, True, 10, 5)
    d = r.to_dict()
    assert d == {"test_name": "x", "statistic": 0.001, "threshold": 0.002, "pass": True, "n_samples": 10,
                 "seed": 5, "detail": ""}
    json.dumps(d)
    assert r.line().startswith("[PASS] x:")
    assert CheckResult("y", 1, 0, False).line().startswith("[FAIL]")


def test_rng_reproducible():
    assert RngStream(1, 2).gen.random() == RngStream(1, 2).gen.random()
    assert RngStream(1, 2).child(3).stream_id == 3
    with pytest.raises(ValueError):
        RngStream(-1)
