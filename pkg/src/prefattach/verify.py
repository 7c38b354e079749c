"""Verification suites: exact-oracle agreement, couplings, limit laws, rates, timing.

Each suite returns a list of ``CheckResult``. Thresholds and replicate counts
are fixed here; ``VerifyConfig.master_seed`` makes every suite reproducible.
"""
from __future__ import annotations

import json
import math
import os
import subprocess
import sys
import time
import zlib
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .coupling import couple_polya_beta_batch
from .distributions import GGaParams, beta_a1_cdf, beta_cdf_integer, gga_cdf
from .graph_models import ModelVariant, SeedGraph, exact_cumulative_law, scale_weights, simulate_batch
from .limits import (GammaRep, LimitSpec, identity_lhs, identity_rhs_moment, mori_tau,
                     sample_limit_dirichlet_rep, sample_limit_gamma_rep, sample_limit_z)
from .remy import (coupled_remy_modelL, exact_spanning_law, plane_trees, remy_grow,
                   spanning_sizes, spanning_sizes_batch)
from .rng import RngStream
from .stats import (CheckResult, ks_one_sample, ks_two_sample, moment_estimate, pearson, rate_fit,
                    tv_distance_empirical, tv_distance_exact)
from .urns import (ClassicalUrn, ImmigrationUrn, graph_to_urn_params, exact_infinite_urn_law,
                   imm_factorial_moment_exact, polya_cdf_exact, polya_imm_pmf_dp, polya_pmf_dp,
                   simulate_infinite_urn_batch, simulate_polya, simulate_polya_imm)

SUITES = ("oracles", "coupling", "lemma2.3", "limits-equivalence", "mori", "identities", "rates",
          "remy", "performance")


@dataclass
class VerifyConfig:
    master_seed: int = 20150601
    ells: tuple[int, ...] = (1, 2)
    grid_max: int = 4


def _stream(cfg: VerifyConfig, name: str) -> np.random.Generator:
    return RngStream(cfg.master_seed, zlib.crc32(name.encode())).gen


def _lt(name, stat, thr, n=0, seed=None, detail="") -> CheckResult:
    return CheckResult(name, float(stat), float(thr), bool(stat < thr), n, seed, detail)


# -- criterion 1-3: urn oracles ------------------------------------------------

def check_dp_vs_feller() -> CheckResult:
    t0 = time.perf_counter()
    bad = 0
    cases = 0
    for w in range(1, 6):
        for m in range(0, 21):
            pmf = polya_pmf_dp(ClassicalUrn(1, w, m))
            for t in range(w, w + m + 1):
                cases += 1
                bad += pmf.cdf(t) != polya_cdf_exact(w, t, m)
    dt = time.perf_counter() - t0
    return CheckResult("dp_cdf_equals_feller_product", bad, 0, bad == 0 and dt < 1.0, cases,
                       detail=f"{cases} exact comparisons in {dt:.3f}s (limit 1s)")


def check_simulators_vs_dp(cfg: VerifyConfig, reps: int = 100_000) -> list[CheckResult]:
    g = _stream(cfg, "simulators_vs_dp")
    t0 = time.perf_counter()
    worst_c = 0.0
    for b in range(1, 4):
        for w in range(1, 4):
            for m in range(0, 11):
                u = ClassicalUrn(b, w, m)
                worst_c = max(worst_c, tv_distance_empirical(simulate_polya(u, g, reps), polya_pmf_dp(u)))
    worst_i = 0.0
    for ell in (1, 2):
        for b in range(1, 4):
            for w in range(1, 4):
                for m in range(0, 9):
                    u = ImmigrationUrn(ell, b, w, m)
                    worst_i = max(worst_i, tv_distance_empirical(simulate_polya_imm(u, g, reps),
                                                                 polya_imm_pmf_dp(u)))
    dt = time.perf_counter() - t0
    return [
        _lt("simulate_polya_tv_vs_dp_max", worst_c, 0.01, reps, cfg.master_seed,
            "b,w<=3, m<=10"),
        _lt("simulate_polya_imm_tv_vs_dp_max", worst_i, 0.01, reps, cfg.master_seed,
            "l<=2, b,w<=3, m<=8"),
        _lt("simulators_runtime_seconds", dt, 60.0),
    ]


def _rising(y: int, ell: int) -> int:
    return math.prod(range(y, y + ell + 1))


def check_factorial_moment(cfg: VerifyConfig, reps: int = 100_000) -> list[CheckResult]:
    bad = 0
    for ell in (1, 2):
        for w in (1, 2, 3):
            for t in range(1, 9):
                pmf = polya_imm_pmf_dp(ImmigrationUrn(ell, 1, w, t))
                bad += pmf.expect(lambda y: _rising(y, ell)) != imm_factorial_moment_exact(ell, w, t)
    g = _stream(cfg, "factorial_moment_mc")
    y = simulate_polya_imm(ImmigrationUrn(1, 1, 2, 1000), g, reps).astype(np.float64)
    est, se = moment_estimate(y * (y + 1), 1)
    exact = float(imm_factorial_moment_exact(1, 2, 1000))
    return [
        CheckResult("factorial_moment_formula_equals_dp", bad, 0, bad == 0, 48),
        _lt("factorial_moment_mc_z_score", abs(est - exact) / se, 3.0, reps, cfg.master_seed,
            f"estimate {est:.2f} vs formula {exact:.2f}"),
    ]


def suite_oracles(cfg: VerifyConfig) -> list[CheckResult]:
    return [check_dp_vs_feller(), *check_simulators_vs_dp(cfg), *check_factorial_moment(cfg)]


# -- criterion 4: coupling -----------------------------------------------------

def suite_coupling(cfg: VerifyConfig, total: int = 1_000_000, marginal_reps: int = 100_000) -> list[CheckResult]:
    g = _stream(cfg, "coupling")
    t0 = time.perf_counter()
    ns = (0, 1, 10, 100, 10_000)
    cells = [(b, w, n) for b in range(1, cfg.grid_max + 1) for w in range(1, cfg.grid_max + 1) for n in ns]
    per = math.ceil(total / len(cells))
    violations = 0
    worst_ratio = 0.0
    for b, w, n in cells:
        batch = couple_polya_beta_batch(b, w, n, g, per, check=False)
        violations += batch.violations
        worst_ratio = max(worst_ratio, float(batch.errors.max() / float(batch.bound)))
    worst_tv = 0.0
    worst_ks = 0.0
    for b in range(1, cfg.grid_max + 1):
        for w in range(1, cfg.grid_max + 1):
            for n in ns:
                if n > 25 or b + w > 10:
                    continue
                batch = couple_polya_beta_batch(b, w, n, g, marginal_reps)
                worst_tv = max(worst_tv, tv_distance_empirical(batch.X, polya_pmf_dp(ClassicalUrn(b, w, n))))
                if n == 10:
                    worst_ks = max(worst_ks, ks_one_sample(batch.Y, lambda x: beta_cdf_integer(w, b, x)))
    dt = time.perf_counter() - t0
    return [
        CheckResult("coupling_bound_violations", violations, 0, violations == 0, per * len(cells),
                    cfg.master_seed, f"max |X-nY| / bound = {worst_ratio:.3f}"),
        _lt("coupling_X_tv_vs_dp_max", worst_tv, 0.01, marginal_reps, cfg.master_seed),
        _lt("coupling_Y_ks_vs_beta_max", worst_ks, 0.005, marginal_reps, cfg.master_seed),
        _lt("coupling_runtime_seconds", dt, 300.0),
    ]


# -- criterion 5: graph <-> urn ------------------------------------------------

GRAPH_URN_CASES = (("L", 1, (2,), 3), ("N", 1, (1, 1), 3), ("L", 2, (1,), 2))


def suite_graph_urn(cfg: VerifyConfig, n_mc: int = 256, reps: int = 100_000) -> list[CheckResult]:
    out = []
    worst = Fraction(0)
    compared = 0
    for kind, ell, seed_w, nmax in GRAPH_URN_CASES:
        model, seed = ModelVariant(kind, ell), SeedGraph(seed_w)
        ucfg = graph_to_urn_params(model, seed)
        for n in range(1, nmax + 1):
            r = seed.s + n
            tv = tv_distance_exact(exact_cumulative_law(model, seed, n, r),
                                   exact_infinite_urn_law(ucfg, ell * n, r))
            worst = max(worst, tv)
            compared += 1
    out.append(CheckResult("graph_urn_exact_tv", float(worst), 0, worst == 0, compared,
                           detail="joint law of all cumulative weights, n<=3"))
    g = _stream(cfg, "graph_urn_mc")
    worst_ks = 0.0
    for kind, ell, seed_w, _ in GRAPH_URN_CASES:
        model, seed = ModelVariant(kind, ell), SeedGraph(seed_w)
        graph = np.cumsum(simulate_batch(model, seed, n_mc, 3, reps, g), axis=1)
        urn = simulate_infinite_urn_batch(graph_to_urn_params(model, seed), ell * n_mc, 3, reps, g)
        # compared unscaled: the two scale factors agree only up to rounding,
        # which would split shared atoms of these discrete laws
        for k in range(3):
            worst_ks = max(worst_ks, ks_two_sample(graph[:, k], urn[:, k]))
    out.append(_lt("graph_urn_mc_ks_max", worst_ks, 0.01, reps, cfg.master_seed, f"n={n_mc}, k<=3"))
    return out


# -- criterion 6: representations ----------------------------------------------

GAMMA_REP_CASES = ((1, 2, 4), (2, 3, 3), (1, 1, 3))
DIRICHLET_CASES = (("L", 1, (1, 1)), ("N", 2, (2, 1, 1)), ("L", 2, (3, 1, 2)))


def suite_limits_equivalence(cfg: VerifyConfig, reps: int = 1_000_000) -> list[CheckResult]:
    g = _stream(cfg, "limits_equivalence")
    worst = 0.0
    for ell, d1, r in GAMMA_REP_CASES:
        for variant in ("N", "L"):
            Za = sample_limit_z(GammaRep(d1, ell).spec(variant, r), g, reps).Z
            Zb = sample_limit_gamma_rep(d1, ell, r, g, reps).Z
            for k in range(r):
                worst = max(worst, ks_two_sample(Za[:, k], Zb[:, k]))
    worst_dir = 0.0
    worst_sum = 0.0
    for kind, ell, seed_w in DIRICHLET_CASES:
        spec = LimitSpec(kind, ell, seed_w, len(seed_w))
        Ya = sample_limit_z(spec, g, reps).Y
        Yb = sample_limit_dirichlet_rep(spec, g, reps)
        for k in range(spec.r):
            worst_dir = max(worst_dir, ks_two_sample(Ya[:, k], Yb[:, k]))
        worst_sum = max(worst_sum, ks_one_sample(Yb.sum(axis=1), lambda x: gga_cdf(spec.gga, x)))
    return [
        _lt("beta_product_vs_gamma_sum_ks_max", worst, 0.01, reps, cfg.master_seed),
        _lt("beta_product_vs_dirichlet_ks_max", worst_dir, 0.01, reps, cfg.master_seed),
        _lt("dirichlet_sum_vs_gga_ks_max", worst_sum, 0.002, reps, cfg.master_seed),
    ]


# -- criterion 7: convergence rates ---------------------------------------------

RATE_NS = (64, 256, 1024, 4096)
RATE_SLOPE_WINDOWS = {1: (-0.75, -0.30), 2: (-0.95, -0.45)}


def _limit_max_sample(spec: LimitSpec, g, reps: int, chunk: int = 1_000_000) -> np.ndarray:
    parts = []
    for start in range(0, reps, chunk):
        parts.append(sample_limit_z(spec, g, min(chunk, reps - start)).Y.max(axis=1))
    return np.concatenate(parts)


def rate_distances(ell: int, g, reps: int = 200_000, limit_reps: int = 10_000_000, r: int = 3):
    """KS distances of scaled D_1(n) and max_k D_k(n) to their limits, Model L_ell, seed (2,)."""
    model, seed = ModelVariant("L", ell), SeedGraph((2,))
    spec = LimitSpec("L", ell, (2,), r)
    marginal = GGaParams(spec.a(1), ell + 1)
    lim_max = _limit_max_sample(spec, g, limit_reps)
    d1, dmax = [], []
    for n in RATE_NS:
        D = scale_weights(simulate_batch(model, seed, n, r, reps, g), ell, n)
        d1.append(ks_one_sample(D[:, 0], lambda x: gga_cdf(marginal, x)))
        dmax.append(ks_two_sample(D.max(axis=1), lim_max))
    return d1, dmax


def suite_rates(cfg: VerifyConfig, reps: int = 200_000, limit_reps: int = 10_000_000) -> list[CheckResult]:
    out = []
    t0 = time.perf_counter()
    for ell in cfg.ells:
        lo, hi = RATE_SLOPE_WINDOWS.get(ell, (-(ell / (ell + 1)) - 0.3, -(ell / (ell + 1)) + 0.2))
        d1, dmax = rate_distances(ell, _stream(cfg, f"rates_{ell}"), reps, limit_reps)
        for label, ds in (("D1", d1), ("max", dmax)):
            fit = rate_fit(RATE_NS, ds)
            mono = all(a > b for a, b in zip(ds, ds[1:]))
            dist = ", ".join(f"{d:.5f}" for d in ds)
            out.append(CheckResult(f"rate_l{ell}_{label}_monotone", float(mono), 1.0, mono, reps,
                                   cfg.master_seed, f"KS at n={RATE_NS}: {dist}"))
            out.append(CheckResult(f"rate_l{ell}_{label}_slope", fit.slope, hi, lo <= fit.slope <= hi,
                                   reps, cfg.master_seed,
                                   f"window [{lo}, {hi}], target {-ell / (ell + 1):.4f}"))
    out.append(_lt("rates_runtime_seconds", time.perf_counter() - t0, 1800.0))
    return out


# -- criterion 8: Mori ----------------------------------------------------------

def suite_mori(cfg: VerifyConfig, reps: int = 1_000_000) -> list[CheckResult]:
    g = _stream(cfg, "mori")
    tau = mori_tau(sample_limit_z(LimitSpec("N", 1, (1, 1), 5), g, reps))
    out = []
    for j in (2, 3, 4):
        out.append(_lt(f"mori_tau{j}_ks_vs_beta{2 * j - 1}_1",
                       ks_one_sample(tau[:, j - 1], lambda x: beta_a1_cdf(2 * j - 1, x)), 0.002, reps,
                       cfg.master_seed))
    u = {j: tau[:, j - 1] ** (2 * j - 1) for j in (2, 3, 4)}
    worst = max(abs(pearson(u[a], u[b])) for a, b in ((2, 3), (2, 4), (3, 4)))
    out.append(_lt("mori_tau_cross_correlation_max", worst, 0.005, reps, cfg.master_seed))
    return out


# -- criterion 9: identities ----------------------------------------------------

def suite_identities(cfg: VerifyConfig, reps: int = 1_000_000) -> list[CheckResult]:
    g = _stream(cfg, "identities")
    out = []
    for model in ("N", "L"):
        for i in (2, 3, 4):
            x = identity_lhs(i, model, g, reps)
            worst = 0.0
            for q in (1, 2, 3, 4):
                est, se = moment_estimate(x, q)
                worst = max(worst, abs(est - identity_rhs_moment(i, model, q)) / se)
            out.append(_lt(f"identity_{model}_i{i}_max_z_score", worst, 3.0, reps, cfg.master_seed,
                           "moments q=1..4"))
    return out


# -- criterion 10: Remy ---------------------------------------------------------

def suite_remy(cfg: VerifyConfig, n: int = 10_000, seeds: int = 100, k: int = 5,
               uniform_reps: int = 100_000, bridge_n: int = 1024, bridge_reps: int = 100_000) -> list[CheckResult]:
    mismatches = 0
    for s in range(seeds):
        trace = coupled_remy_modelL(n, k, RngStream(cfg.master_seed, s).gen)
        mismatches += trace.mismatches()
        mismatches += int(np.any(spanning_sizes(trace.tree, k) != trace.spanning[-1]))
    out = [CheckResult("remy_coupled_mismatches", mismatches, 0, mismatches == 0, seeds,
                       cfg.master_seed, f"n={n}, k={k}, every step")]
    g = _stream(cfg, "remy_uniform")
    for m in (3, 4):
        shapes = [remy_grow(m, g).to_parens() for _ in range(uniform_reps)]
        trees = plane_trees(m)
        uniform = {t: Fraction(1, len(trees)) for t in trees}
        out.append(_lt(f"remy_uniform_m{m}_tv", tv_distance_empirical_str(shapes, uniform), 0.01,
                       uniform_reps, cfg.master_seed))
    # offset calibration, then the distributional bridge at that offset
    loop = (ModelVariant("L", 1), SeedGraph((2,)))
    offsets = []
    for gn in (1, 2, 3):
        for off in (0, 1, 2):
            m = gn + off
            if m >= 2 and tv_distance_exact(exact_cumulative_law(*loop, gn, 2),
                                            exact_spanning_law(m, 2)) == 0:
                offsets.append(off)
    offset = offsets[0] if offsets and len(set(offsets)) == 1 else None
    out.append(CheckResult("remy_offset_calibration", -1 if offset is None else offset, 2,
                           offset is not None, detail=f"exact match at leaves = n + {offsets}"))
    if offset is not None:
        g = _stream(cfg, "remy_bridge")
        T = spanning_sizes_batch(bridge_n + offset, 3, bridge_reps, g)
        S = np.cumsum(simulate_batch(*loop, bridge_n, 3, bridge_reps, g), axis=1)
        scale = 1.0 / (2.0 * math.sqrt(bridge_n))
        worst = max(ks_two_sample(S[:, j] * scale, T[:, j] * scale) for j in range(3))
        out.append(_lt("remy_bridge_ks_max", worst, 0.01, bridge_reps, cfg.master_seed))
    return out


def tv_distance_empirical_str(samples: list[str], pmf: dict) -> float:
    counts: dict[str, int] = {}
    for s in samples:
        counts[s] = counts.get(s, 0) + 1
    total = len(samples)
    return 0.5 * sum(abs(counts.get(k, 0) / total - float(pmf.get(k, 0))) for k in set(counts) | set(pmf))


# -- criterion 11: performance ---------------------------------------------------

_PERF_SCRIPT = r"""
import json, resource, time
import numpy as np
from prefattach.graph_models import ModelVariant, SeedGraph, simulate


def peak_mb():
    # VmHWM belongs to this address space; ru_maxrss can carry the parent's peak across exec
    try:
        with open("/proc/self/status") as fh:
            for line in fh:
                if line.startswith("VmHWM:"):
                    return int(line.split()[1]) / 1024.0
    except OSError:
        pass
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024.0


model, seed = ModelVariant("L", 2), SeedGraph((2,))
simulate(model, seed, 100, 1, np.random.default_rng(0))
warm = peak_mb()
t0 = time.perf_counter()
simulate(model, seed, 1_000_000, 3, np.random.default_rng(1))
dt = time.perf_counter() - t0
print(json.dumps({"seconds": dt, "peak_rss_mb": peak_mb(), "warm_rss_mb": warm}))
"""


def suite_performance(cfg: VerifyConfig) -> list[CheckResult]:
    """Model L_2 with 10^6 vertices, single-threaded, timed in a fresh process after JIT warm-up.

    Memory is the peak resident size of that whole process (interpreter, numpy,
    numba and the compiled kernels included), which bounds the simulation's own use.
    """
    res = subprocess.run([sys.executable, "-c", _PERF_SCRIPT], capture_output=True, text=True, check=True,
                         env={**os.environ, "NUMBA_NUM_THREADS": "1"})
    data = json.loads(res.stdout.strip().splitlines()[-1])
    return [
        _lt("performance_L2_1e6_seconds", data["seconds"], 2.0),
        _lt("performance_L2_1e6_peak_rss_mb", data["peak_rss_mb"], 200.0,
            detail=f"process peak; {data['warm_rss_mb']:.1f} MB before the run"),
    ]


RUNNERS = {
    "oracles": suite_oracles,
    "coupling": suite_coupling,
    "lemma2.3": suite_graph_urn,
    "limits-equivalence": suite_limits_equivalence,
    "mori": suite_mori,
    "identities": suite_identities,
    "rates": suite_rates,
    "remy": suite_remy,
    "performance": suite_performance,
}


def run_suite(name: str, cfg: VerifyConfig) -> list[CheckResult]:
    if name not in RUNNERS:
        raise KeyError(name)
    return RUNNERS[name](cfg)


def config_dict(cfg: VerifyConfig) -> dict:
    return asdict(cfg)
