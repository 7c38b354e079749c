"""Command line entry point: ``prefattach {simulate, sample-limit, verify}``.

Output is a pure function of the command, its parameters and ``--master-seed``.
Replicates are cut into fixed blocks of ``BLOCK`` rows; block j draws from
stream (master_seed, j), so the thread count changes wall time only.

CSV columns
  simulate            n, d_1..d_r, total_weight   (one row per replicate)
  simulate --path     n, d_1..d_r, total_weight   (one row per step 0..n)
  simulate --urn      n, M_1..M_r
  simulate --lumped   n, D_1..D_r, total_weight   (n counts base steps, n*ell)
  sample-limit        Z_1..Z_r, Y_1..Y_r
  sample-limit --max  max_Y, argmax
Each file starts with a ``# {json}`` line holding version, config hash and seed.

Exit codes: 0 success, 1 failed check, 2 usage or parameter error.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .errors import ParameterError
from .graph_models import (ModelVariant, SeedGraph, simulate_batch, simulate_lumped, simulate_path,
                           total_weight)
from .io import SampleBatch, report_json
from .limits import (DEFAULT_R_TRUNC, GammaRep, LimitSpec, gamma_rep_for, increments,
                     sample_limit_dirichlet_rep, sample_limit_gamma_rep, sample_limit_ppp,
                     sample_limit_z, sample_max_limit)
from .rng import RngStream
from .urns import InfiniteUrnConfig, simulate_infinite_urn_batch
from .verify import SUITES, VerifyConfig, config_dict, run_suite

BLOCK = 8192
THREADS_ENV = "PREFATTACH_THREADS"
MAX_CALIBRATION = "P(argmax > 64) < 1e-3 for ell=1, d1 in {1, 2} (scripts/calibrate_truncation.py)"


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _blocks(reps: int, master_seed: int, threads: int, work) -> np.ndarray:
    """Run ``work(gen, rows)`` per block and stack the results in block order."""
    sizes = [min(BLOCK, reps - start) for start in range(0, reps, BLOCK)]

    def one(j):
        return work(RngStream(master_seed, j).gen, sizes[j])

    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(one, range(len(sizes))))
    else:
        parts = [one(j) for j in range(len(sizes))]
    return np.concatenate(parts, axis=0)


def _emit(batch: SampleBatch, out: str, fmt: str) -> None:
    text = batch.to_csv() if fmt == "csv" else batch.to_json()
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def cmd_simulate(args) -> int:
    seed = SeedGraph(tuple(args.seed_weights))
    if args.reps < 1:
        raise ParameterError("--reps must be >= 1")
    config = {"command": "simulate", "model": args.model, "ell": args.ell,
              "seed_weights": list(seed.weights), "n": args.n, "r": args.r, "reps": args.reps,
              "urn": args.urn, "lumped": args.lumped, "lump_added_only": args.lump_added_only,
              "path": args.path}
    r_cols = range(1, args.r + 1)
    if args.urn:
        cfg = InfiniteUrnConfig(args.ell, seed.weights)
        data = _blocks(args.reps, args.master_seed, args.threads,
                       lambda g, k: simulate_infinite_urn_batch(cfg, args.n, args.r, k, g))
        data = np.column_stack([np.full(len(data), args.n), data])
        columns = ["n", *[f"M_{i}" for i in r_cols]]
    else:
        model = ModelVariant(args.model, args.ell)
        if args.path:
            if args.reps != 1:
                raise ParameterError("--path writes one trajectory; use --reps 1")
            path = simulate_path(model, seed, args.n, args.r, RngStream(args.master_seed, 0).gen)
            steps = np.arange(args.n + 1)
            data = np.column_stack([steps, path, seed.total + (args.ell + 1) * steps])
            columns = ["n", *[f"d_{i}" for i in r_cols], "total_weight"]
        elif args.lumped:
            def work(g, k):
                rows = []
                for _ in range(k):
                    t = simulate_lumped(model, seed, args.ell, args.n, args.r, g,
                                        from_first_vertex=not args.lump_added_only)
                    rows.append(t.to_row())
                return np.asarray(rows, dtype=np.int64)
            data = _blocks(args.reps, args.master_seed, args.threads, work)
            columns = ["n", *[f"D_{i}" for i in r_cols], "total_weight"]
        else:
            data = _blocks(args.reps, args.master_seed, args.threads,
                           lambda g, k: simulate_batch(model, seed, args.n, args.r, k, g))
            tot = total_weight(model, seed, args.n)
            data = np.column_stack([np.full(len(data), args.n), data, np.full(len(data), tot)])
            columns = ["n", *[f"d_{i}" for i in r_cols], "total_weight"]
    batch = SampleBatch(np.asarray(data, dtype=np.int64), columns, args.master_seed, config,
                        {"block_size": BLOCK})
    _emit(batch, args.out, args.format)
    return 0


def _limit_source(args):
    """The LimitSpec or GammaRep selected by the flags."""
    if args.rep in ("gamma-sum", "ppp") and not args.seed_weights:
        if args.d1 is None:
            raise ParameterError(f"--rep {args.rep} needs --d1 or --seed-weights")
        return GammaRep(args.d1, args.ell)
    if not args.seed_weights:
        raise ParameterError(f"--rep {args.rep} needs --seed-weights")
    spec = LimitSpec(args.model, args.ell, tuple(args.seed_weights), args.r or len(args.seed_weights))
    if args.rep in ("gamma-sum", "ppp"):
        return gamma_rep_for(spec)
    return spec


def cmd_sample_limit(args) -> int:
    if args.reps < 1:
        raise ParameterError("--reps must be >= 1")
    src = _limit_source(args)
    r = args.r or (len(args.seed_weights) if args.seed_weights else 1)
    if args.rep == "ppp" and src.d1 != src.ell + 1:
        raise ParameterError(f"the Poisson process representation needs d1 = ell + 1 = {src.ell + 1}")
    if args.rep == "dirichlet" and r != src.s:
        raise ParameterError(f"Dirichlet representation needs r = s = {src.s}")
    config = {"command": "sample-limit", "rep": args.rep, "model": args.model, "ell": args.ell,
              "seed_weights": list(args.seed_weights or []), "d1": args.d1, "r": r,
              "reps": args.reps, "max": args.max, "r_trunc": args.r_trunc}
    meta = {"block_size": BLOCK}
    if args.max:
        if args.rep not in ("beta-product", "gamma-sum"):
            raise ParameterError("--max supports --rep beta-product or gamma-sum")

        def work(g, k):
            ms = sample_max_limit(src, g, k, args.r_trunc)
            return np.column_stack([ms.values, ms.argmax])

        data = _blocks(args.reps, args.master_seed, args.threads, work)
        meta.update(r_trunc=args.r_trunc, truncation_calibration=MAX_CALIBRATION)
        batch = SampleBatch(data, ["max_Y", "argmax"], args.master_seed, config, meta)
        _emit(batch, args.out, args.format)
        return 0

    def work(g, k):
        if args.rep == "beta-product":
            Z = sample_limit_z(LimitSpec(src.variant, src.ell, src.seed_weights, r), g, k).Z
        elif args.rep == "gamma-sum":
            Z = sample_limit_gamma_rep(src.d1, src.ell, r, g, k).Z
        elif args.rep == "ppp":
            Z = sample_limit_ppp(src.ell, r, g, k).Z
        else:
            Z = np.cumsum(sample_limit_dirichlet_rep(src, g, k), axis=1)
        return np.hstack([Z, increments(Z)])

    data = _blocks(args.reps, args.master_seed, args.threads, work)
    columns = [f"Z_{i}" for i in range(1, r + 1)] + [f"Y_{i}" for i in range(1, r + 1)]
    _emit(SampleBatch(data, columns, args.master_seed, config, meta), args.out, args.format)
    return 0


def cmd_verify(args) -> int:
    cfg = VerifyConfig(master_seed=args.master_seed,
                       ells=tuple(args.ell) if args.ell else VerifyConfig.ells,
                       grid_max=args.grid_max)
    results = run_suite(args.suite, cfg)
    for res in results:
        print(res.line(), file=sys.stderr)
    text = report_json(args.suite, config_dict(cfg), results, cfg.master_seed) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prefattach", description="Preferential attachment simulations, "
                                "limit laws and verification suites.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_default="-"):
        sp.add_argument("--master-seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=_default_threads(),
                        help=f"worker threads (default from ${THREADS_ENV}, else 1)")
        sp.add_argument("--out", default=out_default, help="output path, '-' for stdout")

    s = sub.add_parser("simulate", help="grow graphs (or urns) and write tracked weights")
    s.add_argument("--model", choices=["N", "L"], default="L")
    s.add_argument("--ell", type=int, default=1)
    s.add_argument("--seed-weights", type=int, nargs="+", default=[2])
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--reps", type=int, default=1)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.add_argument("--urn", action="store_true", help="infinite-color urn; seed weights are the initial counts")
    s.add_argument("--lumped", action="store_true", help="run ell=1 for n*ell steps and merge blocks of ell")
    s.add_argument("--lump-added-only", action="store_true", help="start lumping at the first added vertex")
    s.add_argument("--path", action="store_true", help="write the full trajectory of one replicate")
    common(s)
    s.set_defaults(func=cmd_simulate)

    sl = sub.add_parser("sample-limit", help="sample the limit vector or its max")
    sl.add_argument("--rep", choices=["beta-product", "gamma-sum", "dirichlet", "ppp"], default="beta-product")
    sl.add_argument("--model", choices=["N", "L", "urn"], default="L")
    sl.add_argument("--seed-weights", type=int, nargs="+")
    sl.add_argument("--d1", type=int)
    sl.add_argument("--ell", type=int, default=1)
    sl.add_argument("--r", type=int)
    sl.add_argument("--reps", type=int, default=1)
    sl.add_argument("--max", action="store_true", help="sample max(Y_1..Y_r_trunc) instead")
    sl.add_argument("--r-trunc", type=int, default=DEFAULT_R_TRUNC)
    sl.add_argument("--format", choices=["csv", "json"], default="csv")
    common(sl)
    sl.set_defaults(func=cmd_sample_limit)

    v = sub.add_parser("verify", help="run a verification suite; exit 0 iff every check passes")
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--ell", type=int, nargs="+", help="values of ell for the rate suite")
    v.add_argument("--grid-max", type=int, default=4, help="b, w range of the coupling grid")
    v.add_argument("--master-seed", type=int, default=VerifyConfig.master_seed)
    v.add_argument("--out", default="-", help="JSON report path, '-' for stdout")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be >= 1")
    if getattr(args, "master_seed", 0) < 0:
        parser.error("--master-seed must be nonnegative")
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"prefattach: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
