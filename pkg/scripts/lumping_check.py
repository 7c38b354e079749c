"""Lumped Model L_1 graphs against their telescoped limit.

Blocks of ell consecutive vertices of a Model L_1 graph (seed: one vertex with a
loop) grown for n*ell steps are merged. The scaled weight of lump i should
approach sqrt(X_1+...+X_{ell i}) - sqrt(X_1+...+X_{ell(i-1)}) with X_k iid Exp(1).
Prints per-lump two-sample KS distances and the loop / repeated-edge counts of one
lumped graph.
"""
from __future__ import annotations

import argparse

import numpy as np

from prefattach.graph_models import ModelVariant, SeedGraph, scale_weights, simulate_lumped
from prefattach.limits import sample_limit_gamma_rep
from prefattach.rng import RngStream
from prefattach.stats import ks_two_sample


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ell", type=int, default=2)
    ap.add_argument("--n", type=int, default=4096)
    ap.add_argument("--r", type=int, default=3)
    ap.add_argument("--reps", type=int, default=100_000)
    ap.add_argument("--master-seed", type=int, default=3)
    args = ap.parse_args()

    base, seed = ModelVariant("L", 1), SeedGraph((2,))
    g = RngStream(args.master_seed, 0).gen
    rows = np.empty((args.reps, args.r))
    for i in range(args.reps):
        rows[i] = scale_weights(simulate_lumped(base, seed, args.ell, args.n, args.r, g), 1).values
    Z = sample_limit_gamma_rep(2, 1, args.ell * args.r, g, args.reps).Z
    Zb = np.hstack([np.zeros((args.reps, 1)), Z[:, args.ell - 1::args.ell]])
    limit = np.diff(Zb, axis=1)
    for i in range(args.r):
        print(f"lump {i + 1}: KS {ks_two_sample(rows[:, i], limit[:, i]):.4f}")
    _, edges = simulate_lumped(base, seed, args.ell, args.n, 1, g, record_edges=True)
    print(f"one lumped graph: {edges['loops']} loops, {edges['multi_edges']} repeated edges")


if __name__ == "__main__":
    main()
