"""Estimated versus exact frequency and confidence for planted pairs after one update.

    python3 scripts/estimated_vs_exact.py --seeds 0 1 2 3
"""

import argparse

import numpy as np

from oric.estimator import OricConfig, estimate, new_model, update
from oric.oracle import exact_scan
from oric.synth import PlantedPattern, StreamSpec, disjoint_pairs, generate_period


def planted_patterns(prior, n=10):
    out = []
    for i, s in enumerate(disjoint_pairs(n)):
        fp, q = 0.55 + 0.025 * i, 0.30 + 0.03 * i
        out.append(PlantedPattern.constant(s, fp, fp * prior * (1 - q) / (q * (1 - prior))))
    return out


def run(seed, chains, rows, prior, verbose):
    planted = planted_patterns(prior)
    batch = generate_period(StreamSpec(23, 10, rows, 1, prior, planted, rng_seed=seed), 1)
    model = new_model(OricConfig(num_chains=chains, rng_seed=seed), batch.schema)
    update(model, batch)
    exact = exact_scan(batch, [p.pattern for p in planted])
    f_err, q_err = 0.0, 0.0
    if verbose:
        print(f"{'pattern':<14}{'est_neg':>9}{'exact_neg':>10}{'est_pos':>9}{'exact_pos':>10}{'est_q':>8}{'exact_q':>9}")
    for p in planted:
        r, e = estimate(model, p.pattern), exact[p.pattern]
        f_err = max(f_err, abs(r.freq_pos - e.freq_pos), abs(r.freq_neg - e.freq_neg))
        q_err = max(q_err, abs(r.confidence - e.confidence))
        if verbose:
            print(f"{str(p.pattern):<14}{r.freq_neg:9.4f}{e.freq_neg:10.4f}{r.freq_pos:9.4f}{e.freq_pos:10.4f}"
                  f"{r.confidence:8.4f}{e.confidence:9.4f}")
    return f_err, q_err


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, nargs="+", default=[0])
    ap.add_argument("--chains", type=int, default=10000)
    ap.add_argument("--rows", type=int, default=100000)
    ap.add_argument("--prior", type=float, default=0.3)
    args = ap.parse_args()
    errs = []
    for seed in args.seeds:
        f_err, q_err = run(seed, args.chains, args.rows, args.prior, verbose=len(args.seeds) == 1)
        errs.append((f_err, q_err))
        print(f"seed={seed} max_freq_err={f_err:.4f} max_conf_err={q_err:.4f}")
    errs = np.array(errs)
    ok = int(np.count_nonzero((errs <= 0.01).all(axis=1)))
    print(f"within 0.01: {ok}/{len(args.seeds)}")


if __name__ == "__main__":
    main()
