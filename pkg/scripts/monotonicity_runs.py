"""Train random grammars and report log-likelihood trajectories.

    python scripts/monotonicity_runs.py --runs 50 --iters 25

One line per run: seed, first and last log-likelihood, smallest delta.
"""

import argparse

from insideout.estimation import TrainConfig, train
from insideout.randgen import random_pair


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=50)
    ap.add_argument("--iters", type=int, default=25)
    ap.add_argument("--seed", type=int, default=1000)
    args = ap.parse_args()

    overall = float("inf")
    for seed in range(args.seed, args.seed + args.runs):
        g, c = random_pair(seed)
        report = train(g, c, TrainConfig(max_iters=args.iters, epsilon=0.0))
        lls = report.log_likelihoods
        smallest = min(r.delta for r in report.records)
        overall = min(overall, smallest)
        print(f"seed {seed} L0 {lls[0]:.6f} L{len(lls) - 1} {lls[-1]:.6f} min-delta {smallest:.2e}")
    print(f"smallest delta over all runs {overall:.2e}")


if __name__ == "__main__":
    main()
