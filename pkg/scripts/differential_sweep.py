"""Compare inside-outside against brute-force EM over random grammars.

    python scripts/differential_sweep.py --grammars 500 --seed 0

Prints the worst relative error for each identity and the wall time.
"""

import argparse
import math
import time

from insideout import oracle
from insideout.chart import analyze
from insideout.counts import sentence_counts
from insideout.estimation import reestimate
from insideout.randgen import Universe, random_pair


def rel_err(a, b):
    return 0.0 if a == b else abs(a - b) / max(abs(a), abs(b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grammars", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-trees", type=int, default=2000)
    args = ap.parse_args()

    universe = Universe(max_trees=args.max_trees)
    worst = {"step": 0.0, "rule-count": 0.0, "cat-sum": 0.0, "span-sum": 0.0}
    sentences = 0
    start = time.perf_counter()
    for seed in range(args.seed, args.seed + args.grammars):
        g, c = random_pair(seed, universe, tree_count=oracle.count_trees)
        for p, q in zip(reestimate(g, c).probs, oracle.em_step(g, c).probs):
            worst["step"] = max(worst["step"], rel_err(p, q))
        for y in c.types:
            a = analyze(g, y)
            table = sentence_counts(a, g)
            ex = oracle.expectations(g, y)
            sentences += 1
            for r in g.rules:
                worst["rule-count"] = max(worst["rule-count"], rel_err(table[r], ex.rule_freq[r]))
            for nt in g.nonterminals:
                summed = math.fsum(table[r] for r in g.rules_for(nt))
                worst["cat-sum"] = max(worst["cat-sum"], rel_err(table[nt], summed))
            ef = math.fsum(a.inside[s, t, nt] * a.outside[s, t, nt]
                           for s, t in a.inside.spans() for nt in g.nonterminals)
            worst["span-sum"] = max(worst["span-sum"], rel_err(ef, (2 * len(y) - 1) * a.prob))
    elapsed = time.perf_counter() - start
    print(f"grammars {args.grammars} sentences {sentences} seconds {elapsed:.1f}")
    for name, value in worst.items():
        print(f"{name:11s} max rel err {value:.3e}")


if __name__ == "__main__":
    main()
