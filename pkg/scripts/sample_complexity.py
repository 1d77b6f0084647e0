"""PRR of PC-Tree against n on the equal-coefficient lower-bound ensemble, for several d.

Prints, for each d, the smallest n on a geometric grid with PRR >= target.
Under logarithmic-in-d sample complexity the crossing grows slowly with d.
"""
import argparse

import numpy as np

from polytree.estimators import sample_covariance
from polytree.hard_instances import structure_lb_instance
from polytree.model import sample
from polytree.pc_tree import pc_tree_skeleton


def prr(d, n, c, trials, seed):
    hits = 0
    for t in range(trials):
        rng = np.random.default_rng([seed, d, n, t])
        sem = structure_lb_instance(d, c, rng)
        skel, _ = pc_tree_skeleton(sample_covariance(sample(sem, n, "gaussian", rng)), c / 2)
        hits += skel.edges == sem.graph.skeleton_edges()
    return hits / trials


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--c", type=float, default=0.3)
    ap.add_argument("--d", type=int, nargs="+", default=[8, 16, 32, 64])
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--target", type=float, default=0.9)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    ns = sorted({int(round(100 * 1.12**i)) for i in range(30)})
    for d in args.d:
        crossing = None
        for n in ns:
            p = prr(d, n, args.c, args.trials, args.seed)
            if p >= args.target:
                crossing = n
                break
        print(f"d={d:4d}  n*={crossing}  n*/log(d)={crossing / np.log(d):.1f}" if crossing else f"d={d:4d}  no crossing")


if __name__ == "__main__":
    main()
