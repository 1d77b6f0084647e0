"""Calibrate the constant K in n = K log(d / delta) / eps for the conditional-MI tester.

For each K, draws data from a chain x -> y -> z (so I(X;Z|Y) = 0) and from a
model with I(Y;Z|X) = eps, and reports how often the tester decides correctly.
"""
import argparse
import math

import numpy as np

from polytree.estimators import cmi_test, sample_covariance
from polytree.model import GaussianSem, sample


def dependent_sem(eps):
    # Y and Z share only a direct edge, X independent: I(Y;Z|X) = I(Y;Z) = eps
    rho = math.sqrt(-math.expm1(-2 * eps))
    b = rho / math.sqrt(1 - rho**2)
    return GaussianSem.from_edges(3, [(1, 2, b)])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--eps", type=float, default=0.1)
    ap.add_argument("--delta", type=float, default=0.1)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--reps", type=int, default=500)
    ap.add_argument("--K", type=float, nargs="+", default=[10, 25, 50, 100, 200])
    args = ap.parse_args()

    null = GaussianSem.from_edges(3, [(0, 1, 0.5), (1, 2, 0.5)])
    alt = dependent_sem(args.eps)
    rng = np.random.default_rng(0)
    print(f"{'K':>6s} {'n':>7s} {'accept|null':>12s} {'reject|alt':>11s}")
    for K in args.K:
        n = int(math.ceil(K * math.log(args.d / args.delta) / args.eps))
        acc = np.mean([not cmi_test(sample_covariance(sample(null, n, "gaussian", rng)), 0, 2, 1, args.eps)[1]
                       for _ in range(args.reps)])
        rej = np.mean([cmi_test(sample_covariance(sample(alt, n, "gaussian", rng)), 1, 2, 0, args.eps)[1]
                       for _ in range(args.reps)])
        flag = "ok" if acc >= 1 - args.delta and rej >= 1 - args.delta else ""
        print(f"{K:6.0f} {n:7d} {acc:12.3f} {rej:11.3f} {flag}")


if __name__ == "__main__":
    main()
