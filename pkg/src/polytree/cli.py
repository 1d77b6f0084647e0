"""Command-line interface.

Exit codes: 0 success, 1 usage or input error, 2 numerical degeneracy
(including orientation conflicts caused by inconsistent CI tests).
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

import numpy as np

from . import bench
from .chow_liu import chow_liu
from .errors import DegenerateConditioningError, OrientationConflictError, PolytreeError
from .estimators import sample_covariance
from .graphs import DirectedTree, orient_from_root, random_labeled_tree
from .hard_instances import (agnostic_beta_sampler, nonrealizable_gadget, realizable_gadget,
                             sem_on_tree, structure_lb_instance)
from .kl import gaussian_kl, kl_decomposition, project_onto_tree
from .model import NoiseFamily, load_sem, read_samples, sample, sem_to_covariance, sem_to_dict, write_samples
from .pc_tree import DEFAULT_CUTOFF, orient, pc_tree_skeleton

EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(obj, out):
    text = json.dumps(obj, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_gen_tree(args):
    rng = np.random.default_rng(args.seed)
    skel = random_labeled_tree(args.d, rng)
    tree = orient_from_root(skel, int(rng.integers(args.d)) if args.root is None else args.root)
    _emit(tree.to_dict(), args.out)
    if args.model_out:
        sem = sem_on_tree(tree, agnostic_beta_sampler(args.d - 1, args.z_scale, rng))
        with open(args.model_out, "w") as fh:
            json.dump(sem_to_dict(sem), fh, indent=2)


def cmd_simulate(args):
    X = sample(load_sem(args.model), args.n, args.noise, args.seed)
    if args.out:
        with open(args.out, "w") as fh:
            write_samples(X, fh, header=args.header)
    else:
        write_samples(X, sys.stdout, header=args.header)


def cmd_chow_liu(args):
    tree, skel, _ = chow_liu(read_samples(args.data), root=args.root)
    _emit(tree.to_dict(), args.out)
    if args.skeleton_out:
        _emit(skel.to_dict(), args.skeleton_out)


def cmd_pc_tree(args):
    skel, seps = pc_tree_skeleton(sample_covariance(read_samples(args.data)), args.cutoff)
    if args.sepsets_out:
        _emit(seps.to_dict(), args.sepsets_out)
    _emit(orient(skel, seps).to_dict(), args.out)


def cmd_kl(args):
    sigma = sem_to_covariance(load_sem(args.model))
    with open(args.tree) as fh:
        tree = DirectedTree.from_dict(json.load(fh))
    if tree.d != sigma.shape[0]:
        raise UsageError(f"tree has {tree.d} nodes but model has {sigma.shape[0]}")
    parts = kl_decomposition(sigma, tree)
    direct = gaussian_kl(sigma, project_onto_tree(sigma, tree).covariance)
    _emit({
        "edge_mi": [[a, b, v] for (a, b), v in parts["edge_mi"].items()],
        "joint_entropy": parts["joint_entropy"],
        "marginal_entropies": parts["marginal_entropies"],
        "total": parts["total"],
        "direct_kl": direct,
    }, None)


def cmd_gen_hard(args):
    if args.kind in ("nonrealizable", "realizable"):
        if args.epsilon is None:
            raise UsageError(f"{args.kind} needs --epsilon")
        g = (nonrealizable_gadget if args.kind == "nonrealizable" else realizable_gadget)(args.epsilon)
        obj = {
            "kind": args.kind,
            "epsilon": args.epsilon,
            "observed": list(g.observed),
            "sigma1": g.sigma1.tolist(),
            "sigma2": g.sigma2.tolist(),
            "models": [sem_to_dict(g.sem1), sem_to_dict(g.sem2)],
        }
    else:
        if args.c is None or args.d is None:
            raise UsageError("structure-lb needs --c and --d")
        obj = sem_to_dict(structure_lb_instance(args.d, args.c, args.seed))
    _emit(obj, args.out)


def cmd_bench(args):
    cfg = bench.load_config(args.config)
    overrides = {}
    if args.no_timing:
        overrides["timing"] = False
    if args.workers:
        overrides["workers"] = args.workers
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    records = bench.run_bench(cfg)
    text = bench.records_to_csv(records)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.summary:
        _emit({"config": cfg.metadata(), "summary": bench.aggregate(records)}, args.summary)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="polytree", description="Gaussian tree and polytree learning.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("gen-tree", help="random labeled tree oriented from a random root")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--root", type=int)
    s.add_argument("--out")
    s.add_argument("--model-out", help="also write a SEM on the tree with sampled coefficients")
    s.add_argument("--z-scale", type=float, default=0.0)
    s.set_defaults(func=cmd_gen_tree)

    s = sub.add_parser("simulate", help="draw samples from a model JSON")
    s.add_argument("--model", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--noise", choices=[f.value for f in NoiseFamily], default="gaussian")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.add_argument("--header", action="store_true")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("chow-liu", help="learn a directed tree from a sample CSV")
    s.add_argument("--data", required=True)
    s.add_argument("--out")
    s.add_argument("--root", type=int, default=0)
    s.add_argument("--skeleton-out")
    s.set_defaults(func=cmd_chow_liu)

    s = sub.add_parser("pc-tree", help="learn a CPDAG from a sample CSV")
    s.add_argument("--data", required=True)
    s.add_argument("--cutoff", type=float, default=DEFAULT_CUTOFF)
    s.add_argument("--out")
    s.add_argument("--sepsets-out")
    s.set_defaults(func=cmd_pc_tree)

    s = sub.add_parser("kl", help="KL from a model to its projection on a tree")
    s.add_argument("--model", required=True)
    s.add_argument("--tree", required=True)
    s.set_defaults(func=cmd_kl)

    s = sub.add_parser("gen-hard", help="lower-bound constructions")
    s.add_argument("kind", choices=["nonrealizable", "realizable", "structure-lb"])
    s.add_argument("--epsilon", type=float)
    s.add_argument("--c", type=float)
    s.add_argument("--d", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_gen_hard)

    s = sub.add_parser("bench", help="run the simulation benchmark")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--summary", help="write per-cell SHD/PRR summary JSON here")
    s.add_argument("--no-timing", action="store_true", help="write wall_time_ms as 0 for byte-stable output")
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (DegenerateConditioningError, OrientationConflictError) as err:
        print(f"numerical error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UsageError, ValueError, KeyError, OSError, PolytreeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
