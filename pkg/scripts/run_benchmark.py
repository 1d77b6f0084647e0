"""Benchmark grid over noise families; writes one CSV per family and a summary table.

    python3 scripts/run_benchmark.py --config configs/desk_bench.json --outdir results/
"""
import argparse
import dataclasses
import json
import logging
from pathlib import Path

from polytree.bench import aggregate, load_config, records_to_csv, run_bench


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config", default="configs/desk_bench.json")
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--noises", nargs="+", default=["gaussian", "uniform", "laplace"])
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    logging.basicConfig(level=logging.ERROR)

    base = load_config(args.config)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    summary = []
    for noise in args.noises:
        cfg = dataclasses.replace(base, noise=noise, workers=args.workers)
        records = run_bench(cfg)
        (out / f"bench_{noise}.csv").write_text(records_to_csv(records))
        summary += aggregate(records)

    print(f"{'noise':9s} {'alg':9s} {'d':>4s} {'n':>6s} {'SHD':>7s} {'PRR':>6s}")
    for row in summary:
        print(f"{row['noise']:9s} {row['algorithm']:9s} {row['d']:4d} {row['n']:6d} "
              f"{row['mean_shd']:7.3f} {row['prr']:6.2f}")
    meta = dataclasses.replace(base, noise=args.noises[0]).metadata()
    (out / "summary.json").write_text(json.dumps({"config": meta, "summary": summary}, indent=2))


if __name__ == "__main__":
    main()
