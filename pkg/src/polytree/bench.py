"""Simulation benchmark: random trees, SEM data, learned skeletons, SHD and PRR."""
from __future__ import annotations

import csv
import io
import json
import logging
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .chow_liu import chow_liu
from .errors import PolytreeError
from .estimators import sample_covariance
from .graphs import Cpdag, Skeleton, cpdag_of, exact_recovery, random_directed_tree, shd
from .hard_instances import agnostic_beta_sampler, sem_on_tree
from .model import NoiseFamily, sample
from .pc_tree import DEFAULT_CUTOFF, orient, pc_tree_skeleton

log = logging.getLogger(__name__)

ALGORITHMS = ("chow_liu", "pc_tree")
CSV_HEADER = ["d", "n", "noise", "algorithm", "trial", "seed", "shd", "exact", "wall_time_ms"]


@dataclass(frozen=True)
class BenchConfig:
    d_list: tuple[int, ...]
    n_list: tuple[int, ...]
    noise: NoiseFamily = NoiseFamily.GAUSSIAN
    trials: int = 50
    algorithms: tuple[str, ...] = ALGORITHMS
    cutoff: float = DEFAULT_CUTOFF
    beta_mode: str = "iid"
    z_scale: float = 0.0
    seed: int = 0
    metric: str = "skeleton"
    timing: bool = True
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "d_list", tuple(int(d) for d in self.d_list))
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        object.__setattr__(self, "noise", NoiseFamily(self.noise))
        if not self.d_list or not self.n_list:
            raise ValueError("d_list and n_list must be non-empty")
        if min(self.d_list) < 2 or min(self.n_list) < 1:
            raise ValueError("need d >= 2 and n >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.algorithms or set(self.algorithms) - set(ALGORITHMS):
            raise ValueError(f"algorithms must be a non-empty subset of {ALGORITHMS}")
        if self.beta_mode not in ("iid", "agnostic"):
            raise ValueError("beta_mode must be 'iid' or 'agnostic'")
        if self.metric not in ("skeleton", "cpdag"):
            raise ValueError("metric must be 'skeleton' or 'cpdag'")

    @property
    def effective_z_scale(self) -> float:
        return self.z_scale if self.beta_mode == "agnostic" else 0.0

    @classmethod
    def from_dict(cls, obj: dict) -> "BenchConfig":
        obj = dict(obj)
        mode = obj.get("beta_mode", "iid")
        if isinstance(mode, dict):  # {"agnostic": z_scale}
            (name, z), = mode.items()
            obj["beta_mode"], obj["z_scale"] = name, float(z)
        return cls(**obj)

    def metadata(self) -> dict:
        meta = asdict(self)
        meta["noise"] = self.noise.value
        meta["beta_support"] = "uniform on ±[0.1, 0.5)"
        meta["seed_mixing"] = "SeedSequence([seed, d, n, trial]).generate_state(1)[0]"
        return meta


@dataclass
class TrialRecord:
    d: int
    n: int
    noise: str
    algorithm: str
    trial: int
    seed: int
    shd: int
    exact: bool
    wall_time_ms: float
    note: str = field(default="", compare=False)

    def row(self) -> list:
        return [self.d, self.n, self.noise, self.algorithm, self.trial, self.seed,
                self.shd, int(self.exact), f"{self.wall_time_ms:.3f}"]


def trial_seed(master: int, d: int, n: int, trial: int) -> int:
    """Per-trial seed mixed from the grid coordinates, so sub-grids reproduce independently."""
    return int(np.random.SeedSequence([master, d, n, trial]).generate_state(1)[0])


def _learn(algorithm: str, X: np.ndarray, cutoff: float, metric: str):
    if algorithm == "chow_liu":
        tree, skel, _ = chow_liu(X)
        return skel if metric == "skeleton" else cpdag_of(tree.dag)
    skel, seps = pc_tree_skeleton(sample_covariance(X), cutoff)
    cpdag = orient(skel, seps)  # run in full even when only the skeleton is scored
    return skel if metric == "skeleton" else cpdag


def run_trial(config: BenchConfig, d: int, n: int, trial: int) -> list[TrialRecord]:
    seed = trial_seed(config.seed, d, n, trial)
    rng = np.random.default_rng(seed)
    tree = random_directed_tree(d, rng)
    sem = sem_on_tree(tree, agnostic_beta_sampler(d - 1, config.effective_z_scale, rng))
    X = sample(sem, n, config.noise, rng)
    truth = tree.skeleton() if config.metric == "skeleton" else cpdag_of(tree.dag)
    out = []
    for alg in config.algorithms:
        note = ""
        t0 = time.perf_counter()
        try:
            learned = _learn(alg, X, config.cutoff, config.metric)
        except PolytreeError as err:
            note = f"{type(err).__name__}: {err}"
            learned = Skeleton(d) if config.metric == "skeleton" else Cpdag(d)
            if alg == "pc_tree" and config.metric == "skeleton":
                try:
                    learned = pc_tree_skeleton(sample_covariance(X), config.cutoff)[0]
                except PolytreeError:
                    pass
        ms = (time.perf_counter() - t0) * 1e3 if config.timing else 0.0
        dist = shd(truth, learned)
        if note:
            log.warning("d=%d n=%d trial=%d %s: %s", d, n, trial, alg, note)
        out.append(TrialRecord(d, n, config.noise.value, alg, trial, seed, dist,
                               exact_recovery(truth, learned), ms, note))
    return out


def _run_cell(args):
    return run_trial(*args)


def run_bench(config: BenchConfig) -> list[TrialRecord]:
    cells = [(config, d, n, t) for d in config.d_list for n in config.n_list for t in range(config.trials)]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            chunks = list(pool.map(_run_cell, cells, chunksize=8))
    else:
        chunks = [_run_cell(c) for c in cells]
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=lambda r: (r.d, r.n, r.algorithm, r.trial))
    return records


def aggregate(records) -> list[dict]:
    """Mean SHD and PRR per (d, n, noise, algorithm)."""
    groups = defaultdict(list)
    for r in records:
        groups[(r.d, r.n, r.noise, r.algorithm)].append(r)
    rows = []
    for (d, n, noise, alg), rs in sorted(groups.items()):
        rows.append({
            "d": d, "n": n, "noise": noise, "algorithm": alg, "trials": len(rs),
            "mean_shd": float(np.mean([r.shd for r in rs])),
            "prr": float(np.mean([r.exact for r in rs])),
        })
    return rows


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(r.row())
    return buf.getvalue()


def read_records(path) -> list[TrialRecord]:
    with open(path, newline="") as fh:
        return [
            TrialRecord(int(row["d"]), int(row["n"]), row["noise"], row["algorithm"], int(row["trial"]),
                        int(row["seed"]), int(row["shd"]), row["exact"] == "1", float(row["wall_time_ms"]))
            for row in csv.DictReader(fh)
        ]


def load_config(path) -> BenchConfig:
    with open(path) as fh:
        return BenchConfig.from_dict(json.load(fh))
