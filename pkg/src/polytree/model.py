"""Linear Gaussian SEMs over DAGs: exact covariances, sampling, file formats."""
from __future__ import annotations

import csv
import enum
import heapq
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import linalg

from .errors import CycleError, DegenerateConditioningError

Edge = tuple[int, int]


@dataclass(frozen=True)
class Dag:
    """Directed acyclic graph on nodes ``0..d-1``."""

    d: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be positive, got {self.d}")
        raw = [(int(a), int(b)) for a, b in self.edges]
        if len(set(raw)) != len(raw):
            raise ValueError("duplicate edges")
        for a, b in raw:
            if a == b:
                raise ValueError(f"self-loop at node {a}")
            if not (0 <= a < self.d and 0 <= b < self.d):
                raise ValueError(f"edge {(a, b)} out of range for d={self.d}")
        object.__setattr__(self, "edges", frozenset(raw))
        self.topological_order  # raises CycleError

    @cached_property
    def _parents(self) -> tuple[tuple[int, ...], ...]:
        pa = [[] for _ in range(self.d)]
        for a, b in self.edges:
            pa[b].append(a)
        return tuple(tuple(sorted(p)) for p in pa)

    @cached_property
    def _children(self) -> tuple[tuple[int, ...], ...]:
        ch = [[] for _ in range(self.d)]
        for a, b in self.edges:
            ch[a].append(b)
        return tuple(tuple(sorted(c)) for c in ch)

    def parents(self, k: int) -> tuple[int, ...]:
        return self._parents[k]

    def children(self, k: int) -> tuple[int, ...]:
        return self._children[k]

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        # Kahn's algorithm; the heap makes the order canonical (smallest id first).
        indeg = [len(p) for p in self._parents]
        heap = [k for k in range(self.d) if indeg[k] == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            k = heapq.heappop(heap)
            order.append(k)
            for c in self._children[k]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    heapq.heappush(heap, c)
        if len(order) != self.d:
            raise CycleError(self.edges)
        return tuple(order)

    @property
    def roots(self) -> tuple[int, ...]:
        return tuple(k for k in range(self.d) if not self._parents[k])

    def skeleton_edges(self) -> frozenset[Edge]:
        return frozenset((min(a, b), max(a, b)) for a, b in self.edges)


class NoiseFamily(str, enum.Enum):
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"
    LAPLACE = "laplace"

    @property
    def variance(self) -> float:
        """Variance of one raw draw (N(0,1), U(-1,1), Laplace(0,1))."""
        return {"gaussian": 1.0, "uniform": 1.0 / 3.0, "laplace": 2.0}[self.value]

    def draw(self, rng: np.random.Generator, size) -> np.ndarray:
        if self is NoiseFamily.GAUSSIAN:
            return rng.standard_normal(size)
        if self is NoiseFamily.UNIFORM:
            return rng.uniform(-1.0, 1.0, size)
        return rng.laplace(0.0, 1.0, size)


@dataclass(frozen=True)
class GaussianSem:
    """``X_k = sum_{p in pa(k)} beta[p, k] X_p + eta_k`` with independent noises.

    For non-Gaussian noise families ``noise_var`` acts as a squared scale on
    the raw draw, so ``noise_var = 1`` means the raw draw itself.
    """

    graph: Dag
    beta: Mapping[Edge, float]
    noise_var: tuple[float, ...]

    def __post_init__(self):
        beta = {(int(a), int(b)): float(v) for (a, b), v in self.beta.items()}
        if set(beta) != set(self.graph.edges):
            raise ValueError("beta keys must equal the graph's edge set")
        nv = tuple(float(v) for v in self.noise_var)
        if len(nv) != self.graph.d:
            raise ValueError(f"expected {self.graph.d} noise variances, got {len(nv)}")
        if not all(v > 0 and np.isfinite(v) for v in nv):
            raise ValueError("noise variances must be positive and finite")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "noise_var", nv)

    @classmethod
    def from_edges(cls, d: int, weighted_edges: Iterable[tuple[int, int, float]],
                   noise_var: float | Sequence[float] = 1.0) -> "GaussianSem":
        weighted_edges = list(weighted_edges)
        dag = Dag(d, frozenset((a, b) for a, b, _ in weighted_edges))
        if np.isscalar(noise_var):
            noise_var = (float(noise_var),) * d
        return cls(dag, {(a, b): w for a, b, w in weighted_edges}, tuple(noise_var))

    @property
    def d(self) -> int:
        return self.graph.d

    def coefficient_matrix(self) -> np.ndarray:
        """B with ``B[p, k] = beta`` for edge p -> k, so that ``X = B^T X + eta``."""
        B = np.zeros((self.d, self.d))
        for (a, b), v in self.beta.items():
            B[a, b] = v
        return B


def check_covariance(sigma, *, tol: float = 1e-12) -> np.ndarray:
    """Return ``sigma`` as a float array after checking symmetry and positive definiteness."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise ValueError(f"covariance must be square, got shape {sigma.shape}")
    scale = max(1.0, float(np.max(np.abs(sigma)))) if sigma.size else 1.0
    if not np.allclose(sigma, sigma.T, rtol=0.0, atol=tol * scale):
        raise ValueError("covariance is not symmetric")
    try:
        np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        raise DegenerateConditioningError("covariance is not positive definite") from None
    return sigma


def sem_to_covariance(sem: GaussianSem) -> np.ndarray:
    """Exact covariance implied by ``sem``, by forward substitution in topological order."""
    d = sem.d
    sigma = np.zeros((d, d))
    done: list[int] = []
    for k in sem.graph.topological_order:
        pa = list(sem.graph.parents(k))
        if pa:
            b = np.array([sem.beta[(p, k)] for p in pa])
            # Nodes earlier in the order are non-descendants of k, hence independent of eta_k.
            if done:
                sigma[k, done] = b @ sigma[np.ix_(pa, done)]
                sigma[done, k] = sigma[k, done]
            sigma[k, k] = b @ sigma[np.ix_(pa, pa)] @ b + sem.noise_var[k]
        else:
            sigma[k, k] = sem.noise_var[k]
        done.append(k)
    return sigma


def sample(sem: GaussianSem, n: int, noise: NoiseFamily | str = NoiseFamily.GAUSSIAN,
           seed: int | np.random.SeedSequence | None = 0) -> np.ndarray:
    """Draw ``n`` i.i.d. rows by ancestral sampling; deterministic for a fixed seed."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    noise = NoiseFamily(noise)
    rng = np.random.default_rng(seed)
    eta = noise.draw(rng, (n, sem.d)) * np.sqrt(np.asarray(sem.noise_var))
    X = np.empty((n, sem.d))
    for k in sem.graph.topological_order:
        pa = list(sem.graph.parents(k))
        X[:, k] = eta[:, k]
        if pa:
            X[:, k] += X[:, pa] @ np.array([sem.beta[(p, k)] for p in pa])
    return X


def conditional_covariance(sigma, targets: tuple[int, int], given: Iterable[int] = ()) -> np.ndarray:
    """2x2 covariance of ``targets`` given ``given`` (Schur complement)."""
    sigma = np.asarray(sigma, dtype=float)
    idx = list(targets)
    S = sorted(set(given))
    if set(idx) & set(S):
        raise ValueError("targets must not be in the conditioning set")
    block = sigma[np.ix_(idx, idx)].copy()
    if not S:
        return block
    try:
        cf = linalg.cho_factor(sigma[np.ix_(S, S)])
    except linalg.LinAlgError:
        raise DegenerateConditioningError(
            "conditioning block is singular", pair=targets, given=S) from None
    cross = sigma[np.ix_(S, idx)]
    return block - cross.T @ linalg.cho_solve(cf, cross)


# --- file formats -----------------------------------------------------------

def sem_to_dict(sem: GaussianSem) -> dict:
    return {
        "d": sem.d,
        "edges": [[a, b, sem.beta[(a, b)]] for a, b in sorted(sem.graph.edges)],
        "noise_var": list(sem.noise_var),
    }


def sem_from_dict(obj: Mapping) -> GaussianSem:
    d = int(obj["d"])
    edges = [(int(a), int(b), float(w)) for a, b, w in obj.get("edges", [])]
    return GaussianSem.from_edges(d, edges, obj.get("noise_var", 1.0))


def save_sem(sem: GaussianSem, path) -> None:
    with open(path, "w") as fh:
        json.dump(sem_to_dict(sem), fh, indent=2)


def load_sem(path) -> GaussianSem:
    with open(path) as fh:
        return sem_from_dict(json.load(fh))


def write_samples(X: np.ndarray, fh, header: bool = False) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    if header:
        writer.writerow([f"x{k}" for k in range(X.shape[1])])
    for row in X:
        writer.writerow([repr(float(v)) for v in row])


def read_samples(path) -> np.ndarray:
    with open(path) as fh:
        first = fh.readline()
    skip = 1 if first.strip().startswith("x") else 0
    X = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)
    if not np.all(np.isfinite(X)):
        raise ValueError("sample matrix contains non-finite entries")
    return X
