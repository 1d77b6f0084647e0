"""KL divergences between zero-mean Gaussians and their tree projections. Units are nats."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import DegenerateConditioningError
from .graphs import DirectedTree, Skeleton, enumerate_labeled_trees, orient_from_root
from .model import GaussianSem, sem_to_covariance

MAX_BRUTEFORCE_D = 8
_LOG_2PIE = math.log(2 * math.pi * math.e)


def _chol(sigma, name):
    try:
        return linalg.cho_factor(np.asarray(sigma, dtype=float), lower=True)
    except linalg.LinAlgError:
        raise DegenerateConditioningError(f"{name} is not positive definite") from None


def _logdet(cf) -> float:
    return 2.0 * float(np.sum(np.log(np.diag(cf[0]))))


def gaussian_kl(sigma0, sigma1) -> float:
    """``KL(N(0, sigma0) || N(0, sigma1))``."""
    s0 = np.asarray(sigma0, dtype=float)
    s1 = np.asarray(sigma1, dtype=float)
    if s0.shape != s1.shape:
        raise ValueError(f"shape mismatch {s0.shape} vs {s1.shape}")
    c0, c1 = _chol(s0, "sigma0"), _chol(s1, "sigma1")
    d = s0.shape[0]
    trace = float(np.trace(linalg.cho_solve(c1, s0)))
    return 0.5 * (trace - d + _logdet(c1) - _logdet(c0))


@dataclass(frozen=True)
class TreeProjection:
    tree: DirectedTree
    projected: GaussianSem

    @property
    def covariance(self) -> np.ndarray:
        return sem_to_covariance(self.projected)


def project_onto_tree(sigma, t: DirectedTree) -> TreeProjection:
    """Moment-matching tree SEM: each node regressed on its tree parent."""
    sig = np.asarray(sigma, dtype=float)
    beta = {}
    noise = np.empty(t.d)
    for k in range(t.d):
        p = t.parent(k)
        if p is None:
            noise[k] = sig[k, k]
            continue
        if not sig[p, p] > 0:
            raise DegenerateConditioningError(f"parent {p} of node {k} has zero variance")
        b = sig[k, p] / sig[p, p]
        beta[(p, k)] = b
        noise[k] = sig[k, k] - b * sig[k, p]
    return TreeProjection(t, GaussianSem(t.dag, beta, tuple(noise)))


def _edge_pairs(t) -> frozenset:
    if isinstance(t, DirectedTree):
        return t.dag.skeleton_edges()
    if isinstance(t, Skeleton):
        return t.edges
    raise TypeError(f"expected a DirectedTree or Skeleton, got {type(t).__name__}")


def gaussian_mi(sigma, j: int, k: int) -> float:
    r2 = sigma[j, k] ** 2 / (sigma[j, j] * sigma[k, k])
    return -0.5 * math.log1p(-r2)


def kl_decomposition(sigma, t) -> dict:
    """Terms of ``-sum_i I(X_i; X_pa(i)) - H(X) + sum_i H(X_i)`` and their total."""
    sig = np.asarray(sigma, dtype=float)
    cf = _chol(sig, "sigma")
    d = sig.shape[0]
    joint = 0.5 * (d * _LOG_2PIE + _logdet(cf))
    marginals = [0.5 * (_LOG_2PIE + math.log(sig[i, i])) for i in range(d)]
    mi = {e: gaussian_mi(sig, *e) for e in sorted(_edge_pairs(t))}
    total = -sum(mi.values()) - joint + sum(marginals)
    return {"edge_mi": mi, "joint_entropy": joint, "marginal_entropies": marginals, "total": total}


def kl_to_tree(sigma, t) -> float:
    """``KL(P || P_T)``; depends on ``t`` only through its skeleton."""
    return kl_decomposition(sigma, t)["total"]


def best_tree_bruteforce(sigma) -> tuple[DirectedTree, float]:
    """Minimize ``kl_to_tree`` over all labeled trees (``d <= 8``)."""
    sig = np.asarray(sigma, dtype=float)
    d = sig.shape[0]
    if d > MAX_BRUTEFORCE_D:
        raise ValueError(f"brute force limited to d <= {MAX_BRUTEFORCE_D}, got {d}")
    if d == 1:
        raise ValueError("need at least two variables")
    base = kl_decomposition(sig, Skeleton(d))["total"]  # empty graph: sum H_i - H
    mi = np.zeros((d, d))
    for j in range(d):
        for k in range(j + 1, d):
            mi[j, k] = gaussian_mi(sig, j, k)
    best, best_score = None, -math.inf
    for t in enumerate_labeled_trees(d):
        score = sum(mi[a, b] for a, b in t.edges)
        if score > best_score:
            best, best_score = t, score
    return orient_from_root(best, 0), base - best_score
