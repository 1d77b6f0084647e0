"""Chow-Liu tree learning with Gaussian mutual-information weights."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConditioningError
from .estimators import empirical_mi, sample_covariance
from .graphs import DirectedTree, Skeleton, orient_from_root

UndirectedTree = Skeleton


@dataclass(frozen=True, eq=False)
class WeightedCompleteGraph:
    """Symmetric ``d x d`` weight matrix; the diagonal is unused."""

    d: int
    weights: np.ndarray

    def weight(self, j: int, k: int) -> float:
        return float(self.weights[j, k])

    def pairs(self):
        for j in range(self.d):
            for k in range(j + 1, self.d):
                yield j, k, float(self.weights[j, k])


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def pairwise_mi_graph(sigma_hat) -> WeightedCompleteGraph:
    sig = np.asarray(sigma_hat, dtype=float)
    d = sig.shape[0]
    if np.any(np.diag(sig) <= 0):
        raise DegenerateConditioningError("all variances must be positive")
    W = np.zeros((d, d))
    for j in range(d):
        for k in range(j + 1, d):
            try:
                W[j, k] = W[k, j] = empirical_mi(sig, j, k)
            except DegenerateConditioningError as err:
                raise type(err)(f"mutual information for pair {(j, k)}: {err}", pair=(j, k)) from err
    return WeightedCompleteGraph(d, W)


def max_weight_spanning_tree(g: WeightedCompleteGraph) -> Skeleton:
    """Kruskal; ties broken by the lexicographically smaller pair."""
    order = sorted(g.pairs(), key=lambda t: (-t[2], t[0], t[1]))
    uf = UnionFind(g.d)
    edges = []
    for j, k, _ in order:
        if uf.union(j, k):
            edges.append((j, k))
            if len(edges) == g.d - 1:
                break
    return Skeleton(g.d, frozenset(edges))


def orient_arbitrary(t: Skeleton, root: int = 0) -> DirectedTree:
    return orient_from_root(t, root)


def chow_liu_from_covariance(sigma_hat, root: int = 0):
    g = pairwise_mi_graph(sigma_hat)
    skel = max_weight_spanning_tree(g)
    return orient_arbitrary(skel, root), skel, g


def chow_liu(data, root: int = 0):
    """Learn a tree from samples; returns ``(directed_tree, skeleton, mi_graph)``."""
    X = np.asarray(data, dtype=float)
    if X.ndim != 2 or X.shape[1] < 2:
        raise ValueError("need at least two variables")
    return chow_liu_from_covariance(sample_covariance(X), root)
