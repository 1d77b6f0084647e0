"""PC-Tree: polytree skeleton from marginal and single-conditioner CI tests, then ORIENT."""
from __future__ import annotations

import enum

import numpy as np

from .errors import OrientationConflictError
from .estimators import sample_covariance, singleton_partial_correlations
from .graphs import Cpdag, Skeleton, apply_meek_rules

DEFAULT_CUTOFF = 0.05


class Marker(enum.Enum):
    EMPTY = "empty"

    def __repr__(self):
        return "EMPTY"


#: Stands for the empty conditioning set inside a separating set.
EMPTY = Marker.EMPTY


class SeparationSets(dict):
    """``(j, k) -> frozenset`` of separators; pair order does not matter on lookup."""

    def __getitem__(self, pair):
        j, k = pair
        return super().__getitem__((j, k) if j < k else (k, j))

    def __contains__(self, pair):
        j, k = pair
        return super().__contains__((j, k) if j < k else (k, j))

    def to_dict(self) -> dict:
        return {
            f"{j},{k}": (["empty"] if EMPTY in seps else []) + sorted(s for s in seps if s is not EMPTY)
            for (j, k), seps in sorted(self.items())
        }


def pc_tree_skeleton(sigma_hat, cutoff: float = DEFAULT_CUTOFF) -> tuple[Skeleton, SeparationSets]:
    """Keep ``j - k`` iff every test given ``{}`` and every single other node rejects independence.

    All ``d - 1`` tests are evaluated for every pair; for dropped pairs the
    full set of accepting conditioners is recorded.
    """
    if not 0.0 < cutoff < 1.0:
        raise ValueError(f"cutoff must lie in (0, 1), got {cutoff}")
    sig = np.asarray(sigma_hat, dtype=float)
    d = sig.shape[0]
    if d < 2:
        raise ValueError("need at least two variables")
    R, P = singleton_partial_correlations(sig)
    marginal_accept = np.abs(R) < cutoff
    with np.errstate(invalid="ignore"):
        cond_accept = np.abs(P) < cutoff  # NaN compares False
    any_accept = marginal_accept | cond_accept.any(axis=2)
    edges = []
    sepsets = SeparationSets()
    for j in range(d):
        for k in range(j + 1, d):
            if not any_accept[j, k]:
                edges.append((j, k))
                continue
            seps = {int(l) for l in np.flatnonzero(cond_accept[j, k])}
            if marginal_accept[j, k]:
                seps.add(EMPTY)
            sepsets[(j, k)] = frozenset(seps)
    return Skeleton(d, frozenset(edges)), sepsets


def orient(skeleton: Skeleton, sepsets: SeparationSets) -> Cpdag:
    """Orient unshielded colliders absent from the separating set, then close under R1-R4."""
    required: dict[tuple[int, int], tuple[tuple[int, int], list]] = {}
    for l in range(skeleton.d):
        nbrs = sorted(skeleton.neighbors(l))
        for a in range(len(nbrs)):
            for b in range(a + 1, len(nbrs)):
                j, k = nbrs[a], nbrs[b]
                if skeleton.adjacent(j, k):
                    continue
                if (j, k) not in sepsets:
                    raise ValueError(f"no separating set recorded for non-adjacent pair {(j, k)}")
                if l in sepsets[(j, k)]:
                    continue
                for tail in (j, k):
                    key = (min(tail, l), max(tail, l))
                    prev = required.get(key)
                    if prev is not None and prev[0] != (tail, l):
                        raise OrientationConflictError(key, prev[1] + [(j, l, k)])
                    if prev is None:
                        required[key] = ((tail, l), [(j, l, k)])
                    else:
                        prev[1].append((j, l, k))
    directed = {arrow for arrow, _ in required.values()}
    undirected = skeleton.edges - set(required)
    return apply_meek_rules(skeleton.d, directed, undirected)


def pc_tree_from_covariance(sigma_hat, cutoff: float = DEFAULT_CUTOFF) -> Cpdag:
    skel, seps = pc_tree_skeleton(sigma_hat, cutoff)
    return orient(skel, seps)


def pc_tree(data, cutoff: float = DEFAULT_CUTOFF) -> Cpdag:
    return pc_tree_from_covariance(sample_covariance(data), cutoff)


def parse_separation_sets(obj: dict) -> SeparationSets:
    out = SeparationSets()
    for key, seps in obj.items():
        j, k = (int(v) for v in key.split(","))
        out[(min(j, k), max(j, k))] = frozenset(EMPTY if s == "empty" else int(s) for s in seps)
    return out
