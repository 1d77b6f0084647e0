"""Adversarial constructions behind the lower bounds, plus the tree-faithfulness parameter."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimators import singleton_partial_correlations
from .graphs import DirectedTree, Skeleton, orient_from_root, random_labeled_tree, v_structures
from .model import GaussianSem, sem_to_covariance

#: Returned by :func:`faithfulness_parameter` when the graph imposes no constraint.
NO_CONSTRAINTS = math.inf

# The three trees on (X, Y, Z) = (0, 1, 2): Y-X-Z, X-Y-Z, X-Z-Y.
GADGET_TREES = {
    "T1": Skeleton(3, frozenset({(0, 1), (0, 2)})),
    "T2": Skeleton(3, frozenset({(0, 1), (1, 2)})),
    "T3": Skeleton(3, frozenset({(0, 2), (1, 2)})),
}


@dataclass(frozen=True, eq=False)
class GadgetPair:
    """Exact covariances of two 3-variable distributions over (X, Y, Z)."""

    sigma1: np.ndarray
    sigma2: np.ndarray
    epsilon: float
    sem1: GaussianSem
    sem2: GaussianSem
    observed: tuple[int, ...] = (0, 1, 2)


def nonrealizable_sems(epsilon: float) -> tuple[GaussianSem, GaussianSem]:
    """Latent-hub SEMs on (H, X, Y, Z) = (0, 1, 2, 3); only X or Y gets the ``1 + eps`` loading."""
    one = 1.0 + epsilon
    q1 = GaussianSem.from_edges(4, [(0, 1, one), (0, 2, 1.0), (0, 3, 1.0)])
    q2 = GaussianSem.from_edges(4, [(0, 1, 1.0), (0, 2, one), (0, 3, 1.0)])
    return q1, q2


def nonrealizable_gadget(epsilon: float) -> GadgetPair:
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    q1, q2 = nonrealizable_sems(epsilon)
    obs = [1, 2, 3]
    s1 = sem_to_covariance(q1)[np.ix_(obs, obs)]
    s2 = sem_to_covariance(q2)[np.ix_(obs, obs)]
    return GadgetPair(s1, s2, epsilon, q1, q2, observed=(1, 2, 3))


def realizable_gadget(epsilon: float) -> GadgetPair:
    """Y = (1 - sqrt(eps)) X + sqrt(eps) N(0,1); Z hangs off X in the first model, off Y in the second."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    a = 1.0 - math.sqrt(epsilon)
    r1 = GaussianSem.from_edges(3, [(0, 1, a), (0, 2, 0.5)], (1.0, epsilon, 0.25))
    r2 = GaussianSem.from_edges(3, [(0, 1, a), (1, 2, 0.5)], (1.0, epsilon, 0.25))
    return GadgetPair(sem_to_covariance(r1), sem_to_covariance(r2), epsilon, r1, r2)


def structure_lb_instance(d: int, c: float, seed=None) -> GaussianSem:
    """Uniform random directed tree rooted at node 0, every coefficient ``sqrt(2) c``, unit noise."""
    if d < 2:
        raise ValueError("d must be at least 2")
    if not (c > 0 and c * c <= 0.2):
        raise ValueError(f"need 0 < c and c^2 <= 1/5, got c={c}")
    tree = orient_from_root(random_labeled_tree(d, seed), 0)
    beta = math.sqrt(2.0) * c
    return GaussianSem(tree.dag, {e: beta for e in tree.dag.edges}, (1.0,) * d)


def faithfulness_parameter(sem: GaussianSem) -> float:
    """Largest ``c`` for which ``sem`` is c-strong tree-faithful to its own graph.

    Minimum of ``|rho(j, k | l)|`` over adjacent pairs with ``l`` empty or any
    single other node, and over v-structures ``j -> l <- k`` given the
    collider. Returns :data:`NO_CONSTRAINTS` for an edgeless graph.
    """
    if not Skeleton(sem.d, sem.graph.skeleton_edges()).is_forest():
        raise ValueError("faithfulness parameter is defined for polytrees")
    if not sem.graph.edges:
        return NO_CONSTRAINTS
    R, P = singleton_partial_correlations(sem_to_covariance(sem))
    vals = []
    for j, k in sem.graph.skeleton_edges():
        vals.append(abs(R[j, k]))
        vals.append(np.nanmin(np.abs(P[j, k])) if sem.d > 2 else math.inf)
    for j, l, k in v_structures(sem.graph):
        vals.append(abs(P[j, k, l]))
    return float(min(vals))


def agnostic_beta_sampler(size: int, z_scale: float = 0.0, seed=None) -> np.ndarray:
    """``beta_k = alpha_k + z``: alpha_k iid uniform on ±[0.1, 0.5), one shared z ~ U[-z_scale, z_scale]."""
    if z_scale < 0:
        raise ValueError("z_scale must be non-negative")
    rng = np.random.default_rng(seed)
    mag = rng.uniform(0.1, 0.5, size)
    sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
    z = rng.uniform(-z_scale, z_scale) if z_scale > 0 else 0.0
    return sign * mag + z


def sem_on_tree(dag_or_tree, betas, noise_var=1.0) -> GaussianSem:
    """Attach coefficients (in sorted edge order) to a DAG or directed tree."""
    dag = dag_or_tree.dag if isinstance(dag_or_tree, DirectedTree) else dag_or_tree
    edges = sorted(dag.edges)
    betas = np.asarray(betas, dtype=float)
    if len(betas) < len(edges):
        raise ValueError(f"need {len(edges)} coefficients, got {len(betas)}")
    nv = (float(noise_var),) * dag.d if np.isscalar(noise_var) else tuple(noise_var)
    return GaussianSem(dag, dict(zip(edges, betas[: len(edges)])), nv)


def bounded_parameter_sem(tree: DirectedTree, M: float, seed=None) -> GaussianSem:
    """Directed-tree SEM with ``|beta|`` and noise variances uniform in ``[1/M, M]``, random signs."""
    if M <= 1:
        raise ValueError("M must exceed 1")
    rng = np.random.default_rng(seed)
    m = len(tree.dag.edges)
    betas = rng.uniform(1.0 / M, M, m) * np.where(rng.random(m) < 0.5, -1.0, 1.0)
    return sem_on_tree(tree, betas, tuple(rng.uniform(1.0 / M, M, tree.d)))


def structure_vs_distribution_pair(d: int, c: float) -> tuple[GaussianSem, GaussianSem]:
    """Two directed trees with different skeletons whose distributions are O(c^2) apart in KL.

    First: 0 -> 1, 1 -> 2, 1 -> m for m >= 3. Second: 1 -> 2, 2 -> 0, 1 -> m for m >= 3.
    Every coefficient is ``sqrt(2) c`` with unit noise.
    """
    if d < 3:
        raise ValueError("d must be at least 3")
    beta = math.sqrt(2.0) * c
    rest = [(1, m, beta) for m in range(3, d)]
    p = GaussianSem.from_edges(d, [(0, 1, beta), (1, 2, beta)] + rest)
    q = GaussianSem.from_edges(d, [(1, 2, beta), (2, 0, beta)] + rest)
    return p, q
