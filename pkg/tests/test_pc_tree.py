import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polytree.errors import OrientationConflictError
from polytree.estimators import sample_covariance
from polytree.graphs import Cpdag, Skeleton, apply_meek_rules, cpdag_of
from polytree.hard_instances import faithfulness_parameter
from polytree.model import GaussianSem, sample, sem_to_covariance
from polytree.pc_tree import (EMPTY, SeparationSets, orient, parse_separation_sets, pc_tree,
                              pc_tree_from_covariance, pc_tree_skeleton)

from conftest import random_polytree_sem, seeds


def skel(d, *edges):
    return Skeleton(d, frozenset(edges))


def seps(**kw):
    out = SeparationSets()
    for key, v in kw.items():
        j, k = (int(c) for c in key[1:].split("_"))
        out[(j, k)] = frozenset(v)
    return out


def test_v_structure_skeleton_and_sepset():
    sigma = sem_to_covariance(GaussianSem.from_edges(3, [(0, 2, 0.5), (1, 2, 0.5)]))
    s, S = pc_tree_skeleton(sigma, 0.05)
    assert s.edges == {(0, 2), (1, 2)}
    assert S[(0, 1)] == {EMPTY} and S[(1, 0)] == {EMPTY}
    assert pc_tree_from_covariance(sigma, 0.05) == Cpdag(3, frozenset({(0, 2), (1, 2)}))


def test_chain_skeleton_and_sepset():
    sigma = sem_to_covariance(GaussianSem.from_edges(3, [(0, 1, 0.5), (1, 2, 0.5)]))
    s, S = pc_tree_skeleton(sigma, 0.05)
    assert s.edges == {(0, 1), (1, 2)}
    assert S[(0, 2)] == {1}
    assert pc_tree_from_covariance(sigma, 0.05) == Cpdag(3, undirected=frozenset({(0, 1), (1, 2)}))


def test_all_accepting_conditioners_recorded():
    # independent nodes: every test accepts, so S holds the empty marker and every other node
    s, S = pc_tree_skeleton(np.eye(4), 0.1)
    assert not s.edges
    assert S[(0, 3)] == {EMPTY, 1, 2}


def test_orient_examples():
    assert orient(skel(3, (0, 2), (1, 2)), seps(s0_1={EMPTY})) == Cpdag(3, frozenset({(0, 2), (1, 2)}))
    assert orient(skel(3, (0, 1), (1, 2)), seps(s0_2={1})) == Cpdag(3, undirected=frozenset({(0, 1), (1, 2)}))
    # collider at 1 from 0 and 2, plus leaf 3 hanging off 1: R1 orients 1 -> 3
    c = orient(skel(4, (0, 1), (1, 2), (1, 3)), seps(s0_2={EMPTY}, s0_3={1}, s2_3={1}))
    assert c.directed == {(0, 1), (2, 1), (1, 3)} and not c.undirected


def test_empty_marker_does_not_hide_collider():
    # S(0, 2) holds the empty marker and node 3, but not the middle node 1
    c = orient(skel(4, (0, 1), (1, 2), (2, 3)), seps(s0_2={EMPTY, 3}, s0_3={1, 2}, s1_3={2}))
    assert (0, 1) in c.directed and (2, 1) in c.directed


def test_orientation_conflict_is_loud():
    # path 0 - 1 - 2 - 3 where both 1 and 2 look like colliders
    with pytest.raises(OrientationConflictError) as err:
        orient(skel(4, (0, 1), (1, 2), (2, 3)), seps(s0_2={EMPTY}, s1_3={EMPTY}, s0_3={EMPTY}))
    assert err.value.edge == (1, 2)


def test_two_dependent_variables():
    X = sample(GaussianSem.from_edges(2, [(0, 1, 0.8)]), 500, "gaussian", 0)
    assert pc_tree(X, 0.05) == Cpdag(2, undirected=frozenset({(0, 1)}))


def test_cutoff_validation():
    with pytest.raises(ValueError):
        pc_tree_skeleton(np.eye(3), 1.0)
    with pytest.raises(ValueError):
        pc_tree_skeleton(np.eye(3), 0.0)


def test_oracle_recovery_sweep(rng):
    for _ in range(200):
        d = int(rng.integers(2, 9))
        sem = random_polytree_sem(d, rng)
        c = faithfulness_parameter(sem)
        cutoff = float(rng.uniform(0.05, 0.95)) * c
        s, S = pc_tree_skeleton(sem_to_covariance(sem), cutoff)
        assert s.edges == sem.graph.skeleton_edges()
        out = orient(s, S)
        assert out == cpdag_of(sem.graph)
        assert out.skeleton() == s
        assert apply_meek_rules(out.d, out.directed, out.undirected) == out


@settings(max_examples=50, deadline=None)
@given(seed=seeds, d=st.integers(3, 8))
def test_relabeling_commutes(seed, d):
    rng = np.random.default_rng(seed)
    sem = random_polytree_sem(d, rng)
    X = sample(sem, 300, "gaussian", rng)
    perm = rng.permutation(d)
    s, _ = pc_tree_skeleton(sample_covariance(X), 0.1)
    sp, _ = pc_tree_skeleton(sample_covariance(X[:, perm]), 0.1)
    # column i of the permuted data is original node perm[i]
    assert {tuple(sorted((int(perm[a]), int(perm[b])))) for a, b in sp.edges} == s.edges


def test_forest_is_not_padded():
    sem = GaussianSem.from_edges(5, [(0, 1, 0.5), (2, 3, 0.5)])
    s, _ = pc_tree_skeleton(sem_to_covariance(sem), 0.1)
    assert s.edges == {(0, 1), (2, 3)} and s.is_forest() and not s.is_tree()


def test_sepsets_round_trip():
    _, S = pc_tree_skeleton(np.eye(3), 0.1)
    obj = S.to_dict()
    assert obj["0,1"] == ["empty", 2]
    assert parse_separation_sets(obj) == S
