import numpy as np
import pytest
from hypothesis import strategies as st

from polytree.graphs import random_directed_tree, random_polytree
from polytree.hard_instances import agnostic_beta_sampler, sem_on_tree


def random_pd(d, rng, cond_floor=0.05):
    """Wishart-ish PD matrix with a ridge so it is never near-singular."""
    A = rng.normal(size=(d, d + 2))
    S = A @ A.T / (d + 2)
    return S + cond_floor * np.eye(d)


def random_tree_sem(d, rng):
    tree = random_directed_tree(d, rng)
    return tree, sem_on_tree(tree, agnostic_beta_sampler(d - 1, 0.0, rng))


def random_polytree_sem(d, rng):
    dag = random_polytree(d, rng)
    return sem_on_tree(dag, agnostic_beta_sampler(d - 1, 0.0, rng))


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# Lines reported by the acceptance checks, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
