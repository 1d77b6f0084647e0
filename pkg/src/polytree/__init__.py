"""Learning Gaussian trees (Chow-Liu) and Gaussian polytrees (PC-Tree)."""
from .chow_liu import chow_liu, chow_liu_from_covariance
from .errors import (CycleError, DegenerateConditioningError, InfiniteMutualInformationError,
                     OrientationConflictError, PolytreeError)
from .estimators import partial_correlation, sample_covariance
from .graphs import Cpdag, Dag, DirectedTree, Skeleton, cpdag_of, d_separated, shd
from .kl import best_tree_bruteforce, gaussian_kl, kl_to_tree, project_onto_tree
from .model import GaussianSem, NoiseFamily, sample, sem_to_covariance
from .pc_tree import EMPTY, orient, pc_tree, pc_tree_from_covariance, pc_tree_skeleton

__version__ = "0.1.0"
