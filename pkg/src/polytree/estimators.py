"""Second-moment estimators, partial correlations, Gaussian (conditional) MI and testers.

Everything works on raw second moments: the model is zero-mean, so no
centering is done and the normalization is 1/n.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import linalg

from .errors import DegenerateConditioningError, InfiniteMutualInformationError

# Correlations this close outside [-1, 1] are roundoff; anything larger is an error.
CLAMP_SLACK = 1e-9
CLAMP_VALUE = 1.0 - 1e-12
# A conditional variance below this fraction of the raw variance counts as collapsed.
VARIANCE_RTOL = 1e-12


@dataclass(frozen=True)
class CorrelationEstimate:
    value: float
    pair: tuple[int, int]
    given: frozenset[int] = frozenset()
    n_effective: int | None = None


class Decision(str, enum.Enum):
    ACCEPT_INDEPENDENCE = "accept_independence"
    REJECT_INDEPENDENCE = "reject_independence"


@dataclass(frozen=True)
class CiDecision:
    decision: Decision
    statistic: float
    cutoff: float

    @property
    def dependent(self) -> bool:
        return self.decision is Decision.REJECT_INDEPENDENCE


def sample_covariance(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError("need a 2-d sample matrix with at least one row")
    return X.T @ X / X.shape[0]


def clamp_correlation(r: float, *, pair=None, given=None) -> float:
    if not math.isfinite(r) or abs(r) >= 1.0 + CLAMP_SLACK:
        raise DegenerateConditioningError(f"correlation {r!r} outside [-1, 1]", pair=pair, given=given)
    if abs(r) >= 1.0:
        return math.copysign(CLAMP_VALUE, r)
    return float(r)


def _check_variance(v: float, ref: float, which: str, pair, given) -> None:
    if not v > VARIANCE_RTOL * max(ref, 0.0) or not ref > 0:
        raise DegenerateConditioningError(
            f"conditional variance of node {which} collapsed ({v!r})", pair=pair, given=given)


def partial_correlation(sigma_hat, j: int, k: int, S: Iterable[int] = (),
                        n_effective: int | None = None) -> CorrelationEstimate:
    """Sample partial correlation of ``j`` and ``k`` given the set ``S``."""
    S = frozenset(int(s) for s in S)
    if j == k or j in S or k in S:
        raise ValueError("need j != k and j, k not in S")
    sig = np.asarray(sigma_hat, dtype=float)
    if len(S) == 0:
        cjk, vj, vk = sig[j, k], sig[j, j], sig[k, k]
        _check_variance(vj, vj, str(j), (j, k), S)
        _check_variance(vk, vk, str(k), (j, k), S)
    elif len(S) == 1:
        (l,) = S
        sll = sig[l, l]
        _check_variance(sll, sll, str(l), (j, k), S)
        cjk = sig[j, k] - sig[j, l] * sig[k, l] / sll
        vj = sig[j, j] - sig[j, l] ** 2 / sll
        vk = sig[k, k] - sig[k, l] ** 2 / sll
        _check_variance(vj, sig[j, j], str(j), (j, k), S)
        _check_variance(vk, sig[k, k], str(k), (j, k), S)
    else:
        return partial_correlation_general(sig, j, k, S, n_effective)
    r = cjk / math.sqrt(vj * vk)
    return CorrelationEstimate(clamp_correlation(r, pair=(j, k), given=S), (j, k), S, n_effective)


def partial_correlation_general(sigma_hat, j: int, k: int, S: Iterable[int] = (),
                                n_effective: int | None = None) -> CorrelationEstimate:
    """Same quantity through a Cholesky solve on the conditioning block (any ``|S|``)."""
    S = frozenset(int(s) for s in S)
    sig = np.asarray(sigma_hat, dtype=float)
    idx = [j, k]
    block = sig[np.ix_(idx, idx)]
    if S:
        s = sorted(S)
        try:
            cf = linalg.cho_factor(sig[np.ix_(s, s)])
        except linalg.LinAlgError:
            raise DegenerateConditioningError("conditioning block is singular", pair=(j, k), given=S) from None
        cross = sig[np.ix_(s, idx)]
        block = block - cross.T @ linalg.cho_solve(cf, cross)
    _check_variance(block[0, 0], sig[j, j], str(j), (j, k), S)
    _check_variance(block[1, 1], sig[k, k], str(k), (j, k), S)
    r = block[0, 1] / math.sqrt(block[0, 0] * block[1, 1])
    return CorrelationEstimate(clamp_correlation(r, pair=(j, k), given=S), (j, k), S, n_effective)


def singleton_partial_correlations(sigma_hat) -> tuple[np.ndarray, np.ndarray]:
    """All marginal and single-conditioner partial correlations at once.

    Returns ``(R, P)`` with ``R[j, k] = rho_{jk}`` and ``P[j, k, l] = rho_{jk|l}``.
    Entries with repeated indices are NaN.
    """
    sig = np.asarray(sigma_hat, dtype=float)
    d = sig.shape[0]
    var = np.diag(sig).copy()
    if np.any(~(var > 0)):
        bad = int(np.flatnonzero(~(var > 0))[0])
        raise DegenerateConditioningError(f"variance of node {bad} is not positive")
    sd = np.sqrt(var)
    R = sig / np.outer(sd, sd)
    np.fill_diagonal(R, 1.0)
    resid = 1.0 - R**2  # resid[j, l] = var(j | l) / var(j)
    np.fill_diagonal(resid, np.nan)
    with np.errstate(invalid="ignore"):
        if np.nanmin(resid) <= VARIANCE_RTOL:
            j, l = np.unravel_index(np.nanargmin(resid), resid.shape)
            raise DegenerateConditioningError(
                f"conditional variance of node {j} given {l} collapsed", pair=(int(j), int(l)), given={int(l)})
        num = R[:, :, None] - R[:, None, :] * R.T[None, :, :]
        den = np.sqrt(resid[:, None, :] * resid[None, :, :])
        P = num / den
    eye = np.eye(d, dtype=bool)
    P[eye[:, :, None] | eye[:, None, :] | eye[None, :, :]] = np.nan
    R = R.copy()
    np.fill_diagonal(R, np.nan)
    for A in (R, P):
        over = np.abs(A) >= 1.0
        if np.any(over):
            if np.nanmax(np.abs(A)) >= 1.0 + CLAMP_SLACK:
                raise DegenerateConditioningError("correlation outside [-1, 1]")
            A[over] = np.sign(A[over]) * CLAMP_VALUE
    return R, P


def ci_test(rho_hat: CorrelationEstimate | float, cutoff: float) -> CiDecision:
    """Reject independence iff ``|rho| >= cutoff``."""
    if not 0.0 < cutoff < 1.0:
        raise ValueError(f"cutoff must lie in (0, 1), got {cutoff}")
    value = rho_hat.value if isinstance(rho_hat, CorrelationEstimate) else float(rho_hat)
    stat = abs(value)
    decision = Decision.REJECT_INDEPENDENCE if stat >= cutoff else Decision.ACCEPT_INDEPENDENCE
    return CiDecision(decision, stat, cutoff)


def empirical_mi(sigma_hat, j: int, k: int) -> float:
    """``-1/2 log(1 - rho_jk^2 / (sigma_j^2 sigma_k^2))`` in nats."""
    sig = np.asarray(sigma_hat, dtype=float)
    vj, vk = sig[j, j], sig[k, k]
    if not (vj > 0 and vk > 0):
        raise DegenerateConditioningError("non-positive variance", pair=(j, k))
    r = sig[j, k] / math.sqrt(vj * vk)
    if abs(r) >= 1.0 + CLAMP_SLACK:
        raise InfiniteMutualInformationError(f"|correlation| = {abs(r)!r} >= 1", pair=(j, k))
    r = clamp_correlation(r, pair=(j, k))
    return -0.5 * math.log1p(-r * r)


def empirical_cmi(sigma_hat, y: int, z: int, x: int) -> float:
    """Estimated ``I(Y; Z | X)`` from the regression decomposition of (X, Y, Z).

    ``Y = b_xy X + e_y`` and ``Z = g_xz X + g_yz Y + e_z``; the estimate is
    ``1/2 log(1 + g_yz^2 var(e_y) / var(e_z))``.
    """
    sig = np.asarray(sigma_hat, dtype=float)
    if len({x, y, z}) != 3:
        raise ValueError("x, y, z must be distinct")
    idx = [x, y, z]
    sub = sig[np.ix_(idx, idx)]
    try:
        np.linalg.cholesky(sub)
    except np.linalg.LinAlgError:
        raise DegenerateConditioningError("3x3 block is not positive definite", pair=(y, z), given={x}) from None
    sx, sy, sz = sub[0, 0], sub[1, 1], sub[2, 2]
    rxy, rxz, ryz = sub[0, 1], sub[0, 2], sub[1, 2]
    b_xy = rxy / sx
    g_xz, g_yz = np.linalg.solve(sub[:2, :2], [rxz, ryz])
    var_y_x = sy - b_xy**2 * sx
    var_z_xy = sz - (g_xz * rxz + g_yz * ryz)
    if not (var_y_x > 0 and var_z_xy > 0):
        raise DegenerateConditioningError("residual variance collapsed", pair=(y, z), given={x})
    return 0.5 * math.log1p(g_yz**2 * var_y_x / var_z_xy)


def cmi_test(sigma_hat, i: int, j: int, k: int, epsilon: float) -> tuple[float, bool]:
    """Conditional-MI tester; returns ``(estimate, dependent)`` with cut at ``epsilon / 100``."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    value = empirical_cmi(sigma_hat, i, j, k)
    return value, value > epsilon / 100.0
