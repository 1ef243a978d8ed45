"""Bivariate shrinkage, threshold schedules and the select/stop rule."""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import ndimage

from ..errors import InpaintError
from ..transform.transform1d import low_child

logger = logging.getLogger(__name__)

LAMBDA_MAX = 512.0


@dataclass(frozen=True)
class ThresholdSchedule:
    """Decreasing threshold sequences of the two iteration phases.

    ``Lambda1`` and ``Lambda2`` are stored 0-based; schedule index ``nu``
    (1-based, as used by :class:`StopState`) maps to ``Lambda1[nu - 1]`` for
    ``nu <= R1`` and ``Lambda2[nu - R1 - 1]`` after that.
    """
    sigma: float
    rho: float
    lambda_max: float
    lambda_min: float
    lambda_mid: float
    r1: float
    r2: float
    R1: int
    R2: int
    Lambda1: Tuple[float, ...]
    Lambda2: Tuple[float, ...]

    def at(self, nu: int) -> float:
        if not 1 <= nu <= self.R1 + self.R2:
            raise IndexError(f"schedule index {nu} outside 1..{self.R1 + self.R2}")
        if nu <= self.R1:
            return self.Lambda1[nu - 1]
        return self.Lambda2[nu - self.R1 - 1]

    def log(self):
        for nu in range(1, self.R1 + self.R2 + 1):
            logger.debug("nu=%d lambda=%.6g", nu, self.at(nu))


def make_schedule(sigma: float, rho: float, R1: int = 5, R2: int = 8,
                  lambda_max: float = LAMBDA_MAX) -> ThresholdSchedule:
    """Build the threshold schedule for noise level ``sigma`` and mask statistic ``rho``.

    ``sigma`` is clamped to be non-negative and ``rho`` to [0, 1].

    Raises:
        ValueError: If ``R1`` or ``R2`` is below 2
    """
    if R1 < 2 or R2 < 2:
        raise ValueError(f"R1 and R2 must be at least 2, got R1={R1}, R2={R2}")
    sigma = max(float(sigma), 0.0)
    rho = min(max(float(rho), 0.0), 1.0)

    lambda_min = max(1.0, sigma * (1.0 - rho ** 2 / 2.0))
    lambda_mid = min(2.0 * lambda_min + 10.0, 20.0)
    r1 = lambda_mid / lambda_max
    r2 = lambda_min / lambda_mid
    root2 = math.sqrt(2.0)
    lambda1 = tuple(root2 * r1 ** ((j - R1) / (R1 - 1)) * lambda_mid for j in range(1, R1 + 1))
    lambda2 = tuple(root2 * r2 ** ((j - R2) / R2) * lambda_min for j in range(1, R2 + 1))
    return ThresholdSchedule(
        sigma=sigma, rho=rho, lambda_max=lambda_max,
        lambda_min=lambda_min, lambda_mid=lambda_mid,
        r1=r1, r2=r2, R1=R1, R2=R2,
        Lambda1=lambda1, Lambda2=lambda2,
    )


@dataclass
class StopState:
    """Mutable progress of the select/stop rule."""
    nu: int = 1
    K: int = 0
    L1: int = 15
    L2: int = 10
    L3: int = 10
    tol1: float = 0.05
    tol2: float = 0.01
    last_delta: float = math.inf
    lam: float = 0.0

    @classmethod
    def start(cls, schedule: ThresholdSchedule, **limits) -> "StopState":
        return cls(lam=schedule.at(1), **limits)


@dataclass(frozen=True)
class StopDecision:
    """Outcome of one select/stop evaluation."""
    stop: bool
    lam: float
    advanced: bool = False


def select_stop(state: StopState, delta: float, schedule: ThresholdSchedule) -> StopDecision:
    """Apply the three-branch select/stop rule, updating ``state`` in place.

    Args:
        state: Current rule state (``nu`` is 1-based)
        delta: Norm of the difference between the last two iterates
        schedule: Threshold schedule

    Returns:
        StopDecision: ``stop=True``, or the threshold to use this iteration
    """
    state.last_delta = delta
    last = schedule.R1 + schedule.R2

    if state.nu < schedule.R1:
        advance = state.K > state.L1 or delta < state.tol1
    elif state.nu < last:
        advance = state.K > state.L2 or delta < state.tol2
    else:
        if state.K > state.L3 or delta < state.tol2:
            return StopDecision(stop=True, lam=state.lam)
        advance = False

    if not advance:
        state.K += 1
        return StopDecision(stop=False, lam=state.lam)

    state.nu += 1
    state.K = 0
    state.lam = schedule.at(state.nu)
    logger.info("schedule advanced to nu=%d lambda=%.6g", state.nu, state.lam)
    return StopDecision(stop=False, lam=state.lam, advanced=True)


def averaged_variance(C: np.ndarray, W: int) -> np.ndarray:
    """Local mean of ``|c|**2`` over the periodic window of offsets ``-W..W-1``.

    Works on the last two axes; leading axes are independent blocks.

    Raises:
        InpaintError: If ``W < 1`` or the window is wider than the block
    """
    C = np.asarray(C)
    if W < 1 or C.shape[-1] < 2 * W or C.shape[-2] < 2 * W:
        raise InpaintError(f"Window span W={W} does not fit blocks of shape {C.shape[-2:]}")
    size = (1,) * (C.ndim - 2) + (2 * W, 2 * W)
    return ndimage.uniform_filter(np.abs(C) ** 2, size=size, mode="wrap")


def expand_parent(P: np.ndarray) -> np.ndarray:
    """Map each parent coefficient onto its 2x2 group of child sites."""
    return np.repeat(np.repeat(P, 2, axis=-2), 2, axis=-1)


def bsa_apply(C: np.ndarray, P: np.ndarray, W: int, lam: float) -> np.ndarray:
    """Bivariate shrinkage of complex coefficients ``C`` given parents ``P``.

    The parent of child site ``(k, n)`` is ``P[k // 2, n // 2]``. Coefficients
    are shrunk radially; sites with zero marginal deviation or zero value
    become 0.
    """
    C = np.asarray(C)
    P = np.asarray(P)
    if P.shape[:-2] != C.shape[:-2] or 2 * P.shape[-1] != C.shape[-1] or 2 * P.shape[-2] != C.shape[-2]:
        raise InpaintError(f"Parent blocks {P.shape} do not match child blocks {C.shape}")
    variance = averaged_variance(C, W)
    deviation = np.sqrt(np.maximum(variance - lam ** 2, 0.0))
    joint = np.sqrt(np.abs(C) ** 2 + np.abs(expand_parent(P)) ** 2)

    denom = deviation * joint
    gain = np.zeros(C.shape)
    live = denom > 0
    gain[live] = np.maximum(1.0 - math.sqrt(3.0) * lam ** 2 / denom[live], 0.0)
    return C * gain


def parent_blocks(parent_level: np.ndarray) -> np.ndarray:
    """Reorder a level-(m+1) array so every level-m block sees its parent.

    The parent of block ``(sign, j, l)`` is block
    ``(sign, low_child(j), low_child(l))`` one level down.
    """
    count = parent_level.shape[1] // 2
    index = low_child(np.arange(count))
    return parent_level[:, index][:, :, index]


def shrink_level(level: np.ndarray, parent_level: np.ndarray, W: int, lam: float) -> np.ndarray:
    """Apply :func:`bsa_apply` to every block of one level."""
    return bsa_apply(level, parent_blocks(parent_level), W, lam)
