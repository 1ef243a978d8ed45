"""M1 (iterative BSA thresholding) and M2 (Split Bregman) inpainting."""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from ..errors import ConfigError, InpaintError
from ..transform.spline_filters import MAX_ORDER, MIN_LENGTH, MIN_ORDER, FilterBank, build_filter_bank
from ..transform.transform2d import CoefficientTree2D, qwp_forward_2d, qwp_inverse_2d
from .shrinkage import StopState, make_schedule, select_stop, shrink_level

logger = logging.getLogger(__name__)

CG_RTOL = 1e-14


def default_window(m: int) -> int:
    """Window span used for fusion level ``m`` when none is configured."""
    return 3 if m <= 3 else 2


@dataclass
class MaskedImage:
    """Degraded image with its mask (1 = pixel present) and noise level."""
    degraded: np.ndarray
    mask: np.ndarray
    sigma: float = 0.0

    def __post_init__(self):
        self.degraded = np.asarray(self.degraded, dtype=float)
        mask = np.asarray(self.mask)
        if self.degraded.ndim != 2:
            raise InpaintError(f"Degraded image must be 2D, got shape {self.degraded.shape}")
        if mask.shape != self.degraded.shape:
            raise InpaintError(f"Mask shape {mask.shape} does not match image shape {self.degraded.shape}")
        if not np.all((mask == 0) | (mask == 1)):
            raise InpaintError("Mask entries must be 0 or 1")
        if self.sigma < 0:
            raise InpaintError(f"Noise level must be non-negative, got {self.sigma}")
        self.mask = mask.astype(float)


@dataclass
class InpaintConfig:
    """Parameters shared by both inpainting methods."""
    p: int = 5
    levels: Tuple[int, ...] = (3, 4)
    weights: Optional[Tuple[float, ...]] = None
    windows: Optional[Tuple[int, ...]] = None
    margin: Optional[int] = None
    mu: float = 0.05
    R1: int = 5
    R2: int = 8
    tol1: float = 0.05
    tol2: float = 0.01
    L1: int = 15
    L2: int = 10
    L3: int = 10
    normalize_delta: bool = False
    use_cg: bool = False

    def __post_init__(self):
        self.levels = tuple(sorted(int(m) for m in self.levels))
        if not self.levels or len(set(self.levels)) != len(self.levels) or self.levels[0] < 1:
            raise ConfigError(f"Fusion levels must be distinct positive integers, got {self.levels}")
        count = len(self.levels)
        self.weights = tuple(float(w) for w in (self.weights or (1.0,) * count))
        self.windows = tuple(int(w) for w in (self.windows or [default_window(m) for m in self.levels]))
        if len(self.weights) != count or len(self.windows) != count:
            raise ConfigError("weights and windows need one entry per fusion level")
        if any(w <= 0 for w in self.weights):
            raise ConfigError(f"Fusion weights must be positive, got {self.weights}")
        if any(w < 1 for w in self.windows):
            raise ConfigError(f"Window spans must be at least 1, got {self.windows}")
        if not MIN_ORDER <= self.p <= MAX_ORDER:
            raise ConfigError(f"Spline order must be in {MIN_ORDER}..{MAX_ORDER}, got {self.p}")
        if self.margin is not None and self.margin < 0:
            raise ConfigError(f"Extension margin must be non-negative, got {self.margin}")
        if self.mu <= 0:
            raise ConfigError(f"mu must be positive, got {self.mu}")
        if self.R1 < 2 or self.R2 < 2:
            raise ConfigError(f"R1 and R2 must be at least 2, got R1={self.R1}, R2={self.R2}")
        if min(self.L1, self.L2, self.L3) < 0 or min(self.tol1, self.tol2) < 0:
            raise ConfigError("Iteration limits and tolerances must be non-negative")

    @property
    def parent_level(self) -> int:
        return max(self.levels) + 1

    def window(self, m: int) -> int:
        return self.windows[self.levels.index(m)]

    def stop_limits(self) -> dict:
        return dict(L1=self.L1, L2=self.L2, L3=self.L3, tol1=self.tol1, tol2=self.tol2)


@dataclass
class BregmanState:
    """Auxiliary coefficient arrays of the Split Bregman iteration."""
    d: Dict[int, np.ndarray] = field(default_factory=dict)
    b: Dict[int, np.ndarray] = field(default_factory=dict)
    X: Optional[np.ndarray] = None

    @classmethod
    def zeros(cls, size: int, levels: Sequence[int]) -> "BregmanState":
        state = cls()
        for m in levels:
            count = 2 ** m
            length = size >> m
            state.d[m] = np.zeros((2, count, count, length, length), dtype=complex)
            state.b[m] = np.zeros_like(state.d[m])
        return state


@dataclass(frozen=True)
class Extension:
    """Extended image and mask plus the window of the original pixels."""
    Y: np.ndarray
    theta: np.ndarray
    top: int
    left: int
    height: int
    width: int

    @property
    def size(self) -> int:
        return self.Y.shape[0]


@dataclass(frozen=True)
class IterationRecord:
    """Progress of one inpainting iteration."""
    k: int
    nu: int
    lam: float
    delta: float
    advanced: bool


def _next_power_of_two(value: int) -> int:
    return 1 << max(int(value) - 1, 0).bit_length()


def extend_symmetric(mi: MaskedImage, T: int, min_size: int = MIN_LENGTH) -> Extension:
    """Mirror-extend image and mask by ``T`` pixels and pad to a dyadic square.

    The side becomes the smallest power of two that holds the image plus
    ``T`` pixels on every side (and at least ``min_size``); the image sits
    centered, and the extra rows and columns are mirror reflections.
    """
    if T < 0:
        raise InpaintError(f"Extension margin must be non-negative, got {T}")
    height, width = mi.degraded.shape
    size = max(_next_power_of_two(max(height, width) + 2 * T), min_size)
    top = (size - height) // 2
    left = (size - width) // 2
    pad = ((top, size - height - top), (left, size - width - left))
    return Extension(
        Y=np.pad(mi.degraded, pad, mode="symmetric"),
        theta=np.pad(mi.mask, pad, mode="symmetric"),
        top=top, left=left, height=height, width=width,
    )


def crop(image: np.ndarray, ext: Extension) -> np.ndarray:
    """Cut the original window back out of an extended image."""
    return image[ext.top:ext.top + ext.height, ext.left:ext.left + ext.width]


def fuse_levels(images: Sequence[np.ndarray], weights: Sequence[float]) -> np.ndarray:
    """Weighted average of per-level reconstructions.

    Raises:
        InpaintError: On an empty set, mismatched lengths or non-positive weights
    """
    if len(images) == 0:
        raise InpaintError("Cannot fuse an empty set of reconstructions")
    if len(images) != len(weights):
        raise InpaintError(f"Got {len(images)} reconstructions but {len(weights)} weights")
    if any(w <= 0 for w in weights):
        raise InpaintError(f"Fusion weights must be positive, got {list(weights)}")
    total = sum(w * np.asarray(image) for w, image in zip(weights, images))
    return total / float(sum(weights))


def solve_data_step(Y: np.ndarray, theta: np.ndarray, mu: float, xprev: np.ndarray,
                    use_cg: bool = False) -> np.ndarray:
    """Solve ``(theta + mu) X = theta * Y + mu * xprev``.

    ``theta`` is a 0/1 diagonal operator so the solution is element-wise; the
    conjugate-gradient path solves the same system iteratively.

    Raises:
        InpaintError: If ``mu <= 0``
    """
    if mu <= 0:
        raise InpaintError(f"mu must be positive, got {mu}")
    rhs = theta * Y + mu * xprev
    if not use_cg:
        return rhs / (theta + mu)

    diagonal = (theta + mu).ravel()
    operator = LinearOperator((diagonal.size, diagonal.size), matvec=lambda v: diagonal * v.ravel(),
                              dtype=float)
    solution, info = cg(operator, rhs.ravel(), x0=np.asarray(xprev, dtype=float).ravel(),
                        rtol=CG_RTOL, atol=0.0, maxiter=100)
    if info != 0:
        logger.warning("conjugate gradient stopped without converging (info=%d)", info)
    return solution.reshape(Y.shape)


def _margin(height: int, width: int, cfg: InpaintConfig) -> int:
    return cfg.margin if cfg.margin is not None else max(height, width) // 8


def padded_size(height: int, width: int, cfg: InpaintConfig) -> int:
    """Side of the dyadic square an image of this size is extended to."""
    smallest = max(height, width) + 2 * _margin(height, width, cfg)
    return max(_next_power_of_two(smallest), MIN_LENGTH * 2 ** cfg.parent_level)


def _prepare(mi: MaskedImage, cfg: InpaintConfig, fb: Optional[FilterBank]):
    height, width = mi.degraded.shape
    parent = cfg.parent_level
    ext = extend_symmetric(mi, _margin(height, width, cfg), min_size=MIN_LENGTH * 2 ** parent)
    if fb is None:
        fb = build_filter_bank(cfg.p, ext.size, parent)
    elif fb.N != ext.size or fb.max_level < parent:
        raise InpaintError(
            f"Filter bank (N={fb.N}, M={fb.max_level}) does not fit the extended "
            f"size {ext.size} with parent level {parent}"
        )
    rho = float(ext.theta.mean())
    schedule = make_schedule(mi.sigma, rho, cfg.R1, cfg.R2)
    schedule.log()
    state = StopState.start(schedule, **cfg.stop_limits())
    logger.info("extended %dx%d to %dx%d (rho=%.4f)", height, width, ext.size, ext.size, rho)
    return ext, fb, schedule, state


def _delta(current: np.ndarray, previous: Optional[np.ndarray], cfg: InpaintConfig) -> float:
    if previous is None:
        return math.inf
    delta = float(np.linalg.norm(current - previous))
    if cfg.normalize_delta:
        delta /= current.shape[0]
    return delta


def _reconstruct(blocks: Dict[int, np.ndarray], fb: FilterBank, cfg: InpaintConfig) -> np.ndarray:
    images = [qwp_inverse_2d(CoefficientTree2D(N=fb.N, depth=m, levels={m: blocks[m]}), fb)
              for m in cfg.levels]
    return fuse_levels(images, cfg.weights)


IterationCallback = Callable[[IterationRecord, np.ndarray], None]


def _report(k, state, decision, delta, on_iteration, X, ext):
    record = IterationRecord(k=k, nu=state.nu, lam=decision.lam, delta=delta, advanced=decision.advanced)
    logger.info("k=%d nu=%d lambda=%.6g delta=%.6g", k, record.nu, record.lam, delta)
    if on_iteration is not None:
        on_iteration(record, crop(X, ext))


def _shrink_update(Y: np.ndarray, theta: np.ndarray, X: np.ndarray, fb: FilterBank,
                   cfg: InpaintConfig, lam: float) -> np.ndarray:
    """One M1 update: refill observed pixels, shrink every fusion level, fuse."""
    Yk = theta * Y + X - theta * X
    tree = qwp_forward_2d(Yk, fb, cfg.parent_level)
    shrunk = {m: shrink_level(tree.level(m), tree.level(m + 1), cfg.window(m), lam)
              for m in cfg.levels}
    return _reconstruct(shrunk, fb, cfg)


def _refine(X: np.ndarray, Y: np.ndarray, theta: np.ndarray, fb: FilterBank,
            cfg: InpaintConfig, lam: float) -> np.ndarray:
    """Run shrinkage updates at ``lam`` from ``X`` until they settle.

    Stops once the update moves less than ``tol2`` or after ``L3 + 1`` updates.
    """
    updates = 0
    while True:
        updates += 1
        previous, X = X, _shrink_update(Y, theta, X, fb, cfg, lam)
        if _delta(X, previous, cfg) < cfg.tol2 or updates > cfg.L3:
            break
    logger.info("refined at lambda=%.6g in %d updates", lam, updates)
    return X


def m1_inpaint(mi: MaskedImage, cfg: InpaintConfig, fb: Optional[FilterBank] = None,
               on_iteration: Optional[IterationCallback] = None) -> np.ndarray:
    """Inpaint by iterated bivariate shrinkage of qWP coefficients.

    Args:
        mi: Degraded image, mask and noise level
        cfg: Inpainting parameters
        fb: Filter bank for the extended size (built when omitted)
        on_iteration: Called with each iteration's record and the cropped iterate

    Returns:
        np.ndarray: Restored image, same shape as the input
    """
    ext, fb, schedule, state = _prepare(mi, cfg, fb)
    Y, theta = ext.Y, ext.theta
    X = np.zeros_like(Y)
    previous = None
    k = 0

    while True:
        k += 1
        delta = _delta(X, previous, cfg)
        decision = select_stop(state, delta, schedule)
        if decision.stop:
            break

        previous, X = X, _shrink_update(Y, theta, X, fb, cfg, decision.lam)
        _report(k, state, decision, delta, on_iteration, X, ext)

    logger.info("M1 stopped after %d iterations", k - 1)
    return crop(X, ext)


def m2_inpaint(mi: MaskedImage, cfg: InpaintConfig, fb: Optional[FilterBank] = None,
               on_iteration: Optional[IterationCallback] = None) -> np.ndarray:
    """Inpaint by Split Bregman iteration with a bivariate-shrinkage split step.

    The data step keeps observed pixels at their noisy values, so on Stop the
    last iterate is refined by shrinkage updates at the final threshold (see
    :func:`_refine`) before it is cropped. Without noise the final threshold
    is small and the refinement leaves the iterate nearly unchanged.

    Arguments and return value as in :func:`m1_inpaint`.
    """
    ext, fb, schedule, state = _prepare(mi, cfg, fb)
    Y, theta = ext.Y, ext.theta
    bregman = BregmanState.zeros(fb.N, cfg.levels)
    previous = np.zeros_like(Y)
    k = 0

    while True:
        k += 1
        x = _reconstruct({m: bregman.d[m] - bregman.b[m] for m in cfg.levels}, fb, cfg)
        X = solve_data_step(Y, theta, cfg.mu, x, use_cg=cfg.use_cg)
        bregman.X = X
        delta = _delta(X, previous, cfg)
        decision = select_stop(state, delta, schedule)
        if decision.stop:
            break

        tree = qwp_forward_2d(X, fb, cfg.parent_level)
        augmented = {m: tree.level(m) + bregman.b[m] for m in cfg.levels}
        augmented[cfg.parent_level] = tree.level(cfg.parent_level)
        for m in cfg.levels:
            bregman.d[m] = shrink_level(augmented[m], augmented[m + 1], cfg.window(m), decision.lam)
            bregman.b[m] = augmented[m] - bregman.d[m]
        previous = X
        _report(k, state, decision, delta, on_iteration, X, ext)

    logger.info("M2 stopped after %d iterations", k - 1)
    return crop(_refine(X, Y, theta, fb, cfg, decision.lam), ext)


INPAINT_METHODS = {
    "m1": m1_inpaint,
    "m2": m2_inpaint,
}
