"""2D double-tree qWP transform and directional waveforms.

Level-m coefficients are one complex array of shape
``(2, 2**m, 2**m, L, L)`` with ``L = N // 2**m``: tree sign, column packet
index ``j``, row packet index ``l``, then the two shifts. Rows (last axis) are
filtered with the quasi-analytic filters of the tree's sign, columns with
the + filters.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np
from scipy import fft as sp_fft

from ..errors import TransformError
from .spline_filters import FilterBank
from .transform1d import (
    SIGNS,
    analyze_axis,
    merge_level,
    sign_axis,
    split_level,
    synthesize_axis,
    waveform_1d,
)

logger = logging.getLogger(__name__)

ROW_AXIS = -1
COLUMN_AXIS = -2


@dataclass
class CoefficientTree2D:
    """Coefficients of every level 1..depth of a 2D double tree."""
    N: int
    depth: int
    levels: Dict[int, np.ndarray] = field(default_factory=dict)

    def level(self, m: int) -> np.ndarray:
        if m not in self.levels:
            raise TransformError(f"Level {m} is not present in the tree (depth {self.depth})")
        return self.levels[m]

    def block(self, m: int, j: int, l: int, sign: int) -> np.ndarray:
        blocks = self.level(m)
        count = blocks.shape[1]
        if not (0 <= j < count and 0 <= l < count):
            raise IndexError(f"block ({j}, {l}) outside 0..{count - 1} at level {m}")
        return blocks[sign_axis(sign), j, l]

    def block_count(self, m: int) -> int:
        blocks = self.level(m)
        return blocks.shape[0] * blocks.shape[1] * blocks.shape[2]


@dataclass(frozen=True)
class DirectionalWaveform:
    """Real part of one 2D quasi-analytic packet, scaled to unit norm."""
    m: int
    j: int
    l: int
    sign: int
    values: np.ndarray


def _check_image(X: np.ndarray, fb: FilterBank):
    if X.ndim != 2 or X.shape != (fb.N, fb.N):
        raise TransformError(f"Image of shape {X.shape} does not match filter bank size {fb.N}x{fb.N}")


def _check_depth(fb: FilterBank, M: int):
    if not 1 <= M <= fb.max_level:
        raise TransformError(f"Depth {M} outside 1..{fb.max_level} for this filter bank")


def qwp_forward_2d(X: np.ndarray, fb: FilterBank, M: int) -> CoefficientTree2D:
    """Forward 2D qWP transform down to depth ``M``.

    Raises:
        TransformError: On a size mismatch or a depth outside 1..max_level
    """
    X = np.asarray(X)
    _check_image(X, fb)
    _check_depth(fb, M)

    half = fb.N // 2
    first = np.empty((2, 2, 2, half, half), dtype=complex)
    q0, q1 = fb.first.q(1, 0), fb.first.q(1, 1)
    for axis, sign in enumerate(SIGNS):
        rows = analyze_axis(X, fb.first.q(sign, 0), fb.first.q(sign, 1), axis=ROW_AXIS)
        for l, row_band in enumerate(rows):
            first[axis, 0, l], first[axis, 1, l] = analyze_axis(row_band, q0, q1, axis=COLUMN_AXIS)

    tree = CoefficientTree2D(N=fb.N, depth=M, levels={1: first})
    for m in range(1, M):
        blocks = split_level(tree.levels[m], fb, m, axis=ROW_AXIS, packet_axis=2)
        tree.levels[m + 1] = split_level(blocks, fb, m, axis=COLUMN_AXIS, packet_axis=1)
    logger.debug("2D forward: N=%d depth=%d", fb.N, M)
    return tree


def synthesize_trees_2d(blocks: np.ndarray, fb: FilterBank, m: int) -> Tuple[np.ndarray, np.ndarray]:
    """Synthesize the complex images of the + and - trees from level-m blocks."""
    count = 2 ** m
    length = fb.N >> m
    expected = (2, count, count, length, length)
    if blocks.shape != expected:
        raise TransformError(
            f"Incomplete level-{m} tree: expected blocks of shape {expected}, got {blocks.shape}"
        )
    for level in range(m - 1, 0, -1):
        blocks = merge_level(blocks, fb, level, axis=COLUMN_AXIS, packet_axis=1)
        blocks = merge_level(blocks, fb, level, axis=ROW_AXIS, packet_axis=2)

    q0, q1 = fb.first.q(1, 0), fb.first.q(1, 1)
    images = []
    for axis, sign in enumerate(SIGNS):
        bands = [synthesize_axis(blocks[axis, 0, l], blocks[axis, 1, l], q0, q1, axis=COLUMN_AXIS)
                for l in (0, 1)]
        images.append(synthesize_axis(bands[0], bands[1], fb.first.q(sign, 0), fb.first.q(sign, 1),
                                      axis=ROW_AXIS))
    return images[0], images[1]


def _top_level(tree: CoefficientTree2D, fb: FilterBank, level: int) -> int:
    m = tree.depth if level is None else level
    if tree.N != fb.N:
        raise TransformError(f"Tree size {tree.N} does not match filter bank size {fb.N}")
    _check_depth(fb, m)
    return m


def qwp_inverse_2d(tree: CoefficientTree2D, fb: FilterBank, level: int = None) -> np.ndarray:
    """Inverse 2D qWP transform, ``Re(X+ + X-) / 8``.

    Args:
        tree: Coefficient tree
        fb: Filter bank the tree was computed with
        level: Level to invert from (defaults to the tree depth)
    """
    m = _top_level(tree, fb, level)
    plus, minus = synthesize_trees_2d(tree.level(m), fb, m)
    return (plus + minus).real / 8.0


def partial_reconstruction(tree: CoefficientTree2D, fb: FilterBank, sign: int,
                           level: int = None) -> np.ndarray:
    """Complex image synthesized from one tree only (before averaging)."""
    m = _top_level(tree, fb, level)
    plus, minus = synthesize_trees_2d(tree.level(m), fb, m)
    return plus if sign_axis(sign) == 0 else minus


def directional_waveform_2d(fb: FilterBank, m: int, j: int, l: int, sign: int) -> DirectionalWaveform:
    """Synthesize the unit-norm directional waveform ``theta`` of block (m, j, l, sign).

    Raises:
        TransformError: On invalid indices
    """
    _check_depth(fb, m)
    count = 2 ** m
    if not (0 <= j < count and 0 <= l < count):
        raise TransformError(f"Block ({j}, {l}) outside 0..{count - 1} at level {m}")
    axis = sign_axis(sign)
    length = fb.N >> m
    blocks = np.zeros((2, count, count, length, length), dtype=complex)
    blocks[axis, j, l, 0, 0] = 1.0
    images = synthesize_trees_2d(blocks, fb, m)
    values = images[axis].real
    values = values / np.linalg.norm(values)
    return DirectionalWaveform(m=m, j=j, l=l, sign=SIGNS[axis], values=values)


def _abs_frequency(N: int) -> np.ndarray:
    n = np.arange(N)
    return np.minimum(n, N - n)


def direction_classes(fb: FilterBank, m: int) -> Dict[Tuple[int, int, int], Tuple[int, int]]:
    """Assign every level-m directional waveform to a spectral-diagonal class.

    The class is not a measured angle. The energy-weighted mean absolute
    frequency of each waveform along both axes is quantized to the band width
    ``N / 2**(m+1)``, and the class is the tree sign together with the
    difference of the row and column band numbers: waveforms whose spectra
    sit on the same diagonal of the frequency plane share a class. A level-m
    set yields ``2 * (2**(m+1) - 1)`` classes, the 62 directions of a
    fourth-level set.

    Returns:
        Mapping ``(sign, j, l) -> (sign, band_l - band_j)``
    """
    _check_depth(fb, m)
    N = fb.N
    count = 2 ** m
    width = N / 2 ** (m + 1)
    freq = _abs_frequency(N)
    packets = {sign: [waveform_1d(fb, m, i, "qplus" if sign > 0 else "qminus") for i in range(count)]
               for sign in SIGNS}

    classes = {}
    for sign in SIGNS:
        for j in range(count):
            for l in range(count):
                theta = np.outer(packets[1][j], packets[sign][l]).real
                energy = np.abs(sp_fft.fft2(theta)) ** 2
                total = energy.sum()
                mean_k = float((energy.sum(axis=1) * freq).sum() / total)
                mean_n = float((energy.sum(axis=0) * freq).sum() / total)
                band_j = min(int(mean_k // width), count - 1)
                band_l = min(int(mean_n // width), count - 1)
                classes[(sign, j, l)] = (sign, band_l - band_j)
    return classes


def spectral_tiling(fb: FilterBank, m: int) -> np.ndarray:
    """Per-bin sum of squared 2D packet spectra over all blocks and sign pairs.

    Equals ``16 * 4**m`` at every bin of the N x N grid.
    """
    sums = {}
    for sign in SIGNS:
        kind = "qplus" if sign > 0 else "qminus"
        sums[sign] = sum(np.abs(sp_fft.fft(waveform_1d(fb, m, i, kind))) ** 2 for i in range(2 ** m))
    total = np.zeros((fb.N, fb.N))
    for column_sign in SIGNS:
        for row_sign in SIGNS:
            total += np.outer(sums[column_sign], sums[row_sign])
    return total
