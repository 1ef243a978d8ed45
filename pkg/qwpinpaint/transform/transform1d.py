"""1D periodic analytic signals and the double-tree qWP transform.

Coefficients of one level are kept as a single complex array of shape
``(2, 2**m, N // 2**m)``: axis 0 is the tree sign (0 for +, 1 for -), axis 1
the packet index ``l`` in frequency order, axis 2 the shift ``k``.

The analysis and synthesis steps work along any axis so the 2D transform can
reuse them row- and column-wise.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np
from scipy import fft as sp_fft

from ..errors import TransformError
from .spline_filters import FilterBank, complementary_multiplier

logger = logging.getLogger(__name__)

SIGNS = (1, -1)
KINDS = ("psi", "phi", "qplus", "qminus")


def sign_axis(sign: int) -> int:
    """Position of a tree sign (+1/-1 or '+'/'-') on the sign axis."""
    if sign in (1, "+"):
        return 0
    if sign in (-1, "-"):
        return 1
    raise ValueError(f"sign must be +1/-1 or '+'/'-', got {sign!r}")


def child_index(l, s):
    """Index at level m+1 of the child of packet ``l`` obtained with filter ``s``.

    Even packets keep the filter order, odd packets reverse it, so child
    indices stay in increasing frequency order.
    """
    l = np.asarray(l)
    return 2 * l + np.where(l % 2 == 0, s, 1 - s)


def low_child(l):
    """Child of ``l`` reached with the lowpass filter h0 (``2l + l % 2``)."""
    return child_index(l, 0)


def _along(filt: np.ndarray, ndim: int, axis: int) -> np.ndarray:
    shape = [1] * ndim
    shape[axis] = filt.shape[0]
    return filt.reshape(shape)


def analyze_axis(data: np.ndarray, filt0: np.ndarray, filt1: np.ndarray,
                 axis: int = -1) -> Tuple[np.ndarray, np.ndarray]:
    """One analysis step along ``axis``: correlate with each filter and decimate by 2.

    Args:
        data: Complex (or real) array, periodic along ``axis``
        filt0: DFT of the first filter, same length as ``data`` along ``axis``
        filt1: DFT of the second filter

    Returns:
        Tuple of the two decimated outputs
    """
    length = data.shape[axis]
    half = length // 2
    spectrum = sp_fft.fft(data, axis=axis)
    outputs = []
    for filt in (filt0, filt1):
        product = spectrum * np.conj(_along(filt, data.ndim, axis))
        lower = np.take(product, np.arange(half), axis=axis)
        upper = np.take(product, np.arange(half, length), axis=axis)
        outputs.append(sp_fft.ifft((lower + upper) / 2.0, axis=axis))
    return outputs[0], outputs[1]


def synthesize_axis(y0: np.ndarray, y1: np.ndarray, filt0: np.ndarray,
                    filt1: np.ndarray, axis: int = -1) -> np.ndarray:
    """One synthesis step along ``axis``: upsample by 2 and filter, summing both branches."""
    total = None
    for y, filt in ((y0, filt0), (y1, filt1)):
        spectrum = sp_fft.fft(y, axis=axis)
        periodized = np.concatenate([spectrum, spectrum], axis=axis)
        term = _along(filt, y.ndim, axis) * periodized
        total = term if total is None else total + term
    return sp_fft.ifft(total, axis=axis)


def hilbert_periodic(x: np.ndarray) -> np.ndarray:
    """Periodic discrete Hilbert transform.

    Multiplies the spectrum by ``-i`` on ``0 < n < N/2`` and ``+i`` on
    ``N/2 < n < N`` and zeroes the DC and Nyquist bins.
    """
    x = np.asarray(x)
    N = x.shape[-1]
    if N < 2 or N % 2:
        raise TransformError(f"Signal length must be even, got {N}")
    mult = complementary_multiplier(N)
    mult[0] = 0.0
    mult[N // 2] = 0.0
    result = sp_fft.ifft(sp_fft.fft(x) * mult)
    return result.real if np.isrealobj(x) else result


def analytic_parts(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Return the periodic analytic signals ``x +/- i*H(x)`` of a real signal."""
    x = np.asarray(x, dtype=float)
    t = hilbert_periodic(x)
    return x + 1j * t, x - 1j * t


@dataclass(frozen=True)
class SubbandBlock1D:
    """One coefficient block ``z`` with its spline (y) and complementary (c) parts."""
    level: int
    index: int
    sign: int
    coeffs: np.ndarray

    @property
    def y(self) -> np.ndarray:
        return self.coeffs.real

    @property
    def c(self) -> np.ndarray:
        # z = y - i*c in the + tree, y + i*c in the - tree
        return -self.sign * self.coeffs.imag


@dataclass
class CoefficientTree1D:
    """Coefficients of every level 1..depth of a 1D double tree."""
    N: int
    depth: int
    levels: Dict[int, np.ndarray] = field(default_factory=dict)

    def level(self, m: int) -> np.ndarray:
        if m not in self.levels:
            raise TransformError(f"Level {m} is not present in the tree (depth {self.depth})")
        return self.levels[m]

    def block(self, m: int, l: int, sign: int) -> SubbandBlock1D:
        blocks = self.level(m)
        if not 0 <= l < blocks.shape[1]:
            raise IndexError(f"packet index {l} outside 0..{blocks.shape[1] - 1} at level {m}")
        axis = sign_axis(sign)
        return SubbandBlock1D(level=m, index=l, sign=SIGNS[axis], coeffs=blocks[axis, l])

    def energy(self, m: int) -> float:
        return float(np.sum(np.abs(self.level(m)) ** 2))


def _check_depth(fb: FilterBank, M: int):
    if not 1 <= M <= fb.max_level:
        raise TransformError(f"Depth {M} outside 1..{fb.max_level} for this filter bank")


def _check_level_shape(blocks: np.ndarray, m: int, N: int, spatial_dims: int):
    count = 2 ** m
    length = N >> m
    expected = (2,) + (count,) * spatial_dims + (length,) * spatial_dims
    if blocks.shape != expected:
        raise TransformError(
            f"Incomplete level-{m} tree: expected blocks of shape {expected}, got {blocks.shape}"
        )


def split_level(blocks: np.ndarray, fb: FilterBank, m: int, axis: int, packet_axis: int) -> np.ndarray:
    """Take level-m blocks one level down along one spatial axis.

    ``packet_axis`` is the axis holding the packet index that the split
    doubles; children are placed by :func:`child_index`.
    """
    h0, h1 = fb.subband_filters(m)
    y0, y1 = analyze_axis(blocks, h0, h1, axis=axis)
    shape = list(y0.shape)
    shape[packet_axis] *= 2
    out = np.empty(shape, dtype=complex)
    parents = np.arange(blocks.shape[packet_axis])
    for s, y in ((0, y0), (1, y1)):
        index = [slice(None)] * out.ndim
        index[packet_axis] = child_index(parents, s)
        out[tuple(index)] = y
    return out


def merge_level(blocks: np.ndarray, fb: FilterBank, m: int, axis: int, packet_axis: int) -> np.ndarray:
    """Inverse of :func:`split_level`: rebuild level-m blocks from level m+1."""
    h0, h1 = fb.subband_filters(m)
    parents = np.arange(blocks.shape[packet_axis] // 2)
    children = []
    for s in (0, 1):
        index = [slice(None)] * blocks.ndim
        index[packet_axis] = child_index(parents, s)
        children.append(blocks[tuple(index)])
    return synthesize_axis(children[0], children[1], h0, h1, axis=axis)


def qwp_forward_1d(x: np.ndarray, fb: FilterBank, M: int) -> CoefficientTree1D:
    """Forward 1D qWP transform down to depth ``M``.

    Level 1 correlates ``x`` with the quasi-analytic filters of each tree and
    decimates; deeper levels apply the dilated spline filters to the complex
    blocks.

    Raises:
        TransformError: On a length mismatch or a depth outside 1..max_level
    """
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != fb.N:
        raise TransformError(f"Signal of shape {x.shape} does not match filter bank length {fb.N}")
    _check_depth(fb, M)

    first = np.empty((2, 2, fb.N // 2), dtype=complex)
    for axis, sign in enumerate(SIGNS):
        y0, y1 = analyze_axis(x, fb.first.q(sign, 0), fb.first.q(sign, 1))
        first[axis, 0] = y0
        first[axis, 1] = y1

    tree = CoefficientTree1D(N=fb.N, depth=M, levels={1: first})
    for m in range(1, M):
        tree.levels[m + 1] = split_level(tree.levels[m], fb, m, axis=-1, packet_axis=1)
    logger.debug("1D forward: N=%d depth=%d", fb.N, M)
    return tree


def synthesize_trees_1d(blocks: np.ndarray, fb: FilterBank, m: int) -> Tuple[np.ndarray, np.ndarray]:
    """Synthesize the complex signals of the + and - trees from level-m blocks."""
    _check_level_shape(blocks, m, fb.N, spatial_dims=1)
    for level in range(m - 1, 0, -1):
        blocks = merge_level(blocks, fb, level, axis=-1, packet_axis=1)
    signals = []
    for axis, sign in enumerate(SIGNS):
        signals.append(synthesize_axis(blocks[axis, 0], blocks[axis, 1],
                                       fb.first.q(sign, 0), fb.first.q(sign, 1)))
    return signals[0], signals[1]


def qwp_inverse_1d(tree: CoefficientTree1D, fb: FilterBank, level: int = None) -> np.ndarray:
    """Inverse 1D qWP transform, ``Re(x+ + x-) / 4``.

    Args:
        tree: Coefficient tree
        fb: Filter bank the tree was computed with
        level: Level to invert from (defaults to the tree depth)

    Raises:
        TransformError: If the level is missing or its blocks are incomplete
    """
    m = tree.depth if level is None else level
    if tree.N != fb.N:
        raise TransformError(f"Tree length {tree.N} does not match filter bank length {fb.N}")
    _check_depth(fb, m)
    plus, minus = synthesize_trees_1d(tree.level(m), fb, m)
    return (plus + minus).real / 4.0


def _unit_blocks(fb: FilterBank, m: int, l: int, sign: int) -> np.ndarray:
    _check_depth(fb, m)
    if not 0 <= l < 2 ** m:
        raise TransformError(f"Packet index {l} outside 0..{2 ** m - 1} at level {m}")
    blocks = np.zeros((2, 2 ** m, fb.N >> m), dtype=complex)
    blocks[sign_axis(sign), l, 0] = 1.0
    return blocks


def waveform_1d(fb: FilterBank, m: int, l: int, kind: str = "psi") -> np.ndarray:
    """Synthesize the level-m waveform with packet index ``l``.

    ``psi`` and ``phi`` are the real spline packet and its complementary
    packet, scaled to unit norm. ``qplus``/``qminus`` are the complex
    quasi-analytic packets ``psi +/- i*phi`` as synthesized from a unit
    coefficient.

    Raises:
        TransformError: On an unknown kind or invalid (m, l)
    """
    if kind not in KINDS:
        raise TransformError(f"Unknown waveform kind {kind!r}; expected one of {', '.join(KINDS)}")
    if kind == "qminus":
        _, minus = synthesize_trees_1d(_unit_blocks(fb, m, l, -1), fb, m)
        return minus
    plus, _ = synthesize_trees_1d(_unit_blocks(fb, m, l, 1), fb, m)
    if kind == "qplus":
        return plus
    part = plus.real if kind == "psi" else plus.imag
    return part / np.linalg.norm(part)


def spectral_tiling(fb: FilterBank, m: int, analytic: bool = False) -> np.ndarray:
    """Per-bin sum of the squared magnitude spectra of the level-m packets.

    With ``analytic=False`` the sum runs over the spline packets and equals
    ``2**m`` at every bin; with ``analytic=True`` it runs over both
    quasi-analytic trees and equals ``4 * 2**m``.
    """
    total = np.zeros(fb.N)
    for l in range(2 ** m):
        if analytic:
            for kind in ("qplus", "qminus"):
                total += np.abs(sp_fft.fft(waveform_1d(fb, m, l, kind))) ** 2
        else:
            total += np.abs(sp_fft.fft(waveform_1d(fb, m, l, "psi"))) ** 2
    return total
