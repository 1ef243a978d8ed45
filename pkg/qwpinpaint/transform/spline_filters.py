"""Frequency-domain filters of the quasi-analytic wavelet packet transform.

All filters are built from sampled periodic polynomial B-splines. DFTs follow
the numpy convention ``x_hat[n] = sum_k x[k] * exp(-2j*pi*k*n/N)``.

The normalization constant of the spline lowpass/highpass pair is 1: with it
the two-sample shifts of both first-level packets are orthonormal and
``|beta[n]|**2 + |alpha[n]|**2 == 2`` for every bin.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from ..errors import FilterBankError

MIN_ORDER = 2
MAX_ORDER = 9
MIN_LENGTH = 8


def _is_power_of_two(value: int) -> bool:
    return value > 0 and (value & (value - 1)) == 0


def _freeze(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


def bspline(p: int, t) -> np.ndarray:
    """Evaluate the centered cardinal B-spline of order ``p``.

    Uses the closed-form truncated-power expansion
    ``b(t) = 1/(p-1)! * sum_k (-1)^k C(p,k) (t + p/2 - k)_+^(p-1)``.

    Args:
        p: Spline order (p >= 2)
        t: Scalar or array of evaluation points

    Returns:
        np.ndarray: B-spline values, zero outside ``(-p/2, p/2)``
    """
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    for k in range(p + 1):
        shifted = np.maximum(t + p / 2.0 - k, 0.0)
        total += (-1) ** k * math.comb(p, k) * shifted ** (p - 1)
    total /= math.factorial(p - 1)
    total[np.abs(t) >= p / 2.0] = 0.0
    return total


@dataclass(frozen=True)
class SplineSpectra:
    """DFTs of the B-spline sampled at the integers (u) and half-integers (v).

    ``v`` is stored for ``n = 0..N-1``; as a function of ``n`` it satisfies
    ``v[n + N] = -v[n]``.
    """
    p: int
    N: int
    u: np.ndarray
    v: np.ndarray

    def u_at(self, index: np.ndarray) -> np.ndarray:
        """Return u at arbitrary integer arguments (N-periodic)."""
        return self.u[np.mod(index, self.N)]

    def v_at(self, index: np.ndarray) -> np.ndarray:
        """Return v at arbitrary integer arguments (2N-periodic, N-antiperiodic)."""
        index = np.mod(index, 2 * self.N)
        sign = np.where(index >= self.N, -1.0, 1.0)
        return sign * self.v[np.mod(index, self.N)]


def sample_bspline(p: int, N: int) -> SplineSpectra:
    """Sample the order-``p`` B-spline and return the spectra u and v.

    The sums run over every integer (or half-integer) inside the spline
    support, which is the DFT of the N-periodized samples.

    Raises:
        FilterBankError: If ``p`` is outside 2..9 or ``N`` is not a power of
            two of at least 8
    """
    if not isinstance(p, (int, np.integer)) or p < MIN_ORDER or p > MAX_ORDER:
        raise FilterBankError(f"Spline order must be an integer in {MIN_ORDER}..{MAX_ORDER}, got {p}")
    if not isinstance(N, (int, np.integer)) or N < MIN_LENGTH or not _is_power_of_two(N):
        raise FilterBankError(f"Transform length must be a power of two >= {MIN_LENGTH}, got {N}")

    reach = p // 2 + 1
    n = np.arange(N)
    omega = np.exp(2j * np.pi / N)

    knots = np.arange(-reach, reach + 1)
    u = np.zeros(N, dtype=complex)
    for k, weight in zip(knots, bspline(p, knots)):
        u += weight * omega ** (-k * n)

    halves = np.arange(-reach, reach) + 0.5
    v = np.zeros(N, dtype=complex)
    for t, weight in zip(halves, bspline(p, halves)):
        v += weight * omega ** (-t * n)

    return SplineSpectra(p=p, N=N, u=_freeze(u.real.copy()), v=_freeze(v))


@dataclass(frozen=True)
class FirstLevelFilters:
    """DFTs of the first-level analysis/synthesis filters.

    ``beta``/``alpha`` are the spline packet filters h0/h1, ``f0``/``f1`` the
    complementary (Hilbert-derived) filters and ``qplus``/``qminus`` the
    quasi-analytic combinations ``h +/- i f``.
    """
    beta: np.ndarray
    alpha: np.ndarray
    f0: np.ndarray
    f1: np.ndarray
    qplus0: np.ndarray
    qplus1: np.ndarray
    qminus0: np.ndarray
    qminus1: np.ndarray

    def h(self, s: int) -> np.ndarray:
        return self.beta if s == 0 else self.alpha

    def f(self, s: int) -> np.ndarray:
        return self.f0 if s == 0 else self.f1

    def q(self, sign: int, s: int) -> np.ndarray:
        """Quasi-analytic filter for ``sign`` (+1 or -1) and branch ``s``."""
        if sign > 0:
            return self.qplus0 if s == 0 else self.qplus1
        return self.qminus0 if s == 0 else self.qminus1


def complementary_multiplier(N: int) -> np.ndarray:
    """Spectral multiplier turning a packet DFT into its complementary DFT.

    Hilbert multiplier ``-i``/``+i`` on the positive/negative half-bands, with
    the DC and Nyquist bins passed through unchanged.
    """
    mult = np.ones(N, dtype=complex)
    mult[1:N // 2] = -1j
    mult[N // 2 + 1:] = 1j
    return mult


def first_level_filters(spectra: SplineSpectra) -> FirstLevelFilters:
    """Build the first-level spline, complementary and quasi-analytic filters."""
    N = spectra.N
    n = np.arange(N)
    u2 = spectra.u_at(2 * n)
    v2 = spectra.v_at(2 * n).real
    norm = np.sqrt(u2 ** 2 + v2 ** 2)
    assert np.all(norm > 0), "spline spectra vanish simultaneously"

    beta = ((u2 + v2) / norm).astype(complex)
    # beta[n + N/2]: u is N-periodic and v flips sign after N
    beta_shift = (u2 - v2) / norm
    alpha = np.exp(2j * np.pi * n / N) * beta_shift

    mult = complementary_multiplier(N)
    f0 = mult * beta
    f1 = mult * alpha
    return FirstLevelFilters(
        beta=_freeze(beta),
        alpha=_freeze(alpha),
        f0=_freeze(f0),
        f1=_freeze(f1),
        qplus0=_freeze(beta + 1j * f0),
        qplus1=_freeze(alpha + 1j * f1),
        qminus0=_freeze(beta - 1j * f0),
        qminus1=_freeze(alpha - 1j * f1),
    )


@dataclass(frozen=True)
class ModulationPair:
    """Analysis and synthesis modulation matrices at one bin.

    For a level-m block of length L the one-level transform is
    ``y = 0.5 * analysis @ (x_hat[n], x_hat[n + L/2])`` and
    ``(x_hat[n], x_hat[n + L/2]) = synthesis @ y``.
    """
    analysis: np.ndarray
    synthesis: np.ndarray


@dataclass(frozen=True)
class FilterBank:
    """Immutable set of first-level and dilated filters for one (p, N, M)."""
    p: int
    N: int
    max_level: int
    first: FirstLevelFilters
    level_filters: Dict[int, Tuple[np.ndarray, np.ndarray]] = field(repr=False)

    def h(self, m: int, s: int) -> np.ndarray:
        """Dilated filter ``h_[m],s[n] = h_s[2**m * n mod N]`` (m = 0 is undilated)."""
        if m == 0:
            return self.first.h(s)
        return self.level_filters[m][s]

    def subband_filters(self, m: int) -> Tuple[np.ndarray, np.ndarray]:
        """Filters taking level-m blocks (length N/2**m) to level m+1."""
        length = self.N >> m
        return self.h(m, 0)[:length], self.h(m, 1)[:length]

    def block_length(self, m: int) -> int:
        return self.N >> m

    def modulation(self, m: int, n: int) -> ModulationPair:
        return modulation_matrix(self, m, n)


def build_filter_bank(p: int, N: int, M: int) -> FilterBank:
    """Build the filter bank for spline order ``p``, length ``N`` and ``M`` levels.

    Raises:
        FilterBankError: If ``2**M > N/8`` or ``M < 1``
    """
    if M < 1:
        raise FilterBankError(f"Decomposition depth must be >= 1, got {M}")
    if N >= MIN_LENGTH and _is_power_of_two(N) and 2 ** M > N // MIN_LENGTH:
        deepest = int(math.log2(N // MIN_LENGTH))
        raise FilterBankError(
            f"Decomposition depth M={M} is too deep for N={N}: "
            f"need 2**M <= N/8, so M <= {deepest}"
        )
    spectra = sample_bspline(p, N)
    first = first_level_filters(spectra)

    n = np.arange(N)
    level_filters = {}
    for m in range(1, M + 1):
        index = np.mod((2 ** m) * n, N)
        level_filters[m] = (_freeze(first.beta[index].copy()), _freeze(first.alpha[index].copy()))
    return FilterBank(p=p, N=N, max_level=M, first=first, level_filters=level_filters)


def modulation_matrix(fb: FilterBank, m: int, n: int) -> ModulationPair:
    """Return the modulation matrices of the level-m filter pair at bin ``n``.

    Raises:
        IndexError: If ``m`` is outside 0..max_level or ``n`` outside 0..N/2**m-1
    """
    if not 0 <= m <= fb.max_level:
        raise IndexError(f"level {m} outside 0..{fb.max_level}")
    length = fb.block_length(m)
    if not 0 <= n < length:
        raise IndexError(f"bin {n} outside 0..{length - 1} for level {m}")

    h0 = fb.h(m, 0)
    h1 = fb.h(m, 1)
    half = length // 2

    def at(filt, k):
        return filt[k % length]

    synthesis = np.array([
        [at(h0, n), at(h1, n)],
        [at(h0, n + half), at(h1, n + half)],
    ])
    analysis = np.array([
        [at(h0, -n), at(h0, -n + half)],
        [at(h1, -n), at(h1, -n + half)],
    ])
    return ModulationPair(analysis=analysis, synthesis=synthesis)
