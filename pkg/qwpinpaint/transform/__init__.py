"""Spline-based quasi-analytic wavelet packet transforms."""

from .spline_filters import FilterBank, build_filter_bank, modulation_matrix, sample_bspline
from .transform1d import (
    CoefficientTree1D,
    analytic_parts,
    hilbert_periodic,
    qwp_forward_1d,
    qwp_inverse_1d,
    waveform_1d,
)
from .transform2d import (
    CoefficientTree2D,
    DirectionalWaveform,
    direction_classes,
    directional_waveform_2d,
    partial_reconstruction,
    qwp_forward_2d,
    qwp_inverse_2d,
)

__all__ = [
    'FilterBank', 'build_filter_bank', 'modulation_matrix', 'sample_bspline',
    'CoefficientTree1D', 'analytic_parts', 'hilbert_periodic',
    'qwp_forward_1d', 'qwp_inverse_1d', 'waveform_1d',
    'CoefficientTree2D', 'DirectionalWaveform', 'direction_classes',
    'directional_waveform_2d', 'partial_reconstruction',
    'qwp_forward_2d', 'qwp_inverse_2d',
]
