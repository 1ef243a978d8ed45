"""Bivariate shrinkage and the M1/M2 inpainting iterations."""

from .shrinkage import (
    StopDecision,
    StopState,
    ThresholdSchedule,
    averaged_variance,
    bsa_apply,
    make_schedule,
    select_stop,
    shrink_level,
)
from .inpaint import (
    INPAINT_METHODS,
    BregmanState,
    InpaintConfig,
    IterationRecord,
    MaskedImage,
    crop,
    extend_symmetric,
    fuse_levels,
    m1_inpaint,
    m2_inpaint,
    padded_size,
    solve_data_step,
)

__all__ = [
    'StopDecision', 'StopState', 'ThresholdSchedule', 'averaged_variance',
    'bsa_apply', 'make_schedule', 'select_stop', 'shrink_level',
    'INPAINT_METHODS', 'BregmanState', 'InpaintConfig', 'IterationRecord',
    'MaskedImage', 'crop', 'extend_symmetric', 'fuse_levels', 'padded_size',
    'm1_inpaint', 'm2_inpaint', 'solve_data_step',
]
