"""Default configuration values for qwpinpaint.

Keys are flat and mirror the fields of InpaintConfig and RunConfig. Keys
whose default is "absent" (margin, rho_missing, mask, input, output,
checkpoint_dir) are not listed.
"""

DEFAULT_CONFIG = {
    'p': 5,
    'levels': [3, 4],
    'weights': [1.0, 1.0],
    'windows': [3, 2],
    'mu': 0.05,
    'R1': 5,
    'R2': 8,
    'tol1': 0.05,
    'tol2': 0.01,
    'L1': 15,
    'L2': 10,
    'L3': 10,
    'normalize_delta': False,
    'use_cg': False,
    'method': 'm2',
    'sigma': 0.0,
    'seed': 0,
    'checkpoint_every': 0,
}

OPTIONAL_KEYS = ('margin', 'rho_missing', 'mask', 'input', 'output', 'checkpoint_dir')

PATH_KEYS = ('mask', 'input', 'output', 'checkpoint_dir')

METHODS = ('m1', 'm2')
