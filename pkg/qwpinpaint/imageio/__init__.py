"""PGM image I/O, synthetic degradation and waveform export."""

from .pgm import load_image, load_mask, save_image, save_mask
from .degrade import add_noise, degrade, make_random_mask
from .gallery import GalleryWriter

__all__ = [
    'load_image', 'load_mask', 'save_image', 'save_mask',
    'add_noise', 'degrade', 'make_random_mask', 'GalleryWriter',
]
