"""Export of filters and waveforms for inspection."""

import csv
from pathlib import Path
from typing import Set

import numpy as np
from scipy import fft as sp_fft

from ..transform.spline_filters import FilterBank
from ..transform.transform1d import KINDS, waveform_1d
from ..transform.transform2d import directional_waveform_2d
from .pgm import save_image

FILTER_NAMES = ('beta', 'alpha', 'f0', 'f1', 'qplus0', 'qplus1', 'qminus0', 'qminus1')


def to_display(values: np.ndarray) -> np.ndarray:
    """Stretch an array linearly onto 0..255."""
    low, high = float(values.min()), float(values.max())
    if high == low:
        return np.zeros_like(values)
    return 255.0 * (values - low) / (high - low)


def log_spectrum(values: np.ndarray) -> np.ndarray:
    """Centered log-magnitude spectrum scaled onto 0..255."""
    magnitude = np.abs(sp_fft.fftshift(sp_fft.fft2(values)))
    return to_display(np.log1p(magnitude))


class GalleryWriter:
    """Writes filter tables and waveform images into one output directory."""

    def __init__(self, output_dir: Path):
        """Initialize the writer.

        Args:
            output_dir: Directory receiving CSV and PGM files
        """
        self.output_dir = Path(output_dir)
        self.written: Set[str] = set()

    def _target(self, name: str) -> Path:
        path = self.output_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def write_filter_csv(self, fb: FilterBank) -> Path:
        """Dump the first-level filter DFTs as ``filter, n, re, im`` rows."""
        path = self._target(f"filters_p{fb.p}_N{fb.N}.csv")
        with open(path, 'w', newline='', encoding='utf-8') as handle:
            writer = csv.writer(handle)
            writer.writerow(['filter', 'n', 're', 'im'])
            for name in FILTER_NAMES:
                for n, value in enumerate(getattr(fb.first, name)):
                    writer.writerow([name, n, repr(float(value.real)), repr(float(value.imag))])
        self.written.add(str(path))
        return path

    def write_waveform_csv(self, fb: FilterBank, m: int) -> Path:
        """Dump every level-m 1D waveform with its magnitude spectrum."""
        path = self._target(f"waveforms_m{m}.csv")
        with open(path, 'w', newline='', encoding='utf-8') as handle:
            writer = csv.writer(handle)
            writer.writerow(['l', 'kind', 'k', 're', 'im', 'magnitude'])
            for l in range(2 ** m):
                for kind in KINDS:
                    values = waveform_1d(fb, m, l, kind)
                    magnitude = np.abs(sp_fft.fft(values))
                    for k in range(fb.N):
                        value = complex(values[k])
                        writer.writerow([l, kind, k, repr(value.real), repr(value.imag),
                                         repr(float(magnitude[k]))])
        self.written.add(str(path))
        return path

    def write_theta_tiles(self, fb: FilterBank, m: int) -> int:
        """Write each level-m directional waveform and its spectrum as PGM tiles.

        Returns:
            int: Number of new files written
        """
        count = 0
        for sign, label in ((1, 'plus'), (-1, 'minus')):
            for j in range(2 ** m):
                for l in range(2 ** m):
                    stem = f"theta_m{m}_{label}_{j}_{l}"
                    path = self._target(f"{stem}.pgm")
                    if str(path) in self.written:
                        continue
                    waveform = directional_waveform_2d(fb, m, j, l, sign).values
                    # center the atom for viewing
                    save_image(to_display(sp_fft.fftshift(waveform)), path)
                    spectrum_path = self._target(f"{stem}_spectrum.pgm")
                    save_image(log_spectrum(waveform), spectrum_path)
                    self.written.update((str(path), str(spectrum_path)))
                    count += 2
        return count

    def export(self, fb: FilterBank, m: int) -> int:
        """Write filters, 1D waveforms and 2D tiles for level ``m``.

        Returns:
            int: Number of files written
        """
        self.write_filter_csv(fb)
        self.write_waveform_csv(fb, m)
        return 2 + self.write_theta_tiles(fb, m)
