"""Run orchestration: load inputs, inpaint, write outputs and record the run."""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from .config import ConfigManager, RunConfig
from .db import RunDatabase
from .errors import ConfigError, QwpError
from .imageio import load_image, load_mask, make_random_mask, save_image
from .quality import QualityReport
from .restore import INPAINT_METHODS, IterationRecord, MaskedImage, padded_size
from .transform import build_filter_bank

logger = logging.getLogger(__name__)


@dataclass
class InpaintResult:
    """Outcome of one inpainting run."""
    image: np.ndarray
    iterations: List[IterationRecord] = field(default_factory=list)
    final_lambda: Optional[float] = None
    elapsed: float = 0.0
    quality: Optional[QualityReport] = None
    run_hash: Optional[str] = None

    @property
    def iteration_count(self) -> int:
        return len(self.iterations)


class InpaintRunner:
    """Restore one degraded image according to a run configuration."""

    def __init__(self, config=None, db: Optional[RunDatabase] = None):
        """Initialize the runner.

        Args:
            config: A RunConfig, or any source ConfigManager accepts
            db: Run store to record into; nothing is recorded when None
        """
        if isinstance(config, RunConfig):
            self.config = config
        else:
            self.config = ConfigManager(config).get_run_config()
        self.db = db

    def load_inputs(self, image: Optional[np.ndarray] = None) -> MaskedImage:
        """Read the degraded image and resolve its mask.

        The mask comes from the ``mask`` file when one is configured, else it
        is drawn at random from ``rho_missing`` and ``seed`` and applied to the
        input. With neither, every pixel counts as present.
        """
        cfg = self.config
        if image is None:
            if cfg.input is None:
                raise ConfigError("No input image configured")
            image = load_image(cfg.input)
        image = np.asarray(image, dtype=float)

        if cfg.mask is not None:
            mask = load_mask(cfg.mask)
        elif cfg.rho_missing is not None:
            mask = make_random_mask(image.shape, cfg.rho_missing, cfg.seed)
            image = mask * image
        else:
            logger.info("no mask configured; treating every pixel as present")
            mask = np.ones_like(image)
        return MaskedImage(degraded=image, mask=mask, sigma=cfg.sigma)

    def _checkpoint(self, record: IterationRecord, X: np.ndarray):
        every = self.config.checkpoint_every
        if every <= 0 or record.k % every:
            return
        directory = Path(self.config.checkpoint_dir or 'checkpoints')
        path = directory / f"{self.config.method}_k{record.k:04d}.pgm"
        save_image(X, path)
        logger.debug("checkpoint written to %s", path)

    def run(self, image: Optional[np.ndarray] = None,
            reference: Optional[Union[np.ndarray, str, Path]] = None) -> InpaintResult:
        """Inpaint, write the output if configured, and measure against ``reference``.

        Args:
            image: Degraded image to use instead of the configured input file
            reference: Clean image (array or PGM path) for the quality report

        Returns:
            InpaintResult: Restored image with run statistics
        """
        cfg = self.config
        mi = self.load_inputs(image)
        height, width = mi.degraded.shape
        size = padded_size(height, width, cfg.inpaint)
        fb = build_filter_bank(cfg.inpaint.p, size, cfg.inpaint.parent_level)

        run_hash = None
        if self.db is not None:
            run_hash = self.db.start_run(cfg.method, cfg.to_dict(), input_path=cfg.input,
                                         shape=(height, width), extended_size=size)
        records: List[IterationRecord] = []

        def on_iteration(record: IterationRecord, X: np.ndarray):
            records.append(record)
            if run_hash is not None:
                self.db.record_iteration(run_hash, record.k, record.nu, record.lam, record.delta,
                                         record.advanced)
            self._checkpoint(record, X)

        logger.info("running %s on %dx%d image (padded to %d)", cfg.method, height, width, size)
        start = time.perf_counter()
        try:
            restored = INPAINT_METHODS[cfg.method](mi, cfg.inpaint, fb=fb, on_iteration=on_iteration)
        except QwpError as e:
            if run_hash is not None:
                self.db.fail_run(run_hash, str(e))
            raise
        elapsed = time.perf_counter() - start

        if cfg.output is not None:
            save_image(restored, cfg.output)
            logger.info("wrote %s", cfg.output)

        quality = None
        if reference is not None:
            if not isinstance(reference, np.ndarray):
                reference = load_image(reference)
            quality = QualityReport.measure(reference, restored)
            logger.info("%s", quality.line())

        final_lambda = records[-1].lam if records else None
        if run_hash is not None:
            self.db.complete_run(run_hash, len(records), final_lambda,
                                 psnr=quality.psnr if quality else None,
                                 ssim=quality.ssim if quality else None)
            self.db.record_metric(run_hash, 'elapsed', elapsed, 'seconds')

        return InpaintResult(image=restored, iterations=records, final_lambda=final_lambda,
                             elapsed=elapsed, quality=quality, run_hash=run_hash)
