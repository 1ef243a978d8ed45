"""Command line interface for qwpinpaint."""

import json
import logging
from pathlib import Path

import click
import numpy as np

from .config import ConfigManager, save_config
from .core import InpaintRunner
from .db import RunDatabase
from .errors import QwpError, TransformError
from .imageio import GalleryWriter, degrade, load_image, load_mask, save_image, save_mask
from .quality import QualityReport, psnr
from .transform import build_filter_bank, qwp_forward_2d, qwp_inverse_2d

ROUNDTRIP_MIN_PSNR = 250.0


def _fail(error: QwpError):
    click.echo(f"Error: {error}", err=True)
    click.get_current_context().exit(error.exit_code)


def _int_list(ctx, param, value):
    if value is None:
        return None
    try:
        return [int(part) for part in value.split(',') if part.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got '{value}'")


def _float_list(ctx, param, value):
    if value is None:
        return None
    try:
        return [float(part) for part in value.split(',') if part.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got '{value}'")


@click.group()
@click.option('--verbose', '-v', count=True, help='Log progress (-v) or debug detail (-vv)')
def qwp(verbose):
    """Quasi-analytic wavelet packet transforms and image inpainting."""
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')


@qwp.command("inpaint")
@click.argument('input_path', required=False, type=click.Path(dir_okay=False, path_type=str))
@click.argument('output_path', required=False, type=click.Path(dir_okay=False, path_type=str))
@click.option('--config', '-c', help='Path to a TOML config file',
              type=click.Path(dir_okay=False, path_type=str))
@click.option('--method', '-m', type=click.Choice(['m1', 'm2']), help='Inpainting method')
@click.option('--mask', help='Mask image (white = present)', type=click.Path(dir_okay=False, path_type=str))
@click.option('--rho', 'rho_missing', type=float, help='Draw a random mask with this missing fraction')
@click.option('--sigma', type=float, help='Noise standard deviation of the input')
@click.option('--seed', type=int, help='Seed of the random mask')
@click.option('--order', '-p', 'p', type=int, help='Spline order')
@click.option('--levels', callback=_int_list, help='Fusion levels, e.g. 3,4')
@click.option('--weights', callback=_float_list, help='Fusion weights, e.g. 1,1')
@click.option('--windows', callback=_int_list, help='Window spans per level, e.g. 3,2')
@click.option('--mu', type=float, help='Split Bregman penalty')
@click.option('--r1', 'R1', type=int, help='Length of the coarse threshold sequence')
@click.option('--r2', 'R2', type=int, help='Length of the fine threshold sequence')
@click.option('--tol1', type=float, help='Advance tolerance of the coarse phase')
@click.option('--tol2', type=float, help='Advance and stop tolerance of the fine phases')
@click.option('--l1', 'L1', type=int, help='Iteration limit per threshold, coarse phase')
@click.option('--l2', 'L2', type=int, help='Iteration limit per threshold, fine phase')
@click.option('--l3', 'L3', type=int, help='Iteration limit at the last threshold')
@click.option('--margin', type=int, help='Mirror extension in pixels (default: max side // 8)')
@click.option('--normalize-delta', is_flag=True, help='Divide the iterate change by the padded side')
@click.option('--use-cg', is_flag=True, help='Solve the data step by conjugate gradients')
@click.option('--checkpoint-every', type=int, help='Write the iterate every N iterations')
@click.option('--checkpoint-dir', type=click.Path(file_okay=False, path_type=str))
@click.option('--reference', '-r', type=click.Path(dir_okay=False, path_type=str),
              help='Clean image to report PSNR/SSIM against')
@click.option('--record', is_flag=True, help='Record the run in the run database')
@click.option('--db', 'db_path', type=click.Path(dir_okay=False, path_type=str),
              help='Run database path (default: .qwp/runs.db)')
@click.option('--save-config', 'config_out', type=click.Path(dir_okay=False, path_type=str),
              help='Write the effective configuration to this file')
@click.option('--json', 'as_json', is_flag=True, help='Print the result as JSON')
def qwp_inpaint(input_path, output_path, config, method, mask, rho_missing, sigma, seed, p, levels,
                weights, windows, mu, R1, R2, tol1, tol2, L1, L2, L3, margin, normalize_delta,
                use_cg, checkpoint_every, checkpoint_dir, reference,
                record, db_path, config_out, as_json):
    """Restore missing pixels of INPUT_PATH and write OUTPUT_PATH.

    Values come from the defaults, then the config file, then the flags.
    """
    try:
        overrides = {
            'input': input_path, 'output': output_path, 'method': method, 'mask': mask,
            'rho_missing': rho_missing, 'sigma': sigma, 'seed': seed, 'p': p,
            'levels': levels, 'weights': weights, 'windows': windows, 'mu': mu,
            'R1': R1, 'R2': R2, 'tol1': tol1, 'tol2': tol2, 'L1': L1, 'L2': L2, 'L3': L3,
            'margin': margin, 'normalize_delta': normalize_delta or None, 'use_cg': use_cg or None,
            'checkpoint_every': checkpoint_every, 'checkpoint_dir': checkpoint_dir,
        }
        run_config = ConfigManager(config, overrides).get_run_config()
        if config_out:
            save_config(run_config, config_out)

        db = RunDatabase(db_path) if record or db_path else None
        result = InpaintRunner(run_config, db=db).run(reference=reference)
    except QwpError as e:
        _fail(e)
        return
    except Exception as e:
        click.echo(f"Error: {e}", err=True)
        raise click.Abort()

    summary = {
        'method': run_config.method,
        'iterations': result.iteration_count,
        'final_lambda': result.final_lambda,
        'elapsed': round(result.elapsed, 3),
    }
    if result.run_hash:
        summary['run'] = result.run_hash
    if result.quality:
        summary.update(result.quality.to_dict())

    if as_json:
        click.echo(json.dumps(summary))
    else:
        click.echo(f"{run_config.method}: {result.iteration_count} iterations in {result.elapsed:.2f}s")
        if result.quality:
            click.echo(result.quality.line())


@qwp.command("degrade")
@click.argument('clean_path', type=click.Path(dir_okay=False, path_type=str))
@click.argument('output_path', type=click.Path(dir_okay=False, path_type=str))
@click.argument('mask_output', type=click.Path(dir_okay=False, path_type=str))
@click.option('--rho', 'rho_missing', type=float, default=0.0, show_default=True,
              help='Fraction of pixels to remove')
@click.option('--sigma', type=float, default=0.0, show_default=True, help='Noise standard deviation')
@click.option('--seed', type=int, default=0, show_default=True, help='Seed of mask and noise')
@click.option('--mask', type=click.Path(dir_okay=False, path_type=str),
              help='Use this mask image instead of a random one')
def qwp_degrade(clean_path, output_path, mask_output, rho_missing, sigma, seed, mask):
    """Mask and add noise to CLEAN_PATH, writing the image and its mask."""
    try:
        clean = load_image(clean_path)
        given = load_mask(mask) if mask else None
        degraded, used = degrade(clean, rho_missing, sigma, seed, mask=given)
        save_image(degraded, output_path)
        save_mask(used, mask_output)
    except QwpError as e:
        _fail(e)
        return
    except Exception as e:
        click.echo(f"Error: {e}", err=True)
        raise click.Abort()
    missing = int(used.size - used.sum())
    click.echo(f"missing={missing} of {used.size} sigma={sigma}")


@qwp.command("metrics")
@click.argument('reference', type=click.Path(dir_okay=False, path_type=str))
@click.argument('restored', type=click.Path(dir_okay=False, path_type=str))
@click.option('--json', 'as_json', is_flag=True, help='Print the result as JSON')
def qwp_metrics(reference, restored, as_json):
    """Print PSNR and SSIM of RESTORED against REFERENCE."""
    try:
        report = QualityReport.measure(load_image(reference), load_image(restored))
    except QwpError as e:
        _fail(e)
        return
    except ValueError as e:
        click.echo(f"Error: {e}", err=True)
        click.get_current_context().exit(1)
        return
    click.echo(json.dumps(report.to_dict()) if as_json else report.line())


@qwp.command("waveforms")
@click.argument('output_dir', type=click.Path(file_okay=False, path_type=Path))
@click.option('--order', '-p', 'p', type=int, default=5, show_default=True, help='Spline order')
@click.option('--size', '-n', type=int, default=64, show_default=True, help='Signal length N')
@click.option('--level', '-m', type=int, default=2, show_default=True, help='Decomposition level')
def qwp_waveforms(output_dir, p, size, level):
    """Export filters, 1D waveforms and 2D directional tiles into OUTPUT_DIR."""
    try:
        fb = build_filter_bank(p, size, level)
        count = GalleryWriter(output_dir).export(fb, level)
    except QwpError as e:
        _fail(e)
        return
    click.echo(f"Wrote {count} file(s) to {output_dir}")


@qwp.command("roundtrip")
@click.argument('image_path', required=False, type=click.Path(dir_okay=False, path_type=str))
@click.option('--order', '-p', 'p', type=int, default=5, show_default=True, help='Spline order')
@click.option('--depth', '-M', type=int, default=4, show_default=True, help='Deepest level')
@click.option('--size', '-n', type=int, default=256, show_default=True,
              help='Side of the random test image when no image is given')
@click.option('--seed', type=int, default=0, show_default=True)
def qwp_roundtrip(image_path, p, depth, size, seed):
    """Check perfect reconstruction of the 2D transform at every level up to DEPTH."""
    try:
        if image_path:
            image = load_image(image_path)
        else:
            image = np.random.default_rng(seed).uniform(0, 255, (size, size))
        fb = build_filter_bank(p, image.shape[-1], depth)
        tree = qwp_forward_2d(image, fb, depth)
        worst = np.inf
        for m in range(1, depth + 1):
            value = psnr(image, qwp_inverse_2d(tree, fb, level=m))
            click.echo(f"M={m} psnr={value:.4f}")
            worst = min(worst, value)
        if worst < ROUNDTRIP_MIN_PSNR:
            raise TransformError(f"Reconstruction PSNR {worst:.4f} dB is below {ROUNDTRIP_MIN_PSNR} dB")
    except QwpError as e:
        _fail(e)


@qwp.command("runs")
@click.option('--db', 'db_path', type=click.Path(dir_okay=False, path_type=str),
              help='Run database path (default: .qwp/runs.db)')
@click.option('--limit', '-l', type=int, default=10, show_default=True)
@click.option('--iterations', 'run_hash', help='Show the iteration log of this run instead')
def qwp_runs(db_path, limit, run_hash):
    """List recorded inpainting runs."""
    db = RunDatabase(db_path)
    if run_hash:
        for row in db.get_iterations(run_hash):
            click.echo(f"k={row['k']} nu={row['nu']} lambda={row['lambda']:.6g} delta={row['delta']}")
        return
    runs = db.list_runs(limit)
    if not runs:
        click.echo("No runs recorded")
        return
    for run in runs:
        scores = ''
        if run['psnr'] is not None:
            scores = f" psnr={run['psnr']:.4f} ssim={run['ssim']:.6f}"
        click.echo(f"{run['run_hash']} {run['method']} {run['status']} "
                   f"iterations={run['iterations']}{scores}")


def main(argv=None) -> int:
    """Console entry point; returns the process exit code."""
    try:
        rv = qwp.main(args=argv, prog_name='qwp', standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except Exception as e:
        click.echo(f"Error: {e}", err=True)
        return 1
    return rv if isinstance(rv, int) else 0


if __name__ == '__main__':
    raise SystemExit(main())
