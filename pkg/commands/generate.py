"""
Problem generation command: writes a normalised test problem as CSV
"""

import logging

import click

from config import Config
from core.gallery import gen_baart, gen_blur, gen_heat, gen_phantom, gen_tomo
from utils.csv_storage import CsvStorage
from utils.error_handler import error_handler

logger = logging.getLogger(__name__)

GEN_PROBLEMS = ['baart', 'heat', 'blur', 'tomo', 'phantom']


@click.command()
@click.option('--problem', required=True, type=click.Choice(GEN_PROBLEMS))
@click.option('--n', 'size', type=click.IntRange(min=2), default=None,
              help='Dimension for baart/heat, image side for blur/tomo/phantom.')
@click.option('--seed', type=click.IntRange(0, 2 ** 64 - 1), default=0, show_default=True)
@click.option('--out', 'out_dir', required=True, type=click.Path(file_okay=False))
@error_handler
def gen(problem, size, seed, out_dir):
    """Generate a test problem and write A.csv, x.csv and y.csv."""
    storage = CsvStorage(out_dir)

    if problem == 'heat':
        storage.save_matrix(gen_heat(size or Config.BAART_N), 'A.csv')
        click.echo(f"heat operator written to {out_dir}")
        return
    if problem == 'phantom':
        storage.save_matrix(gen_phantom(size or Config.GRID_N, seed), 'x.csv')
        click.echo(f"phantom written to {out_dir}")
        return

    if problem == 'baart':
        generated = gen_baart(size or Config.BAART_N)
    elif problem == 'blur':
        generated = gen_blur(size or Config.GRID_N, min(Config.BLUR_BAND, size or Config.GRID_N),
                             Config.BLUR_SIGMA, seed)
    else:
        generated = gen_tomo(size or Config.GRID_N, Config.TOMO_OVERSAMPLING, seed)

    storage.save_matrix(generated.a_clean, 'A.csv')
    storage.save_matrix(generated.x_true, 'x.csv')
    storage.save_matrix(generated.y_clean, 'y.csv')
    m, n = generated.shape
    logger.info(f"Generated {problem} ({m}x{n}) seed={seed}")
    click.echo(f"{problem}: {m}x{n} written to {out_dir}")
