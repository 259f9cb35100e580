"""
Plot command: dot plots and theta heatmaps from a records CSV
"""

import click

from core.harness import theta_heatmap
from utils.csv_storage import read_records_csv
from utils.error_handler import error_handler
from utils.plots import emit_dot_plot, emit_heatmap_plot


@click.command()
@click.option('--records', 'records_path', required=True, type=click.Path(dir_okay=False))
@click.option('--kind', required=True, type=click.Choice(['dot', 'heatmap']))
@click.option('--out', 'out_path', required=True, type=click.Path(dir_okay=False))
@click.option('--standard', default='HD', show_default=True, help='Standard rule of a heatmap.')
@click.option('--modified', default='HD-SH2', show_default=True, help='Semi-heuristic rule of a heatmap.')
@error_handler
def plot(records_path, kind, out_path, standard, modified):
    """Render records as an SVG figure."""
    records = read_records_csv(records_path)
    if kind == 'dot':
        emit_dot_plot(records, out_path)
    else:
        emit_heatmap_plot(theta_heatmap(records, standard, modified), out_path)
    click.echo(f"{kind} plot written to {out_path}")
