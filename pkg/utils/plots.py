"""
Static figures: dot plots of per-rule errors and theta heatmaps (SVG).

Output bytes depend only on the input: the SVG id salt is fixed and the
date metadata is dropped.
"""

import logging

import matplotlib

matplotlib.use('Agg')

import numpy as np  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from core.harness import OPTIMAL_ROW, RULE_ORDER  # noqa: E402
from utils.error_handler import StorageError, ValidationError  # noqa: E402
from utils.helpers import median  # noqa: E402

logger = logging.getLogger(__name__)

SVG_SALT = 'regulab'
DATA_MARKER = '*'
MEDIAN_MARKER = 'o'


def _save(fig, path):
    with matplotlib.rc_context({'svg.hashsalt': SVG_SALT, 'svg.fonttype': 'path'}):
        try:
            fig.savefig(path, format='svg', metadata={'Date': None})
        except OSError as e:
            raise StorageError(f"Failed to write {path}: {e.strerror or e}", path)
    logger.info(f"Wrote figure {path}")


def dot_plot_rows(records):
    """(label, e_rel values, median) per rule in table order, then the e_opt row"""
    ok = [r for r in records if r.ok]
    if not ok:
        raise ValidationError("A dot plot needs at least one successful record")

    rules = sorted({r.rule for r in ok}, key=lambda rule: (RULE_ORDER.index(rule) if rule in RULE_ORDER
                                                            else len(RULE_ORDER), rule))
    rows = []
    for rule in rules:
        values = [r.e_rel for r in ok if r.rule == rule]
        rows.append((rule, values, median(values)))

    optimal = {}
    for r in ok:
        optimal[(r.delta_rel, r.eta_rel, r.realization)] = r.e_opt
    values = [optimal[key] for key in sorted(optimal)]
    rows.append((OPTIMAL_ROW, values, median(values)))
    return rows


def emit_dot_plot(records, path, title=None):
    """Asterisk per realization at its e_rel, green circle at each row's median"""
    rows = dot_plot_rows(records)
    fig = Figure(figsize=(7, 0.45 * len(rows) + 1.2))
    ax = fig.add_subplot()

    for index, (label, values, centre) in enumerate(rows):
        y = len(rows) - 1 - index
        ax.plot(values, [y] * len(values), linestyle='none', marker=DATA_MARKER,
                color='tab:blue', markersize=6, gid=f"data-{label}")
        ax.plot([centre], [y], linestyle='none', marker=MEDIAN_MARKER, markerfacecolor='none',
                markeredgecolor='tab:green', markersize=9, markeredgewidth=1.5, gid=f"median-{label}")

    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels([label for label, _, _ in reversed(rows)])
    ax.set_xlabel('relative error')
    if all(v > 0 for _, values, _ in rows for v in values):
        ax.set_xscale('log')
    if title:
        ax.set_title(title)
    ax.grid(axis='x', alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def emit_heatmap_plot(matrix, path):
    """Cells of a HeatmapMatrix; red where the semi-heuristic rule wins"""
    cells = np.asarray(matrix.cells, dtype=float)
    finite = cells[np.isfinite(cells)]
    limit = float(np.max(np.abs(finite))) if finite.size else 1.0
    limit = limit or 1.0

    fig = Figure(figsize=(6, 5))
    ax = fig.add_subplot()
    image = ax.imshow(cells, origin='lower', cmap='RdBu_r', vmin=-limit, vmax=limit, aspect='auto')
    ax.set_xticks(range(len(matrix.eta_levels)))
    ax.set_xticklabels([f"{e:g}" for e in matrix.eta_levels], rotation=45)
    ax.set_yticks(range(len(matrix.delta_levels)))
    ax.set_yticklabels([f"{d:g}" for d in matrix.delta_levels])
    ax.set_xlabel('eta')
    ax.set_ylabel('delta')
    if matrix.standard_id:
        ax.set_title(f"theta: {matrix.standard_id} vs {matrix.modified_id}")
    fig.colorbar(image, ax=ax)
    fig.tight_layout()
    _save(fig, path)
