# Standard library imports
import json
import os

# Third-party imports
import numpy as np
import pandas as pd

# Local application imports
from modules.assembly.StokesSolver import StokesSolution
from modules.harness.ErrorNorms import ErrorReport

# DEFINITIONS
CSV_COLUMNS: list[str] = ['scheme', 'problem', 'nu', 'n', 'h', 'dofs',
                          'err_u_l2', 'rate_u_l2', 'err_u_h1', 'rate_u_h1', 'err_p_l2', 'rate_p_l2', 'div_l2']
FLOAT_FORMAT: str = '%.6e'
RATE_COLUMNS: tuple[str, ...] = ('rate_u_l2', 'rate_u_h1', 'rate_p_l2')


def reports_frame(reports: list[ErrorReport]) -> pd.DataFrame:
    frame: pd.DataFrame = pd.DataFrame([r.to_dict() for r in reports], columns=CSV_COLUMNS)
    for column in RATE_COLUMNS:
        frame[column] = frame[column].astype(float)
    return frame


def _ensure_parent(path: str) -> None:
    parent: str = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def write_csv(reports: list[ErrorReport], path: str) -> None:
    _ensure_parent(path)
    reports_frame(reports).to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep='', lineterminator='\n')


def _cell(column: str, value) -> str:
    if column in ('scheme', 'problem'):
        return str(value)
    if column in ('n', 'dofs'):
        return str(int(value))
    if pd.isna(value):
        return ''
    if column in RATE_COLUMNS:
        return f"{value:.2f}"
    return f"{value:.3e}"


def format_markdown(reports: list[ErrorReport]) -> str:
    """Aligned markdown table with the CSV columns; rates with two decimals, errors in scientific notation."""
    frame: pd.DataFrame = reports_frame(reports)
    rows: list[list[str]] = [[_cell(c, value) for c, value in zip(CSV_COLUMNS, record)]
                             for record in frame.itertuples(index=False, name=None)]
    widths: list[int] = [max([len(c)] + [len(row[i]) for row in rows]) for i, c in enumerate(CSV_COLUMNS)]
    lines: list[str] = ['| ' + ' | '.join(c.ljust(w) for c, w in zip(CSV_COLUMNS, widths)) + ' |',
                        '|' + '|'.join('-' * (w + 2) for w in widths) + '|']
    for row in rows:
        lines.append('| ' + ' | '.join(cell.rjust(w) for cell, w in zip(row, widths)) + ' |')
    return '\n'.join(lines) + '\n'


def write_markdown(reports: list[ErrorReport], path: str) -> None:
    _ensure_parent(path)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(format_markdown(reports))


def write_solution_json(solution: StokesSolution, path: str) -> None:
    """Space dimensions, coefficient vectors, residual, timings and memory of one solve."""
    spaces = solution.spaces
    data: dict = {
        'scheme': solution.scheme.value,
        'nu': solution.nu,
        'dims': {
            'triangles': spaces.mesh.num_triangles,
            'V': spaces.V.n_dofs,
            'W': spaces.V.components[0].n_dofs,
            'Phi': spaces.V.n_dofs - spaces.V.components[0].n_dofs,
            'Q': spaces.Q.n_dofs,
            'R': spaces.R.n_dofs,
            'Y': spaces.Y.n_dofs,
            'Sigma': spaces.Sigma.n_dofs,
        },
        'u': np.asarray(solution.u).tolist(),
        'p': np.asarray(solution.p).tolist(),
        'multiplier': solution.multiplier,
        'residual': solution.residual,
        'timings': dict(solution.timings),
        'memory_rss': solution.memory_rss,
    }
    _ensure_parent(path)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2)
