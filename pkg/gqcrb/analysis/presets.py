"""
Parameter sweeps and the figure presets, tabulated as pandas DataFrames.

Grid points are evaluated by a thread pool and the rows are assembled in grid order, so the
tables (and the CSV files written from them) are deterministic. A point that raises a
GqcrbError leaves NaN in the affected cells and is summarized in a single warning.
"""
import concurrent.futures
import warnings

import numpy as np
import pandas as pd

import gqcrb
from gqcrb.analysis.logderiv import analyze
from gqcrb.analysis.scenarios import (
    SCENARIOS,
    ScenarioConfig,
    build_family,
    displacement_bounds_closed,
    phase_measurement_variance,
)
from gqcrb.exceptions import DomainError, GqcrbError

CSV_FLOAT_FORMAT = '%.9g'


def grid(start, stop, step):
    """
    The closed grid start, start + step, ..., stop.

    Example
    -------
    | grid(0, 1.2, 0.02)  # -> 61 points
    """
    num = int(round((stop - start) / step)) + 1
    return np.linspace(start, stop, num)


def _attempt(errors, label, func, *args):
    try:
        return func(*args)
    except GqcrbError as err:
        errors.append(f'{label}: {type(err).__name__}: {err}')
        return np.nan


def run_grid(row_function, points, workers=None):
    """
    Evaluates row_function at every grid point.

    Parameters
    ----------
    row_function: callable
        point -> (dict of column values, list of error strings).
    points: array-like
        The grid.
    workers: int, optional
        The number of worker threads, defaults to gqcrb.config['SWEEP_WORKERS'].

    Returns
    -------
    pd.DataFrame
        One row per point, in grid order.
    """
    if workers is None:
        workers = gqcrb.config['SWEEP_WORKERS']
    with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, int(workers))) as executor:
        results = list(executor.map(row_function, points))

    rows = [row for row, _ in results]
    errors = [error for _, point_errors in results for error in point_errors]
    if errors:
        warnings.warn(
            f'{len(errors)} cell(s) could not be computed and were left empty. '
            f'First: {errors[0]}'
        )
    return pd.DataFrame(rows)


def _bound_or_nan(value):
    return np.nan if value is None else value


def _report(errors, label, config):
    family = build_family(config)
    try:
        return analyze(family, config.theta())
    except GqcrbError as err:
        errors.append(f'{label}: {type(err).__name__}: {err}')
        return None


def _with_value(config, param, value):
    if config.name == 'damping-temperature' and param == 'gamma':
        return config.replace(xi=np.expm1(value))
    return config.replace(**{param: value})


def sweep(config, param, start, stop, steps, flavor='both', workers=None):
    """
    Sweeps one scenario parameter and tabulates the QFI traces and the bounds.

    Parameters
    ----------
    config: ScenarioConfig
        The base point.
    param: str
        Any parameter of the scenario (for damping-temperature also gamma).
    start, stop: float
        The sweep range, start < stop.
    steps: int
        The number of grid points, >= 2.
    flavor: str
        Passed to analyze: 'both', 'sld' or 'rld'.
    workers: int, optional
        Worker threads.

    Returns
    -------
    pd.DataFrame
        Columns param, F_sld_trace, F_rld_trace, B_S, B_R.

    Raises
    ------
    DomainError
        For an unknown parameter, steps < 2 or start >= stop.
    """
    valid = set(SCENARIOS[config.name].defaults)
    if config.name == 'damping-temperature':
        valid.add('gamma')
    if param not in valid:
        raise DomainError(f'{param} is not a parameter of {config.name}; use one of {sorted(valid)}.')
    if int(steps) != steps or steps < 2:
        raise DomainError(f'A sweep needs at least 2 steps, got {steps}.')
    if not start < stop:
        raise DomainError(f'The sweep range must have from < to, got {start} >= {stop}.')
    # Validate the end points before launching the pool.
    _with_value(config, param, start)
    _with_value(config, param, stop)

    def row(value):
        errors = []
        values = dict.fromkeys([param, 'F_sld_trace', 'F_rld_trace', 'B_S', 'B_R'], np.nan)
        values[param] = value
        try:
            point = _with_value(config, param, value)
            report = analyze(build_family(point), point.theta(), flavor=flavor)
        except GqcrbError as err:
            errors.append(f'{param}={value}: {type(err).__name__}: {err}')
            return values, errors
        values['F_sld_trace'] = np.trace(report.F_sld)
        values['B_S'] = report.B_S
        if report.F_rld is not None:
            values['F_rld_trace'] = np.trace(report.F_rld).real
            values['B_R'] = _bound_or_nan(report.B_R)
        return values, errors

    return run_grid(row, np.linspace(start, stop, int(steps)), workers)


def fig1(workers=None):
    """
    Phase sensitivity delta^2 phi at phi = 0 versus r for the two insertions.

    N = 0.2, eps1 = 0.8 and eps2 in {0.8, 1.0} (the before-bs value does not depend on
    eps2).
    """
    base = {'N': 0.2, 'eps1': 0.8, 'phi': 0.0}

    def row(r):
        errors = []
        before = ScenarioConfig('phase-tmsv', 'before-bs', parameters={**base, 'r': r, 'eps2': 0.8})
        values = {'r': r, 'dphi2_before': _attempt(errors, f'r={r}', phase_measurement_variance, before)}
        for eps2, column in ((0.8, 'dphi2_after_e2_08'), (1.0, 'dphi2_after_e2_10')):
            after = ScenarioConfig('phase-tmsv', 'after-bs', parameters={**base, 'r': r, 'eps2': eps2})
            values[column] = _attempt(errors, f'r={r}', phase_measurement_variance, after)
        return values, errors

    return run_grid(row, grid(0.05, 1.5, 0.05), workers)


def _fig2(eps1, eps2, workers):
    base = {'nu_T': 0.2, 'N': 0.0, 'eps1': eps1, 'eps2': eps2}

    def row(r):
        errors = []
        config = ScenarioConfig('displacement-pair', parameters={**base, 'r': r})
        report = _report(errors, f'r={r}', config)
        values = {'r': r, 'B_R': np.nan, 'B_S': np.nan}
        if report is not None:
            values['B_R'] = _bound_or_nan(report.B_R)
            values['B_S'] = report.B_S
        values['B_M'] = _attempt(errors, f'r={r}', lambda c: displacement_bounds_closed(c)[2], config)
        return values, errors

    return run_grid(row, grid(0, 1.2, 0.02), workers)


def fig2a(workers=None):
    """B_R, B_S and the homodyne B_M for the displacement pair, eps = (0.9, 1.0)."""
    return _fig2(0.9, 1.0, workers)


def fig2b(workers=None):
    """B_R, B_S and the homodyne B_M for the displacement pair, eps = (0.9, 0.9)."""
    return _fig2(0.9, 0.9, workers)


def fig3a(workers=None):
    """
    B_S and B_R for damping and temperature with the single-mode and the two-mode squeezed
    vacuum probe; N = 0.9, xi = 0.5, lambda = 0, nu_T = 0.

    At r = 0 both probes leave the QFI matrices singular and those cells are empty.
    """
    base = {'N': 0.9, 'xi': 0.5, 'lambda0': 0.0, 'nu_T': 0.0}

    def row(r):
        errors = []
        values = {'r': r}
        for probe, suffix in (('single', 'single'), ('tmsv', 'tmsv')):
            config = ScenarioConfig('damping-temperature', probe=probe, parameters={**base, 'r': r})
            report = _report(errors, f'r={r} {probe}', config)
            values[f'B_S_{suffix}'] = np.nan if report is None else report.B_S
            values[f'B_R_{suffix}'] = np.nan if report is None else _bound_or_nan(report.B_R)
            if report is not None and report.B_R is None:
                errors.append(f'r={r} {probe}: {report.rld_error}')
        return values, errors

    return run_grid(row, grid(0, 1.5, 0.05), workers)[
        ['r', 'B_S_single', 'B_R_single', 'B_S_tmsv', 'B_R_tmsv']
    ]


def fig3b(workers=None, nu_T=0.1):
    """
    B = max(B_R, B_S) for squeezing and phase at s = 1, phi = 0 versus the probe energy
    n = (nu_T + 1/2) cosh 2r - 1/2, for coherent, squeezed, thermal and two-mode squeezed
    thermal probes of equal energy.
    """
    base = {'s': 1.0, 'phi': 0.0}

    def probes(r, n):
        return {
            'B_coherent': ScenarioConfig(
                'squeeze-phase', probe='single',
                parameters={**base, 'r': 0.0, 'nu_T': nu_T, 'lambda0': np.sqrt(max(n - nu_T, 0))},
            ),
            'B_squeezed': ScenarioConfig(
                'squeeze-phase', probe='single', parameters={**base, 'r': r, 'nu_T': nu_T}
            ),
            'B_thermal': ScenarioConfig(
                'squeeze-phase', probe='single', parameters={**base, 'r': 0.0, 'nu_T': n}
            ),
            'B_tmst': ScenarioConfig(
                'squeeze-phase', probe='two-mode-squeezed-thermal',
                parameters={**base, 'r': r, 'nu_T': nu_T},
            ),
        }

    def row(r):
        errors = []
        n = (nu_T + 0.5) * np.cosh(2 * r) - 0.5
        values = {'r': r, 'n': n}
        for column, config in probes(r, n).items():
            report = _report(errors, f'r={r} {column}', config)
            if report is None:
                values[column] = np.nan
            elif report.B_R is None:
                values[column] = report.B_S
            else:
                values[column] = max(report.B_R, report.B_S)
        return values, errors

    return run_grid(row, grid(0, 1.5, 0.05), workers)


PRESETS = {
    'fig1': fig1,
    'fig2a': fig2a,
    'fig2b': fig2b,
    'fig3a': fig3a,
    'fig3b': fig3b,
}


def to_csv(table, path=None):
    """Deterministic CSV with 9 significant digits and empty cells for NaN."""
    return table.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, na_rep='')
