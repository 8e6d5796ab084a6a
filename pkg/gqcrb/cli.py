"""
The gqcrb command line.

    gqcrb qfi CONFIG [--flavor both|sld|rld] [--out PATH]
    gqcrb sweep (CONFIG | --preset fig1|fig2a|fig2b|fig3a|fig3b) [--format csv|json] [--out PATH]
    gqcrb oracle-check CONFIG [--cutoff D] [--atol A] [--rtol R] [--flavor sld|rld|both]
    gqcrb list-scenarios

A CONFIG is a JSON file holding either a scenario object

    {"name": "phase-tmsv", "insertion": "after-bs", "parameters": {"r": 1.0}}

or a run object {"scenario": {...}, "flavor": "both", "sweep": {"param": "r", "from": 0,
"to": 1, "steps": 11}}.

Exit codes: 0 on success, 1 for an unreadable config or a failed oracle check, 2 for a
computation or domain error (the error class name is printed on stderr).
"""
import argparse
import json
import pathlib
import sys
from typing import Optional, Sequence

import numpy as np

import gqcrb
from gqcrb.analysis.logderiv import analyze, qfi_matrix
from gqcrb.analysis.presets import PRESETS, sweep, to_csv
from gqcrb.analysis.scenarios import SCENARIOS, ScenarioConfig, build_family
from gqcrb.exceptions import DomainError, GqcrbError
from gqcrb.oracle.qfi import rld_qfi_oracle, sld_qfi_oracle

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_COMPUTATION = 2


class ConfigReadError(Exception):
    """The config file is missing, is not valid JSON or is not a JSON object."""


def load_run_config(path):
    """
    Reads a config file into (ScenarioConfig, run options dict).

    Raises
    ------
    ConfigReadError
        If the file cannot be read or parsed, or is not a JSON object.
    DomainError
        If the JSON does not describe a valid scenario or sweep.
    """
    try:
        data = json.loads(pathlib.Path(path).read_text())
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as err:
        raise ConfigReadError(f'Cannot read config {path}: {err}') from err
    if not isinstance(data, dict):
        raise ConfigReadError(
            f'The config {path} must be a JSON object, got {type(data).__name__}.'
        )
    if 'scenario' in data:
        scenario, options = data['scenario'], {k: v for k, v in data.items() if k != 'scenario'}
    else:
        scenario, options = data, {}
    return ScenarioConfig.from_dict(scenario), options


def _write(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        pathlib.Path(out).write_text(text)
    return


def cmd_qfi(args):
    """Writes the QfiReport of the configured scenario point as JSON."""
    config, options = load_run_config(args.config)
    flavor = args.flavor or options.get('flavor', 'both')
    report = analyze(build_family(config), config.theta(), flavor=flavor)
    document = {'scenario': config.to_dict(), **report.to_dict()}
    _write(json.dumps(document, indent=2) + '\n', args.out or options.get('output'))
    return EXIT_OK


def records_json(table):
    """
    The table as a JSON list of row objects. Floats keep their full repr precision and
    missing cells become null.
    """
    records = [
        {
            column: None if isinstance(value, float) and np.isnan(value) else value
            for column, value in row.items()
        }
        for row in table.to_dict(orient='records')
    ]
    return json.dumps(records, default=lambda value: value.item())


def _sweep_options(options):
    try:
        grid = options['sweep']
        return grid['param'], float(grid['from']), float(grid['to']), grid['steps']
    except (KeyError, TypeError, ValueError) as err:
        raise DomainError(
            f'A sweep config needs "sweep": {{"param", "from", "to", "steps"}} ({err}).'
        ) from err


def cmd_sweep(args):
    """Tabulates a configured sweep or a figure preset as CSV (default) or JSON."""
    if args.preset is not None:
        table = PRESETS[args.preset](workers=args.workers)
        out = args.out
        fmt = args.format
    else:
        if args.config is None:
            raise DomainError('sweep needs a CONFIG file or --preset.')
        config, options = load_run_config(args.config)
        param, start, stop, steps = _sweep_options(options)
        flavor = args.flavor or options.get('flavor', 'both')
        table = sweep(config, param, start, stop, steps, flavor=flavor, workers=args.workers)
        out = args.out or options.get('output')
        fmt = args.format or options.get('format', 'csv')

    if fmt == 'json':
        text = records_json(table) + '\n'
    else:
        text = to_csv(table)
    _write(text, out)

    values = table.drop(columns=table.columns[0])
    if not values.notna().to_numpy().any():
        print('No grid point could be computed.', file=sys.stderr)
        return EXIT_COMPUTATION
    return EXIT_OK


def _compare(label, engine, oracle, atol, rtol):
    passed = True
    for index in np.ndindex(engine.shape):
        gap = abs(engine[index] - oracle[index])
        relative = gap / abs(engine[index]) if engine[index] != 0 else np.inf
        ok = gap <= atol or relative <= rtol
        passed &= ok
        print(
            f'{label}{list(index)}: engine={engine[index]:.9g} oracle={oracle[index]:.9g} '
            f'abs_gap={gap:.3e} rel_gap={relative:.3e} {"ok" if ok else "FAIL"}'
        )
    return passed


def cmd_oracle_check(args):
    """Compares the engine QFI matrices with the Fock-space oracle."""
    config, options = load_run_config(args.config)
    flavor = (args.flavor or options.get('flavor', 'sld')).lower()
    if flavor not in ('sld', 'rld', 'both'):
        raise DomainError(f"flavor must be 'sld', 'rld' or 'both', got {flavor}.")
    family = build_family(config)
    theta = config.theta()
    cutoff = args.cutoff if args.cutoff is not None else options.get('cutoff')

    passed = True
    if flavor in ('rld', 'both'):
        oracle = rld_qfi_oracle(family, theta, cutoff)
        passed &= _compare('F_rld', qfi_matrix(family, theta, 'RLD'), oracle, args.atol, args.rtol)
    if flavor in ('sld', 'both'):
        oracle = sld_qfi_oracle(family, theta, cutoff)
        passed &= _compare('F_sld', qfi_matrix(family, theta, 'SLD'), oracle, args.atol, args.rtol)
    print('PASS' if passed else 'FAIL')
    return EXIT_OK if passed else EXIT_BAD_INPUT


def cmd_list_scenarios(args):
    for name, scenario in SCENARIOS.items():
        print(f'{name}: {scenario.description}')
        print(f'    theta: {", ".join(scenario.param_names)}')
        print(f'    probes: {", ".join(scenario.probes)}')
        if scenario.insertions != (None,):
            print(f'    insertions: {", ".join(scenario.insertions)}')
        defaults = ', '.join(f'{k}={v}' for k, v in scenario.defaults.items())
        print(f'    defaults: {defaults}')
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog='gqcrb',
        description='Quantum Fisher information and Cramer-Rao bounds for Gaussian states.',
    )
    parser.add_argument('--version', action='version', version=f'gqcrb {gqcrb.__version__}')
    subparsers = parser.add_subparsers(dest='command', required=True)

    qfi = subparsers.add_parser('qfi', help='QFI matrices and bounds at one scenario point.')
    qfi.add_argument('config', help='JSON scenario or run config.')
    qfi.add_argument('--flavor', choices=['both', 'sld', 'rld'], default=None)
    qfi.add_argument('--out', default=None, help='Output path, stdout by default.')
    qfi.set_defaults(func=cmd_qfi)

    sweep_parser = subparsers.add_parser('sweep', help='Sweep a parameter or run a preset.')
    sweep_parser.add_argument('config', nargs='?', default=None)
    sweep_parser.add_argument('--preset', choices=sorted(PRESETS), default=None)
    sweep_parser.add_argument('--format', choices=['csv', 'json'], default=None)
    sweep_parser.add_argument('--flavor', choices=['both', 'sld', 'rld'], default=None)
    sweep_parser.add_argument('--workers', type=int, default=None)
    sweep_parser.add_argument('--out', default=None)
    sweep_parser.set_defaults(func=cmd_sweep)

    oracle = subparsers.add_parser('oracle-check', help='Compare the engine with the Fock oracle.')
    oracle.add_argument('config')
    oracle.add_argument('--cutoff', type=int, default=None, help='Fock levels per mode.')
    oracle.add_argument('--atol', type=float, default=1e-3)
    oracle.add_argument('--rtol', type=float, default=1e-2)
    oracle.add_argument('--flavor', choices=['sld', 'rld', 'both'], default=None)
    oracle.set_defaults(func=cmd_oracle_check)

    listing = subparsers.add_parser('list-scenarios', help='List the built-in scenarios.')
    listing.set_defaults(func=cmd_list_scenarios)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigReadError as err:
        print(f'{type(err).__name__}: {err}', file=sys.stderr)
        return EXIT_BAD_INPUT
    except GqcrbError as err:
        print(f'{type(err).__name__}: {err}', file=sys.stderr)
        return EXIT_COMPUTATION


if __name__ == '__main__':
    sys.exit(main())
