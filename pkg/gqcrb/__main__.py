import sys
import pathlib
import configparser

from gqcrb import cli

# Run the configuration script when the user runs
# python3 -m gqcrb [init, initialize, config, or configure]
# and forward everything else to the gqcrb command line.

here = pathlib.Path(__file__).parent.resolve()

_questions = {
    'Tolerances': [
        ('RLD_CONDITION_CAP', 'Largest condition number of Sigma_minus before the RLD is undefined', 1e12),
        ('BOUND_CONDITION_CAP', 'Largest condition number of a QFI matrix in the bounds', 1e12),
        ('STEIN_TOL', 'Relative residual tolerance of the SLD Stein solve', 1e-8),
        ('FD_STEP', 'Finite-difference step for families without a recipe', 1e-6),
    ],
    'Oracle': [
        ('CUTOFF', 'Default Fock cutoff per mode', 30),
        ('PADDING', 'Extra Fock levels carried while building states', 8),
        ('TRUNCATION_BUDGET', 'Largest acceptable trace deficit', 1e-6),
        ('FD_STEP', 'Central-difference step for d rho', 1e-4),
        ('EIGEN_FLOOR', 'Eigenvalue floor of the oracle', 1e-10),
    ],
    'Sweep': [
        ('WORKERS', 'Number of sweep worker threads', 4),
    ],
}


def _ask(key, question, default):
    answer = input(f'{question} [{key}, default {default}]: ')
    if answer == '':
        return None
    try:
        value = type(default)(float(answer)) if isinstance(default, int) else float(answer)
    except ValueError:
        raise ValueError(f'{key} must be a number, got {answer}.')
    if value <= 0:
        raise ValueError(f'{key} must be positive, got {value}.')
    return value


if (len(sys.argv) > 1) and (sys.argv[1] in ['init', 'initialize', 'config', 'configure']):
    print('Running the configuration script. Press enter to keep a default.')
    config = configparser.ConfigParser()
    for section, questions in _questions.items():
        answers = {}
        for key, question, default in questions:
            value = _ask(key, question, default)
            if value is not None:
                answers[key] = str(value)
        if answers:
            config[section] = answers

    with open(here / 'config.ini', 'w') as f:
        config.write(f)
    print(f'Wrote {here / "config.ini"}.')
else:
    sys.exit(cli.main(sys.argv[1:]))
