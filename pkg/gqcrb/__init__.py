import pathlib
import configparser

__version__ = '0.1.0'

# Load the configuration settings.
HERE = pathlib.Path(__file__).parent.resolve()
settings = configparser.ConfigParser()
settings.read(HERE / 'config.ini')

_defaults = {
    'Tolerances': {
        'RLD_CONDITION_CAP': 1e12,
        'BOUND_CONDITION_CAP': 1e12,
        'STEIN_TOL': 1e-8,
        'FD_STEP': 1e-6,
    },
    'Oracle': {
        'CUTOFF': 30,
        'PADDING': 8,
        'TRUNCATION_BUDGET': 1e-6,
        'FD_STEP': 1e-4,
        'EIGEN_FLOOR': 1e-10,
    },
    'Sweep': {
        'WORKERS': 4,
    },
}


def _get(section, key):
    default = _defaults[section][key]
    try:
        value = settings[section].get(key, str(default))
    except KeyError:  # Raised if config.ini does not have the section.
        return default
    return type(default)(float(value)) if isinstance(default, int) else float(value)


config = {
    'GQCRB_DIR': HERE,
    'RLD_CONDITION_CAP': _get('Tolerances', 'RLD_CONDITION_CAP'),
    'BOUND_CONDITION_CAP': _get('Tolerances', 'BOUND_CONDITION_CAP'),
    'STEIN_TOL': _get('Tolerances', 'STEIN_TOL'),
    'FD_STEP': _get('Tolerances', 'FD_STEP'),
    'ORACLE_CUTOFF': _get('Oracle', 'CUTOFF'),
    'ORACLE_PADDING': _get('Oracle', 'PADDING'),
    'TRUNCATION_BUDGET': _get('Oracle', 'TRUNCATION_BUDGET'),
    'ORACLE_FD_STEP': _get('Oracle', 'FD_STEP'),
    'EIGEN_FLOOR': _get('Oracle', 'EIGEN_FLOOR'),
    'SWEEP_WORKERS': _get('Sweep', 'WORKERS'),
}

from gqcrb.exceptions import (
    GqcrbError,
    DomainError,
    ClosedFormUndefinedError,
    NumericalFailureError,
    InternalConsistencyError,
    DivergingSensitivityError,
    InconsistentSystemError,
    RldUndefinedError,
    RldOracleUndefinedError,
    UnidentifiableParametersError,
    IncreaseCutoffError,
)

# Import the structural matrices and solvers.
from gqcrb.core.conventions import omega, x_conj, quad_transform, matrix_abs_trace
from gqcrb.core.solvers import solve_stein, solve_rld_quadratic

# Import the Gaussian state machinery.
from gqcrb.states.gaussian import GaussianState
from gqcrb.states.gaussian import vacuum, thermal, coherent, tmsv
from gqcrb.states.gaussian import squeezed_thermal_single, two_mode_squeezed_thermal
from gqcrb.states.gaussian import char_fn, sigma_plus, sigma_minus
from gqcrb.states.observables import QuadraticObservable, expectation, variance
from gqcrb.states.channels import LinearBosonicMap, Stage, Recipe, apply, compose
from gqcrb.states.channels import phase_shift, displace, squeeze1, squeeze2, beam_splitter, loss
from gqcrb.states.family import ParameterizedFamily, derivative

# Import the QFI engine and the scenarios.
from gqcrb.analysis.logderiv import LogDerivativeCoefficients, QfiReport
from gqcrb.analysis.logderiv import rld_coefficients, sld_coefficients, qfi_matrix
from gqcrb.analysis.logderiv import bound_sld, bound_rld, attainability_matrix, analyze
from gqcrb.analysis.scenarios import ScenarioConfig, build_family
from gqcrb.analysis.scenarios import phase_qfi_closed, phase_measurement_variance
from gqcrb.analysis.scenarios import displacement_bounds_closed, damping_qfi_closed
from gqcrb.analysis.scenarios import squeeze_phase_qfi_closed, probe_energy
from gqcrb.analysis.presets import sweep, fig1, fig2a, fig2b, fig3a, fig3b

# Import the Fock-space oracle.
from gqcrb.oracle.fock import FockDensityMatrix, build_state
from gqcrb.oracle.qfi import sld_qfi_oracle, rld_qfi_oracle, fidelity, fidelity_qfi_oracle
