"""
The four application scenarios as parameterized families, together with their printed
closed-form QFI and bound expressions.

The closed forms are written out independently of the engine so they can serve as
regression references; nothing here calls gqcrb.analysis.logderiv.

Scenarios
---------
phase-tmsv
    A two-mode squeezed vacuum, optionally mixed on a 50:50 beam splitter (before-bs), then
    a phase shift phi on mode 1 and thermal loss on both modes. theta = (phi,).
displacement-pair
    A two-mode squeezed thermal state through thermal loss, then a displacement
    lambda_R + i lambda_I of mode 1. theta = (lambda_R, lambda_I).
damping-temperature
    A single-mode displaced squeezed thermal state (probe 'single') or a two-mode squeezed
    state with an ancilla (probe 'tmsv'), mode 1 damped at rate gamma into a bath of mean
    occupation N. theta = (gamma, N).
squeeze-phase
    A single-mode displaced squeezed thermal state (probe 'single') or a two-mode squeezed
    thermal state (probe 'two-mode-squeezed-thermal'), squeezed by S(s e^{2 i phi}) on
    mode 1. theta = (s, phi).
"""
import dataclasses
import json
from typing import Optional

import numpy as np

from gqcrb.exceptions import ClosedFormUndefinedError, DivergingSensitivityError, DomainError
from gqcrb.states.channels import Recipe, Stage
from gqcrb.states.family import ParameterizedFamily, realize
from gqcrb.states.observables import (
    expectation,
    expectation_derivative,
    number_operator,
    pair_squeezing_observable,
    single_mode_squeezing_observable,
    variance,
)

# Smallest |d<M>/d phi| before the error propagation is declared divergent.
SLOPE_FLOOR = 1e-12


@dataclasses.dataclass(frozen=True)
class _Scenario:
    description: str
    param_names: tuple
    defaults: dict
    probes: tuple
    insertions: tuple = (None,)


SCENARIOS = {
    'phase-tmsv': _Scenario(
        'Phase shift on one arm of a squeezed interferometer with thermal loss.',
        ('phi',),
        {'r': 1.0, 'eps1': 1.0, 'eps2': 1.0, 'N': 0.0, 'phi': 0.0},
        ('tmsv',),
        ('after-bs', 'before-bs'),
    ),
    'displacement-pair': _Scenario(
        'Real and imaginary part of a displacement probed with a two-mode squeezed state.',
        ('lambda_R', 'lambda_I'),
        {
            'r': 0.0,
            'nu_T': 0.0,
            'eps1': 1.0,
            'eps2': 1.0,
            'N': 0.0,
            'lambda_R': 0.0,
            'lambda_I': 0.0,
        },
        ('two-mode-squeezed-thermal',),
    ),
    'damping-temperature': _Scenario(
        'Damping rate and bath temperature of an amplitude-damping channel.',
        ('gamma', 'N'),
        {'r': 1.0, 'xi': 0.5, 'N': 0.9, 'nu_T': 0.0, 'lambda0': 0.0},
        ('tmsv', 'single'),
    ),
    'squeeze-phase': _Scenario(
        'Squeeze strength and squeeze phase of a single-mode squeezer.',
        ('s', 'phi'),
        {'s': 1.0, 'phi': 0.0, 'r': 0.0, 'nu_T': 0.1, 'lambda0': 0.0},
        ('single', 'two-mode-squeezed-thermal'),
    ),
}

_TRANSMISSIVITIES = ('eps1', 'eps2')
_NON_NEGATIVE = ('nu_T', 'N', 'xi')


@dataclasses.dataclass(frozen=True)
class ScenarioConfig:
    """
    A scenario name, its variant and its parameter values.

    Missing parameters take the scenario defaults. For damping-temperature the damping may
    be given either as xi = e^gamma - 1 or as gamma; it is stored as xi.

    Parameters
    ----------
    name: str
        One of SCENARIOS.
    insertion: str, optional
        'after-bs' (default) or 'before-bs', phase-tmsv only.
    probe: str, optional
        The input state; defaults to the first probe the scenario supports.
    parameters: dict
        Real parameter values.

    Raises
    ------
    DomainError
        For an unknown scenario, variant or parameter, or a value outside its range.

    Example
    -------
    | config = ScenarioConfig('phase-tmsv', parameters={'r': 0.5, 'eps1': 0.8})
    | family = build_family(config)
    | family.state_at(config.theta())
    """

    name: str
    insertion: Optional[str] = None
    probe: Optional[str] = None
    parameters: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if self.name not in SCENARIOS:
            raise DomainError(f'Unknown scenario {self.name}; choose from {list(SCENARIOS)}.')
        scenario = SCENARIOS[self.name]

        insertion = self.insertion if self.insertion is not None else scenario.insertions[0]
        if insertion not in scenario.insertions:
            raise DomainError(
                f'Insertion {insertion} is not valid for {self.name}; '
                f'choose from {scenario.insertions}.'
            )
        probe = self.probe if self.probe is not None else scenario.probes[0]
        if probe not in scenario.probes:
            raise DomainError(
                f'Probe {probe} is not valid for {self.name}; choose from {scenario.probes}.'
            )

        given = dict(self.parameters)
        if self.name == 'damping-temperature' and 'gamma' in given:
            if 'xi' in given:
                raise DomainError('Give the damping either as xi or as gamma, not both.')
            given['xi'] = np.expm1(_real(given.pop('gamma'), 'gamma'))
        unknown = set(given) - set(scenario.defaults)
        if unknown:
            raise DomainError(
                f'Unknown parameters {sorted(unknown)} for {self.name}; '
                f'valid ones are {sorted(scenario.defaults)}.'
            )
        parameters = {**scenario.defaults, **{k: _real(v, k) for k, v in given.items()}}
        for key in _TRANSMISSIVITIES:
            if key in parameters and not 0 <= parameters[key] <= 1:
                raise DomainError(f'{key} must be in [0, 1], got {parameters[key]}.')
        for key in _NON_NEGATIVE:
            if key in parameters and parameters[key] < 0:
                raise DomainError(f'{key} must be >= 0, got {parameters[key]}.')

        object.__setattr__(self, 'insertion', insertion)
        object.__setattr__(self, 'probe', probe)
        object.__setattr__(self, 'parameters', parameters)

    def __getitem__(self, key):
        return self.parameters[key]

    @property
    def param_names(self):
        return list(SCENARIOS[self.name].param_names)

    def theta(self):
        """The parameter vector this configuration describes."""
        p = self.parameters
        if self.name == 'damping-temperature':
            return np.array([np.log1p(p['xi']), p['N']])
        return np.array([p[key] for key in self.param_names], dtype=float)

    def replace(self, **parameters):
        """A copy with some parameters changed."""
        return ScenarioConfig(
            self.name, self.insertion, self.probe, {**self.parameters, **parameters}
        )

    def to_dict(self):
        config = {'name': self.name, 'probe': self.probe, 'parameters': dict(self.parameters)}
        if self.insertion is not None:
            config['insertion'] = self.insertion
        return config

    @classmethod
    def from_dict(cls, data):
        """Builds a config from its JSON object {name, insertion?, probe?, parameters?}."""
        if not isinstance(data, dict) or 'name' not in data:
            raise DomainError('A scenario config needs at least a "name".')
        return cls(
            data['name'], data.get('insertion'), data.get('probe'), data.get('parameters', {})
        )

    @classmethod
    def from_json(cls, s):
        return cls.from_dict(json.loads(s))


def _real(value, name):
    try:
        value = float(value)
    except (TypeError, ValueError) as err:
        raise DomainError(f'{name} must be a real number, got {value!r}.') from err
    if not np.isfinite(value):
        raise DomainError(f'{name} must be finite, got {value}.')
    return value


def _check_scenario(config, name):
    if config.name != name:
        raise DomainError(f'Expected a {name} config, got {config.name}.')


def probe_recipe(config):
    """
    The recipe of the probe state, before the stages that depend on theta.

    Parameters
    ----------
    config: ScenarioConfig
        The scenario.

    Returns
    -------
    Recipe
        The probe preparation.
    """
    p = config.parameters
    if config.probe == 'single':
        recipe = Recipe(1, p['nu_T']).then(Stage('squeeze1', 0, {'s': p['r'], 'phi': 0.0}))
        if p['lambda0'] != 0:
            recipe = recipe.then(Stage('displace', 0, {'alpha': p['lambda0']}))
        return recipe

    recipe = Recipe(2, p.get('nu_T', 0.0)).then(Stage('squeeze2', (0, 1), {'r': p['r']}))
    if p.get('lambda0', 0) != 0:
        recipe = recipe.then(Stage('displace', 0, {'alpha': p['lambda0']}))
    return recipe


def probe_energy(config):
    """
    The mean excitation number <a_1^dag a_1> of the probed mode in the input state.

    For the single-mode probe this is |lambda0|^2 + (nu_T + 1/2) cosh 2r - 1/2, which
    reduces to |lambda0|^2 + nu_T (coherent), (nu_T + 1/2) cosh 2r - 1/2 (squeezed) and
    nu_T (thermal). The two-mode squeezed thermal state has (nu_T + 1/2) cosh 2r - 1/2.
    """
    state = realize(probe_recipe(config))
    return expectation(state, number_operator(state.n_modes, 0))


def _phase_recipe(config, theta):
    p = config.parameters
    recipe = probe_recipe(config)
    if config.insertion == 'before-bs':
        recipe = recipe.then(Stage('beam_splitter', (0, 1), {'angle': np.pi / 4}))
    return recipe.then(
        Stage('phase', 0, {'phi': theta[0]}, {'phi': [1.0]}),
        Stage('loss', 0, {'eps': p['eps1'], 'N': p['N']}),
        Stage('loss', 1, {'eps': p['eps2'], 'N': p['N']}),
    )


def phase_family(config):
    """
    theta = (phi,) for a phase shift on mode 1 of the squeezed interferometer.

    The probe is a two-mode squeezed vacuum. With insertion 'before-bs' it first passes a
    50:50 beam splitter, which turns it into two single-mode squeezed vacua; with
    'after-bs' the phase acts on the entangled state directly. Both modes then suffer
    thermal loss (eps1, eps2, N).
    """
    _check_scenario(config, 'phase-tmsv')
    return ParameterizedFamily(
        1, recipe_at=lambda theta: _phase_recipe(config, theta), param_names=['phi']
    )


def _phase_entries(config):
    p = config.parameters
    c, s = np.cosh(2 * p['r']), np.sinh(2 * p['r'])
    y = 2 * p['N'] + 1
    d1 = p['eps1'] * c + (1 - p['eps1']) * y
    d2 = p['eps2'] * c + (1 - p['eps2']) * y
    if config.insertion == 'after-bs':
        b = -np.sqrt(p['eps1'] * p['eps2']) * s
    else:
        b = -p['eps1'] * s
    return d1, d2, b


def phase_qfi_closed(config):
    """
    The SLD phase QFI.

    after-bs: F = 2 b^2/(1 + d1 d2 - b^2) with b = -sqrt(eps1 eps2) sinh 2r,
    before-bs: F = 4 b1^2/(1 + d1^2 - b1^2) with b1 = -eps1 sinh 2r, and
    d_i = eps_i cosh 2r + (1 - eps_i)(2N + 1). Both are independent of phi.

    Example
    -------
    | phase_qfi_closed(ScenarioConfig('phase-tmsv', 'after-bs', parameters={'r': 1}))
    | # -> 13.154114 = sinh^2(2)
    """
    _check_scenario(config, 'phase-tmsv')
    d1, d2, b = _phase_entries(config)
    if config.insertion == 'after-bs':
        return 2 * b**2 / (1 + d1 * d2 - b**2)
    return 4 * b**2 / (1 + d1**2 - b**2)


def measurement_observable(config):
    """
    The quadratic observable read out for the phase: i(a1^dag a2^dag - a1 a2)/2 after-bs
    and i(a1^dag^2 - a1^2)/2 before-bs.
    """
    _check_scenario(config, 'phase-tmsv')
    if config.insertion == 'after-bs':
        return pair_squeezing_observable(2, (0, 1))
    return single_mode_squeezing_observable(2, 0)


def phase_measurement_variance(config, phi=None):
    """
    The error-propagation phase sensitivity delta^2 phi = Delta^2 M/|d<M>/d phi|^2.

    Parameters
    ----------
    config: ScenarioConfig
        A phase-tmsv config.
    phi: float, optional
        The working point, defaults to config['phi'].

    Returns
    -------
    float
        delta^2 phi. At phi = 0 this equals 1/phase_qfi_closed(config).

    Raises
    ------
    DivergingSensitivityError
        If |d<M>/d phi| < 1e-12.
    """
    if phi is None:
        phi = config['phi']
    family = phase_family(config)
    state, tangents = family.derivatives([phi])
    obs = measurement_observable(config)
    slope = expectation_derivative(state, obs, *tangents[0])
    if abs(slope) < SLOPE_FLOOR:
        raise DivergingSensitivityError(
            f'd<M>/d phi = {slope:.3e} at phi = {phi}; the phase sensitivity diverges.'
        )
    return variance(state, obs) / slope**2


def phase_measurement_variance_closed(config, phi=None):
    """
    Closed-form delta^2 phi for the two readout observables.

    after-bs:  (1 + d1 d2 - b^2 cos 2 phi)/(2 b^2 cos^2 phi)
    before-bs: (1 + d1^2 - b1^2 cos 4 phi)/(4 b1^2 cos^2 2 phi)
    """
    if phi is None:
        phi = config['phi']
    d1, d2, b = _phase_entries(config)
    if config.insertion == 'after-bs':
        denominator = 2 * b**2 * np.cos(phi) ** 2
        numerator = 1 + d1 * d2 - b**2 * np.cos(2 * phi)
    else:
        denominator = 4 * b**2 * np.cos(2 * phi) ** 2
        numerator = 1 + d1**2 - b**2 * np.cos(4 * phi)
    if denominator < SLOPE_FLOOR**2:
        raise DivergingSensitivityError(f'The phase sensitivity diverges at phi = {phi}.')
    return numerator / denominator


def _displacement_recipe(config, theta):
    p = config.parameters
    return probe_recipe(config).then(
        Stage('loss', 0, {'eps': p['eps1'], 'N': p['N']}),
        Stage('loss', 1, {'eps': p['eps2'], 'N': p['N']}),
        Stage('displace', 0, {'alpha': theta[0] + 1j * theta[1]}, {'alpha': [1.0, 1j]}),
    )


def displacement_family(config):
    """theta = (lambda_R, lambda_I) for a displacement of mode 1 after the lossy channel."""
    _check_scenario(config, 'displacement-pair')
    return ParameterizedFamily(
        2,
        recipe_at=lambda theta: _displacement_recipe(config, theta),
        param_names=['lambda_R', 'lambda_I'],
    )


def displacement_bounds_closed(config):
    """
    The RLD, SLD and homodyne bounds on Var(lambda_R) + Var(lambda_I).

    With d_i = eps_i (2 nu_T + 1) cosh 2r + (1 - eps_i)(2N + 1) and
    b = -sqrt(eps1 eps2)(2 nu_T + 1) sinh 2r,

        B_R = d1/2 + d2 b^2/(2(1 - d2^2)) + |1/2 + b^2/(2(1 - d2^2))|
        B_S = d1/2 - b^2/(2 d2)
        B_M = (d1 + d2)/2 - b

    Returns
    -------
    tuple
        (B_R, B_S, B_M)

    Raises
    ------
    ClosedFormUndefinedError
        If d2 = 1 (pure ancilla), where the printed B_R is singular.
    """
    _check_scenario(config, 'displacement-pair')
    p = config.parameters
    y = 2 * p['nu_T'] + 1
    c, s = np.cosh(2 * p['r']), np.sinh(2 * p['r'])
    d1 = p['eps1'] * y * c + (1 - p['eps1']) * (2 * p['N'] + 1)
    d2 = p['eps2'] * y * c + (1 - p['eps2']) * (2 * p['N'] + 1)
    b = -np.sqrt(p['eps1'] * p['eps2']) * y * s
    if np.isclose(d2, 1, rtol=0, atol=1e-12):
        raise ClosedFormUndefinedError('B_R is undefined for d2 = 1 (pure ancilla mode).')
    q = b**2 / (2 * (1 - d2**2))
    B_R = d1 / 2 + d2 * q + abs(0.5 + q)
    B_S = d1 / 2 - b**2 / (2 * d2)
    B_M = (d1 + d2) / 2 - b
    return B_R, B_S, B_M


def _damping_recipe(config, theta):
    gamma, N = theta
    eps = np.exp(-gamma)
    return probe_recipe(config).then(
        Stage('loss', 0, {'eps': eps, 'N': N}, {'eps': [-eps, 0.0], 'N': [0.0, 1.0]})
    )


def damping_temperature_family(config):
    """theta = (gamma, N) for amplitude damping a -> a e^{-gamma/2} + v sqrt(1 - e^{-gamma})."""
    _check_scenario(config, 'damping-temperature')
    return ParameterizedFamily(
        2,
        recipe_at=lambda theta: _damping_recipe(config, theta),
        param_names=['gamma', 'N'],
        bounds=[(0, None), (0, None)],
    )


def damping_qfi_closed(config):
    """
    RLD and SLD QFI matrices in (gamma, N) for the two-mode squeezed vacuum probe.

    With xi = e^gamma - 1, n = sinh^2 r, y = 2N + 1, t = y(2n + 1) + 1 and Y = N(N + 1):

        RLD: F_gg = 1/xi^2 + (xi t + 2)/(8 Y xi^2), F_NN = 1/Y, F_gN = y/(2 Y xi)
        SLD: F_gg = (2 xi n(n + 1) + t - 2)/(xi(xi t + 2)), F_NN = xi t/(Y(xi t + 2)),
             F_gN = 2(2n + 1)/(xi t + 2)

    Returns
    -------
    tuple
        (F_rld complex 2x2, F_sld real 2x2)

    Raises
    ------
    ClosedFormUndefinedError
        For N = 0 or xi = 0, for probes other than the two-mode squeezed vacuum, or for a
        thermal or displaced probe.
    """
    _check_scenario(config, 'damping-temperature')
    p = config.parameters
    if config.probe != 'tmsv' or p['nu_T'] != 0 or p['lambda0'] != 0:
        raise ClosedFormUndefinedError(
            'Closed forms exist only for the undisplaced two-mode squeezed vacuum probe.'
        )
    xi, N = p['xi'], p['N']
    if N == 0 or xi == 0:
        raise ClosedFormUndefinedError(f'The closed forms are singular at N = {N}, xi = {xi}.')
    n = np.sinh(p['r']) ** 2
    y = 2 * N + 1
    t = y * (2 * n + 1) + 1
    Y = N * (N + 1)

    rld_gg = 1 / xi**2 + (xi * t + 2) / (8 * Y * xi**2)
    rld_gN = y / (2 * Y * xi)
    F_rld = np.array([[rld_gg, rld_gN], [rld_gN, 1 / Y]], dtype=complex)

    sld_gg = (2 * xi * n * (n + 1) + t - 2) / (xi * (xi * t + 2))
    sld_gN = 2 * (2 * n + 1) / (xi * t + 2)
    sld_NN = xi * t / (Y * (xi * t + 2))
    F_sld = np.array([[sld_gg, sld_gN], [sld_gN, sld_NN]])
    return F_rld, F_sld


def _squeeze_phase_recipe(config, theta):
    s, phi = theta
    return probe_recipe(config).then(
        Stage('squeeze1', 0, {'s': s, 'phi': phi}, {'s': [1.0, 0.0], 'phi': [0.0, 1.0]})
    )


def squeeze_phase_family(config):
    """theta = (s, phi) for the squeezer S(zeta) = exp((zeta^* a^2 - zeta a^dag^2)/2), zeta = s e^{2i phi}."""
    _check_scenario(config, 'squeeze-phase')
    return ParameterizedFamily(
        2,
        recipe_at=lambda theta: _squeeze_phase_recipe(config, theta),
        param_names=['s', 'phi'],
    )


def squeeze_phase_qfi_closed(config):
    """
    RLD and SLD QFI matrices in (s, phi) at phi = 0 for the single-mode probe.

    With y = 2 nu_T + 1, Y = nu_T(nu_T + 1) and a real displacement lambda0:

        RLD: F_pp = y^2(2Y + 1)/(2Y^2) sinh^2 2s + (4y/Y)|l|^2 e^{-2r-2s} sinh^2 s
             F_ss = y^2(2Y + 1)/(2Y^2) + (y/Y)|l|^2 e^{2r}
             F_sp = i(y^3/(2Y^2) sinh 2s + (2/Y)|l|^2 e^{-s} sinh s)
        SLD: F_pp = 2y^2/(2Y + 1) sinh^2 2s + (16/y)|l|^2 e^{-2r-2s} sinh^2 s
             F_ss = 2y^2/(2Y + 1) + (4/y)|l|^2 e^{2r},   F_sp = 0

    Returns
    -------
    tuple
        (F_rld complex 2x2, F_sld real 2x2), rows and columns ordered (s, phi).

    Raises
    ------
    ClosedFormUndefinedError
        For the two-mode probe, phi != 0, or nu_T = 0 (Y = 0).
    """
    _check_scenario(config, 'squeeze-phase')
    p = config.parameters
    if config.probe != 'single' or p['phi'] != 0:
        raise ClosedFormUndefinedError(
            'Closed forms exist only for the single-mode probe at phi = 0.'
        )
    if p['nu_T'] == 0:
        raise ClosedFormUndefinedError('The RLD closed form is singular at nu_T = 0 (Y = 0).')
    s, r = p['s'], p['r']
    l2 = p['lambda0'] ** 2
    y = 2 * p['nu_T'] + 1
    Y = p['nu_T'] * (p['nu_T'] + 1)

    rld_pp = y**2 * (2 * Y + 1) / (2 * Y**2) * np.sinh(2 * s) ** 2 + (
        4 * y / Y
    ) * l2 * np.exp(-2 * r - 2 * s) * np.sinh(s) ** 2
    rld_ss = y**2 * (2 * Y + 1) / (2 * Y**2) + (y / Y) * l2 * np.exp(2 * r)
    rld_sp = 1j * (y**3 / (2 * Y**2) * np.sinh(2 * s) + (2 / Y) * l2 * np.exp(-s) * np.sinh(s))
    F_rld = np.array([[rld_ss, rld_sp], [np.conj(rld_sp), rld_pp]], dtype=complex)

    sld_pp = 2 * y**2 / (2 * Y + 1) * np.sinh(2 * s) ** 2 + (16 / y) * l2 * np.exp(
        -2 * r - 2 * s
    ) * np.sinh(s) ** 2
    sld_ss = 2 * y**2 / (2 * Y + 1) + (4 / y) * l2 * np.exp(2 * r)
    F_sld = np.array([[sld_ss, 0.0], [0.0, sld_pp]])
    return F_rld, F_sld


_BUILDERS = {
    'phase-tmsv': phase_family,
    'displacement-pair': displacement_family,
    'damping-temperature': damping_temperature_family,
    'squeeze-phase': squeeze_phase_family,
}


def build_family(config):
    """
    The ParameterizedFamily of a scenario.

    Parameters
    ----------
    config: ScenarioConfig or dict
        The scenario; a dict is parsed with ScenarioConfig.from_dict.

    Returns
    -------
    ParameterizedFamily
        A recipe-backed family with analytic derivatives. Evaluate it at config.theta().
    """
    if isinstance(config, dict):
        config = ScenarioConfig.from_dict(config)
    return _BUILDERS[config.name](config)
