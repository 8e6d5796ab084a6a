"""
Gaussian channels in the Heisenberg normal form a_out = S a_in + bath.

A LinearBosonicMap acts on moments as

    lambda -> S lambda + shift,    Sigma -> S Sigma S^T + noise.

The six primitives (phase shift, displacement, single- and two-mode squeezing, beam
splitter and thermal loss) are also available as Stage records. A Recipe is a thermal
product state followed by a list of stages; it is consumed independently by the Gaussian
engine (gqcrb.states.family) and by the Fock-space oracle (gqcrb.oracle.fock), so both
sides simulate the same physical pipeline.
"""
import dataclasses
from typing import Tuple

import numpy as np

from gqcrb.core.conventions import x_conj, mode_slots, n_modes_of
from gqcrb.exceptions import DomainError, InternalConsistencyError
from gqcrb.states.gaussian import GaussianState

CONJUGATION_TOL = 1e-12

STAGE_KINDS = ('phase', 'displace', 'squeeze1', 'squeeze2', 'beam_splitter', 'loss')


@dataclasses.dataclass(frozen=True, eq=False)
class LinearBosonicMap:
    """
    A Gaussian channel in (scale, noise, shift) normal form.

    Parameters
    ----------
    scale: np.ndarray
        Complex 2n_out x 2n_in matrix S.
    noise: np.ndarray
        Complex symmetric 2n_out x 2n_out added covariance from the traced-out bath.
    shift: np.ndarray
        Complex vector of length 2n_out added to the mean displacement.

    Raises
    ------
    DomainError
        If the shapes are inconsistent or X_out S X_in != S^*.
    """

    scale: np.ndarray
    noise: np.ndarray
    shift: np.ndarray

    def __post_init__(self):
        scale = np.array(self.scale, dtype=complex)
        noise = np.array(self.noise, dtype=complex)
        shift = np.array(self.shift, dtype=complex).reshape(-1)
        dim_out = scale.shape[0]
        if noise.shape != (dim_out, dim_out) or shift.shape != (dim_out,):
            raise DomainError(
                f'Inconsistent map shapes: scale {scale.shape}, noise {noise.shape}, '
                f'shift {shift.shape}.'
            )
        for array in (scale, noise, shift):
            array.flags.writeable = False
        object.__setattr__(self, 'scale', scale)
        object.__setattr__(self, 'noise', noise)
        object.__setattr__(self, 'shift', shift)

        X_out, X_in = x_conj(self.n_out), x_conj(self.n_in)
        scale_max = max(1.0, np.abs(scale).max())
        if np.abs(X_out @ scale @ X_in - scale.conj()).max() > CONJUGATION_TOL * scale_max:
            raise DomainError('The map breaks the conjugation structure, X S X != S^*.')

    @property
    def n_in(self):
        return n_modes_of(self.scale.T)

    @property
    def n_out(self):
        return n_modes_of(self.scale)

    def is_unitary(self):
        """True for noiseless maps (the symplectic unitaries and displacements)."""
        return not np.any(self.noise)

    def then(self, other):
        """The map that applies self first and other second."""
        return compose(other, self)


def identity_map(n_modes):
    dim = 2 * n_modes
    return LinearBosonicMap(np.eye(dim), np.zeros((dim, dim)), np.zeros(dim))


def apply(channel, state):
    """
    Apply a map to a state: lambda' = S lambda + shift, Sigma' = S Sigma S^T + noise.

    Parameters
    ----------
    channel: LinearBosonicMap
        The map.
    state: GaussianState
        The input state.

    Returns
    -------
    GaussianState
        The output state.

    Raises
    ------
    DomainError
        If the dimensions do not match.
    InternalConsistencyError
        If the output is not a valid Gaussian state, which means the map is not physical.
    """
    if channel.n_in != state.n_modes:
        raise DomainError(f'The map acts on {channel.n_in} modes, the state has {state.n_modes}.')
    S = channel.scale
    lam = S @ state.lam + channel.shift
    sigma = S @ state.sigma @ S.T + channel.noise
    sigma = (sigma + sigma.T) / 2
    try:
        return GaussianState(channel.n_out, lam, sigma)
    except DomainError as err:
        raise InternalConsistencyError(f'The map produced an invalid state: {err}') from err


def compose(second, first):
    """
    The map equivalent to applying first and then second.

    Example
    -------
    | apply(compose(m2, m1), state)  # == apply(m2, apply(m1, state))
    """
    if second.n_in != first.n_out:
        raise DomainError(f'Cannot compose a {second.n_in}-mode map after a {first.n_out}-mode one.')
    S2 = second.scale
    return LinearBosonicMap(
        S2 @ first.scale,
        S2 @ first.noise @ S2.T + second.noise,
        S2 @ first.shift + second.shift,
    )


def _check_mode(n_modes, mode):
    if isinstance(mode, bool) or int(mode) != mode or not 0 <= mode < n_modes:
        raise DomainError(f'Mode index {mode} is out of range for {n_modes} modes.')
    return int(mode)


def _check_pair(n_modes, modes):
    try:
        j, k = modes
    except (TypeError, ValueError) as err:
        raise DomainError(f'Expected a pair of mode indices, got {modes}.') from err
    j, k = _check_mode(n_modes, j), _check_mode(n_modes, k)
    if j == k:
        raise DomainError(f'A two-mode operation needs two distinct modes, got {modes}.')
    return j, k


def _unitary_map(scale, shift=None):
    dim = scale.shape[0]
    if shift is None:
        shift = np.zeros(dim)
    return LinearBosonicMap(scale, np.zeros((dim, dim)), shift)


def _phase_scale(n_modes, mode, phi, derivative=False):
    S = np.zeros((2 * n_modes,) * 2, dtype=complex) if derivative else np.eye(2 * n_modes, dtype=complex)
    i, j = mode_slots(mode)
    if derivative:
        S[i, i], S[j, j] = 1j * np.exp(1j * phi), -1j * np.exp(-1j * phi)
    else:
        S[i, i], S[j, j] = np.exp(1j * phi), np.exp(-1j * phi)
    return S


def phase_shift(n_modes, mode, phi):
    """
    Phase rotation a_k -> e^{i phi} a_k, generated by exp(i phi a_k^dag a_k).

    Example
    -------
    | apply(phase_shift(1, 0, phi), coherent(alpha))  # -> coherent(alpha*exp(1j*phi))
    """
    mode = _check_mode(n_modes, mode)
    return _unitary_map(_phase_scale(n_modes, mode, phi))


def displace(n_modes, mode, alpha):
    """Displacement D(alpha) = exp(alpha a^dag - alpha^* a), i.e. a_k -> a_k + alpha."""
    mode = _check_mode(n_modes, mode)
    shift = np.zeros(2 * n_modes, dtype=complex)
    i, j = mode_slots(mode)
    shift[i], shift[j] = alpha, np.conj(alpha)
    return _unitary_map(np.eye(2 * n_modes), shift)


def _squeeze1_block(s, phi):
    e = np.exp(2j * phi)
    return np.array(
        [[np.cosh(s), -e * np.sinh(s)], [-np.conj(e) * np.sinh(s), np.cosh(s)]], dtype=complex
    )


def squeeze1(n_modes, mode, s, phi=0.0):
    """
    Single-mode squeezing S(zeta) = exp((zeta^* a^2 - zeta a^dag^2)/2), zeta = s e^{2 i phi}.

    a -> a cosh s - a^dag e^{2 i phi} sinh s.
    """
    mode = _check_mode(n_modes, mode)
    S = np.eye(2 * n_modes, dtype=complex)
    i, j = mode_slots(mode)
    S[i : j + 1, i : j + 1] = _squeeze1_block(s, phi)
    return _unitary_map(S)


def _squeeze2_scale(n_modes, modes, c, sh, base):
    j, k = modes
    S = base(2 * n_modes)
    (j0, j1), (k0, k1) = mode_slots(j), mode_slots(k)
    S[j0, j0] = S[j1, j1] = S[k0, k0] = S[k1, k1] = c
    S[j0, k1] = S[j1, k0] = S[k0, j1] = S[k1, j0] = -sh
    return S


def squeeze2(n_modes, modes, r):
    """
    Two-mode squeezing S_2(r) = exp(r(a_j a_k - a_j^dag a_k^dag)).

    a_j -> a_j cosh r - a_k^dag sinh r and symmetrically for a_k. On the two-mode vacuum
    this gives tmsv(r).
    """
    modes = _check_pair(n_modes, modes)
    S = _squeeze2_scale(n_modes, modes, np.cosh(r), np.sinh(r), lambda d: np.eye(d, dtype=complex))
    return _unitary_map(S)


def _beam_splitter_scale(n_modes, modes, c, sn, base):
    j, k = modes
    S = base(2 * n_modes)
    for offset in (0, 1):
        jj, kk = 2 * j + offset, 2 * k + offset
        S[jj, jj] = S[kk, kk] = c
        S[jj, kk] = sn
        S[kk, jj] = -sn
    return S


def beam_splitter(n_modes, modes, angle):
    """
    Beam splitter exp(angle (a_j^dag a_k - a_j a_k^dag)).

    a_j -> a_j cos(angle) + a_k sin(angle), a_k -> a_k cos(angle) - a_j sin(angle); a 50:50
    splitter has angle = pi/4.
    """
    modes = _check_pair(n_modes, modes)
    S = _beam_splitter_scale(
        n_modes, modes, np.cos(angle), np.sin(angle), lambda d: np.eye(d, dtype=complex)
    )
    return _unitary_map(S)


def loss(n_modes, mode, eps, N=0.0):
    """
    Thermal loss a -> sqrt(eps) a + sqrt(1 - eps) v with a bath mode v of occupation N.

    Parameters
    ----------
    n_modes: int
        The number of modes.
    mode: int
        The lossy mode.
    eps: float
        The transmissivity, 0 <= eps <= 1. Amplitude damping at rate gamma has
        eps = exp(-gamma).
    N: float
        The mean excitation number of the bath.

    Returns
    -------
    LinearBosonicMap
        eps = 1 is the identity; eps = 0 replaces the mode by thermal(N).

    Raises
    ------
    DomainError
        If eps is outside [0, 1] or N < 0.
    """
    mode = _check_mode(n_modes, mode)
    if not 0 <= eps <= 1:
        raise DomainError(f'The transmissivity must be in [0, 1], got {eps}.')
    if not N >= 0:
        raise DomainError(f'The bath occupation must be >= 0, got {N}.')
    dim = 2 * n_modes
    i, j = mode_slots(mode)
    S = np.eye(dim, dtype=complex)
    S[i, i] = S[j, j] = np.sqrt(eps)
    noise = np.zeros((dim, dim), dtype=complex)
    noise[i, j] = noise[j, i] = (1 - eps) * (2 * N + 1) / 2
    return LinearBosonicMap(S, noise, np.zeros(dim))


@dataclasses.dataclass(frozen=True, eq=False)
class Stage:
    """
    One channel primitive in a Recipe.

    Parameters
    ----------
    kind: str
        One of STAGE_KINDS.
    modes: tuple
        The mode index (one entry) or pair of indices the stage acts on.
    params: dict
        Parameter values: phase {phi}, displace {alpha}, squeeze1 {s, phi}, squeeze2 {r},
        beam_splitter {angle}, loss {eps, N}.
    jacobian: dict
        For every parameter that depends on theta, the length-d vector d(param)/d(theta).
        alpha may have a complex jacobian.
    """

    kind: str
    modes: Tuple[int, ...]
    params: dict
    jacobian: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in STAGE_KINDS:
            raise DomainError(f'Unknown stage kind {self.kind}; choose from {STAGE_KINDS}.')
        object.__setattr__(self, 'modes', tuple(np.atleast_1d(self.modes).tolist()))

    def to_map(self, n_modes):
        """The LinearBosonicMap of this stage."""
        p = self.params
        if self.kind == 'phase':
            return phase_shift(n_modes, self.modes[0], p['phi'])
        elif self.kind == 'displace':
            return displace(n_modes, self.modes[0], p['alpha'])
        elif self.kind == 'squeeze1':
            return squeeze1(n_modes, self.modes[0], p['s'], p.get('phi', 0.0))
        elif self.kind == 'squeeze2':
            return squeeze2(n_modes, self.modes, p['r'])
        elif self.kind == 'beam_splitter':
            return beam_splitter(n_modes, self.modes, p['angle'])
        return loss(n_modes, self.modes[0], p['eps'], p.get('N', 0.0))

    def param_derivatives(self, k):
        """{name: d(param)/d(theta_k)} for the parameters that depend on theta."""
        return {name: row[k] for name, row in self.jacobian.items() if row[k] != 0}

    def tangent(self, n_modes, k):
        """
        The directional derivative (dS, d_noise, d_shift) of the stage map along theta_k.

        Returns None if the stage does not depend on theta_k.
        """
        d = self.param_derivatives(k)
        if not d:
            return None
        return _stage_tangent(self, n_modes, d)


def _stage_tangent(stage, n_modes, d):
    dim = 2 * n_modes
    p = stage.params
    dS = np.zeros((dim, dim), dtype=complex)
    d_noise = np.zeros((dim, dim), dtype=complex)
    d_shift = np.zeros(dim, dtype=complex)
    zeros = lambda size: np.zeros((size, size), dtype=complex)

    if stage.kind == 'phase':
        dS = d['phi'] * _phase_scale(n_modes, stage.modes[0], p['phi'], derivative=True)
    elif stage.kind == 'displace':
        i, j = mode_slots(stage.modes[0])
        d_shift[i], d_shift[j] = d['alpha'], np.conj(d['alpha'])
    elif stage.kind == 'squeeze1':
        s, phi = p['s'], p.get('phi', 0.0)
        e = np.exp(2j * phi)
        block = d.get('s', 0.0) * np.array(
            [[np.sinh(s), -e * np.cosh(s)], [-np.conj(e) * np.cosh(s), np.sinh(s)]]
        ) + d.get('phi', 0.0) * np.array(
            [[0, -2j * e * np.sinh(s)], [2j * np.conj(e) * np.sinh(s), 0]]
        )
        i, j = mode_slots(stage.modes[0])
        dS[i : j + 1, i : j + 1] = block
    elif stage.kind == 'squeeze2':
        r = p['r']
        dS = d['r'] * _squeeze2_scale(n_modes, stage.modes, np.sinh(r), np.cosh(r), zeros)
    elif stage.kind == 'beam_splitter':
        a = p['angle']
        dS = d['angle'] * _beam_splitter_scale(n_modes, stage.modes, -np.sin(a), np.cos(a), zeros)
    elif stage.kind == 'loss':
        eps, N = p['eps'], p.get('N', 0.0)
        d_eps, d_N = d.get('eps', 0.0), d.get('N', 0.0)
        i, j = mode_slots(stage.modes[0])
        if d_eps != 0:
            if eps <= 0:
                raise DomainError('The loss tangent in eps is singular at eps = 0.')
            dS[i, i] = dS[j, j] = d_eps / (2 * np.sqrt(eps))
        d_noise[i, j] = d_noise[j, i] = (-d_eps * (2 * N + 1) + (1 - eps) * 2 * d_N) / 2
    return dS, d_noise, d_shift


@dataclasses.dataclass(frozen=True, eq=False)
class Recipe:
    """
    A thermal product state followed by a pipeline of stages.

    Parameters
    ----------
    n_modes: int
        The number of modes.
    occupations: tuple
        The thermal occupation of every mode before the first stage.
    stages: tuple
        The Stage records, applied in order.
    """

    n_modes: int
    occupations: Tuple[float, ...]
    stages: Tuple[Stage, ...] = ()

    def __post_init__(self):
        occupations = tuple(float(v) for v in np.broadcast_to(self.occupations, (self.n_modes,)))
        object.__setattr__(self, 'occupations', occupations)
        object.__setattr__(self, 'stages', tuple(self.stages))

    def then(self, *stages):
        """A new recipe with stages appended."""
        return Recipe(self.n_modes, self.occupations, self.stages + tuple(stages))

    def to_map(self):
        """The composition of all stage maps."""
        channel = identity_map(self.n_modes)
        for stage in self.stages:
            channel = channel.then(stage.to_map(self.n_modes))
        return channel
