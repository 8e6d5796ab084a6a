"""
Hermitian observables at most quadratic in the mode operators, and their Gaussian moments.

An observable is stored as M = m_{mu nu} a^mu a^nu + lin_mu a^mu + const with m symmetric,
so the quadratic part is the symmetrized (Weyl-ordered) product.
"""
import dataclasses

import numpy as np

from gqcrb.core.conventions import x_conj, mode_slots, n_modes_of
from gqcrb.exceptions import DomainError
from gqcrb.states.gaussian import sigma_plus

HERMITICITY_TOL = 1e-12
REALITY_TOL = 1e-10


@dataclasses.dataclass(frozen=True, eq=False)
class QuadraticObservable:
    """
    M = m_{mu nu} a^mu a^nu (symmetrized) + lin_mu a^mu + const_term.

    Parameters
    ----------
    quad: np.ndarray
        Complex 2n x 2n coefficient matrix m. It is symmetrized on construction.
    lin: np.ndarray
        Complex vector of length 2n.
    const_term: float
        Real constant.

    Raises
    ------
    DomainError
        If the observable is not Hermitian, i.e. X m X != m^* or X lin != lin^*.
    """

    quad: np.ndarray
    lin: np.ndarray
    const_term: float = 0.0

    def __post_init__(self):
        quad = np.array(self.quad, dtype=complex)
        quad = (quad + quad.T) / 2
        lin = np.array(self.lin, dtype=complex).reshape(-1)
        if quad.ndim != 2 or quad.shape[0] != quad.shape[1] or lin.shape != quad.shape[:1]:
            raise DomainError(
                f'Inconsistent observable shapes: quad {quad.shape}, lin {lin.shape}.'
            )
        quad.flags.writeable = False
        lin.flags.writeable = False
        object.__setattr__(self, 'quad', quad)
        object.__setattr__(self, 'lin', lin)
        object.__setattr__(self, 'const_term', float(np.real(self.const_term)))

        X = x_conj(self.n_modes)
        scale = max(1.0, np.abs(quad).max(), np.abs(lin).max(initial=0))
        if np.abs(X @ quad @ X - quad.conj()).max() > HERMITICITY_TOL * scale:
            raise DomainError('Observable is not Hermitian: X m X != m^*.')
        if np.abs(X @ lin - lin.conj()).max(initial=0) > HERMITICITY_TOL * scale:
            raise DomainError('Observable is not Hermitian: X lin != lin^*.')

    @property
    def n_modes(self):
        return n_modes_of(self.quad)

    @classmethod
    def from_normal_ordered(cls, quad, lin=None, const_term=0.0):
        """
        Builds an observable from normal-ordered coefficients, sum n_{mu nu} :a^mu a^nu:.

        Only the a_k a_k^dagger pairs differ between normal and symmetric order, by
        a_k^dag a_k = (a_k a_k^dag + a_k^dag a_k)/2 - 1/2; that constant is moved into
        const_term.
        """
        quad = np.asarray(quad, dtype=complex)
        quad = (quad + quad.T) / 2
        n = n_modes_of(quad)
        if lin is None:
            lin = np.zeros(2 * n, dtype=complex)
        ordering_shift = sum(quad[2 * k, 2 * k + 1] for k in range(n))
        return cls(quad, lin, np.real(const_term - ordering_shift))


def _empty(n_modes):
    return np.zeros((2 * n_modes, 2 * n_modes), dtype=complex), np.zeros(2 * n_modes, dtype=complex)


def number_operator(n_modes, mode):
    """a_k^dagger a_k = (a_k a_k^dag + a_k^dag a_k)/2 - 1/2."""
    quad, lin = _empty(n_modes)
    i, j = mode_slots(mode)
    quad[i, j] = quad[j, i] = 0.5
    return QuadraticObservable(quad, lin, -0.5)


def quadrature(n_modes, mode, angle=0.0):
    """
    The rotated quadrature x_angle = (a e^{-i angle} + a^dag e^{i angle})/sqrt(2).

    angle = 0 gives q and angle = pi/2 gives p.
    """
    quad, lin = _empty(n_modes)
    i, j = mode_slots(mode)
    lin[i] = np.exp(-1j * angle) / np.sqrt(2)
    lin[j] = np.exp(1j * angle) / np.sqrt(2)
    return QuadraticObservable(quad, lin)


def single_mode_squeezing_observable(n_modes, mode=0):
    """i(a^dag^2 - a^2)/2 on one mode."""
    quad, lin = _empty(n_modes)
    i, j = mode_slots(mode)
    quad[i, i] = -0.5j
    quad[j, j] = 0.5j
    return QuadraticObservable(quad, lin)


def pair_squeezing_observable(n_modes, modes=(0, 1)):
    """i(a_1^dag a_2^dag - a_1 a_2)/2 on a pair of modes."""
    quad, lin = _empty(n_modes)
    (i1, j1), (i2, j2) = mode_slots(modes[0]), mode_slots(modes[1])
    quad[j1, j2] = quad[j2, j1] = 0.25j
    quad[i1, i2] = quad[i2, i1] = -0.25j
    return QuadraticObservable(quad, lin)


def _check_modes(state, obs):
    if obs.n_modes != state.n_modes:
        raise DomainError(
            f'Observable acts on {obs.n_modes} modes but the state has {state.n_modes}.'
        )


def _real(value, scale, label):
    if abs(value.imag) > REALITY_TOL * max(1.0, scale):
        raise DomainError(f'{label} has imaginary part {value.imag:.3e}; observable not Hermitian.')
    return float(value.real)


def expectation(state, obs):
    """
    <M> = m_{mu nu}(Sigma_+^{mu nu} + lambda^mu lambda^nu) + lin_mu lambda^mu + const.

    Parameters
    ----------
    state: GaussianState
        The state.
    obs: QuadraticObservable
        The observable.

    Returns
    -------
    float
        The expectation value.

    Raises
    ------
    DomainError
        If the dimensions differ or the result is not real.

    Example
    -------
    | expectation(thermal(1, 0.3), number_operator(1, 0))  # -> 0.3
    """
    _check_modes(state, obs)
    second_moments = sigma_plus(state) + np.outer(state.lam, state.lam)
    value = np.sum(obs.quad * second_moments) + obs.lin @ state.lam + obs.const_term
    return _real(value, np.abs(value), 'The expectation value')


def variance(state, obs):
    """
    Delta^2 M = <M^2> - <M>^2 by Wick's theorem.

    Writing M - <M> = m(a~ a~ - Sigma_+) + u a~ with u = 2 m lambda + lin, the odd centered
    moments vanish and the four-point function factorizes, which leaves

        Delta^2 M = 2 Tr(m Sigma_+ m Sigma_-) + u^T Sigma u.

    Parameters
    ----------
    state: GaussianState
        The state.
    obs: QuadraticObservable
        The observable.

    Returns
    -------
    float
        The variance (>= 0 up to roundoff).
    """
    _check_modes(state, obs)
    m = obs.quad
    u = 2 * m @ state.lam + obs.lin
    sp = sigma_plus(state)
    value = 2 * np.trace(m @ sp @ m @ sp.T) + u @ state.sigma @ u
    return _real(value, np.abs(value), 'The variance')


def expectation_derivative(state, obs, d_lam, d_sigma):
    """d<M> along a state tangent (d_lambda, d_Sigma)."""
    _check_modes(state, obs)
    d_moments = d_sigma + np.outer(d_lam, state.lam) + np.outer(state.lam, d_lam)
    value = np.sum(obs.quad * d_moments) + obs.lin @ d_lam
    return _real(value, np.abs(value), 'The expectation derivative')
