"""
The Gaussian state data type, its standard constructors and the characteristic function.

A Gaussian state is fully described by the mean displacement lambda^mu = <a^mu> and the
covariance Sigma^{mu nu} = <{a~^mu, a~^nu}>/2 with a~ = a - lambda, both in the interleaved
(a, a^dagger) ordering of gqcrb.core.conventions.
"""
import dataclasses
import json

import numpy as np
import scipy.linalg

from gqcrb.core.conventions import omega, x_conj, quad_transform, n_modes_of
from gqcrb.exceptions import DomainError

# Invariant tolerances.
SYMMETRY_TOL = 1e-12
CONJUGATION_TOL = 1e-12
PHYSICALITY_TOL = 1e-10


@dataclasses.dataclass(frozen=True, eq=False)
class GaussianState:
    """
    An immutable multimode Gaussian state.

    Parameters
    ----------
    n_modes: int
        The number of bosonic modes.
    lam: np.ndarray
        Complex vector of length 2n, the mean displacement (lambda_1, lambda_1^*, ...).
    sigma: np.ndarray
        Complex 2n x 2n symmetric covariance matrix.

    Raises
    ------
    DomainError
        If the shapes are inconsistent, Sigma is not symmetric, the conjugation structure
        X Sigma X = Sigma^* and X lambda = lambda^* is broken, or the state violates the
        uncertainty relation sigma + (i/2) Omega_real >= 0 in quadrature form.
    """

    n_modes: int
    lam: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        lam = np.array(self.lam, dtype=complex).reshape(-1)
        sigma = np.array(self.sigma, dtype=complex)
        if lam.shape != (2 * self.n_modes,) or sigma.shape != 2 * (2 * self.n_modes,):
            raise DomainError(
                f'A {self.n_modes}-mode state needs lambda of length {2*self.n_modes} and a '
                f'{2*self.n_modes}x{2*self.n_modes} sigma, got {lam.shape} and {sigma.shape}.'
            )
        lam.flags.writeable = False
        sigma.flags.writeable = False
        object.__setattr__(self, 'lam', lam)
        object.__setattr__(self, 'sigma', sigma)
        self._validate()

    def _validate(self):
        X = x_conj(self.n_modes)
        if np.abs(self.sigma - self.sigma.T).max() > SYMMETRY_TOL * _scale(self.sigma):
            raise DomainError('Sigma must be symmetric.')
        if np.abs(X @ self.sigma @ X - self.sigma.conj()).max() > CONJUGATION_TOL * _scale(
            self.sigma
        ):
            raise DomainError('Sigma violates the conjugation structure X Sigma X = Sigma^*.')
        if np.abs(X @ self.lam - self.lam.conj()).max(initial=0) > CONJUGATION_TOL * _scale(
            self.lam
        ):
            raise DomainError('lambda violates the conjugation structure X lambda = lambda^*.')
        min_eigenvalue = np.linalg.eigvalsh(uncertainty_matrix(self)).min()
        if min_eigenvalue < -PHYSICALITY_TOL:
            raise DomainError(
                f'The state violates the uncertainty relation (min eigenvalue '
                f'{min_eigenvalue:.3e}).'
            )

    def quadrature_covariance(self):
        """The real symmetric quadrature covariance sigma = H Sigma H^T."""
        H = quad_transform(self.n_modes)
        return (H @ self.sigma @ H.T).real

    def symplectic_eigenvalues(self):
        """
        The symplectic eigenvalues of the quadrature covariance, each >= 1/2.

        A mode with symplectic eigenvalue 1/2 is pure, which makes Sigma_minus singular.
        """
        sigma_q = self.quadrature_covariance()
        omega_real = omega(self.n_modes).real
        eigenvalues = np.abs(np.linalg.eigvals(1j * omega_real @ sigma_q))
        return np.sort(eigenvalues)[::2]

    def purity(self):
        """Tr[rho^2] = 1/(2^n sqrt(det sigma))."""
        return float(1 / (2 ** self.n_modes * np.sqrt(np.linalg.det(self.quadrature_covariance()))))

    def energy(self):
        """The total mean excitation number sum_k <a_k^dagger a_k>."""
        sp = sigma_plus(self) + np.outer(self.lam, self.lam)
        return float(sum(sp[2 * k + 1, 2 * k].real for k in range(self.n_modes)))

    def to_dict(self):
        """JSON-ready {n_modes, lambda: [[re, im], ...], sigma: [[[re, im], ...], ...]}."""
        return {
            'n_modes': self.n_modes,
            'lambda': complex_to_pairs(self.lam),
            'sigma': complex_to_pairs(self.sigma),
        }

    @classmethod
    def from_dict(cls, data):
        """Inverse of to_dict. Raises DomainError on a malformed object."""
        try:
            n_modes = int(data['n_modes'])
            lam = pairs_to_complex(data['lambda'])
            sigma = pairs_to_complex(data['sigma'])
        except (KeyError, TypeError, ValueError, IndexError) as err:
            raise DomainError(f'Malformed Gaussian state object: {err}') from err
        return cls(n_modes, lam, sigma)

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s):
        return cls.from_dict(json.loads(s))


def _scale(array):
    return max(1.0, float(np.abs(array).max(initial=0)))


def complex_to_pairs(array):
    """Nested [re, im] lists for JSON serialization of complex arrays."""
    array = np.asarray(array, dtype=complex)
    return np.stack([array.real, array.imag], axis=-1).tolist()


def pairs_to_complex(pairs):
    """Inverse of complex_to_pairs."""
    pairs = np.asarray(pairs, dtype=float)
    if pairs.shape[-1] != 2:
        raise ValueError('complex entries must be [re, im] pairs')
    return pairs[..., 0] + 1j * pairs[..., 1]


def sigma_plus(state):
    """Sigma_+ = Sigma + Omega/2, the centered second moments <a~^mu a~^nu>."""
    return state.sigma + omega(state.n_modes) / 2


def sigma_minus(state):
    """Sigma_- = Sigma - Omega/2 = Sigma_+^T."""
    return state.sigma - omega(state.n_modes) / 2


def uncertainty_matrix(state):
    """
    H Sigma_+ H^T = sigma + (i/2) Omega_real, Hermitian and positive semidefinite for
    physical states.
    """
    H = quad_transform(state.n_modes)
    M = H @ sigma_plus(state) @ H.T
    return (M + M.conj().T) / 2


def _per_mode(value, n, name):
    values = np.broadcast_to(np.asarray(value), (n,)) if np.ndim(value) == 0 else value
    values = np.asarray(values)
    if values.shape != (n,):
        raise DomainError(f'{name} needs one value per mode ({n}), got {values.shape}.')
    return values


def _check_occupation(nu):
    nu = np.asarray(nu, dtype=float)
    if np.any(nu < 0) or not np.all(np.isfinite(nu)):
        raise DomainError(f'Thermal occupations must be finite and >= 0, got {nu}.')
    return nu


def vacuum(n):
    """
    The n-mode vacuum: lambda = 0, Sigma = X/2.

    Example
    -------
    | vacuum(1).sigma  # -> [[0, 0.5], [0.5, 0]]
    """
    return thermal(n, 0.0)


def thermal(n, nu):
    """
    A product of thermal states.

    Parameters
    ----------
    n: int
        The number of modes.
    nu: float or array-like
        Mean excitation number, either one value for all modes or one per mode.

    Returns
    -------
    GaussianState
        lambda = 0 and per-mode Sigma blocks ((2 nu + 1)/2) sigma_x.

    Raises
    ------
    DomainError
        If any nu < 0.
    """
    nu = _check_occupation(_per_mode(nu, int(n), 'nu'))
    blocks = [(2 * v + 1) / 2 * np.array([[0, 1], [1, 0]]) for v in nu]
    return GaussianState(int(n), np.zeros(2 * int(n)), scipy.linalg.block_diag(*blocks))


def coherent(alpha):
    """
    A product of coherent states, one per entry of alpha.

    Example
    -------
    | coherent(1+1j).lam  # -> [1+1j, 1-1j]
    """
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    lam = np.ravel(np.column_stack([alpha, alpha.conj()]))
    return GaussianState(len(alpha), lam, vacuum(len(alpha)).sigma)


def two_mode_squeezed_thermal(r, nu_T):
    """
    S_2(r) (rho_nu_T x rho_nu_T) S_2(r)^dagger with S_2(r) = exp(r(a1 a2 - a1^dag a2^dag)).

    Sigma = ((2 nu_T + 1)/2) [[sigma_x cosh 2r, -1 sinh 2r], [-1 sinh 2r, sigma_x cosh 2r]].
    """
    nu_T = float(_check_occupation(nu_T))
    y = 2 * nu_T + 1
    sx = np.array([[0, 1], [1, 0]])
    one = np.eye(2)
    sigma = (y / 2) * np.block(
        [
            [sx * np.cosh(2 * r), -one * np.sinh(2 * r)],
            [-one * np.sinh(2 * r), sx * np.cosh(2 * r)],
        ]
    )
    return GaussianState(2, np.zeros(4), sigma)


def tmsv(r):
    """The two-mode squeezed vacuum, two_mode_squeezed_thermal(r, 0)."""
    return two_mode_squeezed_thermal(r, 0.0)


def squeezed_thermal_single(lambda0, r, nu_T):
    """
    D(lambda0) S(r) rho_nu_T S(r)^dagger D(lambda0)^dagger with S(r) = exp(r(a^2 - a^dag^2)/2).

    Parameters
    ----------
    lambda0: complex
        The displacement.
    r: float
        The squeeze parameter.
    nu_T: float
        The thermal occupation of the state before squeezing.

    Returns
    -------
    GaussianState
        lambda = (lambda0, lambda0^*) and
        Sigma = ((2 nu_T + 1)/2) [[-sinh 2r, cosh 2r], [cosh 2r, -sinh 2r]].
    """
    nu_T = float(_check_occupation(nu_T))
    y = 2 * nu_T + 1
    sigma = (y / 2) * np.array(
        [[-np.sinh(2 * r), np.cosh(2 * r)], [np.cosh(2 * r), -np.sinh(2 * r)]]
    )
    lambda0 = complex(lambda0)
    return GaussianState(1, [lambda0, lambda0.conjugate()], sigma)


def char_fn(state, z):
    """
    The characteristic function exp(1/2 Sigma^{mu nu} z_mu z_nu - lambda^mu z_mu).

    Indices are lowered with Omega, z_mu = Omega_{mu nu} z^nu. For z = (z_1, z_1^*, ...)
    this equals Tr[rho D(z)] with the displacement operator D(z) = exp(z a^dag - z^* a).
    Physical arguments obey z^* = X z; other z are accepted and evaluated analytically.

    Parameters
    ----------
    state: GaussianState
        The state.
    z: array-like
        Complex vector of length 2n.

    Returns
    -------
    complex
        The characteristic function at z.
    """
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.shape != (2 * state.n_modes,):
        raise DomainError(f'z must have length {2*state.n_modes}, got {z.shape}.')
    z_lower = omega(state.n_modes) @ z
    exponent = 0.5 * z_lower @ state.sigma @ z_lower - state.lam @ z_lower
    return complex(np.exp(exponent))


def state_from_moments(lam, sigma):
    """Builds a GaussianState, inferring n_modes from the array shapes."""
    return GaussianState(n_modes_of(sigma), lam, sigma)
