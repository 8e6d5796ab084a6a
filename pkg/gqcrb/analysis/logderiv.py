"""
RLD and SLD logarithmic derivatives of Gaussian states, QFI matrices, Cramer-Rao bounds and
the asymptotic attainability matrix.

Both logarithmic derivatives of a Gaussian state are quadratic in the centered operators,

    L_k = A^(k)_{mu nu} (a~^mu a~^nu - Sigma^{mu nu}) + B^(k)_mu a~^mu,

with (A, B) fixed by the moments and their derivatives:

    RLD:  Sigma_- A Sigma_+ = dSigma/2,                Sigma_- B = d lambda
    SLD:  Sigma A Sigma - Omega A Omega/4 = dSigma/2,  Sigma B = d lambda

and the QFI matrices are F_ij = dSigma_j^{mu nu} A^(i)_{mu nu} + d lambda_j^mu B^(i)_mu.
"""
import dataclasses
from typing import Optional

import numpy as np
import scipy.linalg

import gqcrb
from gqcrb.core.conventions import omega, matrix_abs_trace
from gqcrb.core.solvers import solve_stein, solve_rld_quadratic
from gqcrb.exceptions import (
    DomainError,
    InconsistentSystemError,
    InternalConsistencyError,
    NumericalFailureError,
    RldUndefinedError,
    UnidentifiableParametersError,
)
from gqcrb.states.gaussian import sigma_plus, sigma_minus, complex_to_pairs

# Tolerance on the (anti)symmetry of the assembled d x d matrices, relative to their size.
MATRIX_SYMMETRY_TOL = 1e-9

# Sign relating the contraction below to Tr[rho [L_i, L_j]], calibrated against the Fock
# oracle in test_oracle.py.
ATTAINABILITY_SIGN = 1.0

FLAVORS = ('RLD', 'SLD')


@dataclasses.dataclass(frozen=True, eq=False)
class LogDerivativeCoefficients:
    """
    The coefficients (A, B) of one logarithmic derivative.

    Parameters
    ----------
    flavor: str
        'RLD' or 'SLD'.
    A: np.ndarray
        Symmetric 2n x 2n quadratic coefficients.
    B: np.ndarray
        Length-2n linear coefficients.
    """

    flavor: str
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise DomainError(f'flavor must be one of {FLAVORS}, got {self.flavor}.')


def _check_tangent(state, d_lam, d_sigma):
    dim = 2 * state.n_modes
    d_lam = np.asarray(d_lam, dtype=complex).reshape(-1)
    d_sigma = np.asarray(d_sigma, dtype=complex)
    if d_lam.shape != (dim,) or d_sigma.shape != (dim, dim):
        raise DomainError(
            f'Derivative shapes {d_lam.shape} and {d_sigma.shape} do not match a '
            f'{state.n_modes}-mode state.'
        )
    return d_lam, d_sigma


def rld_coefficients(state, d_lam, d_sigma, condition_cap=None):
    """
    The RLD coefficients A = Sigma_-^-1 (dSigma/2) Sigma_+^-1 and B = Sigma_-^-1 d lambda.

    Parameters
    ----------
    state: GaussianState
        The state at theta.
    d_lam: np.ndarray
        d lambda / d theta_k.
    d_sigma: np.ndarray
        d Sigma / d theta_k.
    condition_cap: float, optional
        Largest acceptable condition number of Sigma_-, defaults to
        gqcrb.config['RLD_CONDITION_CAP'].

    Returns
    -------
    LogDerivativeCoefficients
        The RLD coefficients.

    Raises
    ------
    RldUndefinedError
        If Sigma_- is singular, which is the case for pure states.
    """
    d_lam, d_sigma = _check_tangent(state, d_lam, d_sigma)
    sm = sigma_minus(state)
    A = solve_rld_quadratic(sm, sigma_plus(state), d_sigma / 2, condition_cap=condition_cap)
    B = scipy.linalg.solve(sm, d_lam)
    return LogDerivativeCoefficients('RLD', A, B)


def sld_coefficients(state, d_lam, d_sigma, tol=None):
    """
    The SLD coefficients: A solves the Stein equation Sigma A Sigma - Omega A Omega/4 =
    dSigma/2 and B solves Sigma B = d lambda.

    Parameters
    ----------
    state: GaussianState
        The state at theta.
    d_lam: np.ndarray
        d lambda / d theta_k.
    d_sigma: np.ndarray
        d Sigma / d theta_k.
    tol: float, optional
        Relative residual tolerance, defaults to gqcrb.config['STEIN_TOL'].

    Returns
    -------
    LogDerivativeCoefficients
        The SLD coefficients.

    Raises
    ------
    InconsistentSystemError
        If either linear system has no solution within tol.
    """
    if tol is None:
        tol = gqcrb.config['STEIN_TOL']
    d_lam, d_sigma = _check_tangent(state, d_lam, d_sigma)
    A = solve_stein(state.sigma, omega(state.n_modes), d_sigma / 2, tol=tol)

    B, *_ = scipy.linalg.lstsq(state.sigma, d_lam)
    norm = np.linalg.norm(d_lam)
    if norm > 0:
        residual = np.linalg.norm(state.sigma @ B - d_lam) / norm
        if residual > tol:
            raise InconsistentSystemError(residual)
    return LogDerivativeCoefficients('SLD', A, B)


def _contract(tangents, coefficients):
    d = len(tangents)
    F = np.zeros((d, d), dtype=complex)
    for i, coeff in enumerate(coefficients):
        for j, (d_lam, d_sigma) in enumerate(tangents):
            F[i, j] = np.sum(d_sigma * coeff.A) + d_lam @ coeff.B
    return F


def qfi_from_coefficients(tangents, coefficients):
    """
    F_ij = sum_{mu nu} dSigma_j^{mu nu} A^(i)_{mu nu} + d lambda_j . B^(i).

    The RLD result is Hermitian and the SLD result real symmetric; both are checked and
    then (anti)symmetrized.

    Raises
    ------
    InternalConsistencyError
        If the assembled matrix misses its symmetry by more than 1e-9 (relative).
    """
    flavor = coefficients[0].flavor
    F = _contract(tangents, coefficients)
    scale = max(1.0, np.abs(F).max())
    if np.abs(F - F.conj().T).max() > MATRIX_SYMMETRY_TOL * scale:
        raise InternalConsistencyError(f'The {flavor} QFI matrix is not Hermitian:\n{F}')
    F = (F + F.conj().T) / 2
    if flavor == 'SLD':
        if np.abs(F.imag).max() > MATRIX_SYMMETRY_TOL * scale:
            raise InternalConsistencyError(f'The SLD QFI matrix is not real:\n{F}')
        return F.real
    return F


def qfi_matrix(family, theta, flavor='SLD'):
    """
    The d x d RLD or SLD QFI matrix of a family at theta.

    Parameters
    ----------
    family: ParameterizedFamily
        The state family.
    theta: array-like
        The parameter point.
    flavor: str
        'RLD' or 'SLD' (case insensitive).

    Returns
    -------
    np.ndarray
        A complex Hermitian (RLD) or real symmetric (SLD) matrix.

    Raises
    ------
    RldUndefinedError
        For the RLD of a (nearly) pure state.
    InconsistentSystemError
        If the SLD equations have no solution.

    Example
    -------
    | config = ScenarioConfig('phase-tmsv', parameters={'r': 1})
    | qfi_matrix(build_family(config), config.theta())  # -> [[13.154114...]]
    """
    flavor = flavor.upper()
    state, tangents = family.derivatives(theta)
    return qfi_from_coefficients(tangents, coefficients_for(state, tangents, flavor))


def coefficients_for(state, tangents, flavor):
    """The RLD or SLD coefficients for every parameter direction."""
    if flavor == 'RLD':
        return [rld_coefficients(state, *t) for t in tangents]
    elif flavor == 'SLD':
        return [sld_coefficients(state, *t) for t in tangents]
    raise DomainError(f'flavor must be one of {FLAVORS}, got {flavor}.')


def _weight(G, d):
    if G is None:
        return np.eye(d)
    G = np.asarray(G)
    if G.shape != (d, d):
        raise DomainError(f'The weight matrix must be {d}x{d}, got {G.shape}.')
    return G


def _inverse(F, condition_cap):
    if condition_cap is None:
        condition_cap = gqcrb.config['BOUND_CONDITION_CAP']
    F = np.atleast_2d(F)
    condition_number = np.linalg.cond(F)
    if not np.isfinite(condition_number) or condition_number > condition_cap:
        _, vectors = np.linalg.eigh((F + F.conj().T) / 2)
        raise UnidentifiableParametersError(vectors[:, 0])
    return np.linalg.inv(F)


def bound_sld(F_sld, G=None, condition_cap=None):
    """
    The SLD Cramer-Rao bound B_S = Tr[G F^-1] for a single measurement.

    Parameters
    ----------
    F_sld: np.ndarray
        Real symmetric d x d SLD QFI matrix.
    G: np.ndarray, optional
        Positive d x d weight matrix, identity by default (sum of the variances).
    condition_cap: float, optional
        Largest acceptable condition number of F, defaults to
        gqcrb.config['BOUND_CONDITION_CAP'].

    Returns
    -------
    float
        The bound.

    Raises
    ------
    UnidentifiableParametersError
        If F is singular; the null-space direction is attached.

    Example
    -------
    | bound_sld(np.diag([2, 4]), G=np.diag([1, 0]))  # -> 0.5
    """
    F = np.atleast_2d(np.asarray(F_sld, dtype=float))
    G = _weight(G, F.shape[0])
    return float(np.trace(G @ _inverse(F, condition_cap)).real)


def bound_rld(F_rld, G=None, condition_cap=None):
    """
    The RLD Cramer-Rao bound B_R = Tr[G Re(F^-1)] + Tr|G Im(F^-1)|.

    Re and Im are taken of the inverse, F^-1 = R + iI with R, I real.

    Parameters
    ----------
    F_rld: np.ndarray
        Complex Hermitian d x d RLD QFI matrix.
    G: np.ndarray, optional
        Positive d x d weight matrix, identity by default.
    condition_cap: float, optional
        Largest acceptable condition number of F.

    Returns
    -------
    float
        The bound.

    Raises
    ------
    UnidentifiableParametersError
        If F is singular.
    """
    F = np.atleast_2d(np.asarray(F_rld, dtype=complex))
    G = _weight(G, F.shape[0])
    inverse = _inverse(F, condition_cap)
    return float(np.trace(G @ inverse.real).real + matrix_abs_trace(G @ inverse.imag))


def scale_bound(bound, nu):
    """The bound for nu independent repetitions of the measurement, bound/nu."""
    if nu < 1:
        raise DomainError(f'The number of measurements must be >= 1, got {nu}.')
    return bound / nu


def attainability_matrix(state, sld_coeffs):
    """
    T_ij = Tr[rho [L_i, L_j]] for the SLD operators L_i.

    T_ij = 4 A^(i)_{ab} A^(j)_{mn} Sigma^{am} Omega^{bn} + B^(i)_a B^(j)_b Omega^{ab}.
    The SLD bound is asymptotically attainable iff T = 0.

    Parameters
    ----------
    state: GaussianState
        The state the coefficients belong to.
    sld_coeffs: list of LogDerivativeCoefficients
        SLD coefficients for all d parameters.

    Returns
    -------
    np.ndarray
        Complex antisymmetric d x d matrix.

    Raises
    ------
    DomainError
        If the coefficients are not SLD or do not match the state.
    """
    dim = 2 * state.n_modes
    for coeff in sld_coeffs:
        if coeff.flavor != 'SLD':
            raise DomainError('The attainability matrix needs SLD coefficients.')
        if coeff.A.shape != (dim, dim) or coeff.B.shape != (dim,):
            raise DomainError('The coefficients do not match the state dimension.')
    W = omega(state.n_modes)
    d = len(sld_coeffs)
    T = np.zeros((d, d), dtype=complex)
    for i, ci in enumerate(sld_coeffs):
        for j, cj in enumerate(sld_coeffs):
            quadratic = 4 * np.einsum('ab,mn,am,bn->', ci.A, cj.A, state.sigma, W)
            T[i, j] = ATTAINABILITY_SIGN * (quadratic + ci.B @ W @ cj.B)
    scale = max(1.0, np.abs(T).max())
    if np.abs(T + T.T).max() > MATRIX_SYMMETRY_TOL * scale:
        raise InternalConsistencyError(f'The attainability matrix is not antisymmetric:\n{T}')
    return (T - T.T) / 2


@dataclasses.dataclass(frozen=True, eq=False)
class QfiReport:
    """
    QFI matrices, Cramer-Rao bounds and the attainability matrix at one parameter point.

    Bounds are per single measurement (nu = 1); use scale_bound for nu repetitions.
    """

    theta: np.ndarray
    param_names: list
    F_sld: np.ndarray
    B_S: float
    T_attain: np.ndarray
    F_rld: Optional[np.ndarray] = None
    B_R: Optional[float] = None
    rld_error: Optional[str] = None
    nu: int = 1

    @property
    def d(self):
        return len(self.param_names)

    @property
    def rld_defined(self):
        """True when both the RLD QFI matrix and the RLD bound exist."""
        return self.F_rld is not None and self.B_R is not None

    def to_dict(self):
        """JSON-ready dictionary, complex entries as [re, im] pairs."""
        return {
            'param_names': list(self.param_names),
            'theta': np.asarray(self.theta, dtype=float).tolist(),
            'F_rld': complex_to_pairs(self.F_rld) if self.F_rld is not None else None,
            'F_sld': np.asarray(self.F_sld, dtype=float).tolist(),
            'B_R': self.B_R,
            'B_S': self.B_S,
            'T_attain': complex_to_pairs(self.T_attain),
            'rld_defined': self.rld_defined,
            'rld_error': self.rld_error,
            'nu': self.nu,
        }


def analyze(family, theta, flavor='both', G=None):
    """
    Computes both QFI flavors, both bounds and the attainability matrix.

    An undefined RLD (pure states) or a singular RLD QFI is recorded in the report instead of
    failing it.

    Parameters
    ----------
    family: ParameterizedFamily
        The state family.
    theta: array-like
        The parameter point.
    flavor: str
        'both' (default), 'sld' or 'rld'. With 'rld' an undefined RLD raises.
    G: np.ndarray, optional
        Weight matrix for the bounds.

    Returns
    -------
    QfiReport
        The report.

    Raises
    ------
    InconsistentSystemError
        If the SLD equations have no solution.
    UnidentifiableParametersError
        If the SLD QFI matrix is singular.
    """
    flavor = flavor.lower()
    if flavor not in ('both', 'sld', 'rld'):
        raise DomainError(f"flavor must be 'both', 'sld' or 'rld', got {flavor}.")
    theta = family.check_domain(theta)
    state, tangents = family.derivatives(theta)

    sld = coefficients_for(state, tangents, 'SLD')
    F_sld = qfi_from_coefficients(tangents, sld)
    B_S = bound_sld(F_sld, G)
    T = attainability_matrix(state, sld)

    F_rld, B_R, rld_error = None, None, 'not requested'
    if flavor in ('both', 'rld'):
        try:
            F_rld = qfi_from_coefficients(tangents, coefficients_for(state, tangents, 'RLD'))
            rld_error = None
            B_R = bound_rld(F_rld, G)
        except (RldUndefinedError, UnidentifiableParametersError, NumericalFailureError) as err:
            if flavor == 'rld':
                raise
            rld_error = f'{type(err).__name__}: {err}'
    return QfiReport(theta, family.param_names, F_sld, B_S, T, F_rld, B_R, rld_error)
