"""
Structured linear solvers for the logarithmic-derivative coefficients.

The Stein equation S A S - 1/4 W A W = R is vectorized row-major, i.e. vec(A) is
A.ravel() (C order), for which vec(P A Q) = kron(P, Q^T) vec(A). Matrices are dense and
small (2n x 2n with n up to ~8 modes), so the 4n^2 x 4n^2 Kronecker system is solved
directly.
"""
import warnings

import numpy as np
import scipy.linalg

import gqcrb
from gqcrb.exceptions import (
    DomainError,
    InconsistentSystemError,
    NumericalFailureError,
    RldUndefinedError,
)

# Relative asymmetry above which a symmetrized solution is reported (Stein) or rejected (RLD).
ASYMMETRY_TOL = 1e-10


def _check_square(name, M, dim=None):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError(f'{name} must be a square matrix, got shape {M.shape}.')
    if dim is not None and M.shape[0] != dim:
        raise DomainError(f'{name} has dimension {M.shape[0]}, expected {dim}.')
    return M


def _symmetrize(A, label, strict=False):
    norm = np.linalg.norm(A)
    asymmetry = np.linalg.norm(A - A.T)
    if norm > 0 and asymmetry > ASYMMETRY_TOL * norm:
        message = f'{label}: relative asymmetry {asymmetry / norm:.2e}'
        if strict:
            raise NumericalFailureError(f'{message} exceeds {ASYMMETRY_TOL:.0e}.')
        warnings.warn(f'{message} removed by symmetrization.')
    return (A + A.T) / 2


def stein_operator(S, W):
    """
    The 4n^2 x 4n^2 matrix of A -> S A S - 1/4 W A W in row-major vectorization.

    Parameters
    ----------
    S: np.ndarray
        Symmetric 2n x 2n matrix (the covariance Sigma).
    W: np.ndarray
        Antisymmetric 2n x 2n matrix (the commutation form Omega).

    Returns
    -------
    np.ndarray
        kron(S, S^T) - 1/4 kron(W, W^T).
    """
    S = np.asarray(S, dtype=complex)
    W = np.asarray(W, dtype=complex)
    return np.kron(S, S.T) - 0.25 * np.kron(W, W.T)


def solve_stein(S, W, R, tol=None):
    """
    Solves S A S - 1/4 W A W = R for symmetric A.

    This is the SLD quadratic-coefficient equation with S = Sigma, W = Omega and
    R = 1/2 dSigma. On the singular set (pure states) the minimum-norm least-squares
    solution is returned, with singular values below max(dim) * eps * sigma_max
    discarded, and the residual is checked.

    Parameters
    ----------
    S: np.ndarray
        Symmetric 2n x 2n matrix.
    W: np.ndarray
        Antisymmetric 2n x 2n matrix.
    R: np.ndarray
        Symmetric 2n x 2n right-hand side.
    tol: float, optional
        Relative residual tolerance, defaults to gqcrb.config['STEIN_TOL'].

    Returns
    -------
    A: np.ndarray
        The symmetric solution.

    Raises
    ------
    DomainError
        If the matrix shapes do not match.
    InconsistentSystemError
        If ||S A S - 1/4 W A W - R|| / ||R|| > tol. The relative residual is attached.

    Example
    -------
    | sigma = gqcrb.thermal(1, 0.2).sigma
    | A = solve_stein(sigma, omega(1), 0.5*np.array([[0, 1], [1, 0]]))
    """
    if tol is None:
        tol = gqcrb.config['STEIN_TOL']
    S = _check_square('S', S)
    dim = S.shape[0]
    W = _check_square('W', W, dim)
    R = _check_square('R', R, dim)

    norm_R = np.linalg.norm(R)
    if norm_R == 0:
        return np.zeros((dim, dim), dtype=complex)

    L = stein_operator(S, W)
    cond = max(L.shape) * np.finfo(float).eps
    solution, *_ = scipy.linalg.lstsq(L, R.ravel(), cond=cond, lapack_driver='gelsd')
    A = _symmetrize(solution.reshape(dim, dim), 'solve_stein')

    residual = np.linalg.norm(S @ A @ S - 0.25 * W @ A @ W - R) / norm_R
    if residual > tol:
        raise InconsistentSystemError(residual)
    return A


def solve_rld_quadratic(Sm, Sp, R, condition_cap=None):
    """
    Solves Sm A Sp = R, i.e. returns A = Sm^-1 R Sp^-1.

    This is the RLD quadratic-coefficient equation with Sm = Sigma_minus,
    Sp = Sigma_plus = Sigma_minus^T and R = 1/2 dSigma.

    Parameters
    ----------
    Sm: np.ndarray
        The 2n x 2n matrix Sigma_minus.
    Sp: np.ndarray
        The 2n x 2n matrix Sigma_plus; must equal Sm^T.
    R: np.ndarray
        Symmetric 2n x 2n right-hand side.
    condition_cap: float, optional
        Largest acceptable condition number of Sm, defaults to
        gqcrb.config['RLD_CONDITION_CAP'].

    Returns
    -------
    A: np.ndarray
        The symmetric solution.

    Raises
    ------
    RldUndefinedError
        If Sm is singular or its condition number exceeds condition_cap.
    NumericalFailureError
        If the solution deviates from symmetry by more than 1e-10 relative.
    """
    if condition_cap is None:
        condition_cap = gqcrb.config['RLD_CONDITION_CAP']
    Sm = _check_square('Sm', Sm)
    dim = Sm.shape[0]
    Sp = _check_square('Sp', Sp, dim)
    R = _check_square('R', R, dim)
    assert np.allclose(Sp, Sm.T, rtol=0, atol=1e-12 * max(1, np.abs(Sm).max())), (
        'Sp must be the transpose of Sm.'
    )

    condition_number = np.linalg.cond(Sm)
    if not np.isfinite(condition_number) or condition_number > condition_cap:
        raise RldUndefinedError(condition_number)

    left = scipy.linalg.solve(Sm, R)
    A = scipy.linalg.solve(Sp.T, left.T).T
    return _symmetrize(A, 'solve_rld_quadratic', strict=True)
