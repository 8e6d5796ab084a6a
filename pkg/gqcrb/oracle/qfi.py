"""
Brute-force QFI matrices from truncated Fock density matrices.

Derivatives of rho are central differences of build_state at theta +- h e_k. The SLD is
solved in the eigenbasis of rho, (L_k)_{mn} = 2 (d_k rho)_{mn}/(p_m + p_n), the RLD as
L_k = rho^-1 d_k rho on the support of rho.
"""
import numpy as np
import scipy.linalg

import gqcrb
from gqcrb.exceptions import (
    DomainError,
    InternalConsistencyError,
    NumericalFailureError,
    RldOracleUndefinedError,
)
from gqcrb.oracle.fock import FockDensityMatrix, build_state

# Largest relative part of d rho outside the support of rho for which the RLD still exists.
SUPPORT_LEAK_TOL = 1e-4
SLD_SYMMETRY_TOL = 1e-8
RLD_HERMITICITY_TOL = 1e-7
FIDELITY_FD_STEP = 1e-3


def _matrix(rho):
    return rho.rho if isinstance(rho, FockDensityMatrix) else np.asarray(rho, dtype=complex)


def _recipe_family(family):
    if not family.has_recipe:
        raise DomainError('The Fock oracle needs a family defined by a recipe.')
    return family


def density_derivatives(family, theta, cutoff=None, h=None, padding=None, budget=None):
    """
    rho(theta) and the central differences d_k rho for every parameter.

    Parameters
    ----------
    family: ParameterizedFamily
        A recipe-backed family.
    theta: array-like
        The parameter point.
    cutoff: int, optional
        Fock levels per mode, defaults to gqcrb.config['ORACLE_CUTOFF'].
    h: float, optional
        The difference step, defaults to gqcrb.config['ORACLE_FD_STEP'].

    Returns
    -------
    rho: FockDensityMatrix
        The state at theta.
    d_rho: list of np.ndarray
        d rho / d theta_k.
    """
    family = _recipe_family(family)
    theta = family.check_domain(theta)
    if h is None:
        h = gqcrb.config['ORACLE_FD_STEP']
    build = lambda point: build_state(family.recipe_at(point), cutoff, padding, budget)
    rho = build(theta)
    d_rho = []
    for k in range(family.dim_theta):
        offset = np.zeros_like(theta)
        offset[k] = h
        d = (build(theta + offset).rho - build(theta - offset).rho) / (2 * h)
        d_rho.append((d + d.conj().T) / 2)
    return rho, d_rho


def _eigh(rho):
    try:
        return scipy.linalg.eigh(rho)
    except (np.linalg.LinAlgError, ValueError) as err:
        raise NumericalFailureError(f'Eigendecomposition of rho failed: {err}') from err


def _sld_eigenbasis(rho, d_rho, floor):
    if floor is None:
        floor = gqcrb.config['EIGEN_FLOOR']
    p, V = _eigh(_matrix(rho))
    denominator = p[:, None] + p[None, :]
    keep = denominator > floor
    operators = []
    for d in d_rho:
        d_eigen = V.conj().T @ d @ V
        L = np.zeros_like(d_eigen)
        L[keep] = 2 * d_eigen[keep] / denominator[keep]
        operators.append(L)
    return p, V, operators


def sld_operators(rho, d_rho, floor=None):
    """
    SLD operators solving d_k rho = (rho L_k + L_k rho)/2.

    Entries with p_m + p_n <= floor are set to zero.

    Returns
    -------
    list of np.ndarray
        The SLD operators in the Fock basis.
    """
    _, V, operators = _sld_eigenbasis(rho, d_rho, floor)
    return [V @ L @ V.conj().T for L in operators]


def sld_qfi_oracle(family, theta, cutoff=None, h=None, floor=None, budget=None):
    """
    The SLD QFI matrix F_ij = Tr[rho (L_i L_j + L_j L_i)]/2 in truncated Fock space.

    Parameters
    ----------
    family: ParameterizedFamily
        A recipe-backed family with at most two modes.
    theta: array-like
        The parameter point.
    cutoff: int, optional
        Fock levels per mode.
    h: float, optional
        The central-difference step.
    floor: float, optional
        Eigenvalue floor for the SLD denominators.
    budget: float, optional
        The largest acceptable trace deficit, defaults to
        gqcrb.config['TRUNCATION_BUDGET'].

    Returns
    -------
    np.ndarray
        Real symmetric d x d matrix.

    Raises
    ------
    IncreaseCutoffError
        If any of the states exceeds the truncation budget.

    Example
    -------
    | family = ParameterizedFamily(1, recipe_at=lambda t: Recipe(1, 0).then(
    |     Stage('displace', 0, {'alpha': 1}), Stage('phase', 0, {'phi': t[0]}, {'phi': [1]})))
    | sld_qfi_oracle(family, [0.0], cutoff=30)  # -> [[4.0]]
    """
    rho, d_rho = density_derivatives(family, theta, cutoff, h, budget=budget)
    p, _, L = _sld_eigenbasis(rho, d_rho, floor)

    d = len(L)
    F = np.zeros((d, d))
    for i in range(d):
        for j in range(d):
            F[i, j] = np.einsum('m,mn,nm->', p, L[i], L[j]).real
    scale = max(1.0, np.abs(F).max())
    if np.abs(F - F.T).max() > SLD_SYMMETRY_TOL * scale:
        raise InternalConsistencyError(f'The oracle SLD QFI matrix is not symmetric:\n{F}')
    return (F + F.T) / 2


def rld_qfi_oracle(family, theta, cutoff=None, h=None, floor=None, budget=None):
    """
    The RLD QFI matrix F_ij = Tr[rho L_i L_j^dag] with d_k rho = rho L_k.

    On the support of rho (eigenvalues above floor) this is
    sum_{mn} (d_i rho)_{mn} (d_j rho)_{nm}/p_m in the eigenbasis.

    Returns
    -------
    np.ndarray
        Complex Hermitian d x d matrix.

    Raises
    ------
    RldOracleUndefinedError
        If rho has rank one, or d rho has more than a 1e-4 relative part outside the
        support of rho.
    """
    if floor is None:
        floor = gqcrb.config['EIGEN_FLOOR']
    rho, d_rho = density_derivatives(family, theta, cutoff, h, budget=budget)
    p, V = _eigh(rho.rho)
    support = p > floor
    if support.sum() <= 1:
        raise RldOracleUndefinedError('rho is (numerically) pure; the RLD does not exist.')

    blocks = []
    for d in d_rho:
        d_eigen = V.conj().T @ d @ V
        norm = np.linalg.norm(d_eigen)
        leak = np.linalg.norm(d_eigen[~support]) if norm > 0 else 0.0
        if norm > 0 and leak / norm > SUPPORT_LEAK_TOL:
            raise RldOracleUndefinedError(
                f'd rho leaves the support of rho (relative weight {leak / norm:.2e}); '
                f'the RLD does not exist.'
            )
        blocks.append(d_eigen[np.ix_(support, support)])

    inverse_p = 1 / p[support]
    d = len(blocks)
    F = np.zeros((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            F[i, j] = np.einsum('mn,nm,m->', blocks[i], blocks[j], inverse_p)
    scale = max(1.0, np.abs(F).max())
    if np.abs(F - F.conj().T).max() > RLD_HERMITICITY_TOL * scale:
        raise InternalConsistencyError(f'The oracle RLD QFI matrix is not Hermitian:\n{F}')
    return (F + F.conj().T) / 2


def _sqrt_psd(rho):
    p, V = _eigh(rho)
    return (V * np.sqrt(np.clip(p, 0, None))) @ V.conj().T


def fidelity(rho1, rho2):
    """
    The Uhlmann fidelity (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2.

    Both states are normalized by their trace first. The trace norm is evaluated as the sum
    of the singular values of sqrt(rho1) sqrt(rho2).

    Raises
    ------
    DomainError
        If the matrices have different shapes.
    NumericalFailureError
        If a matrix square root or the SVD fails.
    """
    rho1, rho2 = _matrix(rho1), _matrix(rho2)
    if rho1.shape != rho2.shape:
        raise DomainError(f'Cannot compare states of shapes {rho1.shape} and {rho2.shape}.')
    rho1 = rho1 / np.trace(rho1).real
    rho2 = rho2 / np.trace(rho2).real
    try:
        singular_values = scipy.linalg.svdvals(_sqrt_psd(rho1) @ _sqrt_psd(rho2))
    except (np.linalg.LinAlgError, ValueError) as err:
        raise NumericalFailureError(f'The fidelity computation failed: {err}') from err
    return float(np.sum(singular_values) ** 2)


def fidelity_qfi_oracle(family, theta, k, cutoff=None, h=FIDELITY_FD_STEP):
    """
    The QFI diagonal entry F_kk from the fidelity of neighbouring states,
    8 (1 - sqrt(F(rho_theta, rho_{theta + h e_k})))/h^2.
    """
    family = _recipe_family(family)
    theta = family.check_domain(theta)
    if not 0 <= k < family.dim_theta:
        raise DomainError(f'Parameter index {k} out of range for d = {family.dim_theta}.')
    offset = np.zeros_like(theta)
    offset[k] = h
    rho = build_state(family.recipe_at(theta), cutoff)
    shifted = build_state(family.recipe_at(theta + offset), cutoff)
    root_fidelity = min(1.0, np.sqrt(fidelity(rho, shifted)))
    return 8 * (1 - root_fidelity) / h**2


def commutator_trace_oracle(rho, L_i, L_j):
    """
    Tr[rho (L_i L_j - L_j L_i)], zero iff the SLD bound is asymptotically attainable for
    the pair.
    """
    rho, L_i, L_j = _matrix(rho), np.asarray(L_i), np.asarray(L_j)
    if not rho.shape == L_i.shape == L_j.shape:
        raise DomainError(
            f'Shapes {rho.shape}, {L_i.shape} and {L_j.shape} do not act on a common space.'
        )
    return complex(np.einsum('ij,ji->', rho, L_i @ L_j - L_j @ L_i))


def attainability_oracle(family, theta, cutoff=None, h=None, budget=None):
    """The matrix T_ij = Tr[rho [L_i, L_j]] of the oracle SLD operators."""
    rho, d_rho = density_derivatives(family, theta, cutoff, h, budget=budget)
    L = sld_operators(rho, d_rho)
    d = len(L)
    T = np.zeros((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            T[i, j] = commutator_trace_oracle(rho, L[i], L[j])
    return T
