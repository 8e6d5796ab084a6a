"""
Index conventions and structural constant matrices.

All operators are arranged in the interleaved vector

    a^mu = (a_1, a_1^dagger, a_2, a_2^dagger, ..., a_n, a_n^dagger)

so index 2k is the annihilation slot and 2k+1 the creation slot of mode k. Units are
hbar-free with [q, p] = i. The quadrature ordering (q_1, p_1, ...) only appears through
quad_transform.
"""
import numpy as np
import scipy.linalg

from gqcrb.exceptions import DomainError, NumericalFailureError

_OMEGA_BLOCK = np.array([[0, 1], [-1, 0]], dtype=complex)
_X_BLOCK = np.array([[0, 1], [1, 0]], dtype=complex)
_H_BLOCK = np.array([[1, 1], [-1j, 1j]], dtype=complex) / np.sqrt(2)


def _validate_n_modes(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f'The number of modes must be a positive integer, got {n}.')
    return int(n)


def _block_repeat(block, n):
    return scipy.linalg.block_diag(*(n * [block]))


def omega(n):
    """
    The commutation (symplectic) form, Omega^{mu nu} = [a^mu, a^nu].

    Parameters
    ----------
    n: int
        The number of modes.

    Returns
    -------
    np.ndarray
        A complex 2n x 2n block-diagonal matrix with [[0, 1], [-1, 0]] blocks.

    Example
    -------
    | omega(1) @ omega(1)  # -> -identity
    """
    return _block_repeat(_OMEGA_BLOCK, _validate_n_modes(n))


def x_conj(n):
    """
    The conjugation swap X, which exchanges a_k and a_k^dagger within every mode pair.

    Parameters
    ----------
    n: int
        The number of modes.

    Returns
    -------
    np.ndarray
        A complex 2n x 2n block-diagonal matrix with [[0, 1], [1, 0]] blocks.
    """
    return _block_repeat(_X_BLOCK, _validate_n_modes(n))


def quad_transform(n):
    """
    The unitary H that maps a^mu to the quadratures x^mu = (q_1, p_1, ...).

    q = (a + a^dagger)/sqrt(2) and p = (-ia + ia^dagger)/sqrt(2). H Omega H^T = i Omega_real
    with Omega_real the real symplectic form in (q, p) ordering.

    Parameters
    ----------
    n: int
        The number of modes.

    Returns
    -------
    np.ndarray
        A complex 2n x 2n unitary matrix.
    """
    return _block_repeat(_H_BLOCK, _validate_n_modes(n))


def matrix_abs_trace(A):
    """
    Calculates Tr|A| = Tr[sqrt(A A^dagger)], i.e. the sum of the singular values of A.

    Parameters
    ----------
    A: np.ndarray
        A square (complex) matrix.

    Returns
    -------
    float
        The trace norm of A.

    Raises
    ------
    DomainError
        If A is not square.
    NumericalFailureError
        If the singular value decomposition does not converge.
    """
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f'matrix_abs_trace needs a square matrix, got shape {A.shape}.')
    try:
        singular_values = scipy.linalg.svdvals(A)
    except (np.linalg.LinAlgError, ValueError) as err:
        raise NumericalFailureError(f'SVD failed in matrix_abs_trace: {err}') from err
    return float(np.sum(singular_values))


def n_modes_of(matrix):
    """Infer the number of modes from a 2n-dimensional vector or 2n x 2n matrix."""
    dim = np.shape(matrix)[0]
    if dim % 2:
        raise DomainError(f'Interleaved (a, a^dagger) arrays have even length, got {dim}.')
    return dim // 2


def mode_slots(mode):
    """The (annihilation, creation) indices of a mode in the interleaved ordering."""
    return 2 * mode, 2 * mode + 1
