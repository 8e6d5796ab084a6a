"""
Tests gqcrb/core/conventions.py
"""
import unittest

import numpy as np
import scipy.linalg
import scipy.stats

from gqcrb.core.conventions import (
    omega,
    x_conj,
    quad_transform,
    matrix_abs_trace,
    n_modes_of,
    mode_slots,
)
from gqcrb.exceptions import DomainError


class Test_structural_matrices(unittest.TestCase):
    def test_omega(self):
        """
        Omega is antisymmetric and squares to minus the identity.
        """
        for n in [1, 2, 3]:
            W = omega(n)
            assert W.shape == (2 * n, 2 * n)
            assert np.allclose(W, -W.T)
            assert np.allclose(W @ W, -np.eye(2 * n))
        assert np.allclose(omega(1), [[0, 1], [-1, 0]])
        return

    def test_x_conj(self):
        """
        X is a real involution that swaps a_k and a_k^dagger.
        """
        X = x_conj(2)
        assert np.allclose(X @ X, np.eye(4))
        assert np.allclose(X @ np.array([1, 2, 3, 4]), [2, 1, 4, 3])
        return

    def test_quad_transform(self):
        """
        H is unitary and maps Omega to i times the real symplectic form.
        """
        H = quad_transform(2)
        assert np.allclose(H @ H.conj().T, np.eye(4))
        assert np.allclose(H @ omega(2) @ H.T, 1j * omega(2).real)
        # q = (a + a^dag)/sqrt(2) for a coherent amplitude alpha = 1.
        assert np.allclose(quad_transform(1) @ [1, 1], [np.sqrt(2), 0])
        return

    def test_bad_mode_number(self):
        """
        The structural matrices need a positive integer number of modes.
        """
        for n in [0, -1, 1.5]:
            with self.assertRaises(DomainError):
                omega(n)
        with self.assertRaises(DomainError):
            x_conj(True)
        return


class Test_helpers(unittest.TestCase):
    def test_matrix_abs_trace(self):
        """
        Tr|A| is the sum of the singular values.
        """
        assert np.isclose(matrix_abs_trace(np.diag([1, -2])), 3)
        assert np.isclose(matrix_abs_trace([[0, 1j], [-1j, 0]]), 2)
        assert np.isclose(matrix_abs_trace(3.0), 3)
        with self.assertRaises(DomainError):
            matrix_abs_trace(np.ones((2, 3)))
        return

    def test_matrix_abs_trace_unitary_invariance(self):
        """
        Tr|U A V| = Tr|A| for random unitaries, and Tr|A| is the trace of sqrt(A A^dagger).
        """
        rng = np.random.default_rng(3)
        for _ in range(20):
            A = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
            U, V = scipy.stats.unitary_group.rvs(6, size=2, random_state=rng)
            expected = matrix_abs_trace(A)
            assert np.isclose(matrix_abs_trace(U @ A @ V), expected, rtol=1e-10, atol=0)
            eigenvalues = scipy.linalg.eigvalsh(A @ A.conj().T)
            assert np.isclose(np.sqrt(np.clip(eigenvalues, 0, None)).sum(), expected, rtol=1e-10)
        return

    def test_modes(self):
        """
        The interleaved layout puts mode k at slots 2k and 2k + 1.
        """
        assert n_modes_of(np.zeros((6, 6))) == 3
        assert mode_slots(1) == (2, 3)
        with self.assertRaises(DomainError):
            n_modes_of(np.zeros(3))
        return


if __name__ == '__main__':
    unittest.main()
