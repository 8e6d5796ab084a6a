"""
Tests gqcrb/oracle: the truncated Fock states and the brute-force QFI matrices, which are
compared against the Gaussian engine.
"""
import unittest

import numpy as np

from gqcrb.analysis.logderiv import (
    analyze,
    bound_rld,
    bound_sld,
    coefficients_for,
    qfi_matrix,
)
from gqcrb.analysis.scenarios import ScenarioConfig, build_family
from gqcrb.exceptions import DomainError, IncreaseCutoffError, RldOracleUndefinedError
from gqcrb.oracle.fock import FockDensityMatrix, build_state, fock_operator
from gqcrb.oracle.qfi import (
    attainability_oracle,
    commutator_trace_oracle,
    density_derivatives,
    fidelity,
    fidelity_qfi_oracle,
    rld_qfi_oracle,
    sld_qfi_oracle,
)
from gqcrb.states.channels import Recipe, Stage
from gqcrb.states.family import ParameterizedFamily


def thermal_phase_family(nu, alpha):
    return ParameterizedFamily(
        1,
        recipe_at=lambda theta: Recipe(1, nu).then(
            Stage('displace', 0, {'alpha': alpha}),
            Stage('phase', 0, {'phi': theta[0]}, {'phi': [1.0]}),
        ),
    )


def displaced_thermal_family(nu):
    return ParameterizedFamily(
        2,
        recipe_at=lambda theta: Recipe(1, nu).then(
            Stage('displace', 0, {'alpha': theta[0] + 1j * theta[1]}, {'alpha': [1.0, 1j]})
        ),
    )


class Test_build_state(unittest.TestCase):
    def test_thermal(self):
        """
        A thermal state has purity 1/(2 nu + 1) and mean occupation nu.
        """
        rho = build_state(Recipe(1, 0.2), cutoff=40)
        assert rho.dim == 40
        assert np.isclose(rho.trace(), 1, atol=1e-12)
        assert np.isclose(rho.purity(), 1 / 1.4, rtol=1e-9)
        assert np.isclose(rho.number(0), 0.2, rtol=1e-9)
        return

    def test_squeezed_vacuum(self):
        """
        The squeezed vacuum has sinh^2 s photons and stays pure.
        """
        rho = build_state(Recipe(1, 0.0).then(Stage('squeeze1', 0, {'s': 0.5})), cutoff=40)
        assert np.isclose(rho.number(0), np.sinh(0.5) ** 2, rtol=1e-7)
        assert np.isclose(rho.purity(), 1, atol=1e-8)
        # Only even photon numbers are populated.
        assert np.allclose(np.diag(rho.rho)[1::2], 0, atol=1e-12)
        return

    def test_tmsv_marginal(self):
        """
        Either half of a two-mode squeezed vacuum is thermal with nu = sinh^2 r.
        """
        recipe = Recipe(2, 0.0).then(Stage('squeeze2', (0, 1), {'r': 0.8}))
        rho = build_state(recipe, cutoff=25)
        nu = np.sinh(0.8) ** 2
        for mode in (0, 1):
            marginal = rho.reduced(mode)
            n = np.arange(25)
            assert np.allclose(marginal.rho, np.diag(nu**n / (nu + 1) ** (n + 1)), atol=1e-8)
        return

    def test_thermal_loss(self):
        """
        Loss mixes the occupation with the bath, nu' = eps nu + (1 - eps) N.
        """
        recipe = Recipe(1, 0.5).then(Stage('loss', 0, {'eps': 0.6, 'N': 0.9}))
        rho = build_state(recipe, cutoff=40)
        assert np.isclose(rho.number(0), 0.6 * 0.5 + 0.4 * 0.9, rtol=1e-8)
        assert np.allclose(rho.rho, np.diag(np.diag(rho.rho)), atol=1e-12)
        return

    def test_scenario_config(self):
        """
        A ScenarioConfig is realized at its own theta.
        """
        config = ScenarioConfig('squeeze-phase', parameters={'s': 0.3, 'nu_T': 0.2})
        rho = build_state(config, cutoff=30)
        expected = 0.7 * np.cosh(0.6) - 0.5
        assert np.isclose(rho.number(0), expected, rtol=1e-7)
        return

    def test_errors(self):
        """
        A hot state on few levels needs a larger cutoff; tiny cutoffs and three modes are
        rejected.
        """
        with self.assertRaises(IncreaseCutoffError) as context:
            build_state(Recipe(1, 2.0), cutoff=8)
        assert context.exception.deficit > 1e-6
        with self.assertRaises(DomainError):
            build_state(Recipe(1, 0.1), cutoff=6)
        with self.assertRaises(DomainError):
            build_state(Recipe(3, 0.0), cutoff=8)
        with self.assertRaises(DomainError):
            FockDensityMatrix(1, 4, np.eye(3))
        return


class Test_qfi_oracle(unittest.TestCase):
    def test_coherent_phase(self):
        """
        The phase QFI of a coherent state is 4|alpha|^2; the pure state has no RLD.
        """
        family = thermal_phase_family(0.0, 1.0)
        F = sld_qfi_oracle(family, [0.0], cutoff=30)
        assert np.isclose(F[0, 0], 4, atol=1e-4)
        with self.assertRaises(RldOracleUndefinedError):
            rld_qfi_oracle(family, [0.0], cutoff=30)
        return

    def test_displaced_thermal_phase(self):
        """
        Both flavors on a displaced thermal state, and convergence in the cutoff.
        """
        nu = 0.2
        family = thermal_phase_family(nu, 1.0)
        F_sld = sld_qfi_oracle(family, [0.3], cutoff=30)
        F_rld = rld_qfi_oracle(family, [0.3], cutoff=30)
        assert np.isclose(F_sld[0, 0], 4 / 1.4, rtol=1e-5)
        assert np.isclose(F_rld[0, 0].real, (2 * nu + 1) / (nu * (nu + 1)), rtol=1e-5)
        assert F_rld[0, 0].real >= F_sld[0, 0]

        fidelity_F = fidelity_qfi_oracle(family, [0.3], 0, cutoff=30)
        assert np.isclose(fidelity_F, F_sld[0, 0], rtol=1e-2)

        coarse = sld_qfi_oracle(family, [0.3], cutoff=20)
        assert abs(coarse[0, 0] - F_sld[0, 0]) < 1e-4
        return

    def test_damping_single_probe_sld(self):
        """
        The oracle agrees with the engine on the squeezed single-mode probe.
        """
        config = ScenarioConfig(
            'damping-temperature', probe='single', parameters={'r': 0.3, 'nu_T': 0.2}
        )
        family = build_family(config)
        oracle = sld_qfi_oracle(family, config.theta(), cutoff=30)
        engine = qfi_matrix(family, config.theta(), 'SLD')
        assert np.allclose(oracle, engine, rtol=1e-4, atol=1e-6)
        return

    def test_damping_tmsv_rld(self):
        """
        The oracle RLD QFI of the two-mode probe matches the engine.
        """
        config = ScenarioConfig('damping-temperature', parameters={'r': 0.7, 'xi': 0.5, 'N': 0.9})
        family = build_family(config)
        oracle = rld_qfi_oracle(family, config.theta(), cutoff=25)
        engine = qfi_matrix(family, config.theta(), 'RLD')
        assert np.allclose(oracle, engine, rtol=1e-3, atol=1e-5)
        return

    def test_lossless_interferometer(self):
        """
        A lossless after-bs interferometer at r = 0.6 gives sinh^2 2r.
        """
        config = ScenarioConfig('phase-tmsv', 'after-bs', parameters={'r': 0.6})
        F = sld_qfi_oracle(build_family(config), config.theta(), cutoff=25)
        assert np.isclose(F[0, 0], np.sinh(1.2) ** 2, rtol=1e-3)
        return

    def test_recipe_required(self):
        family = ParameterizedFamily(1, state_at=lambda theta: None)
        with self.assertRaises(DomainError):
            sld_qfi_oracle(family, [0.0])
        return


def random_mixed_family(rng):
    """
    Phase and real displacement of a random lossy squeezed thermal state.
    """
    nu = rng.uniform(0.15, 0.3)
    squeezing = {'s': rng.uniform(0, 0.25), 'phi': rng.uniform(0, np.pi)}
    imaginary = rng.uniform(-0.4, 0.4)
    eps = rng.uniform(0.7, 1.0)
    family = ParameterizedFamily(
        2,
        recipe_at=lambda theta: Recipe(1, nu).then(
            Stage('squeeze1', 0, squeezing),
            Stage('displace', 0, {'alpha': theta[1] + 1j * imaginary}, {'alpha': [0.0, 1.0]}),
            Stage('phase', 0, {'phi': theta[0]}, {'phi': [1.0, 0.0]}),
            Stage('loss', 0, {'eps': eps, 'N': 0.0}),
        ),
        param_names=['phi', 'lambda_R'],
    )
    return family, [rng.uniform(-0.5, 0.5), rng.uniform(-0.4, 0.4)]


class Test_random_mixed_suite(unittest.TestCase):
    def assert_close(self, engine, oracle):
        tolerance = np.maximum(1e-3, 1e-2 * np.abs(engine))
        assert np.all(np.abs(engine - oracle) <= tolerance), (engine, oracle)
        return

    def test_engine_agreement(self):
        """
        Both QFI matrices and both bounds of random mixed states agree with the truncated
        Fock computation at cutoff 30.
        """
        rng = np.random.default_rng(29)
        for _ in range(6):
            family, theta = random_mixed_family(rng)
            F_sld = qfi_matrix(family, theta, 'SLD')
            F_rld = qfi_matrix(family, theta, 'RLD')
            oracle_sld = sld_qfi_oracle(family, theta, cutoff=30)
            oracle_rld = rld_qfi_oracle(family, theta, cutoff=30)
            self.assert_close(F_sld, oracle_sld)
            self.assert_close(F_rld, oracle_rld)
            self.assert_close(bound_sld(F_sld), bound_sld(oracle_sld))
            self.assert_close(bound_rld(F_rld), bound_rld(oracle_rld))
        return

    def test_cutoff_convergence(self):
        """
        The engine-oracle gap does not grow when the cutoff is raised from 20 to 30.
        """
        family = ParameterizedFamily(
            1,
            recipe_at=lambda theta: Recipe(1, 0.4).then(
                Stage('squeeze1', 0, {'s': 0.5}),
                Stage('displace', 0, {'alpha': 0.5}),
                Stage('phase', 0, {'phi': theta[0]}, {'phi': [1.0]}),
            ),
        )
        engine = qfi_matrix(family, [0.2], 'SLD')[0, 0]
        gaps = [
            abs(sld_qfi_oracle(family, [0.2], cutoff=cutoff, budget=1e-2)[0, 0] - engine)
            for cutoff in (20, 30)
        ]
        assert gaps[1] <= gaps[0]
        assert gaps[1] <= max(1e-3, 1e-2 * engine)
        return


class Test_attainability_oracle(unittest.TestCase):
    def test_complex_displacement(self):
        """
        The SLDs of the real and imaginary displacement do not commute on average.
        """
        family = displaced_thermal_family(0.2)
        T = attainability_oracle(family, [0.0, 0.0], cutoff=30)
        assert np.isclose(T[0, 1], 8j / 1.96, atol=1e-4)
        assert np.isclose(T[1, 0], -8j / 1.96, atol=1e-4)
        report = analyze(family, [0.0, 0.0])
        assert np.allclose(report.T_attain, T, atol=1e-4)
        return

    def test_squeeze_phase(self):
        """
        The engine attainability matrix has the sign of Tr[rho [L_i, L_j]].
        """
        config = ScenarioConfig('squeeze-phase', parameters={'s': 0.3, 'nu_T': 0.5})
        family = build_family(config)
        T = attainability_oracle(family, config.theta(), cutoff=30)
        report = analyze(family, config.theta())
        scale = np.abs(report.T_attain).max()
        assert scale > 1e-3
        assert np.allclose(report.T_attain, T, atol=1e-4 * max(1, scale))
        return

    def test_commutator_trace(self):
        """
        Commuting operators give zero and mismatched shapes are rejected.
        """
        rho = build_state(Recipe(1, 0.1), cutoff=10)
        n = np.diag(np.arange(10.0))
        assert commutator_trace_oracle(rho, n, n) == 0
        with self.assertRaises(DomainError):
            commutator_trace_oracle(rho, n, np.eye(3))
        return


class Test_fock_operator(unittest.TestCase):
    def setUp(self):
        self.config = ScenarioConfig(
            'squeeze-phase', parameters={'r': 0.1, 'nu_T': 0.3, 'lambda0': 0.5, 's': 0.3}
        )
        self.family = build_family(self.config)
        self.state, self.tangents = self.family.derivatives(self.config.theta())
        self.rho, self.d_rho = density_derivatives(self.family, self.config.theta(), cutoff=30)
        return

    def test_sld_equation(self):
        """
        The engine SLD coefficients solve d rho = (rho L + L rho)/2 in Fock space.
        """
        for coeffs, d in zip(coefficients_for(self.state, self.tangents, 'SLD'), self.d_rho):
            L = fock_operator(coeffs, self.state, 30)
            residual = (self.rho.rho @ L + L @ self.rho.rho) / 2 - d
            assert np.linalg.norm(residual) < 1e-4 * np.linalg.norm(d)
        return

    def test_rld_equation(self):
        """
        The engine RLD coefficients solve d rho = rho L in Fock space.
        """
        for coeffs, d in zip(coefficients_for(self.state, self.tangents, 'RLD'), self.d_rho):
            L = fock_operator(coeffs, self.state, 30)
            residual = self.rho.rho @ L - d
            assert np.linalg.norm(residual) < 1e-4 * np.linalg.norm(d)
        return


class Test_fidelity(unittest.TestCase):
    def test_values(self):
        """
        A state has fidelity one with itself; vacuum and a coherent state overlap as
        exp(-|alpha|^2).
        """
        vacuum = build_state(Recipe(1, 0.0), cutoff=30)
        coherent = build_state(Recipe(1, 0.0).then(Stage('displace', 0, {'alpha': 0.7})), cutoff=30)
        thermal = build_state(Recipe(1, 0.3), cutoff=30)
        assert np.isclose(fidelity(thermal, thermal), 1, atol=1e-8)
        assert np.isclose(fidelity(vacuum, coherent), np.exp(-0.49), atol=1e-8)
        # Vacuum against thermal: the vacuum population 1/(nu + 1).
        assert np.isclose(fidelity(vacuum, thermal), 1 / 1.3, atol=1e-8)
        return

    def test_shape_mismatch(self):
        with self.assertRaises(DomainError):
            fidelity(np.eye(3) / 3, np.eye(4) / 4)
        return


if __name__ == '__main__':
    unittest.main()
