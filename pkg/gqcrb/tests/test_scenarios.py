"""
Tests gqcrb/analysis/scenarios.py: the scenario configs, and the engine against the
closed-form expressions.
"""
import itertools
import unittest

import numpy as np

from gqcrb.analysis.logderiv import analyze, bound_rld, qfi_matrix
from gqcrb.analysis.scenarios import (
    SCENARIOS,
    ScenarioConfig,
    build_family,
    damping_qfi_closed,
    displacement_bounds_closed,
    phase_measurement_variance,
    phase_measurement_variance_closed,
    phase_qfi_closed,
    probe_energy,
    squeeze_phase_qfi_closed,
)
from gqcrb.exceptions import ClosedFormUndefinedError, DivergingSensitivityError, DomainError


class Test_ScenarioConfig(unittest.TestCase):
    def test_defaults(self):
        """
        Missing parameters, insertions and probes take the scenario defaults.
        """
        config = ScenarioConfig('phase-tmsv', parameters={'r': 0.5})
        assert config.insertion == 'after-bs'
        assert config.probe == 'tmsv'
        assert config['eps1'] == 1.0
        assert config['r'] == 0.5
        assert config.param_names == ['phi']
        assert np.allclose(config.theta(), [0.0])
        assert ScenarioConfig('squeeze-phase').probe == 'single'
        assert ScenarioConfig('displacement-pair').insertion is None
        return

    def test_validation(self):
        """
        Unknown names, variants and parameters, and out-of-range values raise DomainError.
        """
        with self.assertRaises(DomainError):
            ScenarioConfig('teleportation')
        with self.assertRaises(DomainError):
            ScenarioConfig('phase-tmsv', insertion='inside-bs')
        with self.assertRaises(DomainError):
            ScenarioConfig('phase-tmsv', probe='single')
        with self.assertRaises(DomainError):
            ScenarioConfig('phase-tmsv', parameters={'s': 1})
        with self.assertRaises(DomainError):
            ScenarioConfig('phase-tmsv', parameters={'eps1': 1.1})
        with self.assertRaises(DomainError):
            ScenarioConfig('squeeze-phase', parameters={'nu_T': -0.1})
        with self.assertRaises(DomainError):
            ScenarioConfig('phase-tmsv', parameters={'r': 'large'})
        with self.assertRaises(DomainError):
            ScenarioConfig('damping-temperature', parameters={'gamma': 0.1, 'xi': 0.1})
        return

    def test_gamma(self):
        """
        The damping can be given as gamma; it is stored as xi = e^gamma - 1.
        """
        config = ScenarioConfig('damping-temperature', parameters={'gamma': np.log(1.5), 'N': 0.4})
        assert np.isclose(config['xi'], 0.5)
        assert np.allclose(config.theta(), [np.log(1.5), 0.4])
        return

    def test_replace_and_dict(self):
        """
        replace() and the dict form keep the scenario variant.
        """
        config = ScenarioConfig('phase-tmsv', 'before-bs', parameters={'r': 0.3})
        other = config.replace(r=0.9, N=0.1)
        assert other.insertion == 'before-bs'
        assert other['r'] == 0.9 and other['N'] == 0.1
        copy = ScenarioConfig.from_dict(other.to_dict())
        assert copy == other
        copy = ScenarioConfig.from_json('{"name": "squeeze-phase", "parameters": {"s": 0.2}}')
        assert copy['s'] == 0.2
        with self.assertRaises(DomainError):
            ScenarioConfig.from_dict({'parameters': {}})
        assert build_family(other.to_dict()).param_names == ['phi']
        return

    def test_registry(self):
        """
        Every scenario builds a family with its declared parameters.
        """
        for name, scenario in SCENARIOS.items():
            config = ScenarioConfig(name)
            family = build_family(config)
            assert family.param_names == list(scenario.param_names)
            assert family.has_recipe
        return


class Test_phase(unittest.TestCase):
    def test_closed_form(self):
        """
        The closed phase QFI at the lossless and the lossy reference points.
        """
        after = ScenarioConfig('phase-tmsv', 'after-bs', parameters={'r': 1.0})
        before = ScenarioConfig('phase-tmsv', 'before-bs', parameters={'r': 1.0})
        assert np.isclose(phase_qfi_closed(after), np.sinh(2) ** 2)
        assert np.isclose(phase_qfi_closed(before), 2 * np.sinh(2) ** 2)
        lossy = after.replace(eps1=0.8, eps2=0.8, N=0.2)
        assert np.isclose(phase_qfi_closed(lossy), 4.94651, rtol=1e-5)
        return

    def test_engine(self):
        """
        The engine reproduces the closed form for both insertions over a parameter grid.
        """
        for insertion in ('after-bs', 'before-bs'):
            for r in (0.2, 0.8, 1.3):
                for eps1, eps2, N in ((1.0, 1.0, 0.0), (0.8, 0.6, 0.2), (0.5, 1.0, 1.0)):
                    config = ScenarioConfig(
                        'phase-tmsv',
                        insertion,
                        parameters={'r': r, 'eps1': eps1, 'eps2': eps2, 'N': N, 'phi': 0.4},
                    )
                    F = qfi_matrix(build_family(config), config.theta())[0, 0]
                    assert np.isclose(F, phase_qfi_closed(config), rtol=1e-8), config
        return

    def test_measurement_variance(self):
        """
        At phi = 0 the quadratic readout saturates the QFI; away from it the engine follows
        the closed expression.
        """
        config = ScenarioConfig('phase-tmsv', 'after-bs', parameters={'r': 1.0})
        assert np.isclose(phase_measurement_variance(config), 1 / 13.154114, rtol=1e-6)
        before = ScenarioConfig('phase-tmsv', 'before-bs', parameters={'r': 1.0})
        assert np.isclose(phase_measurement_variance(before), 1 / 26.308229, rtol=1e-6)

        lossy = config.replace(eps1=0.8, eps2=0.9, N=0.2)
        assert np.isclose(
            phase_measurement_variance(lossy), 1 / phase_qfi_closed(lossy), rtol=1e-9
        )
        assert np.isclose(
            phase_measurement_variance(lossy, 0.3),
            phase_measurement_variance_closed(lossy, 0.3),
            rtol=1e-9,
        )
        assert np.isclose(
            phase_measurement_variance_closed(before.replace(eps1=0.7)),
            1 / phase_qfi_closed(before.replace(eps1=0.7)),
        )
        return

    def test_diverging(self):
        """
        At phi = pi/2 the after-bs signal slope vanishes.
        """
        config = ScenarioConfig('phase-tmsv', 'after-bs', parameters={'r': 1.0})
        with self.assertRaises(DivergingSensitivityError):
            phase_measurement_variance(config, np.pi / 2)
        with self.assertRaises(DivergingSensitivityError):
            phase_measurement_variance_closed(config, np.pi / 2)
        return


class Test_displacement(unittest.TestCase):
    def test_reference_points(self):
        """
        B_S = 0.7 for nu_T = 0.2 and B_S = 0.5 for the vacuum probe at r = 0.
        """
        config = ScenarioConfig('displacement-pair', parameters={'nu_T': 0.2})
        assert np.isclose(displacement_bounds_closed(config)[1], 0.7)
        assert np.isclose(analyze(build_family(config), config.theta()).B_S, 0.7)
        vacuum = ScenarioConfig('displacement-pair')
        assert np.isclose(analyze(build_family(vacuum), vacuum.theta()).B_S, 0.5)
        with self.assertRaises(ClosedFormUndefinedError):
            displacement_bounds_closed(vacuum)
        return

    def test_engine(self):
        """
        Engine B_R and B_S follow the closed forms, and the homodyne sum stays above both.
        """
        for eps1, eps2 in ((0.9, 1.0), (0.9, 0.9)):
            for r in (0.0, 0.3, 0.6, 1.2):
                config = ScenarioConfig(
                    'displacement-pair',
                    parameters={'r': r, 'nu_T': 0.2, 'eps1': eps1, 'eps2': eps2, 'lambda_R': 0.1},
                )
                B_R, B_S, B_M = displacement_bounds_closed(config)
                report = analyze(build_family(config), config.theta())
                assert np.isclose(report.B_S, B_S, rtol=1e-9), config
                assert np.isclose(report.B_R, B_R, rtol=1e-8), config
                assert B_M >= max(B_R, B_S)
        return

    def test_lossless_grid(self):
        """
        Without loss the engine B_R equals the closed form to 1e-9 for nu_T = 0.2 and
        r = 0.1, 0.2, ..., 1.0.
        """
        for r in np.linspace(0.1, 1.0, 10):
            config = ScenarioConfig(
                'displacement-pair',
                parameters={'r': float(r), 'nu_T': 0.2, 'eps1': 1.0, 'eps2': 1.0},
            )
            B_R, B_S, _ = displacement_bounds_closed(config)
            report = analyze(build_family(config), config.theta())
            assert np.isclose(report.B_R, B_R, rtol=1e-9, atol=0), config
            assert np.isclose(report.B_S, B_S, rtol=1e-9, atol=0), config
        return


class Test_damping(unittest.TestCase):
    def setUp(self):
        self.config = ScenarioConfig(
            'damping-temperature', probe='tmsv', parameters={'r': 1.0, 'xi': 0.5, 'N': 0.9}
        )
        return

    def test_closed_form(self):
        """
        F_rld[N, N] = 1/Y and the SLD temperature information at xi = 0.5, N = 0.9, r = 1.
        """
        F_rld, F_sld = damping_qfi_closed(self.config)
        assert np.isclose(F_rld[1, 1].real, 1 / 1.71)
        assert np.isclose(F_sld[1, 1], 0.434211, rtol=1e-5)
        for r, xi in ((0.2, 0.1), (1.4, 3.0)):
            F_rld, _ = damping_qfi_closed(self.config.replace(r=r, xi=xi))
            assert np.isclose(F_rld[1, 1].real, 1 / 1.71)
        return

    def test_engine(self):
        """
        On the whole grid the engine matches the closed forms, the SLD bound is the tighter
        one, and the single-mode probe is asymptotically attainable.
        """
        for xi, N, r in itertools.product((0.2, 0.5, 1.0), (0.5, 0.9), (0.3, 0.7, 1.0)):
            config = self.config.replace(r=r, xi=xi, N=N)
            F_rld, F_sld = damping_qfi_closed(config)
            report = analyze(build_family(config), config.theta())
            assert np.allclose(report.F_sld, F_sld, rtol=1e-9, atol=1e-10), config
            assert np.allclose(report.F_rld, F_rld, rtol=1e-9, atol=1e-10), config
            assert report.B_S >= report.B_R, config

            single = ScenarioConfig(
                'damping-temperature', probe='single', parameters={'r': r, 'xi': xi, 'N': N}
            )
            T = analyze(build_family(single), single.theta()).T_attain
            assert np.allclose(T, 0, atol=1e-6), single
        return

    def test_large_damping(self):
        """
        For strong damping the state forgets the probe: F_NN tends to 1/Y and the damping
        information fades.
        """
        strong = self.config.replace(xi=50.0)
        F_strong = qfi_matrix(build_family(strong), strong.theta())
        F_weak = qfi_matrix(build_family(self.config), self.config.theta())
        assert np.isclose(F_strong[1, 1], 1 / 1.71, rtol=0.05)
        assert F_strong[0, 0] < F_weak[0, 0]
        return

    def test_undefined(self):
        """
        The closed forms need N > 0 and the undisplaced TMSV probe.
        """
        with self.assertRaises(ClosedFormUndefinedError):
            damping_qfi_closed(self.config.replace(N=0.0))
        with self.assertRaises(ClosedFormUndefinedError):
            damping_qfi_closed(ScenarioConfig('damping-temperature', probe='single'))
        with self.assertRaises(ClosedFormUndefinedError):
            damping_qfi_closed(self.config.replace(lambda0=0.5))
        return

    def test_single_probe(self):
        """
        Both probes are asymptotically attainable, so the SLD bound is the tighter one.
        """
        for probe in ('single', 'tmsv'):
            config = ScenarioConfig(
                'damping-temperature', probe=probe, parameters={'r': 0.8, 'xi': 0.5, 'N': 0.9}
            )
            report = analyze(build_family(config), config.theta())
            assert np.allclose(report.F_rld, report.F_rld.conj().T)
            assert np.allclose(report.T_attain, 0, atol=1e-9)
            assert report.B_S >= report.B_R
        return


class Test_squeeze_phase(unittest.TestCase):
    def test_thermal_probe(self):
        """
        A thermal probe with nu_T = 0.1 has F_sld[s, s] = 2 y^2/(2Y + 1); a unit coherent
        amplitude adds 4/y.
        """
        config = ScenarioConfig('squeeze-phase', parameters={'s': 1.0, 'nu_T': 0.1})
        F = qfi_matrix(build_family(config), config.theta())
        assert np.isclose(F[0, 0], 2.360656, rtol=1e-6)
        assert np.isclose(F[0, 1], 0, atol=1e-9)
        coherent = config.replace(lambda0=1.0)
        F = qfi_matrix(build_family(coherent), coherent.theta())
        assert np.isclose(F[0, 0], 2.360656 + 4 / 1.2, rtol=1e-6)
        return

    def test_engine(self):
        """
        The engine matches the closed forms at phi = 0. The off-diagonal RLD entry is purely
        imaginary; its orientation does not enter the bound.
        """
        for s, r, nu_T, lambda0 in ((1.0, 0.0, 0.1, 0.0), (0.5, 0.3, 0.4, 0.7), (1.2, 0.6, 0.2, 1.5)):
            config = ScenarioConfig(
                'squeeze-phase', parameters={'s': s, 'r': r, 'nu_T': nu_T, 'lambda0': lambda0}
            )
            F_rld, F_sld = squeeze_phase_qfi_closed(config)
            family = build_family(config)
            engine_sld = qfi_matrix(family, config.theta(), 'SLD')
            engine_rld = qfi_matrix(family, config.theta(), 'RLD')
            assert np.allclose(engine_sld, F_sld, rtol=1e-8, atol=1e-9), config
            assert np.allclose(np.diag(engine_rld).real, np.diag(F_rld).real, rtol=1e-8), config
            assert np.isclose(abs(engine_rld[0, 1]), abs(F_rld[0, 1]), rtol=1e-8), config
            assert np.isclose(abs(engine_rld[0, 1].real), 0, atol=1e-9)
            assert np.isclose(bound_rld(engine_rld), bound_rld(F_rld), rtol=1e-8)
        return

    def test_undefined(self):
        """
        Closed forms need the single-mode probe at phi = 0 and a thermal probe.
        """
        with self.assertRaises(ClosedFormUndefinedError):
            squeeze_phase_qfi_closed(ScenarioConfig('squeeze-phase', parameters={'phi': 0.1}))
        with self.assertRaises(ClosedFormUndefinedError):
            squeeze_phase_qfi_closed(ScenarioConfig('squeeze-phase', parameters={'nu_T': 0.0}))
        with self.assertRaises(ClosedFormUndefinedError):
            squeeze_phase_qfi_closed(
                ScenarioConfig('squeeze-phase', probe='two-mode-squeezed-thermal')
            )
        return

    def test_probe_energy(self):
        """
        n = |lambda|^2 + (nu_T + 1/2) cosh 2r - 1/2 for the single-mode probe.
        """
        config = ScenarioConfig('squeeze-phase', parameters={'r': 0.5, 'nu_T': 0.1, 'lambda0': 0.3})
        assert np.isclose(probe_energy(config), 0.09 + 0.6 * np.cosh(1.0) - 0.5)
        config = ScenarioConfig(
            'squeeze-phase', probe='two-mode-squeezed-thermal', parameters={'r': 0.5, 'nu_T': 0.1}
        )
        assert np.isclose(probe_energy(config), 0.6 * np.cosh(1.0) - 0.5)
        return


if __name__ == '__main__':
    unittest.main()
