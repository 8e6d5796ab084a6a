"""
Tests gqcrb/cli.py: the subcommands, their outputs and exit codes.
"""
import contextlib
import io
import json
import pathlib
import tempfile
import unittest

import numpy as np
import pandas as pd

from gqcrb import cli


def run(argv):
    """Runs the CLI and returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli.main(argv)
    return code, out.getvalue(), err.getvalue()


class Test_cli(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.dir = pathlib.Path(self._tmp.name)
        return

    def tearDown(self):
        self._tmp.cleanup()
        return

    def write_config(self, data, name='config.json'):
        path = self.dir / name
        path.write_text(data if isinstance(data, str) else json.dumps(data))
        return str(path)

    def test_list_scenarios(self):
        code, out, _ = run(['list-scenarios'])
        assert code == 0
        for name in ('phase-tmsv', 'displacement-pair', 'damping-temperature', 'squeeze-phase'):
            assert name in out
        return

    def test_qfi(self):
        """
        The lossless interferometer at r = 1 has F = sinh^2 2; the pure state leaves the
        RLD undefined.
        """
        config = self.write_config({'name': 'phase-tmsv', 'insertion': 'after-bs', 'parameters': {'r': 1.0}})
        out_path = self.dir / 'report.json'
        code, _, _ = run(['qfi', config, '--out', str(out_path)])
        assert code == 0
        report = json.loads(out_path.read_text())
        assert np.isclose(report['F_sld'][0][0], 13.154114, rtol=1e-7)
        assert report['rld_defined'] is False
        assert report['scenario']['name'] == 'phase-tmsv'
        return

    def test_qfi_run_object(self):
        """
        A run object carries the scenario and the flavor.
        """
        config = self.write_config(
            {
                'scenario': {'name': 'displacement-pair', 'parameters': {'r': 0.5, 'nu_T': 0.2}},
                'flavor': 'sld',
            }
        )
        code, out, _ = run(['qfi', config])
        assert code == 0
        report = json.loads(out)
        assert report['rld_error'] == 'not requested'
        assert report['B_S'] > 0
        return

    def test_bad_input(self):
        """
        Unreadable configs exit with 1, invalid scenarios with 2.
        """
        code, _, err = run(['qfi', str(self.dir / 'missing.json')])
        assert code == 1
        assert 'ConfigReadError' in err
        code, _, _ = run(['qfi', self.write_config('{"name": ')])
        assert code == 1
        config = self.write_config({'name': 'phase-tmsv', 'parameters': {'s': 1.0}})
        code, _, err = run(['qfi', config])
        assert code == 2
        assert 'DomainError' in err
        return

    def test_non_object_config(self):
        """
        A config that parses but is not a JSON object is unreadable input.
        """
        code, _, err = run(['qfi', self.write_config('[1, 2]')])
        assert code == 1
        assert 'ConfigReadError' in err
        return

    def test_records_json_precision(self):
        """
        JSON tables keep every digit of a float64 and write missing cells as null.
        """
        value = 0.1 + 0.2
        table = pd.DataFrame({'r': [value, 1 / 3], 'B_R': [np.nan, np.pi]})
        records = json.loads(cli.records_json(table))
        assert records[0]['r'] == value
        assert records[1]['r'] == 1 / 3
        assert records[0]['B_R'] is None
        assert records[1]['B_R'] == np.pi
        return

    def test_sweep_config(self):
        """
        A configured sweep writes a CSV table with one row per step.
        """
        config = self.write_config(
            {
                'scenario': {'name': 'phase-tmsv', 'parameters': {'eps1': 0.9, 'eps2': 0.9}},
                'sweep': {'param': 'r', 'from': 0.2, 'to': 1.0, 'steps': 5},
            }
        )
        out_path = self.dir / 'sweep.csv'
        code, _, _ = run(['sweep', config, '--out', str(out_path), '--workers', '2'])
        assert code == 0
        table = pd.read_csv(out_path)
        assert list(table.columns) == ['r', 'F_sld_trace', 'F_rld_trace', 'B_S', 'B_R']
        assert len(table) == 5
        return

    def test_sweep_json_and_missing_sweep(self):
        config = self.write_config(
            {
                'scenario': {'name': 'squeeze-phase'},
                'sweep': {'param': 's', 'from': 0.5, 'to': 1.0, 'steps': 2},
            }
        )
        code, out, _ = run(['sweep', config, '--format', 'json', '--workers', '1'])
        assert code == 0
        assert len(json.loads(out)) == 2
        code, _, err = run(['sweep', self.write_config({'name': 'squeeze-phase'}, 'bare.json')])
        assert code == 2
        assert 'DomainError' in err
        return

    def test_sweep_preset(self):
        out_path = self.dir / 'fig2b.csv'
        code, _, _ = run(['sweep', '--preset', 'fig2b', '--out', str(out_path)])
        assert code == 0
        table = pd.read_csv(out_path)
        assert list(table.columns) == ['r', 'B_R', 'B_S', 'B_M']
        assert len(table) == 61
        return

    def test_oracle_check(self):
        """
        The engine and the oracle agree for a squeezed thermal state.
        """
        config = self.write_config(
            {'name': 'squeeze-phase', 'parameters': {'s': 0.3, 'nu_T': 0.3}}
        )
        code, out, _ = run(['oracle-check', config, '--cutoff', '30'])
        assert code == 0
        assert out.strip().endswith('PASS')
        return

    def test_argparse_exits(self):
        """
        --version and a missing subcommand exit through argparse.
        """
        with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit):
                cli.main(['--version'])
            with self.assertRaises(SystemExit):
                cli.main([])
        return


if __name__ == '__main__':
    unittest.main()
