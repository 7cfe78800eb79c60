# tests/integration/test_cli.py - g2lab command-line integration tests
"""
Integration tests for the g2lab command line.

Tests cover:
- Exit codes for passing, failing and invalid runs
- JSON reports on stdout and on disk
- Report layout against a golden file
- CSV series output
- Configuration files and the report directory variable
"""

import csv
import json
from pathlib import Path

import pytest

from cli.main import EXIT_FAILED, EXIT_OK, EXIT_USAGE, build_parser, run

GOLDEN = Path(__file__).resolve().parent.parent / 'golden'


def _report(capsys):
    return json.loads(capsys.readouterr().out)


def _verdict(report, name):
    return next(v for v in report['verdicts'] if v['name'] == name)


@pytest.mark.integration
class TestParser:
    """Tests for argument parsing."""

    def test_subcommands(self):
        """Test that every subcommand parses with its required arguments."""
        parser = build_parser()
        for argv in (['decompose', 'phi0'], ['hessian', '--family', 'P0+'], ['verify-lemma', 'p0'],
                     ['unbounded', '--sign', '+'], ['saddle', '--sign', '-'], ['coflow'],
                     ['hk-bound'], ['glue']):
            assert parser.parse_args(argv).command == argv[0]

    def test_common_flags_after_subcommand(self):
        """Test that shared flags are accepted after the subcommand."""
        args = build_parser().parse_args(['hk-bound', '--seed', '3', '--samples', '100'])
        assert (args.seed, args.samples) == (3, 100)

    def test_hessian_family_is_a_flag(self):
        """Test that hessian takes its family through --family."""
        assert build_parser().parse_args(['hessian', '--family', 'CH-']).family == 'CH-'

    def test_saddle_defaults_to_five_bumps(self):
        """Test the default bump count of saddle."""
        assert build_parser().parse_args(['saddle', '--sign', '+']).k == 5

    def test_unset_flags_are_absent(self):
        """Test that unset shared flags do not appear on the namespace."""
        args = build_parser().parse_args(['hk-bound'])
        assert not hasattr(args, 'seed')


@pytest.mark.integration
class TestExitCodes:
    """Tests for the exit code contract."""

    def test_passing_run(self, capsys):
        """Test hk-bound passes and prints a report."""
        assert run(['hk-bound', '--eta', '1']) == EXIT_OK
        report = _report(capsys)
        assert report['command'] == 'hk-bound'
        assert report['passed'] is True
        assert _verdict(report, 'saturation')['passed'] is True

    def test_help_is_success(self):
        """Test that --help exits cleanly."""
        assert run(['--help']) == EXIT_OK

    @pytest.mark.parametrize('argv', [
        [],
        ['integrate'],
        ['unbounded'],
        ['unbounded', '--sign', 'x'],
        ['unbounded', '--sign', '+', '--nu', 'most'],
        ['hk-bound', '--method', 'simpson'],
        ['hk-bound', '--log-level', 'LOUD'],
        ['hessian'],
        ['hessian', 'P0+'],
    ])
    def test_usage_errors(self, argv):
        """Test that invalid invocations exit with 2."""
        assert run(argv) == EXIT_USAGE

    def test_missing_config_file(self, tmp_path):
        """Test that an explicit missing config is a usage error."""
        assert run(['hk-bound', '--config', str(tmp_path / 'missing.toml')]) == EXIT_USAGE

    def test_unknown_family_is_usage_error(self):
        """Test that an unknown family name exits with 2."""
        assert run(['hessian', '--family', 'Q7+']) == EXIT_USAGE

    def test_library_error_fails_run(self, capsys):
        """Test that a GlueError is reported as a failed run."""
        assert run(['glue', '--delta', '1e-9']) == EXIT_FAILED
        report = _report(capsys)
        assert report['passed'] is False
        assert 'δ' in report['error']

    def test_irreducible_grade_fails_run(self, capsys):
        """Test that decomposing a 1-form is reported, not crashed."""
        assert run(['decompose', 'dx[1]']) == EXIT_FAILED
        assert _report(capsys)['error']

    def test_bad_literal_fails_run(self, capsys):
        """Test that an unparsable form literal fails the run."""
        assert run(['decompose', 'dx[1,1]']) == EXIT_FAILED
        assert 'repeated axis' in _report(capsys)['error']


@pytest.mark.integration
class TestCommands:
    """Tests for individual subcommands."""

    def test_decompose_two_form(self, capsys):
        """Test decomposing dx12 into its 7 and 14 parts."""
        assert run(['decompose', 'dx[1,2]']) == EXIT_OK
        report = _report(capsys)
        assert report['values']['orbit']['value'] == 'compact-G2'
        assert report['values']['ranks']['value'] == {'7': 7, '14': 14}
        assert _verdict(report, 'reconstruction')['passed'] is True

    def test_decompose_against_split_structure(self, capsys):
        """Test the split structure decomposition of a 3-form."""
        assert run(['decompose', 'dx[1,2,3]', '--structure', 'phi0~']) == EXIT_OK
        report = _report(capsys)
        assert report['values']['orbit']['value'] == 'split-G2'
        assert set(report['values']['ranks']['value']) == {'1', '7', '27'}

    def test_hessian_moment_reduction(self, capsys):
        """Test the second variation of SG4- is negative."""
        assert run(['hessian', '--family', 'SG4-']) == EXIT_OK
        report = _report(capsys)
        assert report['values']['second_variation']['value'] < 0
        assert report['quadrature']['method'] == 'moment-reduction'

    def test_hessian_family_flag(self, capsys):
        """Test `hessian --family CH-` gives a negative value."""
        assert run(['hessian', '--family', 'CH-']) == EXIT_OK
        report = _report(capsys)
        assert report['parameters']['family'] == 'CH-'
        assert report['values']['second_variation']['value'] < 0

    def test_saddle(self, capsys):
        """Test a positive-definite Gram matrix for two P0+ bumps."""
        assert run(['saddle', '--k', '2', '--sign', '+']) == EXIT_OK
        gram = _report(capsys)['values']['gram']['value']
        assert gram[0][1] == 0.0
        assert gram[0][0] > 0

    def test_glue(self, capsys):
        """Test gluing with the default ε and δ."""
        assert run(['glue']) == EXIT_OK
        assert _verdict(_report(capsys), 'model_on_inner_ball')['passed'] is True

    def test_report_written_to_file(self, report_dir, capsys):
        """Test --out writes the report and keeps stdout clean."""
        path = report_dir / 'hk.json'
        assert run(['hk-bound', '--out', str(path)]) == EXIT_OK
        assert capsys.readouterr().out == ''
        assert json.loads(path.read_text())['parameters'] == {'eta': 1.0}

    def test_hk_bound_layout_matches_golden_file(self, capsys):
        """Test the hk-bound report keys against tests/golden/hk_bound_layout.json."""
        assert run(['hk-bound']) == EXIT_OK
        report = _report(capsys)
        layout = {
            'keys': sorted(report),
            'parameters': report['parameters'],
            'quadrature': report['quadrature'],
            'values': {name: sorted(entry) for name, entry in report['values'].items()},
            'verdicts': [{'keys': sorted(v), 'name': v['name']} for v in report['verdicts']],
        }
        golden = json.loads((GOLDEN / 'hk_bound_layout.json').read_text(encoding='utf-8'))
        assert layout == golden

    def test_report_directory_variable(self, report_dir, monkeypatch):
        """Test that relative outputs land in G2LAB_REPORT_DIR."""
        monkeypatch.setenv('G2LAB_REPORT_DIR', str(report_dir))
        assert run(['hk-bound', '--out', 'hk.json']) == EXIT_OK
        assert (report_dir / 'hk.json').exists()

    def test_coflow_csv(self, report_dir):
        """Test coflow writes one CSV row per step plus the start."""
        path = report_dir / 'coflow.csv'
        argv = ['coflow', '--grid', '16', '--dt', '1e-6', '--steps', '2',
                '--out', str(report_dir / 'coflow.json'), '--csv', str(path)]
        assert run(argv) == EXIT_OK
        with open(path, newline='') as handle:
            rows = list(csv.DictReader(handle))
        assert len(rows) == 3

    def test_config_file_is_recorded(self, tmp_path, capsys):
        """Test that the merged config appears in the report."""
        path = tmp_path / 'run.toml'
        path.write_text('[quadrature]\nseed = 42\n')
        assert run(['hk-bound', '--config', str(path)]) == EXIT_OK
        assert _report(capsys)['config']['quadrature']['seed'] == 42

    def test_flags_override_config(self, tmp_path, capsys):
        """Test that --seed beats the config file."""
        path = tmp_path / 'run.toml'
        path.write_text('[quadrature]\nseed = 42\n')
        assert run(['hk-bound', '--config', str(path), '--seed', '5']) == EXIT_OK
        assert _report(capsys)['config']['quadrature']['seed'] == 5

    @pytest.mark.slow
    def test_unbounded_single_round(self, capsys):
        """Test one round of the unboundedness iteration with a small sample budget."""
        code = run(['unbounded', '--sign', '-', '--rounds', '1', '--packing', 'nested-1',
                    '--samples', '20000'])
        report = _report(capsys)
        assert code == EXIT_OK, report
        assert len(report['values']['values']['value']) == 2
        assert _verdict(report, 'scale_invariance')['passed'] is True

    @pytest.mark.slow
    def test_unbounded_at_nu_tenth(self, capsys):
        """Test three rounds of growth on the default packing at ν = 0.1."""
        code = run(['unbounded', '--sign', '+', '--rounds', '3', '--nu', '0.1',
                    '--samples', '20000'])
        report = _report(capsys)
        assert code == EXIT_OK, report
        verdict = _verdict(report, 'monotone_growth')
        assert verdict['tolerance'] == report['values']['epsilon_hat']['value'] / 2
        assert all(r >= 1 + verdict['tolerance'] for r in verdict['measured'])
        assert report['values']['packing']['value']['covered_fraction'] >= 0.9
        assert report['values']['nu_choice']['nu'] == 0.1

    @pytest.mark.slow
    def test_unbounded_sparse_packing_fails(self, capsys):
        """Test that one ball per box cannot certify growth."""
        code = run(['unbounded', '--sign', '+', '--rounds', '1', '--packing', 'single',
                    '--samples', '20000'])
        assert code == EXIT_FAILED
        assert _verdict(_report(capsys), 'monotone_growth')['passed'] is False

    def test_unbounded_nu_beyond_coverage(self, capsys):
        """Test that ν = 0.1 on a single-scale grid is a failed run naming the deficit."""
        code = run(['unbounded', '--sign', '+', '--nu', '0.1', '--packing', 'grid-64'])
        assert code == EXIT_FAILED
        assert 'deficit' in _report(capsys)['error']

    @pytest.mark.slow
    def test_verify_lemma_taylor_for_each_family(self, capsys):
        """Test a Taylor verdict for both members of the split grade-3 group."""
        code = run(['verify-lemma', 'sg3', '--samples', '20000'])
        report = _report(capsys)
        for name in ('SG3+', 'SG3-'):
            verdict = _verdict(report, f'{name}_taylor_exponent')
            assert verdict['passed'] is True, report
            assert report['values'][f'{name}_taylor']['detail']['functional_remainder']
        assert code == EXIT_OK, report
