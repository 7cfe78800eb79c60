# tests/unit/test_config_report.py - Run configuration and report tests
"""
Unit tests for configuration loading and JSON/CSV reports.

Tests cover:
- Defaults, TOML files, environment variable and overrides
- Rejection of unknown names and wrong types
- Quadrature spec construction
- Report verdict aggregation and JSON safety
- Report layout against a golden file
- CSV series output
"""

import csv
import json
from pathlib import Path

import numpy as np
import pytest

from cli.config import DEFAULTS, load_config, quadrature_spec
from cli.report import SCHEMA_VERSION, Report, write_csv
from errors import ConfigError
from quadrature import MONTE_CARLO

GOLDEN = Path(__file__).resolve().parent.parent / 'golden'


@pytest.mark.unit
class TestLoadConfig:
    """Tests for layered configuration."""

    def test_defaults_without_file(self):
        """Test that no file yields the built-in defaults."""
        assert load_config() == DEFAULTS

    def test_file_overrides_defaults(self, tmp_path):
        """Test values from a TOML file."""
        path = tmp_path / 'run.toml'
        path.write_text('[quadrature]\nsamples = 1000\n\n[coflow]\ngrid = 32\n')
        config = load_config(str(path))
        assert config['quadrature']['samples'] == 1000
        assert config['coflow']['grid'] == 32
        assert config['coflow']['dt'] == DEFAULTS['coflow']['dt']

    def test_environment_variable(self, tmp_path, monkeypatch):
        """Test that G2LAB_CONFIG names the file when no path is given."""
        path = tmp_path / 'env.toml'
        path.write_text('[metric]\nmax_iters = 7\n')
        monkeypatch.setenv('G2LAB_CONFIG', str(path))
        assert load_config()['metric']['max_iters'] == 7

    def test_overrides_win(self, tmp_path):
        """Test that overrides beat the file."""
        path = tmp_path / 'run.toml'
        path.write_text('[quadrature]\nseed = 3\n')
        config = load_config(str(path), overrides={'quadrature': {'seed': 9}})
        assert config['quadrature']['seed'] == 9

    def test_none_override_is_ignored(self):
        """Test that unset flags leave the value alone."""
        config = load_config(overrides={'quadrature': {'seed': None}})
        assert config['quadrature']['seed'] == 0

    def test_int_accepted_for_float(self):
        """Test that an integer is a valid float setting."""
        assert load_config(overrides={'coflow': {'dt': 1}})['coflow']['dt'] == 1

    def test_defaults_are_not_mutated(self):
        """Test that loading never changes DEFAULTS."""
        load_config(overrides={'quadrature': {'samples': 5}})
        assert DEFAULTS['quadrature']['samples'] == 200_000

    @pytest.mark.parametrize('overrides', [
        {'plotting': {'dpi': 100}},
        {'quadrature': {'points': 5}},
        {'quadrature': {'samples': 'many'}},
        {'coflow': {'steps': 2.5}},
        {'bump': 0.3},
    ])
    def test_invalid_overrides(self, overrides):
        """Test that unknown names and wrong types raise ConfigError."""
        with pytest.raises(ConfigError):
            load_config(overrides=overrides)

    def test_missing_explicit_file(self, tmp_path):
        """Test that an explicit path must exist."""
        with pytest.raises(ConfigError):
            load_config(str(tmp_path / 'missing.toml'))

    def test_malformed_file(self, tmp_path):
        """Test that invalid TOML raises ConfigError."""
        path = tmp_path / 'bad.toml'
        path.write_text('[quadrature\nsamples = 1\n')
        with pytest.raises(ConfigError):
            load_config(str(path))


@pytest.mark.unit
class TestQuadratureSpec:
    """Tests for building quadrature settings from a config."""

    def test_spec_from_config(self):
        """Test that quadrature settings pick up method, samples and seed."""
        config = load_config(overrides={'quadrature': {'method': MONTE_CARLO, 'samples': 64,
                                                       'seed': 5}})
        spec = quadrature_spec(config)
        assert spec.stochastic
        assert (spec.samples, spec.seed) == (64, 5)

    def test_invalid_method(self):
        """Test that an unknown method surfaces as ConfigError."""
        config = load_config(overrides={'quadrature': {'method': 'simpson'}})
        with pytest.raises(ConfigError):
            quadrature_spec(config)


@pytest.mark.unit
class TestReport:
    """Tests for the report payload."""

    def test_schema_keys(self):
        """Test the top-level keys of a finished report."""
        payload = Report('hk-bound').finish().to_json()
        assert set(payload) == {
            'schema', 'command', 'version', 'parameters', 'config', 'quadrature', 'values',
            'verdicts', 'passed', 'error', 'wall_time_s',
        }
        assert payload['schema'] == SCHEMA_VERSION
        assert payload['wall_time_s'] >= 0

    def test_passed_requires_all_verdicts(self):
        """Test that one failing verdict fails the report."""
        report = Report('saddle')
        report.add_verdict('definite', True)
        assert report.passed
        report.add_verdict('off_diagonal', False, tolerance=1e-12, measured=1e-3)
        assert not report.passed

    def test_error_fails_report(self):
        """Test that a recorded error fails the report."""
        report = Report('glue')
        report.fail(ValueError('no η in the grid'))
        assert not report.passed
        assert report.to_json()['error'] == 'no η in the grid'

    def test_numpy_values_are_plain(self):
        """Test that numpy scalars, arrays and non-finite floats serialize."""
        report = Report('hessian')
        report.add_value('matrix', np.eye(2), error=np.float64(0.5))
        report.add_value('ratio', float('nan'))
        report.add_verdict('sign', np.bool_(True))
        payload = json.loads(report.dumps())
        assert payload['values']['matrix'] == {'value': [[1.0, 0.0], [0.0, 1.0]], 'error': 0.5}
        assert payload['values']['ratio']['value'] is None

    def test_matches_golden_file(self):
        """Test a fixed report against tests/golden/report_saddle.json."""
        report = Report('saddle', parameters={'k': 2, 'sign': '+'},
                        config={'quadrature': {'seed': 0}},
                        quadrature={'method': 'monte-carlo', 'samples': 100})
        report.add_value('gram', [[1.5, 0.0], [0.0, 1.5]], error=0.25)
        report.add_value('ratio', float('nan'), detail={'rounds': 3})
        report.add_verdict('definite', True, 0.0, 1.5)
        report.add_verdict('off_diagonal', False, 1e-12, 1e-3)
        payload = json.loads(report.dumps())
        payload['version'] = '<version>'
        golden = json.loads((GOLDEN / 'report_saddle.json').read_text(encoding='utf-8'))
        assert payload == golden

    def test_write_creates_directory(self, tmp_path):
        """Test that write() creates missing parent directories."""
        path = tmp_path / 'nested' / 'report.json'
        Report('decompose').finish().write(str(path))
        assert json.loads(path.read_text())['command'] == 'decompose'


@pytest.mark.unit
class TestCsv:
    """Tests for CSV series output."""

    def test_rows_written_with_header(self, tmp_path):
        """Test header and rows from a list of dicts."""
        path = tmp_path / 'series.csv'
        write_csv(str(path), [{'t': 0.0, 'H4': 1.5}, {'t': 1e-6, 'H4': np.float64(1.6)}])
        with open(path, newline='') as handle:
            rows = list(csv.DictReader(handle))
        assert rows == [{'t': '0.0', 'H4': '1.5'}, {'t': '1e-06', 'H4': '1.6'}]
