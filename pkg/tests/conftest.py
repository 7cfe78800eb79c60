# tests/conftest.py - Shared pytest fixtures for G2 Variational Lab
"""
Shared fixtures for all G2 Variational Lab tests.

Fixtures provided:
- app: Flask app instance with test configuration
- client: Flask test client
- run_config: Default run configuration with a small Monte-Carlo budget
- report_dir: Temporary directory for CLI reports
- compact_structure / split_structure: Model structures from the 3-forms
- mc_spec / moment_spec: Quadrature specifications
"""

import os
import sys

import pytest

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))


@pytest.fixture(autouse=True)
def isolated_environment(monkeypatch, tmp_path):
    """
    Keep tests away from a developer's config file and report directory.
    Runs from a fresh directory so config/g2lab.toml is not picked up.
    """
    for name in ('G2LAB_CONFIG', 'G2LAB_LOG_LEVEL', 'G2LAB_REPORT_DIR'):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
    yield tmp_path


@pytest.fixture
def run_config():
    """
    Default configuration with a Monte-Carlo budget small enough for unit tests.

    Returns:
        dict: Merged run configuration
    """
    from cli.config import load_config

    return load_config(overrides={'quadrature': {'samples': 20_000}})


@pytest.fixture
def app(run_config):
    """
    Create and configure a Flask app for testing.

    Yields:
        Flask: Configured Flask application
    """
    from app import create_app

    app = create_app({
        'TESTING': True,
        'G2LAB_RUN_CONFIG': run_config,
    })

    yield app


@pytest.fixture
def client(app):
    """
    Create a test client for the app.

    Returns:
        TestClient: Flask test client
    """
    return app.test_client()


@pytest.fixture
def report_dir(tmp_path):
    """
    Directory for CLI report and CSV output.

    Returns:
        pathlib.Path: Empty directory
    """
    path = tmp_path / 'reports'
    path.mkdir()
    return path


# ==================== Structure Fixtures ====================

@pytest.fixture
def compact_structure():
    from exterior.models import PHI0
    from g2structure.structure import classify_and_metric_3

    return classify_and_metric_3(PHI0)


@pytest.fixture
def split_structure():
    from exterior.models import PHI0_SPLIT
    from g2structure.structure import classify_and_metric_3

    return classify_and_metric_3(PHI0_SPLIT)


# ==================== Quadrature Fixtures ====================

@pytest.fixture
def moment_spec():
    from quadrature.domains import QuadratureSpec

    return QuadratureSpec.moment_reduction()


@pytest.fixture
def mc_spec():
    from quadrature.domains import QuadratureSpec

    return QuadratureSpec.monte_carlo(samples=20_000, seed=7)
