# tests/integration/test_api.py - Verification API integration tests
"""
Integration tests for the verification API endpoints.

Tests cover:
- Health, index and family table
- Type decomposition of posted forms
- Second variations and the flat-ball bound
- Validation errors and JSON error envelopes
"""

import pytest


@pytest.mark.integration
@pytest.mark.api
class TestServiceAPI:
    """Tests for the service endpoints."""

    def test_health(self, client):
        """Test the health endpoint."""
        response = client.get('/api/health')

        assert response.status_code == 200
        data = response.get_json()
        assert data['success'] is True
        assert data['status'] == 'running'

    def test_index_lists_endpoints(self, client):
        """Test the index payload."""
        response = client.get('/')

        assert response.status_code == 200
        assert '/api/hessian' in response.get_json()['endpoints'].values()

    def test_security_headers(self, client):
        """Test that responses carry the security headers."""
        response = client.get('/api/health')

        assert response.headers['X-Content-Type-Options'] == 'nosniff'
        assert response.headers['X-Frame-Options'] == 'DENY'

    def test_families(self, client):
        """Test the family table."""
        response = client.get('/api/families')

        assert response.status_code == 200
        families = response.get_json()['families']
        assert len(families) == 7
        signs = {f['name']: f['sign'] for f in families}
        assert signs['P0+'] == '+'
        assert signs['CH-'] == '-'

    def test_unknown_endpoint(self, client):
        """Test the JSON 404 envelope under /api/."""
        response = client.get('/api/projects')

        assert response.status_code == 404
        assert response.get_json()['success'] is False

    def test_wrong_method(self, client):
        """Test the JSON 405 envelope under /api/."""
        response = client.get('/api/hessian')

        assert response.status_code == 405
        assert response.get_json()['success'] is False


@pytest.mark.integration
@pytest.mark.api
class TestDecomposeAPI:
    """Tests for POST /api/decompose."""

    def test_decompose_three_form(self, client):
        """Test decomposing φ0 against itself."""
        response = client.post('/api/decompose', json={'form': 'phi0'})

        assert response.status_code == 200
        report = response.get_json()['report']
        assert report['passed'] is True
        assert report['values']['component_1']['value']

    def test_decompose_split(self, client):
        """Test a 2-form against the split structure."""
        response = client.post('/api/decompose',
                               json={'form': 'dx[1,2] - dx[4,7]', 'structure': 'phi0~'})

        assert response.status_code == 200
        assert response.get_json()['report']['values']['orbit']['value'] == 'split-G2'

    @pytest.mark.parametrize('body', [{}, {'form': ''}, {'form': 3}])
    def test_missing_form(self, client, body):
        """Test that a form string is required."""
        response = client.post('/api/decompose', json=body)

        assert response.status_code == 400
        assert response.get_json()['error'] == 'form is required'

    def test_bad_literal(self, client):
        """Test that an unparsable literal is a 400."""
        response = client.post('/api/decompose', json={'form': 'dx[1,9]'})

        assert response.status_code == 400
        assert response.get_json()['success'] is False

    def test_non_json_body(self, client):
        """Test that a non-JSON body counts as missing fields."""
        response = client.post('/api/decompose', data='phi0', content_type='text/plain')

        assert response.status_code == 400


@pytest.mark.integration
@pytest.mark.api
class TestHessianAPI:
    """Tests for POST /api/hessian and /api/hk-bound."""

    def test_hessian_sign(self, client):
        """Test that P0+ has a positive second variation."""
        response = client.post('/api/hessian', json={'family': 'P0+', 'eta': 0.5})

        assert response.status_code == 200
        report = response.get_json()['report']
        assert report['passed'] is True
        assert report['values']['second_variation']['value'] > 0
        assert report['parameters'] == {'family': 'P0+', 'eta': 0.5}

    def test_quadrature_overrides(self, client):
        """Test that method, samples and seed in the body reach the report."""
        response = client.post('/api/hessian', json={
            'family': 'P0+', 'method': 'monte-carlo', 'samples': 20000, 'seed': 3})

        assert response.status_code == 200
        report = response.get_json()['report']
        assert report['quadrature']['method'] == 'monte-carlo'
        assert report['quadrature']['seed'] == 3
        assert report['values']['second_variation']['value'] > 0

    @pytest.mark.parametrize('body', [
        {'family': 'P0+', 'samples': 'many'},
        {'family': 'P0+', 'method': 'simpson'},
    ])
    def test_bad_quadrature_overrides(self, client, body):
        """Test that invalid quadrature settings are a 400."""
        response = client.post('/api/hessian', json=body)

        assert response.status_code == 400
        assert response.get_json()['success'] is False

    def test_overrides_leave_app_config_alone(self, client, app):
        """Test that a request does not change the shared run configuration."""
        client.post('/api/hessian', json={'family': 'P0+', 'seed': 99})

        assert app.config['G2LAB_RUN_CONFIG']['quadrature']['seed'] == 0

    def test_missing_family(self, client):
        """Test that a family is required."""
        response = client.post('/api/hessian', json={'eta': 1.0})

        assert response.status_code == 400
        assert response.get_json()['error'] == 'family is required'

    def test_unknown_family(self, client):
        """Test that an unknown family is a 400."""
        response = client.post('/api/hessian', json={'family': 'Q7+'})

        assert response.status_code == 400
        assert 'Q7+' in response.get_json()['error']

    @pytest.mark.parametrize('eta', ['1', True, None])
    def test_eta_must_be_number(self, client, eta):
        """Test that η must be a JSON number."""
        response = client.post('/api/hessian', json={'family': 'P0+', 'eta': eta})

        assert response.status_code == 400
        assert response.get_json()['error'] == 'eta must be a number'

    def test_nonpositive_eta(self, client):
        """Test that a nonpositive radius is a 400."""
        response = client.post('/api/hessian', json={'family': 'P0+', 'eta': 0})

        assert response.status_code == 400

    def test_hk_bound(self, client):
        """Test the flat-ball bound with the default radius."""
        response = client.post('/api/hk-bound', json={})

        assert response.status_code == 200
        report = response.get_json()['report']
        assert report['passed'] is True
        assert report['values']['exponent_7_relative_gap']['value'] == pytest.approx(0.125)

    def test_hk_bound_bad_eta(self, client):
        """Test that η must be a number for the bound."""
        response = client.post('/api/hk-bound', json={'eta': 'wide'})

        assert response.status_code == 400
