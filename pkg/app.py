"""
app.py - Flask Application Factory
G2 Variational Lab

Provides the create_app() factory serving the verification API under /api.
The run configuration is resolved once at startup, the same way the g2lab
command line resolves it.
"""

import os

from dotenv import load_dotenv
from flask import Flask, request
from flask_cors import CORS

from api import api_bp
from cli.config import CONFIG_ENV, load_config
from cli.report import LIBRARY_VERSION
from errors import ConfigError


def create_app(test_config: dict = None) -> Flask:
    """
    Application factory for G2 Variational Lab.

    Args:
        test_config: Optional dictionary of configuration overrides for testing

    Returns:
        Flask: Configured Flask application instance
    """
    load_dotenv()
    app = Flask(__name__)

    # Enable CORS for LAN access (development only)
    CORS(app, resources={r"/api/*": {"origins": "*"}})

    app.config['G2LAB_CONFIG_PATH'] = os.environ.get(CONFIG_ENV)
    if test_config:
        app.config.update(test_config)

    if not app.config.get('G2LAB_RUN_CONFIG'):
        try:
            app.config['G2LAB_RUN_CONFIG'] = load_config(app.config['G2LAB_CONFIG_PATH'])
        except ConfigError as e:
            app.logger.error(f"Failed to load run configuration: {e}")
            raise

    app.register_blueprint(api_bp)

    @app.after_request
    def after_request(response):
        """Add security headers after each request."""
        response.headers['X-Content-Type-Options'] = 'nosniff'
        response.headers['X-Frame-Options'] = 'DENY'
        return response

    # Error handlers
    @app.errorhandler(404)
    def not_found(error):
        if request.path.startswith('/api/'):
            return {'success': False, 'error': 'Endpoint not found'}, 404
        return 'Not Found', 404

    @app.errorhandler(405)
    def method_not_allowed(error):
        if request.path.startswith('/api/'):
            return {'success': False, 'error': 'Method not allowed'}, 405
        return 'Method Not Allowed', 405

    @app.errorhandler(500)
    def internal_error(error):
        app.logger.error(f"Internal error: {error}")
        if request.path.startswith('/api/'):
            return {'success': False, 'error': 'Internal server error'}, 500
        return 'Internal Server Error', 500

    @app.route('/')
    def index():
        return {
            'service': 'G2 Variational Lab API',
            'version': LIBRARY_VERSION,
            'status': 'running',
            'endpoints': {
                'health': '/api/health',
                'families': '/api/families',
                'decompose': '/api/decompose',
                'hessian': '/api/hessian',
                'hk_bound': '/api/hk-bound',
            },
        }

    app.logger.info("G2 Variational Lab API initialized")
    return app


# For running directly (development)
if __name__ == '__main__':
    app = create_app()
    app.run(debug=True, host='0.0.0.0', port=5000)
