"""
api/__init__.py - Verification API blueprint registration
G2 Variational Lab
"""

from flask import Blueprint

# Create blueprint
api_bp = Blueprint('api', __name__, url_prefix='/api')

# Import routes after blueprint creation to avoid circular imports
from api import routes

__all__ = ['api_bp']
