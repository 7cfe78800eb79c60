"""
cli/__init__.py - g2lab command line, run configuration and reports
G2 Variational Lab
"""

from cli.config import load_config, quadrature_spec
from cli.report import Report, write_csv

__all__ = ['Report', 'load_config', 'quadrature_spec', 'write_csv']
