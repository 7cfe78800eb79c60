"""
api/routes.py - JSON endpoints over the verification runners
G2 Variational Lab

Provides endpoints for:
- Service health and the perturbation family table
- Type decomposition of constant forms
- Second variations of the named families
- The flat-ball volume bound

The heavier runs (unbounded iteration, coflow, lemma sweeps) stay on the
command line.
"""

import copy

from flask import current_app, jsonify, request

from api import api_bp
from cli import commands
from cli.config import load_config, merge
from cli.report import LIBRARY_VERSION


def _config() -> dict:
    return current_app.config.get('G2LAB_RUN_CONFIG') or load_config(
        current_app.config.get('G2LAB_CONFIG_PATH'))


def _body() -> dict:
    data = request.get_json(silent=True)
    return data if isinstance(data, dict) else {}


def _respond(runner, *args):
    """Run and wrap in the JSON envelope; library and parameter errors map to 400."""
    try:
        report, rows = runner(*args)
    except ValueError as e:
        current_app.logger.info(f"{request.path}: {e}")
        return jsonify({"success": False, "error": str(e)}), 400
    report.finish()
    payload = {"success": True, "report": report.to_json()}
    if rows is not None:
        payload['rows'] = rows
    return jsonify(payload)


def _quadrature_overrides(data: dict) -> dict:
    """Copy of the run config with method, samples and seed taken from the body."""
    keys = ('method', 'samples', 'seed')
    overrides = {'quadrature': {key: data.get(key) for key in keys}}
    return merge(copy.deepcopy(_config()), overrides, 'request')


def _number(data: dict, key: str, default: float) -> float:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError(key)
    return float(value)


@api_bp.route('/health', methods=['GET'])
def health():
    return jsonify({"success": True, "status": "running", "version": LIBRARY_VERSION})


@api_bp.route('/families', methods=['GET'])
def families():
    return jsonify({"success": True, "families": commands.family_table()})


@api_bp.route('/decompose', methods=['POST'])
def decompose():
    data = _body()
    form = data.get('form')
    if not isinstance(form, str) or not form.strip():
        return jsonify({"success": False, "error": "form is required"}), 400
    structure = data.get('structure', 'phi0')
    return _respond(commands.run_decompose, form, structure, _config())


@api_bp.route('/hessian', methods=['POST'])
def hessian():
    data = _body()
    family = data.get('family')
    if not isinstance(family, str):
        return jsonify({"success": False, "error": "family is required"}), 400
    try:
        eta = _number(data, 'eta', 1.0)
    except TypeError:
        return jsonify({"success": False, "error": "eta must be a number"}), 400
    try:
        config = _quadrature_overrides(data)
    except ValueError as e:
        return jsonify({"success": False, "error": str(e)}), 400
    return _respond(commands.run_hessian, family, eta, config)


@api_bp.route('/hk-bound', methods=['POST'])
def hk_bound():
    try:
        eta = _number(_body(), 'eta', 1.0)
    except TypeError:
        return jsonify({"success": False, "error": "eta must be a number"}), 400
    return _respond(commands.run_hk_bound, eta, _config())
