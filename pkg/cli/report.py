"""
cli/report.py - Machine-readable verification reports
G2 Variational Lab

Report JSON (schema 1.0):

    schema, command, version, parameters, config, quadrature,
    values {name: {value, error}}, verdicts [{name, passed, tolerance, measured}],
    passed, error, wall_time_s

CSV series are plain header + rows files written next to the report.
"""

import csv
import json
import logging
import os
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

logger = logging.getLogger(__name__)

SCHEMA_VERSION = '1.0'
LIBRARY_VERSION = '1.0.0'


def _plain(value):
    """JSON-safe copy of numpy scalars, arrays and nested containers."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


@dataclass
class Report:
    command: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)
    quadrature: Optional[Dict[str, Any]] = None
    values: Dict[str, Any] = field(default_factory=dict)
    verdicts: List[Dict[str, Any]] = field(default_factory=list)
    error: Optional[str] = None
    started: float = field(default_factory=time.perf_counter)
    wall_time: Optional[float] = None

    def add_value(self, name: str, value, error=None, **extra):
        entry = {'value': value}
        if error is not None:
            entry['error'] = error
        entry.update(extra)
        self.values[name] = entry

    def add_verdict(self, name: str, passed: bool, tolerance=None, measured=None):
        self.verdicts.append({
            'name': name,
            'passed': bool(passed),
            'tolerance': tolerance,
            'measured': measured,
        })

    def fail(self, error: Exception):
        self.error = str(error)
        logger.warning(f"{self.command} failed: {error}")

    @property
    def passed(self) -> bool:
        return self.error is None and all(v['passed'] for v in self.verdicts)

    def finish(self) -> 'Report':
        self.wall_time = time.perf_counter() - self.started
        return self

    def to_json(self) -> dict:
        return _plain({
            'schema': SCHEMA_VERSION,
            'command': self.command,
            'version': LIBRARY_VERSION,
            'parameters': self.parameters,
            'config': self.config,
            'quadrature': self.quadrature,
            'values': self.values,
            'verdicts': self.verdicts,
            'passed': self.passed,
            'error': self.error,
            'wall_time_s': self.wall_time,
        })

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False)

    def write(self, path: str):
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(self.dumps() + '\n')
        logger.info(f"Report written to {path}")


def write_csv(path: str, rows: List[dict]):
    """Write rows sharing the keys of the first row."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    fieldnames = list(rows[0]) if rows else []
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.DictWriter(handle, fieldnames=fieldnames, extrasaction='ignore')
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _plain(v) for k, v in row.items()})
    logger.info(f"CSV series written to {path}")


__all__ = ['LIBRARY_VERSION', 'SCHEMA_VERSION', 'Report', 'write_csv']
