"""
coflow/flow.py - Spectral exterior calculus and explicit Euler Laplacian coflow
G2 Variational Lab

ψ ← ψ + Δt·dd*ψ with d* = ⋆d⋆ taken in the metric of ψ at each node and d
computed spectrally along the active axes. The update is d of a 3-form, so
ψ(t) - ψ(0) = dP for the accumulated primitive P = Σ Δt·d*ψ.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional

import numpy as np

from coflow.state import DEFAULT_PERIOD, CoflowState, TorsionReport
from errors import CoflowError
from exterior.algebra import ConstForm, wedge, wedge_tensor
from exterior.models import PHI0, PSI0
from g2structure.batch import MetricBatch, metrics_from_4forms, star_batch
from g2structure.structure import COMPACT

logger = logging.getLogger(__name__)

DEFAULT_CFL_FACTOR = 0.5
RATE_TOLERANCE = 1e-9


# -- spectral d ----------------------------------------------------------------------------


@lru_cache(maxsize=32)
def wavenumbers(nodes: int, period: float) -> np.ndarray:
    """Angular wavenumbers with the Nyquist mode removed."""
    k = 2.0 * np.pi * np.fft.fftfreq(nodes, d=period / nodes)
    if nodes % 2 == 0:
        k[nodes // 2] = 0.0
    return k


def spectral_derivative(values: np.ndarray, grid_axis: int, period: float) -> np.ndarray:
    """∂ along one grid axis of an (n, ..., n, C) array."""
    nodes = values.shape[grid_axis]
    first = np.take(values, [0], axis=grid_axis)
    flat = np.all(values == first, axis=grid_axis, keepdims=True)
    shape = [1] * values.ndim
    shape[grid_axis] = nodes
    k = wavenumbers(nodes, float(period)).reshape(shape)
    spectrum = 1j * k * np.fft.fft(values, axis=grid_axis)
    derivative = np.real(np.fft.ifft(spectrum, axis=grid_axis))
    return np.where(flat, 0.0, derivative)


def grid_d(state: CoflowState, values: np.ndarray, grade: int) -> np.ndarray:
    """Exterior derivative of a grade-p field on the state's grid."""
    T = wedge_tensor(1, grade).astype(float)
    out = 0.0
    for grid_axis, axis in enumerate(state.axes):
        partial = spectral_derivative(values, grid_axis, state.period)
        out = out + np.einsum('...i,ik->...k', partial, T[axis - 1])
    return out


# -- pointwise geometry ---------------------------------------------------------------------


def _recover(state: CoflowState, values: np.ndarray, dt: Optional[float] = None) -> MetricBatch:
    batch = metrics_from_4forms(state.flat(values))
    inside = batch.in_orbit(COMPACT)
    if not np.all(inside):
        index = int(np.argmin(inside))
        raise CoflowError(
            "4-form left the G2 orbit", node=state.node(index),
            suggested_dt=None if dt is None else dt / 2.0,
        )
    return batch


def _on_grid(state: CoflowState, flat: np.ndarray) -> np.ndarray:
    return flat.reshape(state.shape + (flat.shape[-1],))


def codifferential(state: CoflowState, batch: Optional[MetricBatch] = None):
    """(d*ψ, dφ, batch) with φ = ⋆ψ in the metric of ψ."""
    batch = _recover(state, state.values) if batch is None else batch
    phi = _on_grid(state, star_batch(batch, 4, state.flat()))
    dphi = grid_d(state, phi, 3)
    dstar = _on_grid(state, star_batch(batch, 4, state.flat(dphi)))
    return dstar, dphi, batch


def torsion(state: CoflowState) -> TorsionReport:
    """dψ and d⋆ψ; both vanish exactly when ψ is torsion-free."""
    _, dphi, _ = codifferential(state)
    dpsi = grid_d(state, state.values, 4)
    return TorsionReport.build(dpsi, dphi)


def laplacian(state: CoflowState, batch: Optional[MetricBatch] = None):
    """(Δψ = dd*ψ, d*ψ, batch)."""
    dstar, _, batch = codifferential(state, batch)
    return grid_d(state, dstar, 3), dstar, batch


def stability_bound(state: CoflowState, batch: MetricBatch,
                    cfl_factor: float = DEFAULT_CFL_FACTOR):
    """(largest stable Δt, node with the largest metric eigenvalue)."""
    top = np.max(np.linalg.eigvalsh(batch.g), axis=1)
    index = int(np.argmax(top))
    return cfl_factor * state.spacing ** 2 / float(top[index]), state.node(index)


def functional_value(state: CoflowState, batch: Optional[MetricBatch] = None) -> float:
    """H⁴ over the torus by the trapezoid rule."""
    batch = _recover(state, state.values) if batch is None else batch
    return float(np.sum(batch.vol) * state.cell_volume)


def exactness_residual(state: CoflowState) -> float:
    """sup |dP - (ψ - ψ(0))|."""
    drift = state.values - state.initial
    return float(np.max(np.abs(grid_d(state, state.primitive, 3) - drift)))


# -- time stepping ----------------------------------------------------------------------------


def _step(state: CoflowState, dt: float, cfl_factor: float):
    batch = _recover(state, state.values)
    bound, node = stability_bound(state, batch, cfl_factor)
    if dt > bound:
        raise CoflowError(f"time step {dt:.3e} is above the stability bound", node=node,
                          suggested_dt=bound)
    update, dstar, _ = laplacian(state, batch)
    values = state.values + dt * update
    after = _recover(state, values, dt)
    advanced = state.advanced(values, dt, state.primitive + dt * dstar)
    return advanced, batch, after


def coflow_step(state: CoflowState, dt: float,
                cfl_factor: float = DEFAULT_CFL_FACTOR) -> CoflowState:
    """One explicit Euler step of ∂ψ/∂t = dd*ψ."""
    return _step(state, dt, cfl_factor)[0]


def volume_monotonicity_check(state: CoflowState, dt: float,
                              cfl_factor: float = DEFAULT_CFL_FACTOR,
                              tolerance: float = RATE_TOLERANCE) -> dict:
    """Pointwise (vol after - vol before)/Δt over one step, with a step-halving estimate."""
    rates = []
    for h in (dt, dt / 2.0, dt / 4.0):
        _, before, after = _step(state, h, cfl_factor)
        rates.append((after.vol - before.vol) / h)
    coarse = float(np.max(np.abs(rates[0] - rates[1])))
    fine = float(np.max(np.abs(rates[1] - rates[2])))
    minimum = float(np.min(rates[0]))
    return {
        'dt': dt,
        'min_rate': minimum,
        'max_rate': float(np.max(rates[0])),
        'tolerance': tolerance,
        'halving_ratio': coarse / fine if fine > 0 else None,
        'passed': minimum >= -tolerance,
    }


@dataclass
class CoflowRun:
    state: CoflowState
    rows: List[dict] = field(default_factory=list)
    exactness: float = 0.0

    @property
    def min_rate(self) -> float:
        rates = [row['min_rate'] for row in self.rows if row['min_rate'] is not None]
        return min(rates) if rates else 0.0

    @property
    def functional_nondecreasing(self) -> bool:
        values = [row['H4'] for row in self.rows]
        return all(b >= a - 1e-12 * abs(a) for a, b in zip(values, values[1:]))

    def passed(self, tolerance: float = RATE_TOLERANCE) -> bool:
        return self.functional_nondecreasing and self.min_rate >= -tolerance

    def to_json(self) -> dict:
        return {
            'state': self.state.to_json(),
            'steps': len(self.rows) - 1,
            'min_rate': self.min_rate,
            'functional_nondecreasing': self.functional_nondecreasing,
            'exactness_residual': self.exactness,
            'final': self.rows[-1] if self.rows else None,
        }


def _row(state: CoflowState, batch: MetricBatch, min_rate) -> dict:
    report = torsion(state)
    return {
        't': state.time,
        'H4': functional_value(state, batch),
        'min_rate': min_rate,
        'dpsi': report.dpsi_norm,
        'dstar_psi': report.dstar_norm,
    }


def run_coflow(state: CoflowState, dt: float, steps: int,
               cfl_factor: float = DEFAULT_CFL_FACTOR) -> CoflowRun:
    """Trajectory rows (t, H⁴, min pointwise volume rate, torsion norms) per step."""
    if steps < 0:
        raise ValueError(f"steps must be nonnegative, got {steps}")
    run = CoflowRun(state)
    run.rows.append(_row(state, _recover(state, state.values), None))
    for k in range(steps):
        state, before, after = _step(state, dt, cfl_factor)
        rate = float(np.min((after.vol - before.vol) / dt))
        run.rows.append(_row(state, after, rate))
        logger.debug(f"coflow step {k + 1}: t={state.time:.3e} H4={run.rows[-1]['H4']:.12e}")
    run.state = state
    run.exactness = exactness_residual(state)
    logger.info(f"coflow: {steps} steps, min rate {run.min_rate:.3e}")
    return run


# -- initial data ------------------------------------------------------------------------------


def constant_state(form: ConstForm = PSI0, nodes: int = 256, axes=(1,),
                   period: float = DEFAULT_PERIOD) -> CoflowState:
    shape = (nodes,) * len(axes)
    values = np.broadcast_to(form.array(), shape + (form.array().shape[0],)).copy()
    return CoflowState(tuple(axes), nodes, values, period)


def periodic_perturbation(s: float, nodes: int = 256, axes=(1,),
                          period: float = DEFAULT_PERIOD) -> CoflowState:
    """ψ0 + s·d(sin x^a φ0) on one axis, or ψ0 + s·d(sin x^a sin x^b dx^345) on two.

    The derivative is taken analytically, so the initial data is exactly closed.
    """
    state = constant_state(PSI0, nodes, axes, period)
    axes = state.axes
    points = state.coordinates()
    omega = 2.0 * np.pi / period
    if len(axes) == 1:
        (a,) = axes
        x = points[:, a - 1]
        dform = wedge(ConstForm.basis_form((a,)), PHI0).array()
        delta = (omega * np.cos(omega * x))[:, None] * dform[None, :]
    else:
        a, b = axes
        rest = tuple(i for i in (3, 4, 5, 6, 7, 1, 2) if i not in axes)[:3]
        potential = ConstForm.basis_form(tuple(sorted(rest)))
        xa, xb = points[:, a - 1], points[:, b - 1]
        da = wedge(ConstForm.basis_form((a,)), potential).array()
        db = wedge(ConstForm.basis_form((b,)), potential).array()
        delta = (omega * np.cos(omega * xa) * np.sin(omega * xb))[:, None] * da[None, :]
        delta = delta + (omega * np.sin(omega * xa) * np.cos(omega * xb))[:, None] * db[None, :]
    values = state.values + s * delta.reshape(state.values.shape)
    perturbed = CoflowState(axes, nodes, values, period)
    _recover(perturbed, perturbed.values)
    return perturbed


__all__ = [
    'DEFAULT_CFL_FACTOR',
    'CoflowRun',
    'codifferential',
    'coflow_step',
    'constant_state',
    'exactness_residual',
    'functional_value',
    'grid_d',
    'laplacian',
    'periodic_perturbation',
    'run_coflow',
    'spectral_derivative',
    'stability_bound',
    'torsion',
    'volume_monotonicity_check',
    'wavenumbers',
]
