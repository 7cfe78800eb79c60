"""
g2structure/batch.py - Structure recovery on arrays of quadrature nodes
G2 Variational Lab

Vectorized counterparts of classify_and_metric_3 / metric_from_4form for
coefficient arrays of shape (N, 35). 4-forms use the closed form

    B̂ = B(⋆₀ψ),  g = B̂⁻¹ det(B̂)^{1/6},  vol = det(B̂)^{1/12},

which agrees with the fixed-point iteration on the open orbits.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from exterior.algebra import DIM, complement_matrix, compound_matrix, interior_tensor, wedge_tensor
from g2structure.metric import Metric7, star_matrix
from g2structure.structure import COMPACT, SPLIT

logger = logging.getLogger(__name__)

STAR_CHUNK = 256  # nodes per compound-matrix batch

ORBIT_POSITIVE = {COMPACT: 7, SPLIT: 3}


@dataclass(frozen=True, eq=False)
class MetricBatch:
    """Pointwise metrics for N nodes."""

    g: np.ndarray        # (N, 7, 7)
    ginv: np.ndarray     # (N, 7, 7)
    vol: np.ndarray      # (N,)
    valid: np.ndarray    # (N,) det B > 0
    positive: np.ndarray  # (N,) number of positive eigenvalues

    def __len__(self):
        return self.vol.shape[0]

    def in_orbit(self, orbit: str) -> np.ndarray:
        return self.valid & (self.positive == ORBIT_POSITIVE[orbit])

    @classmethod
    def constant(cls, metric: Metric7, n: int) -> 'MetricBatch':
        g = np.broadcast_to(metric.array(), (n, DIM, DIM)).copy()
        ginv = np.broadcast_to(np.asarray(metric.inverse(), dtype=float), (n, DIM, DIM)).copy()
        return cls(g, ginv, np.full(n, float(metric.voldensity)), np.ones(n, dtype=bool),
                   np.full(n, metric.signature[0]))


@lru_cache(maxsize=None)
def _contraction_tensors():
    W43 = wedge_tensor(4, 3)[:, :, 0].astype(float)
    Q = np.einsum('bcd,de->bce', wedge_tensor(2, 2).astype(float), W43)
    return interior_tensor(3).astype(float), Q


def bilinear_batch(phi: np.ndarray) -> np.ndarray:
    """Unnormalized B for each row of phi (N, 35)."""
    T, Q = _contraction_tensors()
    omega = np.einsum('aik,ni->nak', T, phi)
    M = np.einsum('bce,ne->nbc', Q, phi)
    return np.einsum('nab,nbc,ndc->nad', omega, M, omega) / 6.0


def _assemble(B: np.ndarray, det: np.ndarray, g_from_B) -> MetricBatch:
    valid = np.isfinite(det) & (det > 0)
    safe_det = np.where(valid, det, 1.0)
    identity = np.broadcast_to(np.eye(DIM), B.shape)
    B_safe = np.where(valid[:, None, None], B, identity)
    g, vol = g_from_B(B_safe, safe_det)
    g = 0.5 * (g + np.swapaxes(g, -1, -2))
    eigenvalues = np.linalg.eigvalsh(g)
    positive = np.sum(eigenvalues > 0, axis=1)
    ginv = np.linalg.inv(g)
    return MetricBatch(g, ginv, np.where(valid, vol, np.nan), valid, positive)


def metrics_from_3forms(phi) -> MetricBatch:
    phi = np.atleast_2d(np.asarray(phi, dtype=float))
    B = bilinear_batch(phi)
    det = np.linalg.det(B)

    def normalize(B_safe, safe_det):
        vol = safe_det ** (1.0 / 9.0)
        return B_safe / vol[:, None, None], vol

    return _assemble(B, det, normalize)


@lru_cache(maxsize=None)
def _euclidean_star4() -> np.ndarray:
    return np.asarray(star_matrix(Metric7.euclidean(), 4), dtype=float)


def metrics_from_4forms(psi) -> MetricBatch:
    psi = np.atleast_2d(np.asarray(psi, dtype=float))
    B_hat = bilinear_batch(psi @ _euclidean_star4().T)
    det = np.linalg.det(B_hat)

    def normalize(B_safe, safe_det):
        g = np.linalg.inv(B_safe) * (safe_det ** (1.0 / 6.0))[:, None, None]
        return g, safe_det ** (1.0 / 12.0)

    return _assemble(B_hat, det, normalize)


def metrics_for(grade: int, values) -> MetricBatch:
    if grade == 3:
        return metrics_from_3forms(values)
    if grade == 4:
        return metrics_from_4forms(values)
    raise ValueError(f"stable forms have grade 3 or 4, got {grade}")


def star_matrices(batch: MetricBatch, p: int) -> np.ndarray:
    """Hodge star matrices (N, C(7,7-p), C(7,p)) computed in chunks."""
    Pc = complement_matrix(p).astype(float)
    n = len(batch)
    out = np.empty((n, Pc.shape[0], Pc.shape[1]))
    for start in range(0, n, STAR_CHUNK):
        stop = min(start + STAR_CHUNK, n)
        C = compound_matrix(batch.ginv[start:stop], p)
        out[start:stop] = np.einsum('kj,nji->nki', Pc, C) * batch.vol[start:stop, None, None]
    return out


def star_batch(batch: MetricBatch, p: int, values) -> np.ndarray:
    """Pointwise ⋆ of p-form coefficient rows."""
    values = np.asarray(values, dtype=float)
    return np.einsum('nki,ni->nk', star_matrices(batch, p), values)


def dual_forms(grade: int, values, batch: MetricBatch = None):
    """(batch, ⋆ values): the companion 4-form of a 3-form or 3-form of a 4-form."""
    batch = metrics_for(grade, values) if batch is None else batch
    return batch, star_batch(batch, grade, values)
