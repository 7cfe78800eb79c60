"""
perturbations/unbounded.py - Disjoint-ball packings and the unboundedness iteration
G2 Variational Lab

Each round places the family's perturbation at an optimized amplitude in
every ball of the packing. On a constant base the field inside a ball of
radius r is the rescaled copy of the field in the top-level ball, so the
relative change is the same in every ball of every size. It is measured on
one representative ball per scale for the first few scales, through
`rescale`, and the deeper scales reuse the last measured value.

Nested packings reach high coverage in dimension 7: each top-level ball is
inscribed in its cube, the cube is cut into m^7 subcubes, and the
construction repeats inside every subcube that misses the ball.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import List, Optional, Sequence, Tuple

import numpy as np

from errors import CoverageError, PackingError
from exterior.algebra import DIM
from exterior.fields import ORIGIN
from functionals.hitchin import evaluate
from perturbations.families import (
    DEFAULT_AMPLITUDE_GRID,
    PerturbationFamily,
    make_family,
    optimize_amplitude,
)
from perturbations.rescale import INVARIANCE_TOLERANCE, rescale
from quadrature.domains import Domain7, QuadratureSpec
from quadrature.moments import ball_volume

logger = logging.getLogger(__name__)

CELL = 2.0
BALL_RADIUS = 0.98
NESTED_SUBDIVISION = 720
NESTED_DEPTH = 100
MEASURED_SCALES = 2
AUTO_NU = 'auto'
SIGN_FAMILIES = {'+': 'P0+', '-': 'P0-'}


@lru_cache(maxsize=None)
def free_subcubes(subdivision: int) -> int:
    """Subcubes of an m^7 cut of a cube that miss the open inscribed ball.

    Along one axis the two slabs k steps from the middle sit at distance k·h
    from the center, so a subcube meets the ball iff Σ k_i² < (m/2)². The
    tuples below that bound are counted by convolving per-axis histograms.
    """
    if subdivision < 2 or subdivision % 2:
        raise PackingError(f"subdivision must be an even integer ≥ 2, got {subdivision}")
    half = subdivision // 2
    bound = half * half
    squares = np.arange(half) ** 2
    counts = np.zeros(bound, dtype=np.int64)
    counts[squares] = 1
    for _ in range(DIM - 1):
        total = np.zeros(bound, dtype=np.int64)
        for s in squares:
            total[s:] += counts[:bound - s]
        counts = total
    meeting = int(counts.sum()) * 2 ** DIM
    return subdivision ** DIM - meeting


@dataclass(frozen=True)
class Packing:
    """Disjoint balls inside a box or torus.

    The top level is an explicit list of congruent balls. With subdivision
    m > 0 every top ball is the inscribed ball of a cube of side 2·radius
    and `depth` levels of nested balls fill the free subcubes.
    """

    name: str
    domain: Domain7
    centers: Tuple[Tuple[float, ...], ...]
    radius: float
    subdivision: int = 0
    depth: int = 1

    @classmethod
    def grid(cls, name: str, cells: Sequence[int], radius: float = BALL_RADIUS,
             cell: float = CELL, torus: bool = False, subdivision: int = 0,
             depth: int = 1) -> 'Packing':
        """One ball per cell of a cubical grid with the given cell counts per axis."""
        if len(cells) != DIM:
            raise ValueError(f"grid needs 7 cell counts, got {len(cells)}")
        edges = tuple(float(n) * cell for n in cells)
        centers = tuple(
            tuple((k + 0.5) * cell for k in index)
            for index in product(*(range(n) for n in cells))
        )
        domain = Domain7.torus(edges) if torus else Domain7.box((0.0,) * DIM, edges)
        return cls(name, domain, centers, float(radius), subdivision, depth)

    @classmethod
    def nested(cls, name: str, cells: Sequence[int], subdivision: int = NESTED_SUBDIVISION,
               depth: int = NESTED_DEPTH, cell: float = CELL) -> 'Packing':
        """Inscribed balls in a cubical grid, refined `depth` levels into the gaps."""
        return cls.grid(name, cells, radius=cell / 2.0, cell=cell,
                        subdivision=subdivision, depth=depth)

    @property
    def is_nested(self) -> bool:
        return self.subdivision > 0

    @property
    def levels(self) -> int:
        return self.depth if self.is_nested else 1

    @property
    def free_ratio(self) -> float:
        """Share of a cube's volume in subcubes that miss its ball."""
        if not self.is_nested:
            return 0.0
        return free_subcubes(self.subdivision) / self.subdivision ** DIM

    def level_radius(self, level: int) -> float:
        return self.radius / self.subdivision ** level if level else self.radius

    def level_count(self, level: int) -> int:
        if level == 0:
            return len(self.centers)
        return len(self.centers) * free_subcubes(self.subdivision) ** level

    def level_fractions(self) -> List[float]:
        top = len(self.centers) * ball_volume(self.radius) / self.domain.volume
        ratio = self.free_ratio
        return [top * ratio ** level for level in range(self.levels)]

    @property
    def count(self) -> int:
        return sum(self.level_count(level) for level in range(self.levels))

    @property
    def covered_fraction(self) -> float:
        return float(sum(self.level_fractions()))

    def validate(self) -> 'Packing':
        centers = np.asarray(self.centers)
        for i in range(len(centers)):
            gaps = np.linalg.norm(centers[i + 1:] - centers[i], axis=1)
            if np.any(gaps < 2.0 * self.radius):
                j = i + 1 + int(np.argmin(gaps))
                raise PackingError(f"balls {i} and {j} of packing '{self.name}' overlap")
        for i, center in enumerate(self.centers):
            if not self.domain.contains_ball(center, self.radius):
                raise PackingError(f"ball {i} of packing '{self.name}' leaves the domain")
        if self.is_nested:
            if self.depth < 1:
                raise PackingError(f"packing '{self.name}' needs depth ≥ 1, got {self.depth}")
            free_subcubes(self.subdivision)
            # nested levels live in the cubes around the top balls
            for i in range(len(centers)):
                gaps = np.max(np.abs(centers[i + 1:] - centers[i]), axis=1)
                if np.any(gaps < 2.0 * self.radius):
                    j = i + 1 + int(np.argmin(gaps))
                    raise PackingError(
                        f"cubes {i} and {j} of nested packing '{self.name}' overlap")
        return self

    def to_json(self) -> dict:
        out = {
            'name': self.name,
            'domain': self.domain.to_json(),
            'radius': self.radius,
            'covered_fraction': self.covered_fraction,
        }
        if not self.is_nested:
            out['balls'] = self.count
            return out
        out.update({
            'top_level_balls': len(self.centers),
            'subdivision': self.subdivision,
            'depth': self.depth,
            'free_subcubes': free_subcubes(self.subdivision),
            'log10_balls': math.log10(self.count),
        })
        return out


PACKINGS = {
    'single': Packing.grid('single', (1, 1, 1, 1, 1, 1, 1)),
    'grid-64': Packing.grid('grid-64', (4, 4, 4, 1, 1, 1, 1)),
    'grid-128': Packing.grid('grid-128', (4, 4, 4, 2, 1, 1, 1)),
    'nested-1': Packing.nested('nested-1', (1, 1, 1, 1, 1, 1, 1)),
    'nested-64': Packing.nested('nested-64', (4, 4, 4, 1, 1, 1, 1)),
}


def packing(name: str) -> Packing:
    if name not in PACKINGS:
        raise PackingError(f"unknown packing '{name}'; expected one of {sorted(PACKINGS)}")
    return PACKINGS[name]


def resolve_nu(nu, pack: Packing) -> float:
    """ν as given, or 1 - covered fraction for 'auto'."""
    covered = pack.covered_fraction
    if nu is None or nu == AUTO_NU:
        return 1.0 - covered
    nu = float(nu)
    if not 0 <= nu < 1:
        raise ValueError(f"ν must lie in [0, 1), got {nu}")
    if covered < 1.0 - nu:
        raise CoverageError(
            f"packing '{pack.name}' covers {covered:.4f} of the domain, "
            f"below 1 - ν = {1 - nu:.4f}",
            deficit=(1.0 - nu) - covered,
        )
    return nu


def nu_bound(sign: str, epsilon: float) -> float:
    """Largest ν with (1+ε)(1-ν) ≥ 1+ε/2, or (1-ε)(1-ν)+ν ≤ 1-ε/2 for decay."""
    if sign == '+':
        return epsilon / (2.0 * (1.0 + epsilon))
    return 0.5


@dataclass
class UnboundedResult:
    sign: str
    family: str
    packing: Packing
    nu: float
    values: List[float]
    amplitudes: List[float] = field(default_factory=list)
    ball_changes: List[float] = field(default_factory=list)
    scale_changes: List[List[float]] = field(default_factory=list)

    @property
    def ratios(self) -> List[float]:
        return [b / a for a, b in zip(self.values, self.values[1:])]

    @property
    def epsilon_hat(self) -> float:
        """Smallest per-ball relative change over the rounds."""
        if not self.ball_changes:
            return 0.0
        return min(self.ball_changes)

    @property
    def nu_choice(self) -> dict:
        bound = nu_bound(self.sign, self.epsilon_hat)
        return {'nu': self.nu, 'nu_max': bound, 'holds': self.nu <= bound}

    @property
    def scale_spread(self) -> float:
        """Largest relative gap between the measured scales over the rounds."""
        spread = 0.0
        for changes in self.scale_changes:
            ref = max(abs(changes[0]), 1e-300)
            spread = max(spread, max(abs(c - changes[0]) for c in changes) / ref)
        return spread

    @property
    def passed(self) -> bool:
        eps = self.epsilon_hat
        if self.sign == '+':
            return eps > 0 and all(r >= 1.0 + eps / 2.0 for r in self.ratios)
        return eps > 0 and all(r <= 1.0 - eps / 2.0 for r in self.ratios)

    def rows(self) -> List[dict]:
        out = [{'round': 0, 'value': self.values[0], 'ratio': None, 'amplitude': None,
                'ball_change': None}]
        for k, value in enumerate(self.values[1:], start=1):
            out.append({
                'round': k,
                'value': value,
                'ratio': self.ratios[k - 1],
                'amplitude': self.amplitudes[k - 1],
                'ball_change': self.ball_changes[k - 1],
            })
        return out

    def to_json(self) -> dict:
        return {
            'sign': self.sign,
            'family': self.family,
            'packing': self.packing.to_json(),
            'nu': self.nu,
            'values': self.values,
            'ratios': self.ratios,
            'amplitudes': self.amplitudes,
            'ball_relative_changes': self.ball_changes,
            'scale_relative_changes': self.scale_changes,
            'scale_spread': self.scale_spread,
            'epsilon_hat': self.epsilon_hat,
            'nu_choice': self.nu_choice,
            'passed': self.passed,
        }


def unbounded_iterate(sign: str, pack, rounds: int, nu=AUTO_NU,
                      amplitude_grid: Sequence[float] = DEFAULT_AMPLITUDE_GRID,
                      spec: Optional[QuadratureSpec] = None,
                      measured_scales: int = MEASURED_SCALES) -> UnboundedResult:
    """H₀, H₁, ..., H_n for repeated same-sign perturbations in every ball."""
    if sign not in SIGN_FAMILIES:
        raise ValueError(f"sign must be '+' or '-', got '{sign}'")
    if rounds < 0:
        raise ValueError(f"rounds must be nonnegative, got {rounds}")
    if measured_scales < 1:
        raise ValueError(f"measured_scales must be positive, got {measured_scales}")
    pack = packing(pack) if isinstance(pack, str) else pack
    pack.validate()
    nu = resolve_nu(nu, pack)
    spec = spec or QuadratureSpec.monte_carlo()

    family = PerturbationFamily(SIGN_FAMILIES[sign], center=ORIGIN, eta=pack.radius)
    kind = family.kind
    base = family.base_field()
    h_domain = evaluate(kind, pack.domain, base, spec).value

    measured = min(measured_scales, pack.levels)
    factors = [float(pack.subdivision ** s) if s else 1.0 for s in range(measured)]
    balls = [Domain7.ball(radius=pack.level_radius(s)) for s in range(measured)]
    h_balls = [evaluate(kind, ball, base, spec).value for ball in balls]
    fractions = pack.level_fractions()
    weights = fractions[:measured - 1] + [sum(fractions[measured - 1:])]

    result = UnboundedResult(sign, family.name, pack, nu, [h_domain])
    _, dalpha = make_family(family)
    local = base
    for k in range(1, rounds + 1):
        search = optimize_amplitude(kind, local, family, amplitude_grid, spec)
        local = local + dalpha * search.amplitude
        changes = [
            evaluate(kind, ball, rescale(local, factor), spec).value / h_ball - 1.0
            for ball, factor, h_ball in zip(balls, factors, h_balls)
        ]
        gain = h_domain * sum(w * c for w, c in zip(weights, changes))
        result.values.append(h_domain + gain)
        result.amplitudes.append(search.amplitude)
        result.ball_changes.append(search.relative_change)
        result.scale_changes.append(changes)
        logger.info(f"round {k}: H={result.values[-1]:.10e} (ball change "
                    f"{search.relative_change:.3e}, {measured} scales)")

    if result.scale_spread > INVARIANCE_TOLERANCE:
        logger.warning(f"relative change differs by {result.scale_spread:.2e} across scales")
    return result


__all__ = [
    'AUTO_NU',
    'PACKINGS',
    'Packing',
    'UnboundedResult',
    'free_subcubes',
    'nu_bound',
    'packing',
    'resolve_nu',
    'unbounded_iterate',
]
