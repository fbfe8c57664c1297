"""Site-configuration samplers with deterministic, replica-addressable randomness.

Occupancy is a pure function of (master_seed, replica_index, absolute site
coordinates) through a counter-style hash, so

* the same inputs always reproduce bit-identical configurations,
* restrictions of one replica's field to nested boxes agree exactly, and
* fields at p1 <= p2 share uniforms and are coupled sitewise monotone.

Dependent fields are produced by single-site heat-bath sweeps whose
conditional occupation probability depends on the number of occupied
neighbors only; sites outside the box count as vacant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels as K
from .lattice import BoxGeometry

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    replica_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed <= _MASK64:
            raise ValueError("master_seed must fit in 64 bits")
        if self.replica_index < 0:
            raise ValueError("replica_index must be nonnegative")

    @property
    def master_u64(self) -> np.uint64:
        return np.uint64(self.master_seed)


@dataclass(frozen=True)
class BernoulliSpec:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0,1], got {self.p}")


@dataclass(frozen=True)
class MarkovFieldSpec:
    """Heat-bath field spec: conditional occupation by occupied-neighbor count.

    conditional[j] applies when j of the (up to 2d) neighbors are occupied;
    delta is the finite-energy floor, and dominating_p (when set) must bound
    every conditional from above, yielding Holley domination by the
    Bernoulli(dominating_p) product field.
    """

    conditional: tuple[float, ...]
    delta: float
    sweeps: int = 64
    dominating_p: float | None = None

    def __post_init__(self):
        if self.delta <= 0 or self.delta >= 0.5:
            raise ValueError("finite-energy floor delta must lie in (0, 0.5)")
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        for q in self.conditional:
            if q < self.delta or q > 1.0 - self.delta:
                raise ValueError(
                    f"conditional {q} violates the finite-energy floor delta={self.delta}"
                )
        if self.dominating_p is not None:
            if not 0.0 <= self.dominating_p <= 1.0:
                raise ValueError("dominating_p must lie in [0,1]")
            for q in self.conditional:
                if q > self.dominating_p:
                    raise ValueError(
                        f"conditional {q} exceeds dominating_p={self.dominating_p}"
                    )

    def table_for(self, g: BoxGeometry) -> np.ndarray:
        want = 2 * g.d + 1
        if len(self.conditional) != want:
            raise ValueError(
                f"conditional table needs {want} entries (0..2d occupied neighbors), "
                f"got {len(self.conditional)}"
            )
        return np.asarray(self.conditional, dtype=np.float64)


@dataclass(frozen=True)
class SiteConfig:
    geometry: BoxGeometry
    occupied: np.ndarray  # flat uint8, one per site, row-major
    seed: SeedSpec | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.occupied.shape != (self.geometry.site_count,):
            raise ValueError("occupancy array does not match geometry")

    def occupied_count(self) -> int:
        return int(self.occupied.sum())

    def restrict(self, n: int) -> "SiteConfig":
        """Restriction to the concentric sub-box B_n (same bc tag)."""
        g = self.geometry
        if n > g.n:
            raise ValueError("restriction radius exceeds the box")
        sub = BoxGeometry(g.d, n, g.bc)
        grid = self.occupied.reshape((g.side,) * g.d)
        lo, hi = g.n - n, g.n + n + 1
        sl = tuple(slice(lo, hi) for _ in range(g.d))
        return SiteConfig(sub, np.ascontiguousarray(grid[sl]).ravel(), self.seed)


def sample_bernoulli(g: BoxGeometry, spec: BernoulliSpec, seed: SeedSpec) -> SiteConfig:
    """IID Bernoulli(p) occupancy over the box, deterministic in (g, spec, seed)."""
    occ = np.empty(g.site_count, np.uint8)
    K.fill_bernoulli(seed.master_u64, seed.replica_index, g.d, g.n, spec.p, occ)
    return SiteConfig(g, occ, seed)


def sample_markov_field(
    g: BoxGeometry, spec: MarkovFieldSpec, seed: SeedSpec
) -> SiteConfig:
    """Heat-bath field after spec.sweeps systematic sweeps from all-vacant."""
    cfg, _ = sample_markov_with_coupling(g, spec, seed)
    return cfg


def sample_markov_with_coupling(
    g: BoxGeometry, spec: MarkovFieldSpec, seed: SeedSpec
) -> tuple[SiteConfig, SiteConfig | None]:
    """Heat-bath field plus its Holley coupling partner.

    The partner is the Bernoulli(dominating_p) field drawn from the final
    sweep's uniforms; the Markov field is sitewise <= the partner whenever
    spec declares dominating_p.  Returns (markov, partner-or-None).
    """
    cond = spec.table_for(g)
    dom = spec.dominating_p if spec.dominating_p is not None else -1.0
    fields, coupled = K.heat_bath_batch(
        seed.master_u64,
        seed.replica_index,
        seed.replica_index + 1,
        g.d,
        g.n,
        cond,
        spec.sweeps,
        dom,
    )
    cfg = SiteConfig(g, fields[0].copy(), seed)
    if spec.dominating_p is None:
        return cfg, None
    return cfg, SiteConfig(g, coupled[0].copy(), seed)


def site_uniform(seed: SeedSpec, site: Sequence[int]) -> float:
    """The uniform variate driving one site's occupancy (thresholded by p)."""
    coords = np.asarray(site, dtype=np.int64)
    return float(K.site_uniform(seed.master_u64, seed.replica_index, coords))


def derive_stream(seed: SeedSpec) -> np.random.Generator:
    """Counter-based generator for a replica; distinct replica streams are
    independent (Philox keyed by (master_seed, replica_index))."""
    key = np.array([seed.master_seed, seed.replica_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
