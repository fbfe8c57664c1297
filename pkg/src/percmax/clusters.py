"""Cluster labeling and maximal-cluster statistics under zero/free/periodic bc.

Labeling is union-find (union by size, path compression) over the occupied
nearest-neighbor subgraph.  A census records per-cluster size, left endpoint
(lexicographic minimum, equal to the minimal row-major linear index) and
boundary contact.  The free-bc maximum is evaluated on an enlarged ambient
box so clusters may extend beyond B_n; the supercritical "largest finite
cluster" drops clusters flagged as possibly infinite, either by contact with
the B_n boundary (default) or by contact of their ambient extension with the
ambient boundary.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _kernels as K
from .lattice import BoxGeometry, SiteIndex
from .sampler import SiteConfig

FINITE_RULES = ("boundary", "ambient")


@dataclass(frozen=True)
class ClusterCensus:
    geometry: BoxGeometry
    labels: np.ndarray  # per site, -1 for vacant
    sizes: np.ndarray  # per label
    left_endpoint: np.ndarray  # per label, linear index
    touches_boundary: np.ndarray  # per label, bool

    @property
    def n_clusters(self) -> int:
        return len(self.sizes)

    def left_endpoint_sites(self) -> list[SiteIndex]:
        return [self.geometry.from_linear(int(i)) for i in self.left_endpoint]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["label", "size", "le_coords", "touches_boundary"])
            for lab in range(self.n_clusters):
                le = self.geometry.from_linear(int(self.left_endpoint[lab]))
                w.writerow(
                    [
                        lab,
                        int(self.sizes[lab]),
                        " ".join(str(c) for c in le),
                        int(self.touches_boundary[lab]),
                    ]
                )


@dataclass(frozen=True)
class MaxClusterResult:
    m_zb: int
    m_fb: int
    m_pb: int
    m_finite: int

    def __post_init__(self):
        if self.m_fb >= 0 and self.m_zb > self.m_fb:
            raise ValueError("m_zb cannot exceed m_fb on the same realization")
        if self.m_finite > self.m_zb:
            raise ValueError("m_finite cannot exceed m_zb")


def label_clusters(cfg: SiteConfig) -> ClusterCensus:
    """Connected components of the occupied subgraph under cfg's adjacency."""
    g = cfg.geometry
    periodic = 1 if g.bc == "periodic" else 0
    roots = K.label_box_roots(np.ascontiguousarray(cfg.occupied, np.uint8), g.d, g.side, periodic)
    occ_idx = np.flatnonzero(roots >= 0)
    labels = np.full(g.site_count, -1, dtype=np.int64)
    if occ_idx.size == 0:
        return ClusterCensus(
            g,
            labels,
            np.zeros(0, np.int64),
            np.zeros(0, np.int64),
            np.zeros(0, bool),
        )
    uniq, inv = np.unique(roots[occ_idx], return_inverse=True)
    labels[occ_idx] = inv
    sizes = np.bincount(inv).astype(np.int64)
    le = np.full(len(uniq), g.site_count, dtype=np.int64)
    np.minimum.at(le, inv, occ_idx)
    if g.bc == "periodic":
        touches = np.zeros(len(uniq), bool)  # the torus has no boundary
    else:
        bmask = g.boundary_mask()
        touches = np.zeros(len(uniq), bool)
        np.logical_or.at(touches, inv, bmask[occ_idx])
    return ClusterCensus(g, labels, sizes, le, touches)


def max_cluster(census: ClusterCensus) -> int:
    """Largest cluster cardinality; 0 for an empty census."""
    return int(census.sizes.max()) if census.n_clusters else 0


def max_finite_cluster(census: ClusterCensus, rule: str = "boundary") -> int:
    """Largest cluster after dropping those flagged as possibly infinite.

    rule "boundary": drop clusters whose touches_boundary flag is set (the
    finite-box proxy for finiteness on the infinite lattice).  The "ambient"
    rule needs the enlarged box and lives in max_cluster_all_bc.
    """
    if rule != "boundary":
        raise ValueError("only the 'boundary' rule applies to a bare census")
    keep = census.sizes[~census.touches_boundary]
    return int(keep.max()) if keep.size else 0


def cluster_at_origin(cfg: SiteConfig) -> tuple[int, int]:
    """(|C(0)|, |C_le(0)|): the origin's cluster size, and the same when the
    origin is its cluster's left endpoint, else 0."""
    g = cfg.geometry
    origin = g.to_linear((0,) * g.d)
    census = label_clusters(cfg)
    lab = census.labels[origin]
    if lab < 0:
        return 0, 0
    size = int(census.sizes[lab])
    is_le = int(census.left_endpoint[lab]) == origin
    return size, size if is_le else 0


def max_cluster_all_bc(
    ambient: SiteConfig, n: int, finite_rule: str = "boundary"
) -> MaxClusterResult:
    """zb/fb/pb/finite maxima evaluated on one ambient realization.

    `ambient` lives on B_{n+m} with margin m >= 1; m_zb and m_pb are computed
    on the restriction to B_n (exterior vacant, resp. torus relabeling) and
    m_fb on the full ambient configuration, maximizing over clusters that
    meet B_n.
    """
    g = ambient.geometry
    margin = g.n - n
    if margin < 1:
        raise ValueError("free-bc maximum needs an ambient margin of at least 1")
    if finite_rule not in FINITE_RULES:
        raise ValueError(f"finite_rule must be one of {FINITE_RULES}")

    core = ambient.restrict(n)
    zb_census = label_clusters(
        SiteConfig(BoxGeometry(g.d, n, "zero"), core.occupied, ambient.seed)
    )
    m_zb = max_cluster(zb_census)

    amb_census = label_clusters(
        SiteConfig(BoxGeometry(g.d, g.n, "zero"), ambient.occupied, ambient.seed)
    )
    # ambient clusters meeting the core box
    m_fb = 0
    core_mask = (np.abs(g.coords_array()) <= n).all(axis=1)
    hit = amb_census.labels[core_mask & (ambient.occupied > 0)]
    if hit.size:
        m_fb = int(amb_census.sizes[np.unique(hit)].max())

    pb_census = label_clusters(
        SiteConfig(BoxGeometry(g.d, n, "periodic"), core.occupied, ambient.seed)
    )
    m_pb = max_cluster(pb_census)

    if finite_rule == "boundary":
        m_fin = max_finite_cluster(zb_census)
    else:
        # exclude zb clusters whose ambient extension reaches the ambient boundary
        amb_touch = amb_census.touches_boundary
        core_geo = zb_census.geometry
        m_fin = 0
        for lab in range(zb_census.n_clusters):
            rep = core_geo.from_linear(int(zb_census.left_endpoint[lab]))
            amb_lab = amb_census.labels[g.to_linear(rep)]
            if not amb_touch[amb_lab]:
                m_fin = max(m_fin, int(zb_census.sizes[lab]))
    return MaxClusterResult(m_zb, m_fb, m_pb, m_fin)


def census_size_multiset(census: ClusterCensus) -> list[int]:
    return sorted(int(s) for s in census.sizes)


def origin_cluster_samples(
    d: int,
    p: float,
    replicas: int,
    master_seed: int,
    replica_offset: int = 0,
    cap_radius: int | None = None,
    cap_size: int | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batched lazy |C(0)| sampling: (sizes, censored, origin_is_le).

    Censored entries report a lower bound on the size; the caps should be
    sized so that finite clusters essentially never trip them (see tails).
    """
    if cap_radius is None:
        cap_radius = 64
    if cap_size is None:
        cap_size = (2 * cap_radius + 1) ** d
    return K.origin_cluster_batch(
        np.uint64(master_seed),
        replica_offset,
        replica_offset + replicas,
        d,
        p,
        cap_radius,
        cap_size,
    )
