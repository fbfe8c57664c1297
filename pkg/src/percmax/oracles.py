"""Exact desk-scale ground truth by closed forms, dynamic programming and
exhaustive enumeration.

Everything here is deliberately independent of the production union-find
path: cluster structure is recomputed with a plain BFS over adjacency lists,
so oracle-vs-pipeline comparisons are genuine dual routes.  Enumeration
accumulates integer configuration counts indexed by occupied-site number,
and only then evaluates probabilities -- pass `fractions.Fraction`
parameters to get exact rational results.

The one-dimensional left-endpoint tail is exposed in both normalizations:
(1-p) p^x for the unconditional event (the vacant left neighbor is part of
the event) and p^x conditioned on the run starting at the origin.  Both are
kept because downstream tests need both readings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import _kernels as K
from .lattice import BoxGeometry

ENUM_SITE_CAP = 25

Number = float  # or Fraction in exact mode


class EnumerationCapError(ValueError):
    """Requested enumeration exceeds the exhaustive-search cap."""


@dataclass(frozen=True)
class ExactDistribution:
    """A finitely supported law; probabilities may be floats or Fractions."""

    support: tuple[int, ...]
    prob: tuple[Number, ...]
    partial: bool = False  # restricted laws need not sum to one

    def __post_init__(self):
        if len(self.support) != len(self.prob):
            raise ValueError("support/prob length mismatch")
        if not self.partial:
            total = sum(self.prob)
            if isinstance(total, Fraction):
                if total != 1:
                    raise ValueError(f"exact probabilities sum to {total} != 1")
            elif abs(total - 1.0) > 1e-12:
                raise ValueError(f"probabilities sum to {total}, off by >1e-12")

    def as_dict(self) -> dict[int, Number]:
        return dict(zip(self.support, self.prob))

    def pmf(self, k: int) -> Number:
        return self.as_dict().get(k, 0)

    def cdf(self, k: int) -> Number:
        return sum(pr for v, pr in zip(self.support, self.prob) if v <= k)

    def tail(self, k: int) -> Number:
        """P(X >= k)."""
        return sum(pr for v, pr in zip(self.support, self.prob) if v >= k)

    def mean(self) -> Number:
        return sum(v * pr for v, pr in zip(self.support, self.prob))

    def to_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["value", "probability"])
            for v, pr in zip(self.support, self.prob):
                w.writerow([v, repr(float(pr)) if not isinstance(pr, Fraction) else str(pr)])


# ---------------------------------------------------------------------------
# closed forms and DP
# ---------------------------------------------------------------------------


def run_tail_1d(p: Number, x: int) -> Number:
    """P(|C_le(0)| >= x) on the 1d lattice: (1-p) p^x for x >= 1, 1 at x = 0."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0:
        return 1 if isinstance(p, Fraction) else 1.0
    return (1 - p) * p**x


def run_tail_1d_conditional(p: Number, x: int) -> Number:
    """The p^x normalization: tail of the run length given it starts at 0."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    return p**x


def longest_run_cdf(n_sites: int, p: float, m: int) -> float:
    """Exact P(longest occupied run among n_sites iid Bernoulli(p) <= m).

    Transfer-matrix DP over (position, trailing run length <= m).
    """
    if n_sites < 0 or m < 0:
        raise ValueError("n_sites and m must be nonnegative")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0,1]")
    return float(K.longest_run_cdf_dp(n_sites, float(p), m))


def longest_run_pmf(n_sites: int, p: float) -> ExactDistribution:
    cdf = [longest_run_cdf(n_sites, p, m) for m in range(n_sites + 1)]
    probs = [cdf[0]] + [cdf[m] - cdf[m - 1] for m in range(1, n_sites + 1)]
    return ExactDistribution(tuple(range(n_sites + 1)), tuple(probs))


# ---------------------------------------------------------------------------
# BFS cluster helpers (independent of the union-find pipeline)
# ---------------------------------------------------------------------------


def _adjacency(g: BoxGeometry) -> list[list[int]]:
    side, d, v = g.side, g.d, g.site_count
    periodic = g.bc == "periodic"
    strides = [int(s) for s in g.strides()]
    adj: list[list[int]] = [[] for _ in range(v)]
    for idx in range(v):
        rem = idx
        for j in range(d):
            st = strides[j]
            q, rem = rem // st, rem % st
            lo = idx - st if q > 0 else (idx + st * (side - 1) if periodic else None)
            hi = idx + st if q < side - 1 else (idx - st * (side - 1) if periodic else None)
            for nb in (lo, hi):
                if nb is not None and nb != idx and nb not in adj[idx]:
                    adj[idx].append(nb)
    return adj


def _component(start: int, mask: int, adj: list[list[int]]) -> list[int]:
    """Sites of the occupied component containing start (start must be occupied)."""
    seen = 1 << start
    stack = [start]
    out = [start]
    while stack:
        cur = stack.pop()
        for nb in adj[cur]:
            b = 1 << nb
            if (mask & b) and not (seen & b):
                seen |= b
                stack.append(nb)
                out.append(nb)
    return out


def _component_stats(
    start: int, mask: int, adj: list[list[int]]
) -> tuple[int, int]:
    """(size, min linear index) of the component containing start."""
    comp = _component(start, mask, adj)
    return len(comp), min(comp)


def max_cluster_statistic(g: BoxGeometry) -> Callable[[int], int]:
    """Statistic: size of the largest occupied component of a bitmask config."""
    adj = _adjacency(g)
    v = g.site_count

    def stat(mask: int) -> int:
        best = 0
        seen = 0
        for i in range(v):
            b = 1 << i
            if (mask & b) and not (seen & b):
                comp = _component(i, mask, adj)
                for s in comp:
                    seen |= 1 << s
                if len(comp) > best:
                    best = len(comp)
        return best

    return stat


def occupied_count_statistic(g: BoxGeometry) -> Callable[[int], int]:
    def stat(mask: int) -> int:
        return mask.bit_count()

    return stat


# ---------------------------------------------------------------------------
# exhaustive enumeration
# ---------------------------------------------------------------------------


def _check_cap(n_sites: int) -> None:
    if n_sites > ENUM_SITE_CAP:
        raise EnumerationCapError(
            f"{n_sites} sites exceeds the exhaustive enumeration cap of {ENUM_SITE_CAP}"
        )


def _eval_counts(counts: dict[int, int], n_sites: int, p: Number) -> Number:
    """sum over occupied-count o of counts[o] p^o (1-p)^(n_sites-o)."""
    q = 1 - p
    total = 0 * p
    for o, c in counts.items():
        total += c * p**o * q ** (n_sites - o)
    return total


def enumerate_masks(
    n_sites: int, statistic: Callable[[int], int]
) -> dict[int, dict[int, int]]:
    """counts[value][n_occupied] over all 2^n_sites configurations."""
    _check_cap(n_sites)
    counts: dict[int, dict[int, int]] = {}
    for mask in range(1 << n_sites):
        val = statistic(mask)
        occ = mask.bit_count()
        inner = counts.setdefault(val, {})
        inner[occ] = inner.get(occ, 0) + 1
    return counts


def _distribution_from_counts(
    counts: dict[int, dict[int, int]], n_sites: int, p: Number
) -> ExactDistribution:
    support = sorted(counts)
    probs = [_eval_counts(counts[v], n_sites, p) for v in support]
    return ExactDistribution(tuple(support), tuple(probs))


def enumerate_box(
    g: BoxGeometry, p: Number, statistic: Callable[[int], int] | None = None
) -> ExactDistribution:
    """Exact law of a configuration functional by summing over all 2^V configs.

    The statistic maps a bitmask (bit i = occupancy of linear site i) to an
    integer; defaults to the maximal cluster size under g's adjacency.
    """
    _check_cap(g.site_count)
    if statistic is None:
        statistic = max_cluster_statistic(g)
    counts = enumerate_masks(g.site_count, statistic)
    return _distribution_from_counts(counts, g.site_count, p)


def enumerate_line(
    n_sites: int, p: Number, statistic: Callable[[int], int] | None = None
) -> ExactDistribution:
    """enumerate_box for a 1d segment of n_sites sites (any parity)."""
    _check_cap(n_sites)
    if statistic is None:
        # longest run of set bits, via repeated shift-and
        def statistic(mask: int) -> int:
            run = 0
            while mask:
                mask &= mask >> 1
                run += 1
            return run

    counts = enumerate_masks(n_sites, statistic)
    return _distribution_from_counts(counts, n_sites, p)


# ---------------------------------------------------------------------------
# torus cluster law (Lemma-style size-biasing identity)
# ---------------------------------------------------------------------------


def _torus_origin_cluster(
    mask: int, L: int, d: int, strides: Sequence[int], kmax: int
) -> tuple[int, bool]:
    """(size, origin_is_le) for the origin cluster on the L^d torus.

    Relative coordinates are unwrapped during the BFS, which is well defined
    while the cluster cannot wind around the torus (guaranteed for sizes
    < L); exploration stops once the size exceeds kmax.
    """
    if not mask & 1:
        return 0, False
    origin = 0
    rel: dict[int, tuple[int, ...]] = {origin: (0,) * d}
    stack = [origin]
    size = 1
    best = (0,) * d
    while stack:
        cur = stack.pop()
        cidx = cur
        loc = []
        for st in strides:
            q, cidx = divmod(cidx, st)
            loc.append(q)
        rc = rel[cur]
        for j in range(d):
            for delta in (-1, 1):
                nq = (loc[j] + delta) % L
                nb = cur + (nq - loc[j]) * strides[j]
                if mask & (1 << nb) and nb not in rel:
                    nrc = rc[:j] + (rc[j] + delta,) + rc[j + 1 :]
                    rel[nb] = nrc
                    if nrc < best:
                        best = nrc
                    size += 1
                    if size > kmax:
                        return size, False
                    stack.append(nb)
    return size, best == (0,) * d


def exact_cluster_law_torus(
    L: int, d: int, p: Number, kmax: int
) -> tuple[ExactDistribution, ExactDistribution]:
    """Exact laws of |C(0)| and |C_le(0)| on the L^d torus, sizes 1..kmax.

    kmax < L keeps counted clusters from wrapping, so the left endpoint is
    well defined through the unwrapped embedding and translation invariance
    is exact -- the size-biasing identity P(|C(0)|=k) = k P(|C_le(0)|=k)
    then holds exactly, not just asymptotically.
    """
    v = L**d
    _check_cap(v)
    if not 1 <= kmax < L:
        raise ValueError("need 1 <= kmax < L so clusters cannot wrap")
    strides = [L ** (d - 1 - j) for j in range(d)]
    counts_c: dict[int, dict[int, int]] = {k: {} for k in range(1, kmax + 1)}
    counts_le: dict[int, dict[int, int]] = {k: {} for k in range(1, kmax + 1)}
    for mask in range(1 << v):
        size, is_le = _torus_origin_cluster(mask, L, d, strides, kmax)
        if not 1 <= size <= kmax:
            continue
        occ = mask.bit_count()
        counts_c[size][occ] = counts_c[size].get(occ, 0) + 1
        if is_le:
            counts_le[size][occ] = counts_le[size].get(occ, 0) + 1
    sup = tuple(range(1, kmax + 1))
    law_c = ExactDistribution(
        sup, tuple(_eval_counts(counts_c[k], v, p) for k in sup), partial=True
    )
    law_le = ExactDistribution(
        sup, tuple(_eval_counts(counts_le[k], v, p) for k in sup), partial=True
    )
    return law_c, law_le


# ---------------------------------------------------------------------------
# pair tails and ratio sequences on a box
# ---------------------------------------------------------------------------


def exact_pair_tail(
    g: BoxGeometry, p: Number, n: int, x: Sequence[int]
) -> tuple[Number, Number]:
    """(joint, bound) for the cluster-repulsion correlation inequality.

    joint = P(|C_le(0)| >= n, |C_le(x)| >= n) and
    bound = P(|C_le(0)| >= n) P(|C(0)| >= n), both exact on the finite box.
    """
    _check_cap(g.site_count)
    xi = g.to_linear(x)
    origin = g.to_linear((0,) * g.d)
    if xi == origin:
        raise ValueError("x must differ from the origin")
    adj = _adjacency(g)
    c_joint: dict[int, int] = {}
    c_le0: dict[int, int] = {}
    c_c0: dict[int, int] = {}
    for mask in range(1 << g.site_count):
        occ = mask.bit_count()
        e0 = c0 = False
        if mask & (1 << origin):
            size, mini = _component_stats(origin, mask, adj)
            c0 = size >= n
            e0 = c0 and mini == origin
        if c0:
            c_c0[occ] = c_c0.get(occ, 0) + 1
        if e0:
            c_le0[occ] = c_le0.get(occ, 0) + 1
            if mask & (1 << xi):
                sx, minx = _component_stats(xi, mask, adj)
                if sx >= n and minx == xi:
                    c_joint[occ] = c_joint.get(occ, 0) + 1
    v = g.site_count
    joint = _eval_counts(c_joint, v, p)
    bound = _eval_counts(c_le0, v, p) * _eval_counts(c_c0, v, p)
    return joint, bound


def exact_le_tail_box(g: BoxGeometry, p: Number, nmax: int) -> list[Number]:
    """[P(|C_le(0)| >= k) for k = 0..nmax] by exhaustive enumeration."""
    _check_cap(g.site_count)
    origin = g.to_linear((0,) * g.d)
    adj = _adjacency(g)
    counts: dict[int, dict[int, int]] = {}
    for mask in range(1 << g.site_count):
        size = 0
        if mask & (1 << origin):
            s, mini = _component_stats(origin, mask, adj)
            if mini == origin:
                size = s
        occ = mask.bit_count()
        inner = counts.setdefault(size, {})
        inner[occ] = inner.get(occ, 0) + 1
    pmf = {s: _eval_counts(c, g.site_count, p) for s, c in counts.items()}
    out = []
    for k in range(nmax + 1):
        out.append(sum(pr for s, pr in pmf.items() if s >= k))
    return out


def exact_ratio_sequence(g: BoxGeometry, p: Number, nmax: int) -> list[Number]:
    """Ratios P(X >= n+1)/P(X >= n), X = |C_le(0)|, for n = 0..; the sequence
    ends where the tail truncates to zero."""
    tails = exact_le_tail_box(g, p, nmax + 1)
    out: list[Number] = []
    for k in range(nmax + 1):
        if tails[k] == 0:
            break
        out.append(tails[k + 1] / tails[k])
    return out


# ---------------------------------------------------------------------------
# exact heat-bath chain (enumerate-and-iterate)
# ---------------------------------------------------------------------------


def heat_bath_sweep_apply(
    dist: np.ndarray, g: BoxGeometry, cond: Sequence[float]
) -> np.ndarray:
    """One systematic heat-bath sweep applied exactly to a distribution over
    the 2^V configuration space (V <= 20ish; meant for tiny boxes)."""
    v = g.site_count
    adj = _adjacency(g)
    out = np.asarray(dist, dtype=float).copy()
    for i in range(v):
        nxt = np.zeros_like(out)
        bit = 1 << i
        for s in range(1 << v):
            w = out[s]
            if w == 0.0:
                continue
            cnt = sum(1 for nb in adj[i] if s & (1 << nb))
            q = cond[cnt]
            nxt[s | bit] += w * q
            nxt[s & ~bit] += w * (1.0 - q)
        out = nxt
    return out


def heat_bath_distribution(
    g: BoxGeometry, cond: Sequence[float], sweeps: int
) -> np.ndarray:
    """Exact configuration law after `sweeps` sweeps from all-vacant."""
    if g.site_count > 20:
        raise EnumerationCapError("heat-bath enumeration limited to 20 sites")
    dist = np.zeros(1 << g.site_count)
    dist[0] = 1.0
    for _ in range(sweeps):
        dist = heat_bath_sweep_apply(dist, g, cond)
    return dist


def heat_bath_stationary(
    g: BoxGeometry, cond: Sequence[float], tol: float = 1e-14, max_sweeps: int = 10_000
) -> np.ndarray:
    """Stationary law of the sweep chain by power iteration."""
    dist = heat_bath_distribution(g, cond, 1)
    for _ in range(max_sweeps):
        nxt = heat_bath_sweep_apply(dist, g, cond)
        if np.abs(nxt - dist).sum() < tol:
            return nxt
        dist = nxt
    return dist
