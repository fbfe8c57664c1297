"""Occurrence times of rare cluster events and the exponential law around them.

The event at threshold m is "some left-endpoint cluster of the restricted
configuration has size >= m"; localized variants truncate the size window at
m^theta, and the finite-cluster variant requires the witness not to touch
the current box boundary (clusters interior to a growing box are already
final, so that proxy is exact on the lazily grown field).  The occurrence
statistic tau takes values in the box-volume sequence (2k+1)^d; a record is
censored, not failed, when no hit occurs by the scan horizon.

The intensity estimate plugs the empirical miss frequency at the snapped
horizon f into lambda = -log P(tau > f)/(f P(E)).  f is floor(P^-gamma)
rounded down to the nearest attainable box volume, since tau only takes
values on that grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels as K
from ._parallel import map_blocks
from .extremes import wilson_interval
from .lattice import BoxGeometry
from .oracles import exact_le_tail_box, exact_pair_tail
from .sampler import SeedSpec
from .tails import origin_tail_sample

_NO_CAP = 1 << 40


@dataclass(frozen=True)
class EventSpec:
    """Size window for the origin cluster event: [m, m^theta) when localized."""

    m: int
    theta: float | None = None
    finite_only: bool = False

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.theta is not None and self.theta <= 1:
            raise ValueError("localization exponent theta must exceed 1")

    @property
    def upper(self) -> int:
        if self.theta is None:
            return _NO_CAP
        return max(int(math.ceil(self.m**self.theta)), self.m + 1)


@dataclass(frozen=True)
class HittingRecord:
    tau: int  # volume (2k+1)^d at the hit, or the censoring horizon volume
    k: int  # radius at the hit, -1 when censored
    censored: bool
    hit_site: tuple[int, ...] | None
    replica: int


def tau_events(
    d: int,
    p: float,
    ev: EventSpec,
    k_max: int,
    seed: SeedSpec,
    replicas: int = 1,
    workers: int = 1,
) -> list[HittingRecord]:
    """Occurrence times over a lazily grown Bernoulli(p) field, one per replica."""
    ms = seed.master_u64
    off = seed.replica_index

    def block(lo: int, hi: int):
        return K.tau_scan_batch(
            ms, off + lo, off + hi, d, p,
            ev.m, ev.upper, 1 if ev.finite_only else 0, k_max,
        )

    parts = map_blocks(replicas, block, workers)
    k_hit = np.concatenate([x[0] for x in parts])
    le = np.concatenate([x[1] for x in parts])
    side_max = 2 * k_max + 1
    out = []
    for i in range(replicas):
        if k_hit[i] < 0:
            out.append(
                HittingRecord((2 * k_max + 1) ** d, -1, True, None, off + i)
            )
        else:
            coords = np.unravel_index(int(le[i]), (side_max,) * d)
            site = tuple(int(c) - k_max for c in coords)
            out.append(
                HittingRecord((2 * int(k_hit[i]) + 1) ** d, int(k_hit[i]), False, site, off + i)
            )
    return out


def tau_event(d: int, p: float, ev: EventSpec, k_max: int, seed: SeedSpec) -> HittingRecord:
    return tau_events(d, p, ev, k_max, seed, replicas=1)[0]


def tau_volumes(records: Sequence[HittingRecord]) -> tuple[np.ndarray, np.ndarray]:
    taus = np.array([r.tau for r in records], dtype=np.int64)
    cens = np.array([r.censored for r in records], dtype=bool)
    return taus, cens


# ---------------------------------------------------------------------------
# event probability and intensity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbEstimate:
    value: float
    ci: tuple[float, float]
    n: int
    exact: bool = False


def event_prob(
    ev: EventSpec,
    replicas: int,
    seed: SeedSpec,
    d: int,
    p: float,
    mode: str = "mc",
) -> ProbEstimate:
    """P(E_m) = P(m <= |C_le(0)| < upper), Monte Carlo or exact.

    MC samples the origin cluster on a window of radius >= the event's
    dependence range; exact mode enumerates a box (site cap applies, so d=1
    in practice).
    """
    radius = int(math.ceil(ev.m ** (ev.theta if ev.theta is not None else 2.0)))
    radius = max(radius, ev.m + 1)
    if mode == "exact":
        g = BoxGeometry(d, radius)
        tail = exact_le_tail_box(g, p, min(ev.upper, g.site_count + 1))
        val = tail[ev.m] - (tail[ev.upper] if ev.upper < len(tail) else 0.0)
        return ProbEstimate(float(val), (float(val), float(val)), 1 << g.site_count, True)
    if mode != "mc":
        raise ValueError("mode must be 'mc' or 'exact'")
    cap_size = max(4 * ev.upper if ev.upper < _NO_CAP else 4 * radius * radius, 256)
    sample = origin_tail_sample(
        d, p, replicas, seed.master_seed,
        statistic="le", cap_radius=radius, cap_size=cap_size,
        replica_offset=seed.replica_index,
    )
    ok = ~sample.censored
    hits = int(((sample.values >= ev.m) & (sample.values < ev.upper) & ok).sum())
    lo, hi = wilson_interval(hits, replicas)
    if hits == 0:
        lo = 0.0  # one-sided
    return ProbEstimate(hits / replicas, (lo, hi), replicas)


@dataclass(frozen=True)
class LambdaEstimate:
    value: float
    ci: tuple[float, float]
    f_nominal: int
    f_used: int
    k_used: int
    miss_prob: float
    n: int


def lambda_estimate(
    ev: EventSpec,
    gamma: float,
    replicas: int,
    seed: SeedSpec,
    d: int,
    p: float,
    p_event: float,
) -> LambdaEstimate:
    """Intensity lambda from the hit frequency within the snapped horizon f.

    gamma in (0,1) balances regime validity against resolution (default
    policy 1/2 upstream); p_event should come from a high-precision tail
    estimate since it divides straight into lambda.
    """
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0,1)")
    if p_event <= 0:
        raise ValueError("p_event must be positive")
    f_nom = int(math.floor(p_event**-gamma))
    if f_nom < 1:
        raise ValueError(
            f"f = floor(P^-gamma) = {f_nom} < 1: event too likely for the asymptotic regime"
        )
    k_used = 0
    while (2 * (k_used + 1) + 1) ** d <= f_nom:
        k_used += 1
    f_used = (2 * k_used + 1) ** d
    records = tau_events(d, p, ev, k_used, seed, replicas)
    hits = sum(1 for r in records if not r.censored)
    q = hits / replicas
    if q >= 1.0:
        raise ValueError("every replica hit within f: event far too likely")
    lam = -math.log1p(-q) / (f_used * p_event)
    qlo, qhi = wilson_interval(hits, replicas)
    lo = -math.log1p(-qlo) / (f_used * p_event)
    hi = -math.log1p(-min(qhi, 1 - 1e-12)) / (f_used * p_event)
    return LambdaEstimate(lam, (lo, hi), f_nom, f_used, k_used, 1 - q, replicas)


# ---------------------------------------------------------------------------
# exponential law
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExpLawResult:
    ks_distance: float
    table: tuple[tuple[float, float, float], ...]  # (t, empirical survival, e^-t)
    censored_fraction: float
    t_max: float


def exponential_law_test(
    records: Sequence[HittingRecord],
    p_event: float,
    lam: float,
    t_grid: np.ndarray | None = None,
    max_censored: float = 0.05,
) -> ExpLawResult:
    """KS-style sup distance between the law of lam*P(E)*tau and Exp(1).

    The grid is truncated below the censoring horizon so censored records
    (which all exceed it) never bias the empirical survival.
    """
    taus, cens = tau_volumes(records)
    frac_c = float(cens.mean())
    if frac_c > max_censored:
        need = 4.6 / (lam * p_event)
        k_hint = int(math.ceil(((need ** (1 / 1)) - 1) / 2))
        raise ValueError(
            f"censored fraction {frac_c:.3f} exceeds {max_censored}: "
            f"rerun with a scan horizon of volume >= {need:.3g} (k_max ~ {k_hint})"
        )
    s = lam * p_event * taus.astype(float)
    horizon = float(s[cens].min()) if cens.any() else float("inf")
    if t_grid is None:
        t_hi = min(5.0, horizon * 0.999)
        t_grid = np.arange(0.0, t_hi + 1e-9, 0.05)
    else:
        t_grid = np.asarray(t_grid, float)
        t_grid = t_grid[t_grid < horizon]
    n = len(s)
    table = []
    ks = 0.0
    for t in t_grid:
        emp = float((s > t).sum()) / n
        ref = math.exp(-t)
        table.append((float(t), emp, ref))
        ks = max(ks, abs(emp - ref))
    return ExpLawResult(ks, tuple(table), frac_c, float(t_grid[-1]) if len(t_grid) else 0.0)


# ---------------------------------------------------------------------------
# tau versus the strictly-inside occurrence time
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TauTDiscrepancy:
    fraction: float
    ci: tuple[float, float]
    n_tau: int
    n_t: int
    replicas: int


def tau_vs_t_discrepancy(
    d: int,
    p: float,
    n: int,
    m: int,
    replicas: int,
    seed: SeedSpec,
    workers: int = 1,
) -> TauTDiscrepancy:
    """Fraction of replicas where {tau_Em <= (2n+1)^d} differs from the
    boundary-insensitive version requiring the witness anchor x to satisfy
    x + B_m inside B_n (so the pattern's dependence box fits)."""
    ms = seed.master_u64
    off = seed.replica_index
    side = 2 * n + 1
    v = side**d

    def block(lo: int, hi: int):
        occ = np.empty(v, np.uint8)
        out = np.zeros((hi - lo, 2), np.int64)
        for i, rep in enumerate(range(off + lo, off + hi)):
            K.fill_bernoulli(ms, rep, d, n, p, occ)
            roots = K.label_box_roots(occ, d, side, 0)
            occ_idx = np.flatnonzero(roots >= 0)
            if occ_idx.size == 0:
                continue
            uniq, inv = np.unique(roots[occ_idx], return_inverse=True)
            sizes = np.bincount(inv)
            le = np.full(len(uniq), v, np.int64)
            np.minimum.at(le, inv, occ_idx)
            big = sizes >= m
            out[i, 0] = 1 if big.any() else 0
            if big.any():
                le_big = le[big]
                coords = np.stack(np.unravel_index(le_big, (side,) * d), axis=1) - n
                inside = (np.abs(coords) <= n - m).all(axis=1)
                out[i, 1] = 1 if inside.any() else 0
        return out

    parts = map_blocks(replicas, block, workers)
    flags = np.concatenate(parts)
    differ = int((flags[:, 0] != flags[:, 1]).sum())
    return TauTDiscrepancy(
        differ / replicas,
        wilson_interval(differ, replicas),
        int(flags[:, 0].sum()),
        int(flags[:, 1].sum()),
        replicas,
    )


# ---------------------------------------------------------------------------
# second-moment sum
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SecondMomentResult:
    value: float
    stderr: float | None
    p_event: float
    window: int
    majorant: float | None
    per_shift: tuple[tuple[tuple[int, ...], float], ...] | None
    n_hits: int
    mode: str


def second_moment_sum(
    m: int,
    alpha: float,
    mode: str,
    budget: int,
    d: int,
    p: float,
    seed: SeedSpec,
    box_radius: int | None = None,
    workers: int = 1,
) -> SecondMomentResult:
    """sum over 0 < |x|_inf <= m^alpha of P(E_m and theta_x E_m) / P(E_m).

    mc mode: one labeling per sampled box; every core site acts as an origin
    by translation invariance, pairs are counted between left endpoints of
    interior clusters of size >= m.  exact mode: full enumeration on a small
    box (the analytic majorant (2 m^alpha + 1)^d P(|C(0)| >= m) is returned
    alongside, computed exactly on the same box).
    """
    window = int(math.floor(m**alpha))
    if mode == "exact":
        radius = box_radius if box_radius is not None else window + m
        g = BoxGeometry(d, radius)
        origin = (0,) * d
        p_e = exact_le_tail_box(g, p, m)[m]
        if p_e == 0:
            return SecondMomentResult(0.0, None, 0.0, window, 0.0, tuple(), 0, mode)
        per = []
        total = 0.0
        c_tail = None
        for idx in range(g.site_count):
            x = g.from_linear(idx)
            if x == origin or max(abs(c) for c in x) > window:
                continue
            joint, bound = exact_pair_tail(g, p, m, x)
            if c_tail is None and p_e > 0:
                c_tail = bound / p_e  # P(|C(0)| >= m), exact
            per.append((x, float(joint / p_e)))
            total += joint / p_e
        majorant = (2 * window + 1) ** d * float(c_tail if c_tail is not None else 0.0)
        return SecondMomentResult(
            float(total), None, float(p_e), window, majorant, tuple(per), 0, mode
        )
    if mode != "mc":
        raise ValueError("mode must be 'mc' or 'exact'")
    core_margin = window + 2 * m
    side = 2 * core_margin + 65
    if side % 2 == 0:
        side += 1
    ms = seed.master_u64
    off = seed.replica_index

    def block(lo: int, hi: int):
        return K.second_moment_boxes(
            ms, off + lo, off + hi, d, side, p, m, window, core_margin
        )

    parts = map_blocks(budget, block, workers)
    hits = np.concatenate([x[0] for x in parts]).astype(float)
    pairs = np.concatenate([x[1] for x in parts]).astype(float)
    tot_h = hits.sum()
    core_count = (side - 2 * core_margin) ** d * budget
    p_e = tot_h / core_count
    if tot_h == 0:
        return SecondMomentResult(0.0, None, 0.0, window, None, None, 0, mode)
    value = pairs.sum() / tot_h
    # delta-method stderr over replica blocks
    nb = len(hits)
    if nb > 1 and tot_h > 0:
        hbar = hits.mean()
        pbar = pairs.mean()
        cov = np.cov(pairs, hits, ddof=1)
        var = (
            cov[0, 0] - 2 * value * cov[0, 1] + value**2 * cov[1, 1]
        ) / (nb * hbar**2)
        stderr = math.sqrt(max(var, 0.0))
    else:
        stderr = None
    return SecondMomentResult(
        float(value), stderr, float(p_e), window, None, None, int(tot_h), mode
    )
