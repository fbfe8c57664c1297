"""Cluster-size tail estimation and the quantile sequences used for centering.

Conventions
-----------
X denotes the left-endpoint cluster size at the origin.  An observation is
censored when the exploration window was exhausted; censored entries carry a
lower bound, never an exact size.  Two empirical tails are exposed:

* mode "geq":    P(X >= k), counting censored entries whose bound reaches k
                 (subcritical usage; censoring should be negligible there);
* mode "finite": P(k <= X < infinity), dropping censored entries entirely
                 (the supercritical finite-cluster tail).

Rate fits are weighted least squares with tail counts as weights (empirical
tail counts have roughly Poisson variance).  The ratio estimator
exp(mean log[tail(k+1)/tail(k)]) is reported alongside the slope fit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .clusters import origin_cluster_samples

MAX_TAIL_SEARCH = 1 << 22


class EmptyTailWindowError(ValueError):
    """No observations at or beyond the requested fit window."""


class TailResolutionError(ValueError):
    """Target probability lies below the tail's resolution (tail hit zero)."""


class DegenerateTailError(ValueError):
    """Tail does not decay (p in {0,1} or a constant sample)."""


@dataclass(frozen=True)
class TailSample:
    values: np.ndarray  # int64 observed sizes (lower bounds where censored)
    censored: np.ndarray  # bool, same length

    def __post_init__(self):
        if self.values.shape != self.censored.shape:
            raise ValueError("values/censored length mismatch")

    @property
    def n(self) -> int:
        return len(self.values)

    def tail(self, k: int, mode: str = "geq") -> float:
        return float(self.tail_counts(k, mode)) / self.n

    def tail_counts(self, k: int, mode: str = "geq") -> int:
        if mode == "geq":
            return int((self.values >= k).sum())
        if mode == "finite":
            return int(((self.values >= k) & ~self.censored).sum())
        raise ValueError(f"unknown tail mode {mode!r}")

    def tail_function(self, mode: str = "geq") -> Callable[[int], float]:
        """Non-increasing step function k -> empirical tail at k."""
        kmax = int(self.values.max(initial=0))
        counts = np.zeros(kmax + 2, np.int64)
        vals = self.values if mode == "geq" else self.values[~self.censored]
        np.add.at(counts, np.clip(vals, 0, kmax + 1), 1)
        tail = counts[::-1].cumsum()[::-1] / self.n

        def fn(k: int) -> float:
            if k <= 0:
                return 1.0 if mode == "geq" else float(tail[0])
            if k > kmax:
                return 0.0
            return float(tail[k])

        return fn

    def positive_quantile(self, q: float) -> int:
        pos = self.values[(self.values >= 1) & ~self.censored]
        if pos.size == 0:
            raise EmptyTailWindowError("no positive uncensored observations")
        return int(np.quantile(pos, q, method="inverted_cdf"))

    def max_k_with_count(self, min_count: int, mode: str = "geq") -> int:
        """Largest k whose tail count still reaches min_count."""
        vals = self.values if mode == "geq" else self.values[~self.censored]
        vals = np.sort(vals)
        if vals.size < min_count:
            raise EmptyTailWindowError("sample smaller than the requested count")
        return int(vals[-min_count])


@dataclass(frozen=True)
class TailEstimate:
    rate: float
    delta: float
    prefactor_exponent: float | None
    stderr: float
    fit_window: tuple[int, int]
    r2: float
    mode: str  # "subcritical" | "supercritical"
    intercept: float = 0.0
    ratio_rate: float | None = None
    n_obs: int = 0
    warnings: tuple[str, ...] = field(default=())

    def tail_fn(self) -> Callable[[int], float]:
        """Fitted parametric tail, usable beyond the fit window."""
        if self.mode == "subcritical":
            return lambda k: min(1.0, math.exp(-self.intercept - self.rate * k))
        eta, dlt = self.rate, self.delta
        return lambda k: min(1.0, math.exp(-eta * max(k, 0) ** dlt))

    def to_json(self) -> str:
        return json.dumps(
            {
                "rate": self.rate,
                "delta": self.delta,
                "stderr": self.stderr,
                "window": list(self.fit_window),
                "r2": self.r2,
                "mode": self.mode,
                "prefactor_exponent": self.prefactor_exponent,
                "ratio_rate": self.ratio_rate,
                "warnings": list(self.warnings),
            }
        )


def _window_arrays(
    sample: TailSample, window: tuple[int, int] | None, mode: str
) -> tuple[np.ndarray, np.ndarray, np.ndarray, tuple[int, int], list[str]]:
    warnings: list[str] = []
    if window is None:
        lo = sample.positive_quantile(0.9)
        hi = sample.positive_quantile(0.999)
        window = (lo, max(hi, lo + 3))
    lo, hi = window
    if hi <= lo:
        hi = lo + 1
    ks = np.arange(lo, hi + 1)
    counts = np.array([sample.tail_counts(int(k), mode) for k in ks], dtype=float)
    keep = counts > 0
    if not keep.any() or keep.sum() < 2:
        raise EmptyTailWindowError(
            f"no tail mass in window [{lo}, {hi}] (constant or exhausted sample)"
        )
    ks, counts = ks[keep], counts[keep]
    tails = counts / sample.n
    # censored-mass bias warning
    cens_vals = sample.values[sample.censored]
    if cens_vals.size:
        cens_in = int((cens_vals >= lo).sum())
        if cens_in > 0.10 * counts[0]:
            warnings.append(
                f"censored fraction above 10% of the tail mass in window [{lo}, {hi}]"
            )
    return ks, tails, counts, (int(lo), int(hi)), warnings


def _wls(x: np.ndarray, y: np.ndarray, w: np.ndarray) -> tuple[float, float, float, float]:
    """Weighted least squares of y on x: (slope, intercept, slope_se, r2)."""
    w = w / w.sum()
    xm = float((w * x).sum())
    ym = float((w * y).sum())
    sxx = float((w * (x - xm) ** 2).sum())
    if sxx == 0:
        raise EmptyTailWindowError("degenerate fit window (single abscissa)")
    slope = float((w * (x - xm) * (y - ym)).sum()) / sxx
    intercept = ym - slope * xm
    resid = y - intercept - slope * x
    dof = max(len(x) - 2, 1)
    s2 = float((w * resid**2).sum()) * len(x) / dof
    se = math.sqrt(s2 / (sxx * len(x)))
    sst = float((w * (y - ym) ** 2).sum())
    r2 = 1.0 - float((w * resid**2).sum()) / sst if sst > 0 else 1.0
    return slope, intercept, se, r2


def estimate_zeta(
    sample: TailSample, window: tuple[int, int] | None = None
) -> TailEstimate:
    """Subcritical decay rate from the slope of -log tail against k.

    Default window: the [0.9, 0.999] quantiles of the positive observations
    (below it the polynomial prefactor biases the slope, above it counts are
    too sparse).
    """
    ks, tails, counts, win, warns = _window_arrays(sample, window, "geq")
    y = -np.log(tails)
    slope, intercept, se, r2 = _wls(ks.astype(float), y, counts)
    # companion ratio estimator
    ratio = None
    if len(ks) >= 2 and np.all(np.diff(ks) == 1):
        logr = np.diff(np.log(tails))
        ratio = float(-logr.mean())
    # prefactor diagnostic: -log T = c + zeta k - theta log k
    theta = None
    if len(ks) >= 4:
        A = np.stack([np.ones_like(ks, float), ks.astype(float), -np.log(ks)], axis=1)
        wts = np.sqrt(counts / counts.sum())
        sol, *_ = np.linalg.lstsq(A * wts[:, None], y * wts, rcond=None)
        theta = float(sol[2])
    if slope <= 0:
        warns = warns + ["nonpositive fitted rate: not a decaying tail"]
    return TailEstimate(
        rate=float(slope),
        delta=1.0,
        prefactor_exponent=theta,
        stderr=se,
        fit_window=win,
        r2=r2,
        mode="subcritical",
        intercept=float(intercept),
        ratio_rate=ratio,
        n_obs=sample.n,
        warnings=tuple(warns),
    )


def estimate_eta_delta(
    sample: TailSample,
    window: tuple[int, int] | None = None,
    fixed_delta: float | None = None,
) -> TailEstimate:
    """Supercritical Weibull-tail fit: log(-log tail) ~ log eta + delta log k.

    fixed_delta pins the stretch exponent (e.g. (d-1)/d) and fits only eta.
    A fitted delta near 1 is flagged as a likely regime mismatch.
    """
    ks, tails, counts, win, warns = _window_arrays(sample, window, "finite")
    pos = tails < 1.0
    ks, tails, counts = ks[pos], tails[pos], counts[pos]
    if len(ks) < 2:
        raise EmptyTailWindowError("tail is flat at 1 over the window")
    y = np.log(-np.log(tails))
    x = np.log(ks.astype(float))
    if fixed_delta is None:
        slope, intercept, se, r2 = _wls(x, y, counts)
        delta = float(slope)
        eta = float(math.exp(intercept))
    else:
        delta = float(fixed_delta)
        w = counts / counts.sum()
        intercept = float((w * (y - delta * x)).sum())
        resid = y - delta * x - intercept
        se = float(math.sqrt((w * resid**2).sum() / max(len(x) - 1, 1)))
        sst = float((w * (y - (w * y).sum()) ** 2).sum())
        r2 = 1.0 - float((w * resid**2).sum()) / sst if sst > 0 else 1.0
        eta = float(math.exp(intercept))
    if delta > 0.9:
        warns = warns + [
            "fitted stretch exponent near 1: sample looks exponential (regime mismatch?)"
        ]
    if not 0 < delta <= 1.2:
        warns = warns + ["stretch exponent outside (0, 1.2]: fit is unreliable"]
    # stderr of eta via delta method on the intercept
    eta_se = eta * se
    return TailEstimate(
        rate=eta,
        delta=min(max(delta, 1e-9), 1.0),
        prefactor_exponent=None,
        stderr=eta_se,
        fit_window=win,
        r2=r2,
        mode="supercritical",
        intercept=float(math.log(eta)),
        ratio_rate=None,
        n_obs=sample.n,
        warnings=tuple(warns),
    )


# ---------------------------------------------------------------------------
# quantile sequences
# ---------------------------------------------------------------------------


def compute_vn(tail: Callable[[int], float], scale: int) -> tuple[int, float]:
    """Smallest v with tail(v) <= 1/scale, and b = scale*tail(v) in (0, 1].

    This is the upper branch of the two candidate quantile definitions (the
    infimum over {tail <= 1/scale}); ties with the supremum branch resolve
    upward.
    """
    if scale < 1:
        raise ValueError("scale must be >= 1")
    target = 1.0 / scale
    t0 = tail(0)
    if not 0.999999999999 <= t0 <= 1.000000000001:
        raise ValueError(f"tail(0) must equal 1, got {t0}")
    v = 0
    t = t0
    while t > target:
        v += 1
        if v > MAX_TAIL_SEARCH:
            raise DegenerateTailError("tail does not reach 1/scale (no decay)")
        t = tail(v)
    if t <= 0.0:
        raise TailResolutionError(
            f"tail hits zero at {v} before reaching 1/scale: target below resolution"
        )
    return v, scale * t


def compute_unx(
    tail: Callable[[int], float], volume: int, x: float
) -> tuple[int, float]:
    """Smallest u with tail(u) <= e^{-x}/volume, and a = tail(u)*volume*e^x.

    `volume` is the box volume (2n+1)^d; quantile sequences are indexed by
    volume throughout, radius conversion happens at the boundary (CLI).
    At x = 0 this is compute_vn at scale = volume.
    """
    if volume < 1:
        raise ValueError("volume must be >= 1")
    target = math.exp(-x) / volume
    t = tail(0)
    u = 0
    while t > target:
        u += 1
        if u > MAX_TAIL_SEARCH:
            raise DegenerateTailError("tail does not reach the target (no decay)")
        t = tail(u)
    if t <= 0.0:
        raise TailResolutionError(
            f"tail hits zero at {u}: target probability {target:g} below resolution"
        )
    return u, t * volume * math.exp(x)


@dataclass(frozen=True)
class QuantileSequence:
    """Centering data at one scale: v with P(X >= v) = b/n, plus u_n(x)."""

    scale: int
    v_n: int
    b_n: float
    a_n: float
    u_of_x: Callable[[float], int]


def quantile_sequence(tail: Callable[[int], float], volume: int) -> QuantileSequence:
    v, b = compute_vn(tail, volume)
    _, a = compute_unx(tail, volume, 0.0)

    def u_of_x(x: float) -> int:
        return compute_unx(tail, volume, x)[0]

    return QuantileSequence(volume, v, b, a, u_of_x)


def classical_un_sub(zeta: float, alpha: float, n: int) -> int:
    """floor(log n / zeta + alpha loglog n / zeta) for classical exponential
    tails with polynomial exponent alpha."""
    if zeta <= 0:
        raise ValueError("zeta must be positive")
    if n < 3:
        raise ValueError("n must be >= 3 (loglog undefined)")
    return math.floor(math.log(n) / zeta + alpha * math.log(math.log(n)) / zeta)


def classical_un_sup(eta: float, alpha: float, delta: float, n: int, x: float) -> int:
    """floor((log n / eta + alpha loglog n / (eta delta) + x)^(1/delta))."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0,1)")
    if n < 3:
        raise ValueError("n must be >= 3 (loglog undefined)")
    base = math.log(n) / eta + alpha * math.log(math.log(n)) / (eta * delta) + x
    if base < 0:
        raise ValueError(
            f"negative power argument {base:g} (log n/eta={math.log(n)/eta:g}, x={x:g})"
        )
    return math.floor(base ** (1.0 / delta))


# ---------------------------------------------------------------------------
# sample producer
# ---------------------------------------------------------------------------


def origin_tail_sample(
    d: int,
    p: float,
    replicas: int,
    master_seed: int,
    statistic: str = "le",
    cap_radius: int = 64,
    cap_size: int = 4096,
    replica_offset: int = 0,
) -> TailSample:
    """Monte Carlo sample of X = |C_le(0)| (or |C(0)|) by lazy origin BFS.

    For "le", a censored exploration whose partial lexicographic minimum is
    not the origin is already conclusive (X = 0 exactly); only censored
    explorations still anchored at the origin stay censored.
    """
    if statistic not in ("le", "cluster"):
        raise ValueError("statistic must be 'le' or 'cluster'")
    sizes, cens, isle = origin_cluster_samples(
        d, p, replicas, master_seed, replica_offset, cap_radius, cap_size
    )
    cens = cens.astype(bool)
    if statistic == "cluster":
        return TailSample(sizes.astype(np.int64), cens)
    vals = np.where(isle.astype(bool), sizes, 0).astype(np.int64)
    return TailSample(vals, cens & isle.astype(bool))
