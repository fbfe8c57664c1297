"""Experiment orchestration: TOML configs, reproducible runs, output files.

A run is a pure function of (config, master_seed): per-replica records go to
JSON-lines, summaries to CSV, and a manifest (written last, atomically)
lists every emitted file with its checksum.  A run directory without a
manifest is ignorable debris from a crashed run.  Worker count parallelizes
fixed replica blocks and never changes any output byte.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .extremes import (
    BcDiscrepancy,
    ExtremeSample,
    bc_discrepancy,
    gumbel_centering,
    gumbel_compare_sub,
    gumbel_compare_sup,
    run_extremes,
)
from .clusters import label_clusters
from .hitting import (
    EventSpec,
    event_prob,
    exponential_law_test,
    lambda_estimate,
    tau_events,
    tau_volumes,
)
from .lattice import BOUNDARY_CONDITIONS, BoxGeometry
from .oracles import enumerate_box, exact_cluster_law_torus, longest_run_pmf
from .sampler import BernoulliSpec, MarkovFieldSpec, SeedSpec, sample_bernoulli, sample_markov_field
from .tails import TailEstimate, TailSample, estimate_eta_delta, estimate_zeta, origin_tail_sample

OUT_ROOT_ENV = "PERCMAX_OUT"

KINDS = ("sample", "extremes", "tails", "hitting", "bc-compare", "oracle", "sweep")


class ConfigError(ValueError):
    """Invalid configuration; carries the offending key path."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"config key '{key}': {message}")


def _need(table: dict, key: str, typ, path: str):
    if key not in table:
        raise ConfigError(f"{path}{key}", "missing")
    val = table[key]
    if typ is float and isinstance(val, int) and not isinstance(val, bool):
        val = float(val)
    if not isinstance(val, typ) or isinstance(val, bool) and typ is not bool:
        raise ConfigError(f"{path}{key}", f"expected {typ.__name__}, got {type(val).__name__}")
    return val


def _opt(table: dict, key: str, typ, default, path: str):
    if key not in table:
        return default
    return _need(table, key, typ, path)


@dataclass
class ExperimentConfig:
    kind: str
    master_seed: int
    replicas: int
    geometry: BoxGeometry | None
    model: BernoulliSpec | MarkovFieldSpec | None
    params: dict[str, Any]
    out_dir: str | None
    raw: dict[str, Any] = field(repr=False, default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        kind = _need(data, "kind", str, "")
        if kind not in KINDS:
            raise ConfigError("kind", f"must be one of {KINDS}, got {kind!r}")
        master_seed = _need(data, "master_seed", int, "")
        if not 0 <= master_seed < (1 << 64):
            raise ConfigError("master_seed", "must fit in 64 bits")
        replicas = _opt(data, "replicas", int, 1, "")
        if replicas < 1:
            raise ConfigError("replicas", "must be >= 1")
        geometry = None
        if "geometry" in data:
            gt = data["geometry"]
            if not isinstance(gt, dict):
                raise ConfigError("geometry", "must be a table")
            bc = _opt(gt, "bc", str, "zero", "geometry.")
            if bc not in BOUNDARY_CONDITIONS:
                raise ConfigError("geometry.bc", f"must be one of {BOUNDARY_CONDITIONS}")
            try:
                geometry = BoxGeometry(
                    _need(gt, "dim", int, "geometry."),
                    _need(gt, "radius", int, "geometry."),
                    bc,
                )
            except ValueError as e:
                raise ConfigError("geometry", str(e)) from e
        model = None
        if "model" in data:
            mt = data["model"]
            if not isinstance(mt, dict):
                raise ConfigError("model", "must be a table")
            which = _need(mt, "model", str, "model.")
            try:
                if which == "bernoulli":
                    model = BernoulliSpec(_need(mt, "p", float, "model."))
                elif which == "markov":
                    model = MarkovFieldSpec(
                        conditional=tuple(_need(mt, "conditional_table", list, "model.")),
                        delta=_need(mt, "delta", float, "model."),
                        sweeps=_opt(mt, "sweeps", int, 64, "model."),
                        dominating_p=mt.get("dominating_p"),
                    )
                else:
                    raise ConfigError("model.model", "must be 'bernoulli' or 'markov'")
            except ConfigError:
                raise
            except ValueError as e:
                raise ConfigError("model", str(e)) from e
        params_key = kind.replace("-", "_")
        params = data.get(params_key, {})
        if not isinstance(params, dict):
            raise ConfigError(params_key, "must be a table")
        return cls(
            kind=kind,
            master_seed=master_seed,
            replicas=replicas,
            geometry=geometry,
            model=model,
            params=dict(params),
            out_dir=data.get("out_dir"),
            raw=data,
        )


def load_config(path: str | Path) -> ExperimentConfig:
    import tomli

    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except FileNotFoundError as e:
        raise ConfigError("(file)", f"config file not found: {path}") from e
    except tomli.TOMLDecodeError as e:
        raise ConfigError("(syntax)", f"invalid TOML: {e}") from e
    return ExperimentConfig.from_dict(data)


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------


def _atomic_write(path: Path, text: str) -> str:
    """Write text atomically; returns the sha256 of the bytes written."""
    path.parent.mkdir(parents=True, exist_ok=True)
    data = text.encode()
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)
    return hashlib.sha256(data).hexdigest()


def _jsonl(rows) -> str:
    return "".join(json.dumps(row, sort_keys=True) + "\n" for row in rows)


def _csv_text(header: list[str], rows) -> str:
    out = [",".join(header)]
    for row in rows:
        out.append(",".join(_csv_cell(c) for c in row))
    return "\n".join(out) + "\n"


def _csv_cell(c) -> str:
    if isinstance(c, float):
        return repr(c)
    return str(c)


def config_digest(cfg: ExperimentConfig) -> str:
    canon = json.dumps(cfg.raw, sort_keys=True, default=str)
    return hashlib.sha256(canon.encode()).hexdigest()


@dataclass
class RunManifest:
    config_digest: str
    version: str
    started: float
    finished: float
    outputs: dict[str, str]

    def write(self, out_dir: Path) -> None:
        body = json.dumps(
            {
                "config_digest": self.config_digest,
                "version": self.version,
                "started": self.started,
                "finished": self.finished,
                "outputs": self.outputs,
            },
            sort_keys=True,
            indent=2,
        )
        _atomic_write(out_dir / "manifest.json", body)


def resolve_out_dir(cfg: ExperimentConfig, override: str | None) -> Path:
    out = override or cfg.out_dir
    if out is None:
        raise ConfigError("out_dir", "missing (set it in the config or pass --out)")
    p = Path(out)
    if not p.is_absolute():
        root = os.environ.get(OUT_ROOT_ENV)
        if root:
            p = Path(root) / p
    return p


# ---------------------------------------------------------------------------
# experiment compositions (shared by CLI runs and the acceptance suite)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GumbelExperiment:
    sample: ExtremeSample
    estimate: TailEstimate
    u_n: int
    a_n: float
    comparison_rate: float
    sup_distance: float
    per_x: tuple


def gumbel_experiment_sub(
    d: int,
    p: float,
    n: int,
    replicas: int,
    tail_replicas: int,
    master_seed: int,
    workers: int = 1,
    window: tuple[int, int] | None = None,
    cap_radius: int = 96,
) -> GumbelExperiment:
    """Subcritical pipeline: tail estimate -> centering -> Gumbel comparison.

    The centering tail is the fitted parametric tail (slope over a window
    reaching as deep as counts allow), which keeps a_n stable where raw
    counts are sparse.
    """
    g = BoxGeometry(d, n)
    sample = run_extremes(
        g, BernoulliSpec(p), replicas, SeedSpec(master_seed, 0), workers=workers
    )
    tail_sample = origin_tail_sample(
        d, p, tail_replicas, master_seed ^ 0x5EED, cap_radius=cap_radius,
        cap_size=4 * cap_radius,
    )
    if window is None:
        lo = tail_sample.positive_quantile(0.9)
        hi = tail_sample.max_k_with_count(50)
        window = (lo, max(hi, lo + 4))
    est = estimate_zeta(tail_sample, window)
    u, a = gumbel_centering(est.tail_fn(), g.site_count)
    comp = gumbel_compare_sub(sample.values, u, a, est.rate)
    return GumbelExperiment(sample, est, u, a, est.rate, comp.sup_distance, comp.per_x_table)


def gumbel_experiment_sup(
    d: int,
    p: float,
    n: int,
    replicas: int,
    tail_replicas: int,
    master_seed: int,
    workers: int = 1,
    window: tuple[int, int] | None = None,
    cap_size: int = 2048,
) -> GumbelExperiment:
    """Supercritical pipeline on the finite-cluster maximum."""
    g = BoxGeometry(d, n)
    sample = run_extremes(
        g, BernoulliSpec(p), replicas, SeedSpec(master_seed, 0), workers=workers
    )
    tail_sample = origin_tail_sample(
        d, p, tail_replicas, master_seed ^ 0x5EED, cap_radius=max(64, int(2 * cap_size**0.5)),
        cap_size=cap_size,
    )
    if window is None:
        lo = max(4, tail_sample.positive_quantile(0.9))
        hi = tail_sample.max_k_with_count(50, mode="finite")
        window = (lo, max(hi, lo + 4))
    est = estimate_eta_delta(tail_sample, window)
    tail_fn = tail_sample.tail_function(mode="finite")
    u, _ = gumbel_centering(lambda k: min(1.0, tail_fn(k)), g.site_count)
    comp = gumbel_compare_sup(sample.finite, u, est.rate, d)
    return GumbelExperiment(sample, est, u, 1.0, comp.rate, comp.sup_distance, comp.per_x_table)


def pick_event_threshold(
    d: int,
    p: float,
    target_pe: tuple[float, float],
    master_seed: int,
    probe_replicas: int = 2_000_000,
    finite_only: bool = False,
    cap_radius: int = 96,
) -> tuple[int, float]:
    """Smallest m whose event probability falls inside target_pe, with its
    estimate (geometric mean of the bracket as the aim point)."""
    sample = origin_tail_sample(
        d, p, probe_replicas, master_seed ^ 0xE7E7, cap_radius=cap_radius,
        cap_size=4 * cap_radius,
    )
    mode = "finite" if finite_only else "geq"
    aim = math.sqrt(target_pe[0] * target_pe[1])
    best_m, best_pe, best_gap = None, None, float("inf")
    for m in range(1, int(sample.values.max(initial=2)) + 1):
        pe = sample.tail(m, mode)
        if pe <= 0:
            break
        if target_pe[0] <= pe <= target_pe[1]:
            gap = abs(math.log(pe / aim))
            if gap < best_gap:
                best_m, best_pe, best_gap = m, pe, gap
    if best_m is None:
        raise ValueError(
            f"no threshold m reaches P(E_m) in [{target_pe[0]:g}, {target_pe[1]:g}]"
        )
    return best_m, best_pe


# ---------------------------------------------------------------------------
# per-kind runners
# ---------------------------------------------------------------------------


def _require(cfg: ExperimentConfig, what: str):
    if what == "geometry" and cfg.geometry is None:
        raise ConfigError("geometry", "required for this experiment kind")
    if what == "model" and cfg.model is None:
        raise ConfigError("model", "required for this experiment kind")


def _sample_config(cfg: ExperimentConfig, replica: int):
    seed = SeedSpec(cfg.master_seed, replica)
    if isinstance(cfg.model, BernoulliSpec):
        return sample_bernoulli(cfg.geometry, cfg.model, seed)
    return sample_markov_field(cfg.geometry, cfg.model, seed)


def _run_sample(cfg: ExperimentConfig, out: Path, workers: int) -> dict[str, str]:
    _require(cfg, "geometry")
    _require(cfg, "model")
    rows = []
    outputs: dict[str, str] = {}
    dump_census = bool(cfg.params.get("dump_census", True))
    for r in range(cfg.replicas):
        config = _sample_config(cfg, r)
        census = label_clusters(config)
        rows.append(
            {
                "replica": r,
                "occupied": config.occupied_count(),
                "clusters": census.n_clusters,
                "m_zb": int(census.sizes.max()) if census.n_clusters else 0,
            }
        )
        if r == 0 and dump_census:
            path = out / "census_000.csv"
            census.to_csv(path)
            outputs["census_000.csv"] = hashlib.sha256(path.read_bytes()).hexdigest()
    outputs["samples.jsonl"] = _atomic_write(out / "samples.jsonl", _jsonl(rows))
    return outputs


def _run_extremes(cfg: ExperimentConfig, out: Path, workers: int) -> dict[str, str]:
    _require(cfg, "geometry")
    _require(cfg, "model")
    pr = cfg.params
    all_bc = bool(pr.get("all_bc", False))
    margin = int(pr.get("margin", 0)) or None
    finite_rule = pr.get("finite_rule", "boundary")
    sample = run_extremes(
        cfg.geometry,
        cfg.model,
        cfg.replicas,
        SeedSpec(cfg.master_seed, 0),
        all_bc=all_bc,
        margin=margin,
        finite_rule=finite_rule,
        workers=workers,
    )
    rows = []
    for i in range(sample.replicas):
        rows.append(
            {
                "replica": i,
                "n": sample.n,
                "p": sample.p,
                "bc": sample.bc,
                "m_zb": int(sample.values[i]),
                "m_fb": int(sample.fb[i]) if sample.fb is not None else None,
                "m_pb": int(sample.pb[i]) if sample.pb is not None else None,
                "m_finite": int(sample.finite[i]) if sample.finite is not None else None,
            }
        )
    outputs = {"records.jsonl": _atomic_write(out / "records.jsonl", _jsonl(rows))}
    srow: list[Any] = [
        sample.n,
        sample.p,
        float(sample.values.mean()),
        int(sample.values.max(initial=0)),
    ]
    header = ["n", "p", "mean_m", "max_m"]
    tail_replicas = int(pr.get("tail_replicas", 0))
    if tail_replicas > 0 and isinstance(cfg.model, BernoulliSpec):
        regime = pr.get("regime", "subcritical")
        if regime == "subcritical":
            exp = gumbel_experiment_sub(
                cfg.geometry.d, cfg.model.p, cfg.geometry.n,
                cfg.replicas, tail_replicas, cfg.master_seed, workers,
            )
        else:
            exp = gumbel_experiment_sup(
                cfg.geometry.d, cfg.model.p, cfg.geometry.n,
                cfg.replicas, tail_replicas, cfg.master_seed, workers,
            )
        header += ["u_n", "a_n", "rate", "sup_distance"]
        srow += [exp.u_n, exp.a_n, exp.comparison_rate, exp.sup_distance]
    outputs["summary.csv"] = _atomic_write(
        out / "summary.csv", _csv_text(header, [srow])
    )
    return outputs


def _run_tails(cfg: ExperimentConfig, out: Path, workers: int) -> dict[str, str]:
    _require(cfg, "geometry")
    _require(cfg, "model")
    if not isinstance(cfg.model, BernoulliSpec):
        raise ConfigError("model.model", "tail estimation runs on bernoulli fields")
    pr = cfg.params
    regime = pr.get("regime", "subcritical")
    cap_radius = int(pr.get("cap_radius", 96))
    cap_size = int(pr.get("cap_size", 4 * cap_radius))
    sample = origin_tail_sample(
        cfg.geometry.d, cfg.model.p, cfg.replicas, cfg.master_seed,
        cap_radius=cap_radius, cap_size=cap_size,
    )
    wlo, whi = int(pr.get("window_lo", 0)), int(pr.get("window_hi", 0))
    window = (wlo, whi) if wlo and whi else None
    if regime == "subcritical":
        est = estimate_zeta(sample, window)
    elif regime == "supercritical":
        fixed = pr.get("fixed_delta")
        est = estimate_eta_delta(sample, window, fixed_delta=fixed)
    else:
        raise ConfigError("tails.regime", "must be 'subcritical' or 'supercritical'")
    outputs = {"estimate.json": _atomic_write(out / "estimate.json", est.to_json() + "\n")}
    kmax = int(sample.values.max(initial=0))
    rows = []
    for k in range(kmax + 1):
        rows.append(
            [
                k,
                sample.tail(k, "geq"),
                sample.tail_counts(k, "geq"),
                sample.tail_counts(k, "geq") - sample.tail_counts(k, "finite"),
            ]
        )
    outputs["tail.csv"] = _atomic_write(
        out / "tail.csv", _csv_text(["n", "tail", "count", "censored_count"], rows)
    )
    return outputs


def _run_hitting(cfg: ExperimentConfig, out: Path, workers: int) -> dict[str, str]:
    _require(cfg, "geometry")
    _require(cfg, "model")
    if not isinstance(cfg.model, BernoulliSpec):
        raise ConfigError("model.model", "hitting runs on bernoulli fields")
    pr = cfg.params
    m = int(pr.get("m", 0))
    if m < 1:
        raise ConfigError("hitting.m", "must be >= 1")
    theta = pr.get("theta")
    ev = EventSpec(m, theta if theta else None, bool(pr.get("finite_only", False)))
    d, p = cfg.geometry.d, cfg.model.p
    pe = event_prob(
        ev, int(pr.get("pe_replicas", 1_000_000)),
        SeedSpec(cfg.master_seed ^ 0xE0, 0), d, p,
    )
    if pe.value <= 0:
        raise ConfigError("hitting.m", "event probability estimated at zero; lower m")
    k_max = int(pr.get("k_max", 0))
    if k_max <= 0:
        need_vol = 5.3 / pe.value
        k_max = int(math.ceil((need_vol ** (1.0 / d) - 1) / 2)) + 1
    records = tau_events(d, p, ev, k_max, SeedSpec(cfg.master_seed, 0), cfg.replicas, workers)
    lam = lambda_estimate(
        ev, float(pr.get("gamma", 0.5)), int(pr.get("lambda_replicas", 200_000)),
        SeedSpec(cfg.master_seed ^ 0x1A, 0), d, p, pe.value,
    )
    law = exponential_law_test(records, pe.value, lam.value)
    rows = [
        {
            "replica": r.replica,
            "m": m,
            "tau": r.tau,
            "censored": r.censored,
            "hit_site": list(r.hit_site) if r.hit_site else None,
        }
        for r in records
    ]
    outputs = {"records.jsonl": _atomic_write(out / "records.jsonl", _jsonl(rows))}
    outputs["summary.csv"] = _atomic_write(
        out / "summary.csv",
        _csv_text(
            ["m", "pE", "lambda", "ks", "n_replicas"],
            [[m, pe.value, lam.value, law.ks_distance, cfg.replicas]],
        ),
    )
    return outputs


def _run_bc_compare(cfg: ExperimentConfig, out: Path, workers: int) -> dict[str, str]:
    _require(cfg, "geometry")
    _require(cfg, "model")
    pr = cfg.params
    radii = pr.get("radii") or [cfg.geometry.n]
    rows = []
    rec_rows = []
    for n in radii:
        g = BoxGeometry(cfg.geometry.d, int(n), cfg.geometry.bc)
        sample = run_extremes(
            g, cfg.model, cfg.replicas, SeedSpec(cfg.master_seed, 0),
            all_bc=True, margin=int(pr.get("margin", 0)) or None,
            finite_rule=pr.get("finite_rule", "boundary"), workers=workers,
        )
        disc = bc_discrepancy(sample)
        rows.append(
            [
                n,
                disc.frac_zb_ne_fb,
                disc.ci_fb[0],
                disc.ci_fb[1],
                disc.frac_zb_ne_pb,
                disc.ci_pb[0],
                disc.ci_pb[1],
                cfg.replicas,
            ]
        )
        for i in range(sample.replicas):
            rec_rows.append(
                {
                    "n": int(n),
                    "replica": i,
                    "m_zb": int(sample.values[i]),
                    "m_fb": int(sample.fb[i]),
                    "m_pb": int(sample.pb[i]),
                    "m_finite": int(sample.finite[i]),
                }
            )
    outputs = {
        "records.jsonl": _atomic_write(out / "records.jsonl", _jsonl(rec_rows)),
        "summary.csv": _atomic_write(
            out / "summary.csv",
            _csv_text(
                ["n", "frac_zb_ne_fb", "fb_ci_lo", "fb_ci_hi",
                 "frac_zb_ne_pb", "pb_ci_lo", "pb_ci_hi", "replicas"],
                rows,
            ),
        ),
    }
    return outputs


def _run_oracle(cfg: ExperimentConfig, out: Path, workers: int) -> dict[str, str]:
    pr = cfg.params
    which = pr.get("which", "longest_run")
    if which == "longest_run":
        n_sites = int(pr.get("n_sites", 0))
        if n_sites < 1:
            raise ConfigError("oracle.n_sites", "must be >= 1 for longest_run")
        if cfg.model is None or not isinstance(cfg.model, BernoulliSpec):
            raise ConfigError("model", "longest_run oracle needs a bernoulli model")
        dist = longest_run_pmf(n_sites, cfg.model.p)
    elif which == "box_law":
        _require(cfg, "geometry")
        _require(cfg, "model")
        dist = enumerate_box(cfg.geometry, cfg.model.p)
    elif which == "torus_law":
        _require(cfg, "model")
        L = int(pr.get("torus_l", 4))
        d = int(pr.get("torus_dim", 2))
        kmax = int(pr.get("torus_kmax", L - 1))
        law_c, _ = exact_cluster_law_torus(L, d, cfg.model.p, kmax)
        dist = law_c
    else:
        raise ConfigError("oracle.which", "must be longest_run | box_law | torus_law")
    rows = [[v, float(p_)] for v, p_ in zip(dist.support, dist.prob)]
    return {
        "oracle.csv": _atomic_write(
            out / "oracle.csv", _csv_text(["value", "probability"], rows)
        )
    }


_RUNNERS = {
    "sample": _run_sample,
    "extremes": _run_extremes,
    "tails": _run_tails,
    "hitting": _run_hitting,
    "bc-compare": _run_bc_compare,
    "oracle": _run_oracle,
}


def run(cfg: ExperimentConfig, out_dir: str | Path | None = None, workers: int = 1) -> RunManifest:
    """Execute one experiment; outputs land in out_dir, manifest last."""
    out = resolve_out_dir(cfg, str(out_dir) if out_dir is not None else None)
    out.mkdir(parents=True, exist_ok=True)
    started = time.time()
    if cfg.kind == "sweep":
        outputs = _run_sweep(cfg, out, workers)
    else:
        outputs = _RUNNERS[cfg.kind](cfg, out, workers)
    manifest = RunManifest(config_digest(cfg), __version__, started, time.time(), outputs)
    manifest.write(out)
    return manifest


def _set_dotted(data: dict, dotted: str, value) -> None:
    parts = dotted.split(".")
    cur = data
    for p in parts[:-1]:
        if p not in cur or not isinstance(cur[p], dict):
            cur[p] = {}
        cur = cur[p]
    cur[parts[-1]] = value


def _run_sweep(cfg: ExperimentConfig, out: Path, workers: int) -> dict[str, str]:
    pr = cfg.params
    axis = pr.get("axis")
    values = pr.get("values")
    base_kind = pr.get("base_kind")
    if not axis or not isinstance(axis, str):
        raise ConfigError("sweep.axis", "missing or not a string")
    if not values:
        raise ConfigError("sweep.values", "axis values must be a nonempty list")
    if base_kind not in KINDS or base_kind == "sweep":
        raise ConfigError("sweep.base_kind", f"must be a non-sweep kind from {KINDS}")
    rows = []
    outputs: dict[str, str] = {}
    for i, val in enumerate(values):
        sub_raw = json.loads(json.dumps(cfg.raw))  # deep copy
        sub_raw["kind"] = base_kind
        sub_raw.pop("sweep", None)
        sub_raw.pop("out_dir", None)
        _set_dotted(sub_raw, axis, val)
        name = f"point_{i:03d}_{axis.replace('.', '_')}={val}"
        status = "ok"
        try:
            sub_cfg = ExperimentConfig.from_dict(sub_raw)
            run(sub_cfg, out / name, workers)
        except Exception as e:  # isolate per-point failures
            status = f"failed: {type(e).__name__}"
        rows.append([i, axis, val, status, name])
    outputs["sweep_summary.csv"] = _atomic_write(
        out / "sweep_summary.csv",
        _csv_text(["point", "axis", "value", "status", "directory"], rows),
    )
    return outputs
