"""Experiment driver: flat-file configs, command runners, on-disk records.

Every command writes three files into its output directory:

  metadata.json   the full effective config, code version, RNG family,
                  and the CSV column schema
  rows.csv        one record per row, fixed column order, floats written
                  with repr() so they round-trip exactly
  summary.json    aggregates recomputed from the rows

Nothing time-dependent goes into the files, so a rerun with the same
config and seed is byte-identical.  Randomness comes from counter-based
Philox streams keyed by (master seed, chain id); chain ids enumerate the
(n, variant) pairs of a run in row order, so adding chains never
perturbs existing ones.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, fields, replace

import numpy as np

from . import __version__
from .lattice import build_box
from .ising import T_CRITICAL
from .fk import (
    FKParams,
    bernoulli_bonds,
    decompose,
    p_critical,
    sample_chain,
    tail_statistics,
)
from .coupling import dual_parameter, duality_check, es_pushforward_check
from .soc import (
    edge_closing_price,
    exact_mu_n,
    exact_mu_prime,
    fixed_point,
    naive_mu_prime_dynamics,
    two_timescale_dynamics,
)
from .surgery import EventParams, event_F_n, event_G_n, fss_conditions, surgery

COMMANDS = (
    "soc-run",
    "soc-compare",
    "fk-sample",
    "coupling-verify",
    "duality-verify",
    "surgery-demo",
    "enumerate",
    "fss-freq",
    "tail-fit",
)

SCHEMA_VERSION = 1
RNG_FAMILY = "philox"

# config keys by value type; "n" is the comma list of box sides
_INT_KEYS = frozenset(
    ["bc", "tau", "total", "burn_in", "thin", "samples", "seed",
     "snapshot_every", "b", "min_hits", "v"]
)
_FLOAT_KEYS = frozenset(["a", "t", "p", "q", "delta", "k_budget"])
_STR_KEYS = frozenset(["method", "out", "variant"])
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | {"n"}

# keys that may be unset, parsed from the string "none"
_OPTIONAL = frozenset(["t", "p", "v"])


@dataclass(frozen=True)
class ExperimentConfig:
    """Effective settings of one run, after merging defaults, the config
    file, and command-line overrides."""

    command: str
    n: tuple[int, ...] = (16,)
    a: float = 1.99
    t: float | None = None
    p: float | None = None
    q: float = 2.0
    bc: int = 1
    method: str = "sw"
    tau: int = 32
    total: int = 20000
    burn_in: int = -1
    thin: int = 2
    samples: int = 200
    seed: int = 0
    out: str = ""
    snapshot_every: int = 0
    variant: str = ""
    b: int = -1
    delta: float = 1.0 / 6.0
    k_budget: float = 1.0
    min_hits: int = 50
    v: int | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command: {self.command}")
        if not self.n or any(int(m) < 1 for m in self.n):
            raise ValueError("n: box sides must be integers >= 1")
        if self.t is not None and self.t < 0:
            raise ValueError("t: temperature must be >= 0")
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise ValueError("p: bond density must lie in [0, 1]")
        if self.q <= 0:
            raise ValueError("q: cluster weight must be positive")
        if self.bc not in (0, 1):
            raise ValueError("bc: 0 (free) or 1 (wired)")
        if self.method not in ("sw", "single-bond"):
            raise ValueError("method: 'sw' or 'single-bond'")
        if self.tau < 1 or self.total < 1 or self.thin < 1 or self.samples < 1:
            raise ValueError("tau, total, thin, samples must be >= 1")
        if self.burn_in < -1:
            raise ValueError("burn_in: -1 (auto) or >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed: a 64-bit unsigned integer")
        if self.snapshot_every < 0:
            raise ValueError("snapshot_every: 0 (off) or a positive stride")
        if self.delta <= 0 or self.k_budget <= 0:
            raise ValueError("delta and k_budget must be positive")
        if self.min_hits < 1:
            raise ValueError("min_hits must be >= 1")
        if self.v is not None and self.v < 0:
            raise ValueError("v: vertex id must be >= 0")

    def out_dir(self) -> str:
        return self.out if self.out else os.path.join("runs", self.command)

    def as_flat(self) -> dict[str, str]:
        """The config in flat key = value form, as a config file would
        spell it."""
        out: dict[str, str] = {"command": self.command}
        for f in fields(self):
            if f.name == "command":
                continue
            val = getattr(self, f.name)
            if f.name == "n":
                out["n"] = ",".join(str(m) for m in val)
            elif val is None:
                out[f.name] = "none"
            else:
                out[f.name] = repr(val) if isinstance(val, float) else str(val)
        return out


_DEFAULTS = {
    "soc-run": {"n": (16,), "tau": 32, "total": 20000},
    "soc-compare": {"n": (8,), "total": 5000},
    "fk-sample": {"n": (16,), "p": 0.6, "samples": 200, "burn_in": 100},
    "coupling-verify": {"n": (3,)},
    "duality-verify": {"n": (3,)},
    "surgery-demo": {"n": (30,), "a": 1.95, "p": 0.7, "samples": 200,
                     "burn_in": 100},
    "enumerate": {"n": (3,), "variant": "mu"},
    "fss-freq": {"n": (16, 32), "samples": 100, "burn_in": 100},
    "tail-fit": {"n": (64,), "p": 0.4, "bc": 0, "samples": 2000,
                 "burn_in": 200},
}


def _parse_n(raw) -> tuple[int, ...]:
    if isinstance(raw, (int, np.integer)):
        return (int(raw),)
    if isinstance(raw, str):
        parts = [s.strip() for s in raw.split(",") if s.strip()]
        return tuple(int(s) for s in parts)
    return tuple(int(m) for m in raw)


def _coerce(key: str, raw):
    """Parse one config value from its file/flag spelling."""
    if key not in _ALL_KEYS:
        raise ValueError(f"unknown config key: {key}")
    if raw is None:
        return None
    if isinstance(raw, str) and raw.strip().lower() == "none":
        if key in _OPTIONAL:
            return None
        raise ValueError(f"{key}: value required")
    try:
        if key == "n":
            return _parse_n(raw)
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except (TypeError, ValueError):
        raise ValueError(f"{key}: cannot parse {raw!r}") from None
    return str(raw)


def parse_config_file(path: str) -> dict:
    """Read a flat key = value config file.  Blank lines and # comments
    are skipped; unknown keys are rejected by name."""
    values: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, _, raw = text.partition("=")
            key = key.strip()
            if key == "command":
                raise ValueError(
                    "command comes from the command line, not the config file"
                )
            values[key] = _coerce(key, raw.strip())
    return values


def build_config(command: str, file_values: dict | None = None,
                 overrides: dict | None = None) -> ExperimentConfig:
    """Merge per-command defaults, config-file values, and explicit
    overrides (in that order of increasing precedence)."""
    if command not in COMMANDS:
        raise ValueError(f"unknown command: {command}")
    merged: dict = dict(_DEFAULTS.get(command, {}))
    for source in (file_values or {}), (overrides or {}):
        for key, raw in source.items():
            merged[key] = _coerce(key, raw)
    return ExperimentConfig(command=command, **merged)


def chain_rng(seed: int, chain_id: int) -> np.random.Generator:
    """The stream for one chain: Philox keyed by (master seed, chain id)."""
    return np.random.Generator(np.random.Philox(key=[seed, chain_id]))


def _auto(burn_in: int, default: int) -> int:
    return default if burn_in < 0 else burn_in


def _mean_var(xs) -> tuple[float, float]:
    arr = np.asarray(xs, dtype=np.float64)
    if arr.size == 0:
        return math.nan, math.nan
    return float(arr.mean()), float(arr.var())


def wilson_interval(hits: int, n: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial frequency."""
    if n == 0:
        return 0.0, 1.0
    phat = hits / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


# ---------------------------------------------------------------------------
# runners: each returns (columns, rows, summary)


def _run_soc_run(cfg: ExperimentConfig):
    cols = ["n", "chain", "step", "T", "m", "flips", "floor_used", "m_n"]
    rows, per_n = [], []
    for i, n in enumerate(cfg.n):
        traj = two_timescale_dynamics(
            n, cfg.a, cfg.tau, cfg.total, chain_rng(cfg.seed, i),
            burn_in=None if cfg.burn_in < 0 else cfg.burn_in,
            snapshot_every=cfg.snapshot_every,
        )
        m_ns = traj.m_ns if traj.m_ns is not None else np.full(len(traj.steps), -1)
        for r in range(len(traj.steps)):
            rows.append([n, i, int(traj.steps[r]), float(traj.temps[r]),
                         int(traj.mags[r]), int(traj.flips[r]),
                         bool(traj.floor_used[r]), int(m_ns[r])])
        kept = traj.kept()
        per_n.append({
            "n": n,
            "records": len(traj.steps),
            "burn_in": traj.burn_in,
            "mean_T": float(kept.mean()),
            "std_T": float(kept.std()),
            "mean_abs_m": float(np.abs(traj.mags[traj.burn_in:]).mean()),
            "floor_frac": float(traj.floor_used.mean()),
            "flip_rate": float(traj.flips.mean() / (cfg.tau * n * n)),
        })
    return cols, rows, {"t_critical": T_CRITICAL, "per_n": per_n}


def _run_soc_compare(cfg: ExperimentConfig):
    cols = ["n", "variant", "step", "T", "m", "flips"]
    rows, cells = [], []
    chain = 0
    for n in cfg.n:
        for account in (True, False):
            traj = naive_mu_prime_dynamics(
                n, cfg.a, cfg.total, chain_rng(cfg.seed, chain),
                account_for_T_change=account,
                burn_in=None if cfg.burn_in < 0 else cfg.burn_in,
            )
            chain += 1
            for r in range(len(traj.steps)):
                rows.append([n, traj.variant, int(traj.steps[r]),
                             float(traj.temps[r]), int(traj.mags[r]),
                             int(traj.flips[r])])
            kept = traj.kept()
            cells.append({
                "n": n,
                "variant": traj.variant,
                "burn_in": traj.burn_in,
                "mean_T": float(kept.mean()),
                "std_T": float(kept.std()),
                "mean_abs_m": float(np.abs(traj.mags[traj.burn_in:]).mean()),
            })
    return cols, rows, {"t_critical": T_CRITICAL, "cells": cells}


def _fk_samples(cfg: ExperimentConfig, n: int, p: float, chain: int):
    params = FKParams(p=p, q=cfg.q, bc=cfg.bc)
    rng = chain_rng(cfg.seed, chain)
    omega0 = bernoulli_bonds(build_box(n), p, rng)
    burn = _auto(cfg.burn_in, 100 + n)
    return sample_chain(omega0, params, cfg.samples, burn, cfg.thin, rng,
                        method=cfg.method)


def _run_fk_sample(cfg: ExperimentConfig):
    if cfg.p is None:
        raise ValueError("p: required for fk-sample")
    cols = ["n", "sample", "open_edges", "k0", "k1", "m_n", "max_interior",
            "sum_sq_interior", "u_n", "units"]
    rows, per_n = [], []
    for i, n in enumerate(cfg.n):
        samples = _fk_samples(cfg, n, cfg.p, i)
        stats = []
        for s, omega in enumerate(samples):
            dec = decompose(omega)
            rec = [n, s, omega.open_count(), dec.k0, dec.k1, dec.m_count,
                   dec.max_interior, dec.sum_sq_interior, dec.u_halfgrid,
                   dec.unit_interior_count]
            rows.append(rec)
            stats.append(rec[2:])
        arr = np.asarray(stats, dtype=np.float64)
        names = cols[2:]
        g = build_box(n)
        per_n.append({
            "n": n,
            "p": cfg.p,
            "edge_density": float(arr[:, 0].mean() / g.n_edges),
            "means": {k: float(m) for k, m in zip(names, arr.mean(axis=0))},
            "variances": {k: float(v) for k, v in zip(names, arr.var(axis=0))},
        })
    return cols, rows, {"per_n": per_n}


def _run_coupling_verify(cfg: ExperimentConfig):
    n = cfg.n[0]
    if n > 3:
        raise ValueError("n: exact pushforward comparison needs n <= 3")
    ts = [cfg.t] if cfg.t is not None else [0.5, 1.0, T_CRITICAL, 3.0, 6.0]
    cols = ["n", "T", "p", "spin_err", "bond_err"]
    rows = []
    for t in ts:
        spin_err, bond_err = es_pushforward_check(n, t)
        p = 1.0 - math.exp(-2.0 / t) if t > 0 else 1.0
        rows.append([n, float(t), p, spin_err, bond_err])
    worst = max(max(r[3], r[4]) for r in rows)
    return cols, rows, {"n": n, "temperatures": [float(t) for t in ts],
                        "max_error": worst}


def _run_duality_verify(cfg: ExperimentConfig):
    n = cfg.n[0]
    ps = [cfg.p] if cfg.p is not None else [0.3, p_critical(cfg.q), 0.8]
    cols = ["n", "p", "q", "p_dual", "pushforward_err"]
    rows = []
    for p in ps:
        err = duality_check(n, p, cfg.q)
        rows.append([n, float(p), cfg.q, dual_parameter(p, cfg.q), err])
    pc = p_critical(cfg.q)
    return cols, rows, {
        "n": n,
        "q": cfg.q,
        "self_dual_point": pc,
        "self_dual_residual": abs(dual_parameter(pc, cfg.q) - pc),
        "max_error": max(r[4] for r in rows),
    }


def _run_surgery_demo(cfg: ExperimentConfig):
    if cfg.p is None:
        raise ValueError("p: required for surgery-demo")
    cols = ["n", "sample", "m_before", "b", "target", "m_after", "success",
            "stage", "j_star", "h0_size", "h1_size", "h2_size", "h_size",
            "c0_count", "c0_mass", "parity_unit_used", "identity_ok",
            "cap_ok", "units_ok", "budget_used", "c0_bound_ok"]
    precondition_stages = {"target-above-count", "annulus-precondition",
                           "greedy-precondition"}
    rows, per_n = [], []
    for i, n in enumerate(cfg.n):
        params = EventParams(n=n, a=cfg.a, delta=cfg.delta, K=cfg.k_budget)
        samples = _fk_samples(cfg, n, cfg.p, i)
        n_pre, n_success, budgets, h_sizes = 0, 0, [], []
        for s, omega in enumerate(samples):
            m = decompose(omega).m_count
            if cfg.b >= 0:
                b = cfg.b
            else:
                b = int(0.8 * m)
                if (m + b) % 2 != 0:
                    b -= 1
            b = max(b, 0)
            res = surgery(omega, b, params)
            c0_count = int(res.c0_sizes.size)
            c0_bound = c0_count <= res.h.size + 1
            rows.append([
                n, s, res.m_before, res.b, res.target, res.m_after,
                res.success, res.stage, res.j_star, res.h0.size, res.h1.size,
                res.h2.size, res.h.size, c0_count, int(res.c0_sizes.sum()),
                res.parity_unit >= 0, res.identity_ok, res.cap_ok,
                res.units_ok, res.budget_used, c0_bound,
            ])
            if res.stage in precondition_stages:
                continue
            n_pre += 1
            if res.success:
                n_success += 1
                budgets.append(res.budget_used)
                h_sizes.append(int(res.h.size))
        cell = {
            "n": n,
            "p": cfg.p,
            "samples": len(samples),
            "eligible": n_pre,
            "successes": n_success,
            "success_rate_among_eligible":
                n_success / n_pre if n_pre else math.nan,
            "k_fit": max(budgets) if budgets else math.nan,
            "k_budget": cfg.k_budget,
        }
        if h_sizes:
            med = int(np.median(h_sizes))
            cell["median_h_size"] = med
            cell["edge_closing_price_at_median_h"] = edge_closing_price(
                n, cfg.p, med)
        per_n.append(cell)
    return cols, rows, {"per_n": per_n}


def _run_enumerate(cfg: ExperimentConfig):
    n = cfg.n[0]
    variant = cfg.variant or "mu"
    if variant not in ("mu", "mu-prime"):
        raise ValueError("variant: 'mu' or 'mu-prime'")
    g = build_box(n)
    mu = exact_mu_n(g, cfg.a) if variant == "mu" else exact_mu_prime(g, cfg.a)
    ea, eb = g.edge_a, g.edge_b
    cols = ["index", "m", "T", "energy", "prob"]
    rows = []
    for i in range(len(mu.mags)):
        s = mu.spins[i]
        energy = -float((s[ea] * s[eb]).sum())
        rows.append([i, int(mu.mags[i]), float(mu.temps[i]), energy,
                     float(mu.probs[i])])
    return cols, rows, {
        "n": n,
        "a": cfg.a,
        "variant": variant,
        "n_configs": len(rows),
        "z_direct": mu.z_direct,
        "z_rewrite": mu.z_rewrite,
        "z_abs_difference": abs(mu.z_direct - mu.z_rewrite),
        "prob_total": float(np.sum(mu.probs)),
    }


def fss_frequency(cfg: ExperimentConfig):
    """Frequencies of the finite-size scaling events over wired samples.

    For each box side the bond density is cfg.p, or the fixed-point
    density for (n, cfg.a) when p is unset.  Returns (columns, rows,
    summary) with one row per sample and per-n frequencies of the event
    conjunction, the ambient event, and each clause, with Wilson 95%
    intervals, plus the boundary and inner-box mass ratios against their
    nominal thresholds 4 and 2.
    """
    cols = ["n", "sample", "p", "m_n", "inner_m", "max_interior", "units",
            "m_ratio", "inner_ratio", "g_n", "f_n", "cond_mass_upper",
            "cond_size_cap", "cond_inner_mass"]
    rows, per_n = [], []
    pc = p_critical(2.0)
    for i, n in enumerate(cfg.n):
        p = cfg.p if cfg.p is not None else fixed_point(n, cfg.a).p_n
        if p < pc:
            raise ValueError(
                f"p: finite-size scaling clauses need p >= {pc:.6f}, got {p}")
        params = EventParams(n=n, a=cfg.a, delta=cfg.delta, K=cfg.k_budget)
        samples = _fk_samples(replace(cfg, p=p, q=2.0, bc=1), n, p, i)
        g = build_box(n)
        inner_mask = g.sub_box_mask(params.n1)
        na = float(n) ** cfg.a
        counts = {k: 0 for k in ("g_n", "f_n", "c1", "c2", "c3",
                                 "m_below_4", "inner_above_2")}
        ratios, inner_ratios = [], []
        for s, omega in enumerate(samples):
            dec = decompose(omega)
            c1, c2, c3 = fss_conditions(dec, params, p)
            gn = event_G_n(dec, params)
            fn = c1 and c2 and c3
            inner_m = int((dec.m_mask & inner_mask).sum())
            m_ratio = dec.m_count / na
            inner_ratio = inner_m / na
            rows.append([n, s, p, dec.m_count, inner_m, dec.max_interior,
                         dec.unit_interior_count, m_ratio, inner_ratio,
                         gn, fn, c1, c2, c3])
            for key, hit in (("g_n", gn), ("f_n", fn), ("c1", c1),
                             ("c2", c2), ("c3", c3),
                             ("m_below_4", m_ratio <= 4.0),
                             ("inner_above_2", inner_ratio >= 2.0)):
                counts[key] += bool(hit)
            ratios.append(m_ratio)
            inner_ratios.append(inner_ratio)
        ns = len(samples)
        freq = {}
        for key, hits in counts.items():
            lo, hi = wilson_interval(hits, ns)
            freq[key] = {"freq": hits / ns, "ci": [lo, hi]}
        per_n.append({
            "n": n,
            "p": p,
            "samples": ns,
            "events": freq,
            "mean_m_ratio": float(np.mean(ratios)),
            "mean_inner_ratio": float(np.mean(inner_ratios)),
            "thresholds": {"m_ratio": 4.0, "inner_ratio": 2.0},
        })
    return cols, rows, {"per_n": per_n}


def _run_tail_fit(cfg: ExperimentConfig):
    if cfg.p is None:
        raise ValueError("p: required for tail-fit")
    n = cfg.n[0]
    g = build_box(n)
    v = cfg.v if cfg.v is not None else g.vertex_id(0, 0)
    if v >= n * n:
        raise ValueError(f"v: vertex id out of range for side {n}")
    samples = _fk_samples(cfg, n, cfg.p, 0)
    cols = ["sample", "size"]
    rows = []
    sizes = []
    for s, omega in enumerate(samples):
        k = decompose(omega).cluster_size_of(v)
        rows.append([s, k])
        sizes.append(k)
    fit = tail_statistics(sizes, min_hits=cfg.min_hits)
    summary = {
        "n": n,
        "p": cfg.p,
        "q": cfg.q,
        "bc": cfg.bc,
        "vertex": int(v),
        "n_samples": fit.n_samples,
        "psi_hat": fit.psi_hat,
        "ci_low": fit.ci_low,
        "ci_high": fit.ci_high,
        "degenerate": fit.degenerate,
        "window": [int(fit.window[0]), int(fit.window[-1])]
        if fit.window.size else [],
        "mean_size": float(np.mean(sizes)),
    }
    return cols, rows, summary


_RUNNERS = {
    "soc-run": _run_soc_run,
    "soc-compare": _run_soc_compare,
    "fk-sample": _run_fk_sample,
    "coupling-verify": _run_coupling_verify,
    "duality-verify": _run_duality_verify,
    "surgery-demo": _run_surgery_demo,
    "enumerate": _run_enumerate,
    "fss-freq": fss_frequency,
    "tail-fit": _run_tail_fit,
}


def _csv_cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def run(cfg: ExperimentConfig) -> dict:
    """Execute one command and write metadata.json, rows.csv, summary.json
    into cfg.out_dir().  Returns the summary together with the paths.
    On failure no partial output is left behind."""
    columns, rows, summary = _RUNNERS[cfg.command](cfg)

    out_dir = cfg.out_dir()
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "metadata": os.path.join(out_dir, "metadata.json"),
        "rows": os.path.join(out_dir, "rows.csv"),
        "summary": os.path.join(out_dir, "summary.json"),
    }
    metadata = {
        "command": cfg.command,
        "config": cfg.as_flat(),
        "version": __version__,
        "rng": RNG_FAMILY,
        "schema_version": SCHEMA_VERSION,
        "columns": columns,
    }
    written = []
    try:
        with open(paths["metadata"], "w", encoding="utf-8") as fh:
            written.append(paths["metadata"])
            json.dump(metadata, fh, indent=2, sort_keys=True)
            fh.write("\n")
        with open(paths["rows"], "w", encoding="utf-8", newline="") as fh:
            written.append(paths["rows"])
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_csv_cell(x) for x in row])
        with open(paths["summary"], "w", encoding="utf-8") as fh:
            written.append(paths["summary"])
            json.dump(_jsonable(summary), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except BaseException:
        for path in written:
            try:
                os.unlink(path)
            except OSError:
                pass
        raise
    result = dict(_jsonable(summary))
    result["paths"] = paths
    result["n_rows"] = len(rows)
    return result
