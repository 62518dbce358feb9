"""Experiment runner: executes a configured experiment, writes its report
CSV plus a reproducibility manifest, and returns the exit status.

Exit statuses: 0 all declared targets inside their acceptance bands,
1 acceptance failure, 2 configuration error, 3 runtime sampling error.
Artifacts are UTF-8 CSV with LF line endings; reruns with the same config
and seed are byte-identical regardless of thread count.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig
from .coupling import (
    coupling_runs_to_csv,
    post_coupling_agreement,
    rademacher_flip_test,
    run_coupling,
)
from .errors import ConfigError, RenewalClusterError
from .estimators import (
    ExperimentReport,
    StepFunction,
    bartlett_lewis_recurrence_cdf,
    estimate_elementary_ratio,
    estimate_forward_recurrence_cdf,
    estimate_renewal_function,
    estimate_void_probability,
    estimate_window_mean,
    key_renewal_convolve,
    key_renewal_limit,
)
from .stationary import sample_stationary_cluster_process
from .stats import two_sample_ks
from .streams import RngStream, stream_for

__all__ = ["run_experiment", "STATUS_OK", "STATUS_FAIL", "STATUS_CONFIG", "STATUS_RUNTIME"]

STATUS_OK = 0
STATUS_FAIL = 1
STATUS_CONFIG = 2
STATUS_RUNTIME = 3

# acceptance band half-width in standard errors for target-bearing reports
ACCEPT_SE = 4.0


def _write(path: Path, text: str):
    path.write_text(text, encoding="utf-8", newline="\n")


def _manifest(cfg: ExperimentConfig, raw: dict | None) -> str:
    buf = io.StringIO()
    buf.write(f"version = {__version__}\n")
    buf.write(f"experiment = {cfg.kind}\n")
    buf.write(f"seed = {cfg.seed}\n")
    buf.write(f"n_rep = {cfg.n_rep}\n")
    if raw:
        for key in sorted(raw):
            buf.write(f"{key} = {raw[key]}\n")
    return buf.getvalue()


def _report_csv(report: ExperimentReport) -> str:
    return ExperimentReport.CSV_HEADER + "\n" + report.to_csv_row() + "\n"


def _report_status(report: ExperimentReport) -> int:
    ok = report.within(ACCEPT_SE)
    return STATUS_OK if ok is None or ok else STATUS_FAIL


def run_experiment(
    cfg: ExperimentConfig,
    out_dir: str | Path,
    threads: int = 1,
    raw_config: dict | None = None,
) -> int:
    """Execute the configured experiment and write artifacts into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = stream_for(cfg.seed, cfg.kind)
    p = cfg.params
    try:
        status, artifacts = _dispatch(cfg, rng, threads, p)
    except ConfigError:
        raise
    except RenewalClusterError as exc:
        _write(out / "error.txt", f"{type(exc).__name__}: {exc}\n")
        return STATUS_RUNTIME
    for name, text in artifacts.items():
        _write(out / name, text)
    _write(out / "manifest.txt", _manifest(cfg, raw_config))
    return status


def _dispatch(cfg, rng, threads, p):
    kind = cfg.kind
    spec = cfg.spec
    if kind == "window_mean":
        rep = estimate_window_mean(spec, p["t"], p["x"], cfg.n_rep, rng, threads)
        return _report_status(rep), {"report.csv": _report_csv(rep)}

    if kind == "elementary":
        rep = estimate_elementary_ratio(spec, p["t"], cfg.n_rep, rng, threads)
        return _report_status(rep), {"report.csv": _report_csv(rep)}

    if kind == "void_prob":
        rep = estimate_void_probability(spec, p["t"], p["x"], cfg.n_rep, rng, threads)
        return _report_status(rep), {"report.csv": _report_csv(rep)}

    if kind == "recurrence_cdf":
        grid = np.array(p["grid"])
        target = _recurrence_target(spec, grid)
        rep = estimate_forward_recurrence_cdf(
            spec, p["t"], grid, cfg.n_rep, rng, threads, target=target
        )
        gap = rep.max_target_gap
        status = STATUS_OK if gap is None or gap < p["tol"] else STATUS_FAIL
        return status, {"cdf.csv": rep.to_csv()}

    if kind == "renewal_function":
        tab = estimate_renewal_function(spec, np.array(p["grid"]), cfg.n_rep, rng, threads)
        return STATUS_OK, {"renewal.csv": tab.to_csv()}

    if kind == "key_renewal":
        g_fn = StepFunction(p["g"])
        tab = estimate_renewal_function(spec, np.array(p["grid"]), cfg.n_rep, rng, threads)
        value = key_renewal_convolve(tab, g_fn, p["t"])
        limit = key_renewal_limit(spec, g_fn)
        ok = abs(value - limit) <= p["rel_tol"] * abs(limit)
        text = "value,limit,rel_tol\n" + f"{value!r},{limit!r},{p['rel_tol']!r}\n"
        return (STATUS_OK if ok else STATUS_FAIL), {
            "report.csv": text,
            "renewal.csv": tab.to_csv(),
        }

    if kind == "coupling":
        runs = [
            run_coupling(spec, p["epsilon"], p["steps_cap"], rng.substream(r))
            for r in range(cfg.n_rep)
        ]
        finite = sum(1 for r in runs if not r.capped) / len(runs)
        agree = post_coupling_agreement(
            spec, p["epsilon"], p["k_checks"], rng.substream(cfg.n_rep)
        )
        ok = finite >= p["min_finite"] and agree.passed
        return (STATUS_OK if ok else STATUS_FAIL), {
            "coupling.csv": coupling_runs_to_csv(runs)
        }

    if kind == "stationarity_check":
        shifts = p["shifts"]
        x = p["x"]
        samples = []
        for i, s in enumerate(shifts):
            sub = rng.substream(i)
            counts = [
                len(
                    sample_stationary_cluster_process(
                        spec, s, s + x, sub.substream(r)
                    )
                )
                for r in range(cfg.n_rep)
            ]
            samples.append(np.array(counts, dtype=np.float64))
        lines = ["shift_a,shift_b,distance,critical_value,reject"]
        any_reject = False
        for i in range(1, len(shifts)):
            ks = two_sample_ks(samples[0], samples[i], p["alpha"])
            any_reject = any_reject or ks.reject
            lines.append(
                f"{shifts[0]!r},{shifts[i]!r},{ks.distance!r},"
                f"{ks.critical_value!r},{str(ks.reject).lower()}"
            )
        return (STATUS_FAIL if any_reject else STATUS_OK), {
            "stationarity.csv": "\n".join(lines) + "\n"
        }

    if kind == "flip_test":
        stop = rademacher_flip_test(
            p["n"], cfg.n_rep, rng.substream(0), p["ones_needed"], "stopping", p["alpha"]
        )
        peek = rademacher_flip_test(
            p["n"], cfg.n_rep, rng.substream(1), p["ones_needed"], "peek_ahead", p["alpha"]
        )
        ok = (not stop.reject) and peek.reject
        lines = [
            "rule,distance,critical_value,reject",
            f"stopping,{stop.distance!r},{stop.critical_value!r},{str(stop.reject).lower()}",
            f"peek_ahead,{peek.distance!r},{peek.critical_value!r},{str(peek.reject).lower()}",
        ]
        return (STATUS_OK if ok else STATUS_FAIL), {"flip.csv": "\n".join(lines) + "\n"}

    raise ConfigError(f"unhandled experiment kind {kind!r}")


def _recurrence_target(spec, grid):
    from .clusters import CumulativeStepCluster
    from .laws import Exponential

    if (
        isinstance(spec.interarrival, Exponential)
        and isinstance(spec.cluster, CumulativeStepCluster)
        and spec.include_parents
        and spec.delay is None
    ):
        step = spec.cluster.step
        return bartlett_lewis_recurrence_cdf(
            spec.interarrival.rate,
            spec.cluster.size.mean(),
            lambda y: 1.0 - step.cdf(y),
            grid,
        )
    return None
