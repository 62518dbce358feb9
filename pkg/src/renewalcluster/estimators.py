"""Monte Carlo estimators with closed-form long-run targets.

Each estimator replicates an independent simulation, aggregates in
replication-index order (so results are bit-stable for any worker count),
and reports a normal-approximation confidence interval next to the
closed-form limit when the spec's moment accessors are available.
"""

from __future__ import annotations

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.optimize import isotonic_regression

from .errors import (
    AccessorUnavailableError,
    NoPointAfterError,
    QuadratureError,
    SupportRangeError,
)
from .process import (
    ProcessSpec,
    sample_renewal_cluster_process,
)
from .stats import empirical_cdf
from .streams import RngStream

__all__ = [
    "ExperimentReport",
    "StepFunction",
    "CdfReport",
    "RenewalFunctionTable",
    "replicate",
    "theoretical_blackwell_limit",
    "theoretical_mean_measure",
    "estimate_window_mean",
    "estimate_elementary_ratio",
    "estimate_forward_recurrence_cdf",
    "bartlett_lewis_void_probability",
    "bartlett_lewis_recurrence_cdf",
    "estimate_void_probability",
    "estimate_renewal_function",
    "key_renewal_convolve",
    "key_renewal_limit",
    "pilot_rate",
]

# 99.7% two-sided normal CI by default; acceptance checks widen to 4 SE.
DEFAULT_Z = 3.0


@dataclass(frozen=True)
class ExperimentReport:
    estimate: float
    std_error: float
    ci_low: float
    ci_high: float
    n_rep: int
    target: float | None
    seed: int
    stream_id: int
    truncation_tally: int = 0

    def __post_init__(self):
        if not (self.ci_low <= self.estimate <= self.ci_high):
            raise ValueError("CI must contain the estimate")

    @property
    def target_in_ci(self) -> bool | None:
        if self.target is None:
            return None
        return self.ci_low <= self.target <= self.ci_high

    def within(self, n_se: float) -> bool | None:
        """Whether |estimate - target| <= n_se * std_error."""
        if self.target is None:
            return None
        return abs(self.estimate - self.target) <= n_se * self.std_error

    CSV_HEADER = "estimate,std_error,ci_low,ci_high,n_rep,target,seed,truncation_tally"

    def to_csv_row(self) -> str:
        target = "" if self.target is None else repr(self.target)
        return (
            f"{self.estimate!r},{self.std_error!r},{self.ci_low!r},"
            f"{self.ci_high!r},{self.n_rep},{target},{self.seed},"
            f"{self.truncation_tally}"
        )

    @classmethod
    def from_csv_row(cls, row: str, stream_id: int = 0) -> "ExperimentReport":
        est, se, lo, hi, n, target, seed, tally = row.split(",")
        return cls(
            float(est),
            float(se),
            float(lo),
            float(hi),
            int(n),
            float(target) if target else None,
            int(seed),
            stream_id,
            int(tally),
        )


def _report(values, tallies, target, rng, z=DEFAULT_Z):
    values = np.asarray(values, dtype=np.float64)
    est = float(values.mean())
    se = float(values.std(ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
    return ExperimentReport(
        estimate=est,
        std_error=se,
        ci_low=est - z * se,
        ci_high=est + z * se,
        n_rep=int(values.size),
        target=target,
        seed=rng.seed,
        stream_id=rng.stream_id,
        truncation_tally=int(np.sum(tallies)),
    )


def replicate(fn, n_rep: int, rng: RngStream, threads: int = 1) -> list:
    """Run fn(stream) once per replication on independent substreams.

    Results are collected by replication index, so the outcome is
    identical for any thread count; threads only affect wall time.
    """
    streams = [rng.substream(r) for r in range(n_rep)]
    if threads <= 1:
        return [fn(s) for s in streams]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, streams))


def _rate_term(spec: ProcessSpec) -> float:
    """Long-run points per unit time: (E L (+1 with parents)) / E X."""
    mean_l = spec.mean_cluster_size()
    if mean_l is None:
        raise AccessorUnavailableError(
            "cluster model has no closed-form mean size; use pilot_rate"
        )
    if spec.include_parents:
        mean_l = mean_l + 1.0
    return mean_l / spec.interarrival.mean()


def pilot_rate(spec: ProcessSpec, n_pilot: int, rng: RngStream) -> float:
    """Monte Carlo fallback for the long-run rate when accessors are absent."""
    g = rng.generator()
    xs = np.asarray(spec.interarrival.sample(g, n_pilot), dtype=np.float64)
    sizes, _ = spec.cluster.sample_batch(xs, g)
    mean_l = float(sizes.mean()) + (1.0 if spec.include_parents else 0.0)
    return mean_l / spec.interarrival.mean()


def theoretical_blackwell_limit(spec: ProcessSpec, x: float) -> float:
    """Limit of the expected count in (t, t+x] as t grows."""
    if not x > 0:
        raise ValueError("x must be positive")
    return _rate_term(spec) * x


def theoretical_mean_measure(spec: ProcessSpec, a: float, b: float) -> float:
    """Mean count of the stationary process on (a, b]."""
    if a > b:
        raise ValueError("need a <= b")
    return _rate_term(spec) * (b - a)


def estimate_window_mean(
    spec: ProcessSpec,
    t: float,
    x: float,
    n_rep: int,
    rng: RngStream,
    threads: int = 1,
) -> ExperimentReport:
    """Monte Carlo mean of the count in (t, t+x] over independent runs."""
    if t < 0 or not x > 0 or n_rep < 2:
        raise ValueError("need t >= 0, x > 0, n_rep >= 2")

    def one(stream):
        pat = sample_renewal_cluster_process(spec, t, t + x, stream)
        return len(pat), pat.overflow

    counts = replicate(one, n_rep, rng, threads)
    try:
        target = theoretical_blackwell_limit(spec, x)
    except AccessorUnavailableError:
        target = None
    return _report([c for c, _ in counts], [o for _, o in counts], target, rng)


def estimate_elementary_ratio(
    spec: ProcessSpec,
    t: float,
    n_rep: int,
    rng: RngStream,
    threads: int = 1,
) -> ExperimentReport:
    """Monte Carlo estimate of (count in (0, t]) / t."""
    if not t > 0:
        raise ValueError("t must be positive")

    def one(stream):
        pat = sample_renewal_cluster_process(spec, 0.0, t, stream)
        return len(pat) / t, pat.overflow

    out = replicate(one, n_rep, rng, threads)
    try:
        target = _rate_term(spec)
    except AccessorUnavailableError:
        target = None
    return _report([v for v, _ in out], [o for _, o in out], target, rng)


@dataclass(frozen=True)
class CdfReport:
    """Pointwise empirical CDF with normal-approximation half-widths."""

    grid: np.ndarray
    values: np.ndarray
    half_widths: np.ndarray
    n_rep: int
    target: np.ndarray | None
    seed: int
    stream_id: int

    @property
    def max_target_gap(self) -> float | None:
        if self.target is None:
            return None
        return float(np.max(np.abs(self.values - self.target)))

    CSV_HEADER = "x,cdf,half_width,target"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(self.CSV_HEADER + "\n")
        for i, x in enumerate(self.grid):
            tgt = "" if self.target is None else repr(float(self.target[i]))
            buf.write(
                f"{x!r},{self.values[i]!r},{self.half_widths[i]!r},{tgt}\n"
            )
        return buf.getvalue()


def estimate_forward_recurrence_cdf(
    spec: ProcessSpec,
    t: float,
    x_grid,
    n_rep: int,
    rng: RngStream,
    threads: int = 1,
    target=None,
    z: float = DEFAULT_Z,
) -> CdfReport:
    """Empirical CDF of the gap to the first point strictly after t.

    The simulation window auto-extends (doubling, up to 6 times) for
    replications where no point lands after t.
    """
    x_grid = np.asarray(x_grid, dtype=np.float64)
    if x_grid.size == 0 or np.any(np.diff(x_grid) < 0) or np.any(x_grid < 0):
        raise ValueError("x_grid must be sorted and nonnegative")
    mu = spec.interarrival.mean()
    base_pad = float(max(x_grid[-1], 1.0) + 10.0 * mu)

    def one(stream):
        pad = base_pad
        for attempt in range(7):
            pat = sample_renewal_cluster_process(spec, t, t + pad, stream.substream(attempt))
            if len(pat):
                return float(pat.points[0] - t)
            pad *= 2.0
        raise NoPointAfterError(f"no point after t={t} within pad {pad}")

    gaps = np.array(replicate(one, n_rep, rng, threads))
    values = empirical_cdf(gaps, x_grid)
    half = z * np.sqrt(np.maximum(values * (1.0 - values), 0.0) / n_rep)
    tgt = None if target is None else np.asarray(target, dtype=np.float64)
    return CdfReport(x_grid, values, half, n_rep, tgt, rng.seed, rng.stream_id)


def bartlett_lewis_void_probability(
    rate: float, mean_size: float, step_survival, x: float, tol: float = 1e-9
) -> float:
    """Long-run probability of an empty length-x window for Poisson parents
    with forward-running step clusters.

    Evaluates exp(-rate * (x + mean_size * integral_0^x P(step > y) dy))
    with the inner integral by adaptive quadrature.
    """
    if not x > 0:
        raise ValueError("x must be positive")
    integral, err = integrate.quad(step_survival, 0.0, x, epsabs=tol, epsrel=tol)
    if err > max(tol, abs(integral) * 1e-6):
        raise QuadratureError(f"quadrature error {err} above tolerance")
    return float(np.exp(-rate * (x + mean_size * integral)))


def bartlett_lewis_recurrence_cdf(rate, mean_size, step_survival, x_grid):
    """Closed-form limiting forward-recurrence CDF for the same model."""
    return np.array(
        [
            0.0
            if x <= 0
            else 1.0 - bartlett_lewis_void_probability(rate, mean_size, step_survival, x)
            for x in np.asarray(x_grid, dtype=np.float64)
        ]
    )


def _void_target(spec: ProcessSpec, x: float):
    """Closed-form void probability when the spec matches the Poisson-parent
    step-cluster structure; None otherwise."""
    from .clusters import CumulativeStepCluster
    from .laws import Exponential

    if (
        isinstance(spec.interarrival, Exponential)
        and isinstance(spec.cluster, CumulativeStepCluster)
        and spec.include_parents
        and spec.delay is None
    ):
        step = spec.cluster.step
        return bartlett_lewis_void_probability(
            spec.interarrival.rate,
            spec.cluster.size.mean(),
            lambda y: 1.0 - step.cdf(y),
            x,
        )
    return None


def estimate_void_probability(
    spec: ProcessSpec,
    t: float,
    x: float,
    n_rep: int,
    rng: RngStream,
    threads: int = 1,
) -> ExperimentReport:
    """Fraction of replications with an empty window (t, t+x]."""
    if t < 0 or not x > 0 or n_rep < 2:
        raise ValueError("need t >= 0, x > 0, n_rep >= 2")

    def one(stream):
        pat = sample_renewal_cluster_process(spec, t, t + x, stream)
        return 1.0 if len(pat) == 0 else 0.0, pat.overflow

    out = replicate(one, n_rep, rng, threads)
    return _report(
        [v for v, _ in out], [o for _, o in out], _void_target(spec, x), rng
    )


@dataclass(frozen=True)
class RenewalFunctionTable:
    """Tabulated expected cumulative count up to each grid time.

    ``corrected`` is the isotonic regression of the raw Monte Carlo means;
    the raw values are kept so the size of the correction can be audited.
    """

    grid: np.ndarray
    raw: np.ndarray
    corrected: np.ndarray
    std_errors: np.ndarray
    n_rep: int
    seed: int
    stream_id: int

    CSV_HEADER = "t,raw,corrected,std_error"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(self.CSV_HEADER + "\n")
        for i, t in enumerate(self.grid):
            buf.write(
                f"{t!r},{self.raw[i]!r},{self.corrected[i]!r},{self.std_errors[i]!r}\n"
            )
        return buf.getvalue()


def estimate_renewal_function(
    spec: ProcessSpec,
    t_grid,
    n_rep: int,
    rng: RngStream,
    threads: int = 1,
) -> RenewalFunctionTable:
    """Monte Carlo estimate of the expected count of points at or below each
    grid time, per-replication full counting."""
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if t_grid.size == 0 or np.any(np.diff(t_grid) < 0):
        raise ValueError("t_grid must be sorted and nonempty")
    from .process import guard_band

    lo = min(0.0, float(t_grid[0])) - guard_band(spec) - 1.0

    def one(stream):
        pat = sample_renewal_cluster_process(spec, lo, float(t_grid[-1]), stream)
        return np.searchsorted(pat.points, t_grid, side="right")

    counts = np.array(replicate(one, n_rep, rng, threads), dtype=np.float64)
    raw = counts.mean(axis=0)
    se = counts.std(axis=0, ddof=1) / np.sqrt(n_rep)
    corrected = isotonic_regression(raw).x
    return RenewalFunctionTable(
        t_grid, raw, corrected, se, n_rep, rng.seed, rng.stream_id
    )


@dataclass(frozen=True)
class StepFunction:
    """Nonnegative step function: disjoint pieces ([a, b), height)."""

    pieces: tuple

    def __post_init__(self):
        pieces = tuple(tuple(p) for p in self.pieces)
        object.__setattr__(self, "pieces", pieces)
        for a, b, h in pieces:
            if not (np.isfinite(a) and np.isfinite(b) and a < b and h >= 0):
                raise ValueError(f"invalid piece ({a}, {b}, {h})")
        spans = sorted((a, b) for a, b, _ in pieces)
        for (_, b1), (a2, _) in zip(spans, spans[1:]):
            if a2 < b1:
                raise ValueError("pieces must be pairwise disjoint")

    def __call__(self, y):
        y = np.asarray(y, dtype=np.float64)
        out = np.zeros_like(y)
        for a, b, h in self.pieces:
            out = out + h * ((y >= a) & (y < b))
        return out

    def integral(self) -> float:
        return float(sum(h * (b - a) for a, b, h in self.pieces))

    def support_max(self) -> float:
        return float(max((b for _, b, _ in self.pieces), default=0.0))


def key_renewal_convolve(U_tab: RenewalFunctionTable, g: StepFunction, t: float) -> float:
    """Riemann-Stieltjes sum of g(t - y) against the tabulated increments.

    With g = indicator of [0, x) this reduces exactly to
    U(t) - U(t - x) on the table.
    """
    grid = U_tab.grid
    if not (grid[0] <= t <= grid[-1]):
        raise SupportRangeError(f"t={t} outside tabulated range")
    if t - g.support_max() < grid[0] - 1e-12 and g.pieces:
        raise SupportRangeError("step-function support exceeds the tabulated range")
    u = U_tab.corrected
    increments = np.diff(np.concatenate(([0.0], u)))
    weights = g(t - grid)
    return float(np.sum(weights * increments))


def key_renewal_limit(spec: ProcessSpec, g: StepFunction) -> float:
    """Closed-form limit of the renewal convolution: rate times integral."""
    return _rate_term(spec) * g.integral()
