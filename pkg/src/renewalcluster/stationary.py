"""Stationary constructions: size-biased marks, the uniform split of the
straddling interval, two-sided extension, and stationarity diagnostics.

The interval straddling the origin is drawn from the size-biased gap law
and split by an independent Uniform(0,1): the origin-side arrival sits at
U * X_star with the size-biased mark, its predecessor at -(1 - U) * X_star
with an ordinary mark.  Extending both directions with i.i.d. ordinary
arrivals yields a shift-invariant marked renewal process.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnboundedLawError
from .patterns import MarkedArrival, MarkedPattern, PointPattern
from .process import ProcessSpec, _flatten_arrays, _segment_abs_max, guard_band
from .stats import KsReport, two_sample_ks
from .streams import RngStream

__all__ = [
    "TwoSidedMarkedPattern",
    "sample_size_biased_gaps",
    "sample_size_biased_mark",
    "sample_stationary_marked_renewal",
    "sample_stationary_cluster_process",
    "point_stationary_check",
    "PointStationarityReport",
]

DEFAULT_POOL = 4096


@dataclass(frozen=True, eq=False)
class TwoSidedMarkedPattern(MarkedPattern):
    """Marked pattern extending on both sides of the origin.

    ``origin_index`` points at the unique arrival with epoch >= 0 whose
    predecessor (when present) has a negative epoch; their distance is the
    size-biased gap recorded as the origin arrival's interarrival.
    """

    origin_index: int = 0

    def __post_init__(self):
        super().__post_init__()
        i = self.origin_index
        if not (0 <= i < len(self.arrivals)):
            raise ValueError("origin_index out of range")
        origin = self.arrivals[i]
        if origin.epoch < 0:
            raise ValueError("origin arrival must have epoch >= 0")
        if i > 0 and not self.arrivals[i - 1].epoch < 0:
            raise ValueError("origin predecessor must have a negative epoch")

    @property
    def origin(self) -> MarkedArrival:
        return self.arrivals[self.origin_index]


def _size_biased_gaps(law, n, g, pool_size=DEFAULT_POOL):
    """n draws from the gap law reweighted proportionally to the gap.

    Exact rejection sampling when the law has a finite essential sup;
    otherwise weighted resampling from a pool of ``pool_size`` candidates,
    which carries O(1/pool_size) bias.
    """
    bound = law.sup_bound()
    if bound is not None:
        out = np.empty(n)
        filled = 0
        # acceptance probability is mean/bound per candidate
        rate = max(law.mean() / bound, 1e-3)
        while filled < n:
            m = max(32, int((n - filled) / rate * 1.2) + 16)
            xs = np.asarray(law.sample(g, m), dtype=np.float64)
            acc = xs[g.random(m) * bound < xs]
            take = min(acc.size, n - filled)
            out[filled : filled + take] = acc[:take]
            filled += take
        return out
    if pool_size is None or pool_size < 2:
        raise UnboundedLawError(
            "law has no essential sup; configure pool_size for weighted resampling"
        )
    xs = np.asarray(law.sample(g, pool_size), dtype=np.float64)
    idx = g.choice(pool_size, size=n, p=xs / xs.sum())
    return xs[idx]


def sample_size_biased_gaps(
    law, n: int, rng: RngStream, pool_size: int = DEFAULT_POOL
) -> np.ndarray:
    return _size_biased_gaps(law, n, rng.generator(), pool_size)


def sample_size_biased_mark(
    spec: ProcessSpec, rng: RngStream, pool_size: int = DEFAULT_POOL
) -> MarkedArrival:
    """One size-biased mark: the gap drawn with probability proportional to
    its length, and a cluster drawn conditionally on that gap."""
    g = rng.generator()
    x_star = float(_size_biased_gaps(spec.interarrival, 1, g, pool_size)[0])
    offsets = spec.cluster.sample(x_star, g)
    return MarkedArrival(0.0, len(offsets), offsets, x_star)


def _block_gaps_until(law, total_needed, g):
    """Draw gaps in blocks until their sum exceeds total_needed (>= 0)."""
    mu = law.mean()
    blocks = []
    acc = 0.0
    while acc <= total_needed:
        n = max(32, int((total_needed - acc) / mu * 1.25) + 16)
        b = np.asarray(law.sample(g, n), dtype=np.float64)
        blocks.append(b)
        acc += float(b.sum())
    return np.concatenate(blocks) if blocks else np.empty(0)


def _stationary_arrays(spec, window_lo, window_hi, g, pool_size):
    """Arrival arrays of the stationary process covering the window plus
    guard bands, sorted by epoch.

    Returns (epochs, gaps, sizes, offsets, origin_index).
    """
    law = spec.interarrival
    guard = guard_band(spec)
    x_star = float(_size_biased_gaps(law, 1, g, pool_size)[0])
    u = g.random()
    t0 = u * x_star
    tm1 = -(1.0 - u) * x_star

    # right extension beyond the window edge
    right_needed = max(window_hi + guard - t0, 0.0)
    right_gaps = _block_gaps_until(law, right_needed, g)
    right_cum = np.cumsum(right_gaps)
    cut = np.searchsorted(t0 + right_cum, window_hi + guard, side="right")
    right_gaps = right_gaps[:cut]
    right_epochs = t0 + right_cum[:cut]

    # left extension; the arrival at tm1 is always kept
    target = window_lo - guard
    left_needed = max(tm1 - target, 0.0)
    raw = _block_gaps_until(law, left_needed, g)
    left_pos = tm1 - (np.cumsum(raw) - raw)  # epoch of the arrival owning gap k
    keep = max(int(np.searchsorted(-left_pos, -target, side="right")), 1)
    left_gaps = raw[:keep]
    left_epochs = left_pos[:keep]

    # clusters: origin mark first, then right, then left (fixed draw order)
    origin_offs = spec.cluster.sample(x_star, g)
    r_sizes, r_offs = spec.cluster.sample_batch(right_gaps, g)
    l_sizes, l_offs = spec.cluster.sample_batch(left_gaps, g)

    n_left = len(left_epochs)
    epochs = np.concatenate([left_epochs[::-1], [t0], right_epochs])
    gaps = np.concatenate([left_gaps[::-1], [x_star], right_gaps])
    sizes = np.concatenate([l_sizes[::-1], [len(origin_offs)], r_sizes])
    # reorder the concatenated left offsets to match the reversed epochs
    if l_offs.size:
        starts = np.concatenate(([0], np.cumsum(l_sizes)[:-1]))
        order = np.arange(n_left)[::-1]
        l_offs = np.concatenate(
            [l_offs[starts[i] : starts[i] + l_sizes[i]] for i in order]
        )
    offs = np.concatenate([l_offs, origin_offs, r_offs])
    return epochs, gaps, sizes, offs, n_left


def sample_stationary_marked_renewal(
    spec: ProcessSpec,
    window_lo: float,
    window_hi: float,
    rng: RngStream,
    pool_size: int = DEFAULT_POOL,
) -> TwoSidedMarkedPattern:
    """Stationary marked renewal process covering (window_lo, window_hi]."""
    if not window_lo < window_hi:
        raise ValueError("need window_lo < window_hi")
    g = rng.generator()
    epochs, gaps, sizes, offs, origin = _stationary_arrays(
        spec, window_lo, window_hi, g, pool_size
    )
    arrivals = []
    pos = 0
    for i in range(len(epochs)):
        k = int(sizes[i])
        arrivals.append(
            MarkedArrival(float(epochs[i]), k, offs[pos : pos + k], float(gaps[i]))
        )
        pos += k
    lo = float(np.nextafter(epochs[0], -np.inf))
    hi = float(max(epochs[-1], window_hi + guard_band(spec)))
    return TwoSidedMarkedPattern(tuple(arrivals), (lo, hi), origin_index=origin)


def sample_stationary_cluster_process(
    spec: ProcessSpec,
    window_lo: float,
    window_hi: float,
    rng: RngStream,
    pool_size: int = DEFAULT_POOL,
) -> PointPattern:
    """Stationary renewal cluster process restricted to (window_lo, window_hi]."""
    if not window_lo < window_hi:
        raise ValueError("need window_lo < window_hi")
    g = rng.generator()
    epochs, gaps, sizes, offs, _ = _stationary_arrays(
        spec, window_lo, window_hi, g, pool_size
    )
    points = _flatten_arrays(epochs, sizes, offs, spec.include_parents)
    keep = (points > window_lo) & (points <= window_hi)
    dropped = int(points.size - keep.sum())
    return PointPattern(np.sort(points[keep]), (window_lo, window_hi), dropped)


@dataclass(frozen=True)
class PointStationarityReport:
    k: int
    depth: int
    n_rep: int
    alpha: float
    gap_checks: tuple
    size_checks: tuple
    max_distance: float
    passed: bool


def point_stationary_check(
    spec: ProcessSpec,
    k: int,
    n_rep: int,
    rng: RngStream,
    depth: int = 3,
    alpha: float = 0.01,
) -> PointStationarityReport:
    """Compare the process recentered at its k-th arrival against the origin.

    Simulates the zero-anchored process, reads off the ``depth`` gaps and
    cluster sizes following the origin and following the k-th arrival from
    independent replication sets, and KS-compares them coordinate-wise.
    With k = 0 both sets use the same stream, so the samples coincide.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    law = spec.interarrival

    def batch(stream, skip):
        g = stream.generator()
        gaps = np.asarray(law.sample(g, (n_rep, skip + depth)), dtype=np.float64)
        view = gaps[:, skip:]
        sizes, _ = spec.cluster.sample_batch(view.reshape(-1), g)
        return view, sizes.reshape(n_rep, depth)

    gaps_a, sizes_a = batch(rng.substream(0), 0)
    gaps_b, sizes_b = batch(rng.substream(k), k)

    gap_checks = tuple(
        two_sample_ks(gaps_a[:, j], gaps_b[:, j], alpha) for j in range(depth)
    )
    size_checks = tuple(
        two_sample_ks(sizes_a[:, j], sizes_b[:, j], alpha) for j in range(depth)
    )
    all_checks = gap_checks + size_checks
    return PointStationarityReport(
        k=k,
        depth=depth,
        n_rep=n_rep,
        alpha=alpha,
        gap_checks=gap_checks,
        size_checks=size_checks,
        max_distance=max(c.distance for c in all_checks),
        passed=not any(c.reject for c in all_checks),
    )
