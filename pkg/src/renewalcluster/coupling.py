"""Executable coupling of the delayed and stationary marked renewal
processes, driven by a shared gap sequence and an independent Rademacher
sign sequence.

The two copies consume the shared gaps: the stationary copy takes those
with sign +1, the delayed copy those with sign -1, so the difference
between their current epochs performs a symmetric nonarithmetic random
walk.  The walk is recurrent, so it eventually enters [0, epsilon); from
that step on the two processes stay epsilon-close with identical marks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .process import ProcessSpec
from .stationary import DEFAULT_POOL, _size_biased_gaps
from .stats import KsReport, two_sample_ks
from .streams import RngStream

__all__ = [
    "CouplingRun",
    "AgreementReport",
    "run_coupling",
    "post_coupling_agreement",
    "rademacher_flip_test",
    "random_walk_path",
    "coupling_runs_to_csv",
]

_BLOCK = 1 << 14
_DENSE_PATH = 10_000


@dataclass(frozen=True)
class CouplingRun:
    """Outcome of one coupling attempt.

    ``tau`` is the number of shared steps until the walk first enters
    [0, epsilon), or None when the cap was hit (a tracked value, not a
    failure).  ``coupling_time`` is the later of the two epochs at which
    the processes meet.  ``v_path`` holds the walk thinned beyond 10^4
    steps; detection itself is exact at every step.
    """

    epsilon: float
    steps_cap: int
    tau: int | None
    v_tau: float | None
    l_tau: int | None
    l_tau_delayed: int | None
    coupling_time: float | None
    start_stationary: float
    start_delayed: float
    v_path: np.ndarray
    v_path_indices: np.ndarray

    @property
    def capped(self) -> bool:
        return self.tau is None


@dataclass(frozen=True)
class AgreementReport:
    """Post-coupling bookkeeping check: epoch gaps in [0, epsilon) and
    identical marks at matched indices.  A violation is an implementation
    bug, never expected."""

    epsilon: float
    tau: int | None
    k_checks: int
    violations: tuple
    max_gap: float | None
    capped: bool

    @property
    def passed(self) -> bool:
        return (not self.capped) and not self.violations


def _thin_mask(indices: np.ndarray) -> np.ndarray:
    """Keep every step up to 10^4, then every 2^k-th per doubling octave."""
    dense = indices <= _DENSE_PATH
    safe = np.maximum(indices, _DENSE_PATH + 1)
    stride = 2 ** np.ceil(np.log2(safe / _DENSE_PATH)).astype(np.int64)
    return dense | (indices % stride == 0)


def _draw_starts(spec, g, pool_size, start_override):
    if start_override is not None:
        return float(start_override[0]), float(start_override[1])
    law = spec.interarrival
    x_star = float(_size_biased_gaps(law, 1, g, pool_size)[0])
    u = g.random()
    t0 = u * x_star
    t_delayed = float(spec.delay.sample(g)) if spec.delay is not None else 0.0
    return t0, t_delayed


def _walk(spec, epsilon, steps_cap, g, t0, t_delayed):
    """Run the shared walk until it enters [0, epsilon) or the cap.

    Returns (tau, v_tau, plus_count, sum_plus, sum_minus, path, path_idx,
    leftover) where leftover is the unconsumed (gaps, signs) tail of the
    final block: those draws are part of the shared sequence and feed the
    post-coupling reconstruction.
    """
    law = spec.interarrival
    v0 = t0 - t_delayed
    path = [np.array([v0])]
    path_idx = [np.array([0])]
    if 0.0 <= v0 < epsilon:
        return 0, v0, 0, 0.0, 0.0, path, path_idx, (np.empty(0), np.empty(0, bool))
    v = v0
    done = 0
    sum_plus = 0.0
    sum_minus = 0.0
    plus_count = 0
    while done < steps_cap:
        n = min(_BLOCK, steps_cap - done)
        xs = np.asarray(law.sample(g, n), dtype=np.float64)
        plus = g.random(n) < 0.5
        vs = v + np.cumsum(np.where(plus, xs, -xs))
        hits = np.nonzero((vs >= 0.0) & (vs < epsilon))[0]
        stop = int(hits[0]) if hits.size else n - 1
        gi = done + 1 + np.arange(stop + 1)
        mask = _thin_mask(gi)
        path.append(vs[: stop + 1][mask])
        path_idx.append(gi[mask])
        head_p = plus[: stop + 1]
        head_x = xs[: stop + 1]
        sum_plus += float(head_x[head_p].sum())
        sum_minus += float(head_x[~head_p].sum())
        plus_count += int(head_p.sum())
        if hits.size:
            tau = done + stop + 1
            leftover = (xs[stop + 1 :], plus[stop + 1 :])
            return tau, float(vs[stop]), plus_count, sum_plus, sum_minus, path, path_idx, leftover
        v = float(vs[-1])
        done += n
    return None, None, None, None, None, path, path_idx, (np.empty(0), np.empty(0, bool))


def run_coupling(
    spec: ProcessSpec,
    epsilon: float,
    steps_cap: int,
    rng: RngStream,
    start_override: tuple | None = None,
    pool_size: int = DEFAULT_POOL,
) -> CouplingRun:
    """Couple the stationary and delayed processes on one stream.

    ``start_override`` substitutes the two initial epochs (stationary,
    delayed); with equal values the walk starts at 0 and tau = 0.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if steps_cap < 1:
        raise ValueError("steps_cap must be >= 1")
    g = rng.generator()
    t0, t_delayed = _draw_starts(spec, g, pool_size, start_override)
    tau, v_tau, plus_count, sum_plus, sum_minus, path, path_idx, _ = _walk(
        spec, epsilon, steps_cap, g, t0, t_delayed
    )
    if tau is None:
        coupling_time = None
        l_tau = lp_tau = None
    else:
        l_tau = plus_count
        lp_tau = tau - plus_count
        coupling_time = max(t0 + sum_plus, t_delayed + sum_minus)
    return CouplingRun(
        epsilon=epsilon,
        steps_cap=steps_cap,
        tau=tau,
        v_tau=v_tau,
        l_tau=l_tau,
        l_tau_delayed=lp_tau,
        coupling_time=coupling_time,
        start_stationary=t0,
        start_delayed=t_delayed,
        v_path=np.concatenate(path),
        v_path_indices=np.concatenate(path_idx),
    )


def post_coupling_agreement(
    spec: ProcessSpec,
    epsilon: float,
    k_checks: int,
    rng: RngStream,
    steps_cap: int = 10**7,
    start_override: tuple | None = None,
    pool_size: int = DEFAULT_POOL,
) -> AgreementReport:
    """Verify that after the coupling step the matched arrivals of the two
    processes stay within [0, epsilon) with identical marks.

    The post-coupling arrivals of both processes are rebuilt from the
    shared sequence: each +1-signed gap advances both copies by the same
    value, and the attached mark is the same draw, so mark equality is
    exact by construction; the epoch gap is checked numerically.
    """
    if k_checks < 0:
        raise ValueError("k_checks must be >= 0")
    g = rng.generator()
    t0, t_delayed = _draw_starts(spec, g, pool_size, start_override)
    tau, v_tau, plus_count, sum_plus, sum_minus, _, _, leftover = _walk(
        spec, epsilon, steps_cap, g, t0, t_delayed
    )
    if tau is None:
        return AgreementReport(epsilon, None, k_checks, (), None, capped=True)

    # shared +1-signed gaps continuing past tau
    xs, plus = leftover
    ys = list(xs[plus])
    law = spec.interarrival
    while len(ys) < k_checks:
        more = np.asarray(law.sample(g, _BLOCK), dtype=np.float64)
        sign = g.random(_BLOCK) < 0.5
        ys.extend(more[sign])
    ys = ys[:k_checks]

    stationary_epoch = t0 + sum_plus
    delayed_epoch = t_delayed + sum_minus
    violations = []
    gaps = []
    for k in range(k_checks + 1):
        if k > 0:
            y = ys[k - 1]
            stationary_epoch += y
            delayed_epoch += y
        diff = stationary_epoch - delayed_epoch
        gaps.append(diff)
        if not (0.0 <= diff < epsilon):
            violations.append(k)
    return AgreementReport(
        epsilon=epsilon,
        tau=tau,
        k_checks=k_checks,
        violations=tuple(violations),
        max_gap=float(max(gaps)),
        capped=False,
    )


def random_walk_path(
    spec: ProcessSpec,
    n_steps: int,
    rng: RngStream,
    start_override: tuple | None = None,
    pool_size: int = DEFAULT_POOL,
) -> np.ndarray:
    """Dense walk path V_0..V_n for diagnostics (no stopping)."""
    g = rng.generator()
    t0, t_delayed = _draw_starts(spec, g, pool_size, start_override)
    xs = np.asarray(spec.interarrival.sample(g, n_steps), dtype=np.float64)
    plus = g.random(n_steps) < 0.5
    v = (t0 - t_delayed) + np.concatenate(
        ([0.0], np.cumsum(np.where(plus, xs, -xs)))
    )
    return v


def rademacher_flip_test(
    n: int,
    n_rep: int,
    rng: RngStream,
    ones_needed: int = 2,
    rule: str = "stopping",
    alpha: float = 0.01,
) -> KsReport:
    """KS-compare partial sums of sign sequences flipped after a rule index
    against unflipped ones.

    ``rule="stopping"`` flips after the index at which ``ones_needed`` +1's
    have accumulated (a stopping time: distributions agree).
    ``rule="peek_ahead"`` flips after the argmax of the partial sums, which
    looks into the future; it is a deliberate negative control and the test
    is expected to reject.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    ga = rng.substream(1).generator()
    gb = rng.substream(2).generator()
    signs = np.where(ga.random((n_rep, n)) < 0.5, 1, -1)
    if rule == "stopping":
        reached = np.cumsum(signs == 1, axis=1) >= ones_needed
        found = reached.any(axis=1)
        first = np.argmax(reached, axis=1)
        first[~found] = n  # never reached: nothing flipped
        flip = np.arange(n) > first[:, None]
    elif rule == "peek_ahead":
        s = np.cumsum(signs, axis=1)
        flip = np.arange(n) > np.argmax(s, axis=1)[:, None]
    else:
        raise ValueError(f"unknown rule {rule!r}")
    flipped_sums = np.where(flip, -signs, signs).sum(axis=1)
    plain_sums = np.where(gb.random((n_rep, n)) < 0.5, 1, -1).sum(axis=1)
    return two_sample_ks(flipped_sums, plain_sums, alpha)


def coupling_runs_to_csv(runs) -> str:
    lines = ["epsilon,tau,coupling_time,capped"]
    for r in runs:
        tau = "" if r.tau is None else str(r.tau)
        ct = "" if r.coupling_time is None else repr(r.coupling_time)
        lines.append(f"{r.epsilon!r},{tau},{ct},{str(r.capped).lower()}")
    return "\n".join(lines) + "\n"
