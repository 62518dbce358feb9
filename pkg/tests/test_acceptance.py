"""End-to-end statistical acceptance suite.

Each test prints one PASS/FAIL line for its criterion.  Seeds are frozen;
sample sizes follow the stated tolerances, so the whole module runs in a
few minutes single-threaded.
"""

import numpy as np
import pytest

from renewalcluster import (
    Exponential,
    PoissonCount,
    StepFunction,
    Uniform,
    bartlett_lewis_preset,
    bartlett_lewis_recurrence_cdf,
    estimate_elementary_ratio,
    estimate_forward_recurrence_cdf,
    estimate_renewal_function,
    estimate_void_probability,
    estimate_window_mean,
    gated_cluster_preset,
    key_renewal_convolve,
    key_renewal_limit,
    post_coupling_agreement,
    rademacher_flip_test,
    sample_size_biased_gaps,
    sample_stationary_cluster_process,
    stream_for,
    two_sample_ks,
)
from renewalcluster.config import build_experiment_config, parse_kv
from renewalcluster.runner import run_experiment

GATED_RATE = 0.56  # 1.4 points per cluster / 2.5 mean gap

BL_SPEC = bartlett_lewis_preset(1.0, PoissonCount(1.0), Exponential(1.0))


def _verdict(num, description, ok):
    print(f"CRITERION {num}: {'PASS' if ok else 'FAIL'} - {description}")
    assert ok, f"criterion {num} failed: {description}"


class TestAcceptance:
    def test_01_window_mean_blackwell(self):
        spec = gated_cluster_preset()
        rep = estimate_window_mean(
            spec, 500.0, 1.0, 10_000, stream_for(0, "acceptance-window-mean")
        )
        ok = rep.ci_low <= GATED_RATE <= rep.ci_high
        _verdict(
            1,
            f"window mean {rep.estimate:.4f} CI [{rep.ci_low:.4f}, {rep.ci_high:.4f}] "
            f"contains {GATED_RATE}",
            ok,
        )

    def test_02_elementary_ratio(self):
        spec = gated_cluster_preset()
        rep = estimate_elementary_ratio(
            spec, 10_000.0, 200, stream_for(0, "acceptance-elementary")
        )
        ok = abs(rep.estimate - GATED_RATE) <= 0.01
        _verdict(2, f"count(0,1e4]/1e4 = {rep.estimate:.5f} within 0.01 of {GATED_RATE}", ok)

    def test_03_void_probability(self):
        rep = estimate_void_probability(
            BL_SPEC, 200.0, 1.0, 100_000, stream_for(0, "acceptance-void")
        )
        ok = rep.within(4.0)
        _verdict(
            3,
            f"void frequency {rep.estimate:.5f} within 4 SE ({rep.std_error:.5f}) "
            f"of {rep.target:.5f}",
            ok,
        )

    def test_04_recurrence_cdf(self):
        grid = np.linspace(0.0, 3.0, 20)
        target = bartlett_lewis_recurrence_cdf(
            1.0, 1.0, lambda y: np.exp(-y), grid
        )
        rep = estimate_forward_recurrence_cdf(
            BL_SPEC, 200.0, grid, 100_000, stream_for(0, "acceptance-recurrence"),
            target=target,
        )
        gap = rep.max_target_gap
        ok = gap < 0.01
        _verdict(4, f"max CDF discrepancy {gap:.5f} < 0.01 over 20-point grid", ok)

    def test_05_window_mean_with_parents(self):
        rep = estimate_window_mean(
            BL_SPEC, 200.0, 1.0, 10_000, stream_for(0, "acceptance-bl-window")
        )
        # rate * (E L + 1) * x = 2.0
        ok = rep.ci_low <= 2.0 <= rep.ci_high and rep.target == pytest.approx(2.0)
        _verdict(
            5,
            f"parent-inclusive window mean CI [{rep.ci_low:.4f}, {rep.ci_high:.4f}] "
            "contains 2.0",
            ok,
        )

    def test_06_stationarity_shifts(self):
        spec = gated_cluster_preset()
        rng = stream_for(0, "acceptance-stationarity")
        shifts = (0.0, 37.7, 200.0)
        samples = []
        for i, s in enumerate(shifts):
            sub = rng.substream(i)
            samples.append(
                np.array(
                    [
                        len(
                            sample_stationary_cluster_process(
                                spec, s, s + 1.0, sub.substream(r)
                            )
                        )
                        for r in range(10_000)
                    ],
                    dtype=np.float64,
                )
            )
        checks = [
            two_sample_ks(samples[0], samples[i], alpha=0.01)
            for i in range(1, len(shifts))
        ]
        ok = not any(c.reject for c in checks)
        dists = ", ".join(f"{c.distance:.4f}<{c.critical_value:.4f}" for c in checks)
        _verdict(6, f"KS of window counts at shifts {shifts}: {dists}", ok)

    def test_07_size_biasing_identity(self):
        law = Uniform(0.0, 5.0)
        xs = sample_size_biased_gaps(law, 200_000, stream_for(0, "acceptance-size-bias"))
        se_mean = xs.std() / np.sqrt(xs.size)
        ok_mean = abs(xs.mean() - 10.0 / 3.0) <= 4 * se_mean
        # E 1{X* > 1} = E[X 1{X > 1}] / E X = 2.4 / 2.5
        ind = (xs > 1.0).astype(np.float64)
        se_ind = ind.std() / np.sqrt(ind.size)
        ok_ind = abs(ind.mean() - 0.96) <= 4 * se_ind
        _verdict(
            7,
            f"size-biased mean {xs.mean():.4f} vs 10/3 and "
            f"P(X*>1) {ind.mean():.4f} vs 0.96, both within 4 SE",
            ok_mean and ok_ind,
        )

    def test_08_coupling(self):
        spec = gated_cluster_preset()
        rng = stream_for(1, "acceptance-coupling")
        reports = [
            post_coupling_agreement(
                spec, 0.1, 100, rng.substream(r), steps_cap=10**7
            )
            for r in range(1000)
        ]
        finite = sum(not r.capped for r in reports)
        agree_ok = all(r.passed for r in reports if not r.capped)
        ok = finite >= 990 and agree_ok
        _verdict(
            8,
            f"{finite}/1000 runs coupled within the cap; post-coupling agreement "
            f"holds at 100 indices on every finite run",
            ok,
        )

    def test_09_flip_test(self):
        rng = stream_for(0, "acceptance-flip")
        stop = rademacher_flip_test(20, 100_000, rng.substream(0), rule="stopping")
        peek = rademacher_flip_test(20, 100_000, rng.substream(1), rule="peek_ahead")
        ok = (not stop.reject) and peek.reject
        _verdict(
            9,
            f"stopping-time flip accepted ({stop.distance:.4f} < "
            f"{stop.critical_value:.4f}), peek-ahead control rejected "
            f"({peek.distance:.4f} > {peek.critical_value:.4f})",
            ok,
        )

    def test_10_key_renewal(self):
        spec = gated_cluster_preset()
        g = StepFunction(((0.0, 1.0, 1.0), (2.0, 4.0, 0.5)))
        grid = np.array([496.0, 498.0, 499.0, 500.0])
        tab = estimate_renewal_function(
            spec, grid, 50_000, stream_for(0, "acceptance-key-renewal")
        )
        value = key_renewal_convolve(tab, g, 500.0)
        limit = key_renewal_limit(spec, g)
        ok_value = abs(value - limit) <= 0.02 * limit
        # with g an indicator of [0, x) the sum is exactly a table difference
        ind = StepFunction(((0.0, 2.0, 1.0),))
        exact = key_renewal_convolve(tab, ind, 500.0)
        ok_exact = exact == pytest.approx(
            tab.corrected[-1] - tab.corrected[1], rel=1e-12
        )
        _verdict(
            10,
            f"renewal convolution {value:.4f} within 2% of limit {limit:.4f}; "
            "indicator case equals the table difference exactly",
            ok_value and ok_exact,
        )

    def test_11_determinism(self, tmp_path):
        raw = parse_kv(
            "experiment = window_mean\n"
            "interarrival.kind = uniform\ninterarrival.lo = 0\n"
            "interarrival.hi = 5\ncluster.kind = gated_normal\n"
            "delay.kind = same\nt = 100\nx = 1\nn_rep = 2000\nseed = 0\n"
        )
        cfg = build_experiment_config(raw)
        run_experiment(cfg, tmp_path / "a", threads=1, raw_config=raw)
        run_experiment(cfg, tmp_path / "b", threads=4, raw_config=raw)
        same = all(
            (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
            for name in ("report.csv", "manifest.txt")
        )
        _verdict(11, "rerun with 4 worker threads is byte-identical to 1 thread", same)
