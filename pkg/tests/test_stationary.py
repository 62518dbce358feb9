import numpy as np
import pytest

from renewalcluster import (
    EmptyCluster,
    Exponential,
    ProcessSpec,
    RngStream,
    Uniform,
    gated_cluster_preset,
    point_stationary_check,
    sample_size_biased_gaps,
    sample_size_biased_mark,
    sample_stationary_cluster_process,
    sample_stationary_marked_renewal,
    two_sample_ks,
)
from renewalcluster.errors import UnboundedLawError
from renewalcluster.stationary import TwoSidedMarkedPattern


class TestSizeBiasedGaps:
    """The reweighted gap X* satisfies E f(X*) = E[X f(X)] / E X."""

    def test_uniform_moments(self):
        law = Uniform(0.0, 5.0)
        xs = sample_size_biased_gaps(law, 200_000, RngStream(61))
        se = xs.std() / np.sqrt(xs.size)
        # E X* = E X^2 / E X = (25/3) / 2.5 = 10/3
        assert abs(xs.mean() - 10.0 / 3.0) < 4 * se
        # P(X* > 1) = E[X 1{X>1}] / E X = 2.4 / 2.5 = 0.96
        p = (xs > 1.0).mean()
        assert abs(p - 0.96) < 4 * np.sqrt(0.96 * 0.04 / xs.size)

    def test_identity_for_several_test_functions(self):
        law = Uniform(1.0, 2.0)
        xs = sample_size_biased_gaps(law, 200_000, RngStream(62))
        mu = law.mean()
        for f, target in [
            (lambda x: x, law.second_moment() / mu),
            (lambda x: x**2, (15.0 / 4.0) / mu),  # E X^3 = 15/4 for U(1,2)
            (lambda x: (x > 1.5).astype(float), (law.mean() - law.partial_mean(1.5)) / mu),
        ]:
            vals = f(xs)
            se = vals.std() / np.sqrt(vals.size)
            assert abs(vals.mean() - target) < 4 * se + 1e-12

    def test_exponential_pool_fallback(self):
        # size-biased Exponential(1) is Gamma(2, 1): mean 2
        xs = sample_size_biased_gaps(Exponential(1.0), 100_000, RngStream(63), pool_size=200_000)
        se = xs.std() / np.sqrt(xs.size)
        assert abs(xs.mean() - 2.0) < 5 * se + 0.02

    def test_unbounded_without_pool_raises(self):
        with pytest.raises(UnboundedLawError):
            sample_size_biased_gaps(Exponential(1.0), 10, RngStream(64), pool_size=None)

    def test_size_biased_mark_gap_mean(self):
        spec = gated_cluster_preset()
        gaps = [
            sample_size_biased_mark(spec, RngStream(65, r)).interarrival
            for r in range(20_000)
        ]
        gaps = np.array(gaps)
        se = gaps.std() / np.sqrt(gaps.size)
        assert abs(gaps.mean() - 10.0 / 3.0) < 4 * se


class TestStationaryConstruction:
    def test_straddle_identity(self):
        # T0 - T_{-1} equals the size-biased gap recorded at the origin
        spec = gated_cluster_preset()
        m = sample_stationary_marked_renewal(spec, -20.0, 20.0, RngStream(71))
        assert isinstance(m, TwoSidedMarkedPattern)
        o = m.origin_index
        t0 = m.arrivals[o].epoch
        tm1 = m.arrivals[o - 1].epoch
        assert t0 >= 0 > tm1
        assert (t0 - tm1) == pytest.approx(m.origin.interarrival, rel=1e-9)

    def test_split_ratio_uniform(self):
        # U = T0 / X* must be Uniform(0,1) and independent of X*
        spec = gated_cluster_preset()
        us = []
        xstars = []
        for r in range(4000):
            m = sample_stationary_marked_renewal(spec, -1.0, 1.0, RngStream(72, r))
            x_star = m.origin.interarrival
            us.append(m.origin.epoch / x_star)
            xstars.append(x_star)
        us = np.array(us)
        xstars = np.array(xstars)
        g = RngStream(73).generator()
        assert not two_sample_ks(us, g.random(4000), alpha=0.01).reject
        corr = np.corrcoef(us, xstars)[0, 1]
        assert abs(corr) < 4.0 / np.sqrt(len(us))

    def test_origin_epoch_mean(self):
        # E T0 = E[U] E[X*] = 0.5 * 10/3 = 5/3 for Uniform(0,5) gaps
        spec = gated_cluster_preset()
        t0s = np.array(
            [
                sample_stationary_marked_renewal(spec, -1.0, 1.0, RngStream(74, r)).origin.epoch
                for r in range(6000)
            ]
        )
        se = t0s.std() / np.sqrt(t0s.size)
        assert abs(t0s.mean() - 5.0 / 3.0) < 4 * se

    def test_covers_requested_window(self):
        spec = gated_cluster_preset()
        m = sample_stationary_marked_renewal(spec, -30.0, 30.0, RngStream(75))
        epochs = np.array([a.epoch for a in m.arrivals])
        assert epochs[0] < -30.0
        assert epochs[-1] > 30.0
        gaps = np.array([a.interarrival for a in m.arrivals])
        assert np.allclose(np.diff(epochs), gaps[1:], rtol=1e-9)

    def test_poisson_special_case_t0_exponential(self):
        # for exponential gaps the stationary T0 is again exponential
        spec = ProcessSpec(Exponential(1.0), EmptyCluster())
        t0s = np.array(
            [
                sample_stationary_marked_renewal(
                    spec, -1.0, 1.0, RngStream(76, r), pool_size=100_000
                ).origin.epoch
                for r in range(3000)
            ]
        )
        ref = RngStream(77).generator().exponential(1.0, 3000)
        assert not two_sample_ks(t0s, ref, alpha=0.001).reject


class TestStationaryCounts:
    def test_mean_count_matches_rate(self):
        # stationary mean count on (a, b] is 0.56 * (b - a) for the preset
        spec = gated_cluster_preset()
        counts = np.array(
            [
                len(sample_stationary_cluster_process(spec, 3.0, 8.0, RngStream(81, r)))
                for r in range(3000)
            ],
            dtype=np.float64,
        )
        se = counts.std() / np.sqrt(counts.size)
        assert abs(counts.mean() - 0.56 * 5.0) < 4 * se

    def test_shift_invariance_of_counts(self):
        # counts on (s, s+x] have the same law for every shift s
        spec = gated_cluster_preset()

        def counts(lo, seed):
            return np.array(
                [
                    len(sample_stationary_cluster_process(spec, lo, lo + 2.0, RngStream(seed, r)))
                    for r in range(2500)
                ],
                dtype=np.float64,
            )

        base = counts(0.0, 82)
        for s, seed in ((13.7, 83), (-40.0, 84)):
            assert not two_sample_ks(base, counts(s, seed), alpha=0.001).reject


class TestPointStationarityCheck:
    def test_k_zero_is_exact(self):
        spec = gated_cluster_preset()
        rep = point_stationary_check(spec, 0, 2000, RngStream(85))
        assert rep.max_distance == 0.0
        assert rep.passed

    def test_recentering_passes(self):
        spec = gated_cluster_preset()
        rep = point_stationary_check(spec, 7, 5000, RngStream(86))
        assert rep.passed
        assert len(rep.gap_checks) == rep.depth
        assert len(rep.size_checks) == rep.depth

    def test_negative_k_rejected(self):
        with pytest.raises(ValueError):
            point_stationary_check(gated_cluster_preset(), -1, 100, RngStream(87))
