import numpy as np
import pytest

from renewalcluster import (
    RngStream,
    gated_cluster_preset,
    post_coupling_agreement,
    rademacher_flip_test,
    run_coupling,
    two_sample_ks,
)
from renewalcluster.coupling import coupling_runs_to_csv, random_walk_path


class TestRunCoupling:
    def test_equal_starts_couple_immediately(self):
        spec = gated_cluster_preset()
        run = run_coupling(spec, 0.1, 1000, RngStream(91), start_override=(1.25, 1.25))
        assert run.tau == 0
        assert run.v_tau == 0.0
        assert run.l_tau == 0 and run.l_tau_delayed == 0
        assert run.coupling_time == pytest.approx(1.25)
        assert not run.capped

    def test_hit_is_inside_band(self):
        spec = gated_cluster_preset()
        run = run_coupling(spec, 0.1, 10**6, RngStream(92))
        assert run.tau is not None
        assert 0.0 <= run.v_tau < 0.1
        assert run.l_tau + run.l_tau_delayed == run.tau

    def test_cap_is_tracked_not_fatal(self):
        spec = gated_cluster_preset()
        run = run_coupling(spec, 1e-9, 50, RngStream(93), start_override=(3.0, 0.0))
        assert run.capped
        assert run.tau is None and run.coupling_time is None

    def test_wider_band_couples_no_later(self):
        # same stream, so the walks are identical; a wider band can only
        # be entered earlier
        spec = gated_cluster_preset()
        narrow = run_coupling(spec, 0.05, 10**6, RngStream(94))
        wide = run_coupling(spec, 0.5, 10**6, RngStream(94))
        assert narrow.tau is not None and wide.tau is not None
        assert wide.tau <= narrow.tau

    def test_path_starts_at_v0_and_is_thinned(self):
        spec = gated_cluster_preset()
        run = run_coupling(spec, 0.05, 10**6, RngStream(95))
        assert run.v_path_indices[0] == 0
        assert run.v_path[0] == pytest.approx(run.start_stationary - run.start_delayed)
        assert np.all(np.diff(run.v_path_indices) > 0)
        dense = run.v_path_indices[run.v_path_indices <= 10_000]
        assert np.array_equal(dense, np.arange(dense.size))

    def test_most_runs_finite_at_moderate_scale(self):
        spec = gated_cluster_preset()
        runs = [
            run_coupling(spec, 0.2, 10**6, RngStream(96, r)) for r in range(60)
        ]
        finite = sum(not r.capped for r in runs)
        assert finite >= 57

    def test_csv_serialization(self):
        spec = gated_cluster_preset()
        runs = [
            run_coupling(spec, 0.2, 10**5, RngStream(97, r)) for r in range(3)
        ]
        text = coupling_runs_to_csv(runs)
        lines = text.strip().splitlines()
        assert lines[0] == "epsilon,tau,coupling_time,capped"
        assert len(lines) == 4


class TestWalkDiagnostics:
    def test_martingale_mean(self):
        # E V_i = E V_0 = E T0 - E delay = 5/3 - 2.5 = -5/6 for the preset
        spec = gated_cluster_preset()
        paths = np.array(
            [random_walk_path(spec, 1000, RngStream(101, r)) for r in range(4000)]
        )
        for i in (10, 100, 1000):
            vals = paths[:, i]
            se = vals.std() / np.sqrt(vals.size)
            assert abs(vals.mean() - (-5.0 / 6.0)) < 4 * se

    def test_increment_symmetry(self):
        # V_i - V_0 is symmetric: its law matches its mirror image
        spec = gated_cluster_preset()
        incs = np.array(
            [
                random_walk_path(spec, 200, RngStream(102, r))[-1]
                - random_walk_path(spec, 200, RngStream(102, r))[0]
                for r in range(3000)
            ]
        )
        assert not two_sample_ks(incs, -incs, alpha=0.001).reject

    def test_tau_grows_as_band_shrinks(self):
        spec = gated_cluster_preset()
        taus = {}
        for eps in (0.5, 0.05):
            t = [
                run_coupling(spec, eps, 10**6, RngStream(103, r)).tau
                for r in range(80)
            ]
            taus[eps] = np.mean([x for x in t if x is not None])
        assert taus[0.05] > taus[0.5]


class TestPostCouplingAgreement:
    def test_agreement_holds(self):
        spec = gated_cluster_preset()
        rep = post_coupling_agreement(spec, 0.2, 50, RngStream(104))
        assert rep.passed
        assert rep.max_gap < 0.2
        assert rep.violations == ()

    def test_zero_checks_still_validates_tau_gap(self):
        spec = gated_cluster_preset()
        rep = post_coupling_agreement(spec, 0.2, 0, RngStream(105))
        assert rep.passed
        assert 0.0 <= rep.max_gap < 0.2

    def test_capped_run_reported(self):
        spec = gated_cluster_preset()
        rep = post_coupling_agreement(
            spec, 1e-9, 0, RngStream(106), steps_cap=50, start_override=(3.0, 0.0)
        )
        assert rep.capped
        assert not rep.passed


class TestFlipTest:
    def test_stopping_rule_accepts(self):
        rep = rademacher_flip_test(20, 50_000, RngStream(107), rule="stopping")
        assert not rep.reject

    def test_peek_ahead_rejects(self):
        rep = rademacher_flip_test(20, 50_000, RngStream(108), rule="peek_ahead")
        assert rep.reject
        assert rep.distance > rep.critical_value

    def test_unknown_rule(self):
        with pytest.raises(ValueError):
            rademacher_flip_test(10, 100, RngStream(109), rule="oracle")
