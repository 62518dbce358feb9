import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from renewalcluster import (
    MarkedArrival,
    MarkedPattern,
    PointPattern,
    count_in,
    flatten,
    restrict,
    shift,
)
from renewalcluster.errors import WindowError


def pat(points, window=(0.0, 10.0)):
    return PointPattern(np.array(points, dtype=np.float64), window)


class TestPointPattern:
    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            pat([3.0, 1.0])

    def test_rejects_nan_and_inf(self):
        with pytest.raises(ValueError):
            pat([1.0, np.nan])
        with pytest.raises(ValueError):
            pat([1.0, np.inf])

    def test_rejects_point_outside_window(self):
        with pytest.raises(ValueError):
            pat([0.0])  # lo excluded by the half-open convention
        with pytest.raises(ValueError):
            pat([11.0])

    def test_boundary_hi_included(self):
        assert len(pat([10.0])) == 1

    def test_csv_round_trip(self):
        p = pat([0.1, 2.5, 2.5, 9.999999999999])
        q = PointPattern.from_csv(p.to_csv(), p.window)
        assert np.array_equal(p.points, q.points)


class TestShift:
    def test_identity(self):
        p = pat([1.0, 2.0])
        q = shift(p, 0.0)
        assert np.array_equal(q.points, p.points)
        assert q.window == p.window

    def test_arithmetic(self):
        p = pat([1.5, 3.0])
        q = shift(p, 1.0)
        assert np.allclose(q.points, [0.5, 2.0])
        assert q.window == (-1.0, 9.0)

    def test_semigroup(self):
        p = pat([1.5, 3.0, 7.25])
        a, b = 1.25, -2.5
        q1 = shift(shift(p, a), b)
        q2 = shift(p, a + b)
        assert np.allclose(q1.points, q2.points)
        assert np.allclose(q1.window, q2.window)

    def test_count_preserved(self):
        p = pat([1.0, 2.0, 3.0])
        assert len(shift(p, 123.0)) == 3


class TestCountIn:
    def test_empty_pattern(self):
        assert count_in(pat([]), 1.0, 5.0) == 0

    def test_boundaries_and_multiplicity(self):
        p = pat([1.0, 2.0, 2.0, 5.0])
        # a excluded, b included, duplicate counted twice
        assert count_in(p, 1.0, 2.0) == 2

    def test_shift_covariance(self):
        p = pat([1.0, 2.0, 2.0, 5.0])
        t = 0.75
        assert count_in(shift(p, t), 1.0 - t, 5.0 - t) == count_in(p, 1.0, 5.0)

    def test_window_violation(self):
        with pytest.raises(WindowError):
            count_in(pat([1.0]), -1.0, 2.0)
        with pytest.raises(WindowError):
            count_in(pat([1.0]), 5.0, 10.5)

    @given(
        st.lists(st.floats(0.01, 10.0), max_size=30),
        st.floats(0.0, 10.0),
        st.floats(0.0, 10.0),
        st.floats(0.0, 10.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_additivity(self, points, a, b, c):
        a, b, c = sorted((a, b, c))
        p = pat(sorted(points))
        assert count_in(p, a, b) + count_in(p, b, c) == count_in(p, a, c)


class TestRestrict:
    def test_drops_are_tallied(self):
        p = pat([1.0, 2.0, 3.0, 9.0])
        q = restrict(p, 1.5, 3.5)
        assert np.allclose(q.points, [2.0, 3.0])
        assert q.overflow == 2


def marked(arrivals, window=(-1.0, 10.0)):
    return MarkedPattern(tuple(arrivals), window)


class TestMarkedPattern:
    def test_epoch_gap_must_match_interarrival(self):
        a = MarkedArrival(1.0, 0, np.empty(0), 1.0)
        bad = MarkedArrival(3.0, 0, np.empty(0), 1.5)  # gap is 2.0
        with pytest.raises(ValueError):
            marked([a, bad])

    def test_offsets_length_checked(self):
        with pytest.raises(ValueError):
            MarkedArrival(1.0, 2, np.array([0.5]), 1.0)

    def test_csv_round_trip(self):
        a = MarkedArrival(1.0, 2, np.array([-0.5, 1.0]), 1.0)
        b = MarkedArrival(3.5, 0, np.empty(0), 2.5)
        m = marked([a, b])
        m2 = MarkedPattern.from_csv(m.to_csv(), m.window)
        assert len(m2) == 2
        assert np.array_equal(m2.arrivals[0].offsets, a.offsets)
        assert m2.arrivals[1].epoch == b.epoch


class TestFlatten:
    def test_all_empty_clusters(self):
        a = MarkedArrival(1.0, 0, np.empty(0), 1.0)
        p = flatten(marked([a]), include_parents=False)
        assert len(p) == 0

    def test_parent_and_offsets(self):
        a = MarkedArrival(2.0, 2, np.array([-0.5, 1.0]), 2.0)
        p = flatten(marked([a]), include_parents=True)
        assert np.allclose(p.points, [1.5, 2.0, 3.0])

    def test_parent_toggle_changes_count_by_arrivals(self):
        a = MarkedArrival(2.0, 2, np.array([-0.5, 1.0]), 2.0)
        b = MarkedArrival(5.0, 1, np.array([0.25]), 3.0)
        m = marked([a, b])
        assert len(flatten(m, True)) - len(flatten(m, False)) == 2

    def test_overflow_tally(self):
        # one offset lands beyond the window and must be tallied, not lost
        a = MarkedArrival(9.0, 2, np.array([0.5, 2.0]), 9.0)
        p = flatten(marked([a]), include_parents=True)
        assert np.allclose(p.points, [9.0, 9.5])
        assert p.overflow == 1

    def test_count_identity(self):
        a = MarkedArrival(2.0, 3, np.array([-0.5, 0.0, 1.0]), 2.0)
        b = MarkedArrival(4.0, 2, np.array([0.1, 0.2]), 2.0)
        m = marked([a, b])
        for parents in (False, True):
            p = flatten(m, parents)
            total = 5 + (2 if parents else 0)
            assert len(p) == total - p.overflow
