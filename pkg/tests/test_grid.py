import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primewalk.grid import (
    AreaSeries,
    GridObserver,
    VisitMap,
    checkpoint_schedule,
    recurrence_report,
)
from primewalk.walk import A1, StepObserver, run_walk


class ReplayRecorder(StepObserver):
    """Independent oracle: retains the whole trajectory."""

    def __init__(self):
        self.path = [(0, 0)]

    def on_step(self, prime, digit, old_pos, new_pos):
        self.path.append(new_pos)


class TestVisitMap:
    def test_first_step(self):
        m = VisitMap()
        m.record_step(0, 1)
        assert m.count_at(0, 1) == 1
        assert m.area == 2  # origin plus the new cell

    def test_revisit_keeps_area(self):
        m = VisitMap()
        m.record_step(0, 1)
        m.record_step(0, 1)
        assert m.count_at(0, 1) == 2
        assert m.area == 2

    def test_return_to_origin(self):
        m = VisitMap()
        m.record_step(0, 0)
        assert m.count_at(0, 0) == 1
        assert m.area == 1

    def test_empty_map(self):
        m = VisitMap()
        assert m.area == 1
        assert m.z_values().tolist() == []
        assert m.total_visits == 0

    def test_negative_coordinates(self):
        m = VisitMap()
        m.record_step(-3, -7)
        m.record_step(-3, -7)
        m.record_step(4, -1)
        assert m.count_at(-3, -7) == 2
        assert m.count_at(4, -1) == 1
        assert sorted(xy for xy in m.items()) == [(-3, -7, 2), (4, -1, 1)]

    def test_batch_equals_stepwise(self):
        rng = np.random.default_rng(0)
        xs = rng.integers(-5, 6, size=500)
        ys = rng.integers(-5, 6, size=500)
        a, b = VisitMap(), VisitMap()
        a.record_positions(xs, ys)
        for x, y in zip(xs.tolist(), ys.tolist()):
            b.record_step(x, y)
        assert list(a.items()) == list(b.items())
        assert a.area == b.area

    def test_state_roundtrip(self):
        m = VisitMap()
        m.record_step(1, 2)
        m.record_step(-1, 0)
        m2 = VisitMap.from_state(m.state())
        assert list(m2.items()) == list(m.items())
        assert m2.total_visits == m.total_visits


class TestAreaFromWalks:
    def test_limit_14(self):
        g = GridObserver()
        run_walk(14, A1, [g])
        assert g.vmap.area == 4
        assert sorted(g.vmap.z_values().tolist()) == [1, 1, 2]
        assert g.vmap.total_visits == 4

    def test_limit_10(self):
        g = GridObserver()
        run_walk(10, A1, [g])
        assert g.vmap.area == 3

    def test_zero_steps(self):
        g = GridObserver()
        run_walk(0, A1, [g])
        assert g.vmap.area == 1

    def test_streaming_matches_replay_oracle(self):
        g = GridObserver()
        rec = ReplayRecorder()
        run_walk(100_000, A1, [g, rec], segment_flags=512)
        distinct = set(rec.path)
        assert g.vmap.area == len(distinct)
        counts = {}
        for pos in rec.path[1:]:
            counts[pos] = counts.get(pos, 0) + 1
        assert sorted(counts.values()) == sorted(g.vmap.z_values().tolist())
        for (x, y), c in counts.items():
            assert g.vmap.count_at(x, y) == c


class TestAreaSeries:
    def test_append_and_order(self):
        s = AreaSeries()
        s.checkpoint(10**6, 78_496, 5000)
        s.checkpoint(2 * 10**6, 148_931, 9000)
        assert len(s) == 2
        assert list(s.rows())[0] == (10**6, 78_496, 5000)

    def test_first_row(self):
        s = AreaSeries()
        s.checkpoint(10, 4, 5)
        assert len(s) == 1

    def test_non_monotone_rejected(self):
        s = AreaSeries()
        s.checkpoint(100, 10, 10)
        with pytest.raises(ValueError):
            s.checkpoint(50, 20, 20)
        with pytest.raises(ValueError):
            s.checkpoint(100, 20, 20)

    def test_schedule_is_geometric(self):
        sched = checkpoint_schedule(1.25)
        vals = [next(sched) for _ in range(10)]
        assert vals[0] == 10
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert vals[1] == 12

    def test_observer_series_monotone(self):
        g = GridObserver(checkpoint_factor=1.25)
        run_walk(50_000, A1, [g])
        ns = g.series.n
        assert ns == sorted(ns)
        areas = g.series.area
        assert all(b >= a for a, b in zip(areas, areas[1:]))
        assert all(a <= np_ + 1 for np_, a in zip(g.series.n_p, areas))


class TestRecurrence:
    def test_walk_to_14(self):
        g = GridObserver()
        run_walk(14, A1, [g])
        rep = recurrence_report(g.vmap)
        assert (rep.argmax_x, rep.argmax_y) == (1, 1)
        assert rep.z_max == 2

    def test_single_step(self):
        m = VisitMap()
        m.record_step(0, -1)
        rep = recurrence_report(m)
        assert (rep.argmax_x, rep.argmax_y) == (0, -1)
        assert rep.z_max == 1

    def test_tie_breaks_lexicographic_after_distance(self):
        m = VisitMap()
        for _ in range(5):
            m.record_step(0, 1)
            m.record_step(0, -1)
        rep = recurrence_report(m)
        assert (rep.argmax_x, rep.argmax_y) == (0, -1)

    def test_distance_beats_lexicographic(self):
        m = VisitMap()
        for _ in range(3):
            m.record_step(-5, 0)
            m.record_step(1, 0)
        rep = recurrence_report(m)
        assert (rep.argmax_x, rep.argmax_y) == (1, 0)

    def test_empty_map_rejected(self):
        with pytest.raises(ValueError):
            recurrence_report(VisitMap())

    def test_partition_of_distinct_cells(self):
        g = GridObserver()
        run_walk(10_000, A1, [g])
        rep = recurrence_report(g.vmap)
        total = sum(rep.quadrant_counts) + sum(rep.axis_counts) + 1
        assert total == rep.distinct_count == g.vmap.area
        assert rep.z_max == g.vmap.z_values().max()


class TestConservation:
    @given(st.integers(min_value=0, max_value=100_000))
    @settings(max_examples=25, deadline=None)
    def test_suite(self, limit):
        g = GridObserver()
        summary = run_walk(limit, A1, [g])
        z = g.vmap.z_values()
        assert int(z.sum()) == summary.steps_taken == g.vmap.total_visits
        assert g.vmap.area <= summary.steps_taken + 1
        assert g.vmap.area >= 1
        areas = g.series.area
        assert all(b >= a for a, b in zip(areas, areas[1:]))
