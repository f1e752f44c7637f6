"""Tests for entropy/pressure estimation: window schedules, transfer
matrices, torus estimates, closed-form bounds, and the combined report."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latperm.entropy import (
    EstimateReport,
    WindowSchedule,
    default_tori,
    entropy_upper_bound,
    estimate_report,
    pressure_lower_bound,
    torus_estimates,
    transfer_matrix,
    transfer_pressure,
    transfer_torus_value,
    upper_estimates,
    zero_entropy,
)
from latperm.groupring import CapacityError, GroupRingElement, TorusQuotient, Window
from latperm.permanent import torus_permanent, window_permanent

GOLDEN = math.log((1 + math.sqrt(5)) / 2)


def indicator(*offsets):
    return GroupRingElement.indicator(Window.of([(a,) for a in offsets]))


class TestWindowSchedule:
    def test_boxes_one_dimensional(self):
        sched = WindowSchedule.boxes(1, [2, 4, 6])
        assert sched.labels == ("box2", "box4", "box6")
        assert [len(w) for w in sched.windows] == [2, 4, 6]

    def test_boxes_two_dimensional_labels(self):
        sched = WindowSchedule.boxes(2, [2, 3])
        assert sched.labels == ("2x2", "3x3")
        assert [len(w) for w in sched.windows] == [4, 9]

    def test_rejects_nonincreasing_cardinality(self):
        w2 = Window.box([0], [2])
        w3 = Window.box([0], [3])
        with pytest.raises(ValueError):
            WindowSchedule((w3, w2), ("a", "b"))
        with pytest.raises(ValueError):
            WindowSchedule((w2, w2), ("a", "b"))

    def test_rejects_label_mismatch(self):
        with pytest.raises(ValueError):
            WindowSchedule((Window.box([0], [2]),), ("a", "b"))


class TestTransferMatrix:
    def test_two_point_support_is_identity(self):
        T = transfer_matrix(indicator(0, 1))
        assert T.span == 1
        assert np.array_equal(T.dense(), np.eye(2))

    def test_point_mass_single_state(self):
        T = transfer_matrix(GroupRingElement(1, {(3,): 2.0}))
        assert T.span == 0
        assert T.dense().tolist() == [[2.0]]

    def test_indicator_matrix_is_zero_one(self):
        T = transfer_matrix(indicator(0, 1, 2, 3))
        D = T.dense()
        assert set(np.unique(D)) <= {0.0, 1.0}

    def test_translation_gives_identical_matrix(self):
        f = indicator(0, 1, 2)
        g = f.translate((7,))
        assert np.array_equal(transfer_matrix(f).dense(),
                              transfer_matrix(g).dense())

    def test_rejects_signed_and_zero_and_2d(self):
        with pytest.raises(ValueError):
            transfer_matrix(GroupRingElement(1, {(0,): 1, (1,): -1}))
        with pytest.raises(ValueError):
            transfer_matrix(GroupRingElement(1, {}))
        with pytest.raises(ValueError):
            transfer_matrix(GroupRingElement.indicator(Window.box([0, 0], [2, 2])))

    def test_large_span_raises_capacity(self):
        f = GroupRingElement(1, {(0,): 1, (25,): 1})
        with pytest.raises(CapacityError):
            transfer_matrix(f)


class TestTransferPressure:
    def test_single_displacement_is_zero(self):
        assert transfer_pressure(indicator(0)) == 0.0

    def test_two_displacements_is_zero(self):
        assert transfer_pressure(indicator(0, 1)) == 0.0
        assert abs(transfer_pressure(indicator(0, 3))) < 1e-12

    def test_interval_of_three_gives_golden_ratio(self):
        assert abs(transfer_pressure(indicator(0, 1, 2)) - GOLDEN) < 1e-12

    def test_point_mass_gives_log_weight(self):
        f = GroupRingElement(1, {(5,): 2.0})
        assert abs(transfer_pressure(f) - math.log(2)) < 1e-12

    def test_translation_invariance_exact(self):
        f = indicator(-1, 0, 1)
        assert transfer_pressure(f) == transfer_pressure(f.translate((4,)))

    def test_scaling_adds_log_factor(self):
        f = indicator(0, 1, 2)
        g = f.scale(3)
        assert abs(transfer_pressure(g) - transfer_pressure(f) - math.log(3)) < 1e-12

    def test_adjoint_has_equal_pressure(self):
        f = GroupRingElement(1, {(0,): 1, (1,): 2, (3,): 1})
        assert abs(transfer_pressure(f) - transfer_pressure(f.adjoint())) < 1e-9

    def test_convolution_superadditive(self):
        f = GroupRingElement(1, {(0,): 1, (1,): 1})
        g = GroupRingElement(1, {(0,): 2, (2,): 1})
        lhs = transfer_pressure(f.convolve(g))
        assert lhs >= transfer_pressure(f) + transfer_pressure(g) - 1e-6

    def test_trace_reproduces_torus_counts(self):
        f = indicator(0, 1, 2)
        for n in range(6, 12):
            tr = transfer_torus_value(f, n)
            count = torus_permanent(f, TorusQuotient((n,)), exact=True).linear
            assert abs(tr - count) < 1e-6

    def test_trace_reproduces_weighted_torus(self):
        f = GroupRingElement(1, {(0,): 1, (1,): 2, (2,): 1})
        for n in (6, 8, 10):
            tr = transfer_torus_value(f, n)
            v = torus_permanent(f, TorusQuotient((n,)), exact=True).linear
            assert abs(tr - v) <= 1e-9 * max(1.0, abs(v))


class TestClosedFormBounds:
    def test_lower_formula_values(self):
        f = indicator(0, 1, 2)
        assert abs(pressure_lower_bound(f) - (math.log(3) - 1)) < 1e-15
        e_mass = GroupRingElement(1, {(0,): math.e})
        assert abs(pressure_lower_bound(e_mass)) < 1e-15
        unit = GroupRingElement(1, {(0,): 1.0})
        assert abs(pressure_lower_bound(unit) + 1.0) < 1e-15

    def test_upper_formula_values(self):
        assert entropy_upper_bound(Window.of([(0,)])) == 0.0
        assert abs(entropy_upper_bound(Window.of([(0,), (1,)])) - math.log(2) / 2) < 1e-15
        a3 = Window.of([(0,), (1,), (2,)])
        assert abs(entropy_upper_bound(a3) - math.log(6) / 3) < 1e-15

    def test_zero_entropy_classifier(self):
        assert zero_entropy(Window.of([(0,)]))
        assert zero_entropy(Window.of([(0, 0), (3, 1)]))
        assert not zero_entropy(Window.of([(0,), (1,), (2,)]))

    def test_bound_sandwich_small_cases(self):
        for pts in ([0, 1, 2], [0, 2, 5], [0, 1, 2, 3], [0, 1, 4, 6]):
            f = indicator(*pts)
            p = transfer_pressure(f)
            assert pressure_lower_bound(f) <= p + 1e-12
            assert p <= entropy_upper_bound(f.support()) + 1e-12


class TestUpperEstimates:
    def test_two_point_support_decreases_to_zero(self):
        f = indicator(0, 1)
        sched = WindowSchedule.boxes(1, range(2, 11))
        rows, skipped = upper_estimates(f, sched, modes=("admissible",))
        assert not skipped
        values = [r.normalized for r in rows]
        expected = [math.log(2) / n for n in range(2, 11)]
        assert np.allclose(values, expected, atol=1e-12)

    def test_point_mass_estimates_constant(self):
        f = GroupRingElement(1, {(0,): 3.0})
        sched = WindowSchedule.boxes(1, [2, 4])
        rows, _ = upper_estimates(f, sched, modes=("admissible",))
        for r in rows:
            assert abs(r.normalized - math.log(3)) < 1e-12

    def test_window_values_dominate_transfer_pressure(self):
        f = GroupRingElement(1, {(0,): 1, (1,): 2, (2,): 1})
        p = transfer_pressure(f)
        sched = WindowSchedule.boxes(1, [4, 7, 10])
        rows, _ = upper_estimates(f, sched)
        for r in rows:
            assert r.normalized >= p - 1e-9

    def test_golden_window_estimates_bracket_limit(self):
        f = indicator(0, 1, 2)
        sched = WindowSchedule((Window.box([0], [12]), Window.box([0], [13])),
                               ("box12", "box13"))
        rows, _ = upper_estimates(f, sched, modes=("admissible",))
        # counts follow F(n+3)+2; the box-12 count is 610+2
        assert round(math.exp(rows[0].log_value)) == 612
        assert rows[0].normalized > GOLDEN
        assert rows[1].normalized > GOLDEN
        assert rows[1].normalized - GOLDEN < 0.05

    def test_monotone_in_the_weight(self):
        f = GroupRingElement(1, {(0,): 1, (1,): 1, (2,): 1})
        g = GroupRingElement(1, {(0,): 1, (1,): 2, (2,): 1})
        sched = WindowSchedule.boxes(1, [4, 6])
        rows_f, _ = upper_estimates(f, sched)
        rows_g, _ = upper_estimates(g, sched)
        for a, b in zip(rows_f, rows_g):
            assert a.normalized <= b.normalized + 1e-12

    def test_scaling_shifts_estimates_exactly(self):
        f = indicator(0, 1, 2)
        g = f.scale(3)
        sched = WindowSchedule.boxes(1, [4, 6])
        rows_f, _ = upper_estimates(f, sched, modes=("admissible",))
        rows_g, _ = upper_estimates(g, sched, modes=("admissible",))
        for a, b in zip(rows_f, rows_g):
            assert abs(b.normalized - a.normalized - math.log(3)) < 1e-12

    def test_capacity_reports_partial_schedule(self):
        f = GroupRingElement.indicator(Window.of([(0, 0), (1, 0), (0, 1)]))
        sched = WindowSchedule.boxes(2, [2, 6])
        rows, skipped = upper_estimates(f, sched, budget=500)
        assert any(r.window == "2x2" for r in rows)
        assert any("6x6" in s for s in skipped)

    def test_threads_match_serial(self):
        f = indicator(0, 1, 2)
        sched = WindowSchedule.boxes(1, [4, 6, 8])
        serial, _ = upper_estimates(f, sched, threads=1)
        parallel, _ = upper_estimates(f, sched, threads=3)
        assert serial == parallel


class TestTorusEstimates:
    def test_two_point_counts_are_two(self):
        f = indicator(0, 1)
        quotients = [TorusQuotient((n,)) for n in range(4, 13)]
        rows, skipped = torus_estimates(f, quotients)
        assert not skipped
        for r, n in zip(rows, range(4, 13)):
            assert abs(r.log_value - math.log(2)) < 1e-12
            assert abs(r.normalized - math.log(2) / n) < 1e-12

    def test_three_interval_mod_four_counts_nine(self):
        f = indicator(-1, 0, 1)
        rows, _ = torus_estimates(f, [TorusQuotient((4,))])
        assert abs(rows[0].log_value - math.log(9)) < 1e-12

    def test_collision_raises_with_pair(self):
        f = indicator(0, 3)
        with pytest.raises(ValueError, match="collide"):
            torus_estimates(f, [TorusQuotient((3,))])

    def test_threads_match_serial(self):
        f = indicator(0, 1, 2)
        quotients = [TorusQuotient((n,)) for n in range(4, 9)]
        serial, _ = torus_estimates(f, quotients, threads=1)
        parallel, _ = torus_estimates(f, quotients, threads=3)
        assert serial == parallel

    def test_default_tori_skip_colliding_moduli(self):
        f = indicator(-1, 0, 1)
        tori = default_tori(f, max_side=6)
        assert [q.moduli for q in tori] == [(3,), (4,), (5,), (6,)]


class TestEstimateReport:
    def test_running_infimum_nonincreasing(self):
        f = indicator(0, 1, 2)
        rep = estimate_report(f, WindowSchedule.boxes(1, [3, 5, 7, 9]))
        inf = rep.running_infimum
        assert all(b <= a + 1e-15 for a, b in zip(inf, inf[1:]))
        assert rep.certified_upper == inf[-1]

    def test_upper_dominates_closed_form_lower(self):
        f = indicator(0, 1, 2)
        rep = estimate_report(f, WindowSchedule.boxes(1, [4, 6]))
        assert rep.certified_upper >= rep.closed_form_lower

    def test_point_mass_report_all_zero(self):
        f = GroupRingElement(1, {(0,): 1})
        rep = estimate_report(f, WindowSchedule.boxes(1, [2, 4]))
        assert rep.certified_upper == 0.0
        assert rep.transfer_value == 0.0
        for r in rep.rows:
            if r.kind in ("upper", "torus", "transfer"):
                assert abs(r.normalized) < 1e-12

    def test_two_point_bracket_collapses_to_zero(self):
        f = indicator(0, 1)
        rep = estimate_report(f, WindowSchedule.boxes(1, [4, 8, 12]),
                              tori=[TorusQuotient((n,)) for n in (8, 12)])
        assert rep.transfer_value == 0.0
        assert 0.0 < rep.certified_upper <= math.log(2) / 12 + 1e-12
        assert rep.lower_estimate <= math.log(2) / 8 + 1e-12
        assert rep.lower_label == "converging-lower"

    def test_golden_report_brackets_transfer_value(self):
        f = indicator(0, 1, 2)
        rep = estimate_report(f, WindowSchedule.boxes(1, [6, 9, 12]),
                              tori=[TorusQuotient((n,)) for n in (10, 12, 14)])
        assert rep.transfer_value is not None
        assert abs(rep.transfer_value - GOLDEN) < 1e-12
        assert rep.certified_upper > GOLDEN
        assert abs(rep.lower_estimate - GOLDEN) < 0.05

    def test_two_dim_report_label_is_heuristic(self):
        f = GroupRingElement.indicator(Window.of([(0, 0), (1, 0), (0, 1)]))
        rep = estimate_report(f, WindowSchedule.boxes(2, [2, 3]),
                              tori=[TorusQuotient((3, 3))])
        assert rep.lower_label == "heuristic-lower"
        assert rep.transfer_value is None

    def test_rejects_signed_weights(self):
        f = GroupRingElement(1, {(0,): 1, (1,): -1})
        with pytest.raises(ValueError):
            estimate_report(f, WindowSchedule.boxes(1, [2]))

    def test_csv_shape_and_determinism(self):
        f = indicator(0, 1, 2)
        sched = WindowSchedule.boxes(1, [4, 6])
        rep1 = estimate_report(f, sched, tori=[TorusQuotient((5,))])
        rep2 = estimate_report(f, sched, tori=[TorusQuotient((5,))])
        assert rep1.to_csv() == rep2.to_csv()
        lines = rep1.to_csv().strip().split("\n")
        assert lines[0] == "window,size,log_value,normalized,kind"
        kinds = {line.split(",")[-1] for line in lines[1:]}
        assert kinds <= {"upper", "torus", "transfer", "bound"}
        assert len(lines) == 1 + len(rep1.rows)

    def test_capacity_skips_recorded_not_fatal(self):
        f = GroupRingElement.indicator(Window.of([(0, 0), (1, 0), (0, 1)]))
        rep = estimate_report(f, WindowSchedule.boxes(2, [2, 6]), budget=500,
                              tori=[TorusQuotient((3, 3))])
        assert rep.capacity_skipped
        assert rep.certified_upper < math.inf


@settings(deadline=None, max_examples=40)
@given(st.lists(st.integers(0, 5), min_size=1, max_size=4, unique=True),
       st.integers(2, 4))
def test_window_estimates_dominate_transfer(points, size):
    f = GroupRingElement.indicator(Window.of([(a,) for a in points]))
    p = transfer_pressure(f)
    v = window_permanent(f, Window.box([0], [size + max(points)]))
    assert v.normalized(size + max(points)) >= p - 1e-9
