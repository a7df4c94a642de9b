"""Threshold searches, cutting plans, and the three approximation
algorithms: frozen small cases plus property tests against the oracles."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings

from ccs import (
    CompactSchedule,
    Instance,
    PreemptiveSchedule,
    SplittableSchedule,
    approx_nonpreemptive,
    approx_preemptive,
    approx_splittable,
    border_search_splittable,
    class_loads,
    compute_cu_nonpreemptive,
    expand_compact,
    lower_bound,
    machine_loads,
    makespan,
    nonpreemptive_threshold,
    opt_nonpreemptive,
    opt_preemptive,
    opt_splittable,
    repack_stacks,
    split_class,
    validate,
    NONPREEMPTIVE,
    PREEMPTIVE,
    SPLITTABLE,
)
from ccs.approx import _preemptive_guess

from conftest import instances, oracle_instances


def inst(sizes, labels, m, c) -> Instance:
    return Instance(
        tuple(Fraction(p) for p in sizes), tuple(labels), machine_count=m, slot_budget=c
    )


class TestSplitClass:
    def test_cuts_at_threshold_multiples(self):
        pieces = split_class([(0, Fraction(10))], Fraction(4))
        assert [load for load, _ in pieces] == [4, 4, 2]
        assert pieces[0][1] == ((0, Fraction(2, 5)),)
        assert pieces[2][1] == ((0, Fraction(1, 5)),)

    def test_straddling_job_is_shared(self):
        # second job is cut 3/1 across the first and second piece
        pieces = split_class([(0, Fraction(2)), (1, Fraction(4))], Fraction(5))
        assert [load for load, _ in pieces] == [5, 1]
        assert pieces[0][1] == ((0, Fraction(1)), (1, Fraction(3, 4)))
        assert pieces[1][1] == ((1, Fraction(1, 4)),)

    def test_rejects_nonpositive_threshold(self):
        with pytest.raises(ValueError):
            split_class([(0, Fraction(1))], Fraction(0))


class TestBorderSearch:
    def test_single_class_three_machines(self):
        t_star, plan = border_search_splittable(inst([12], [1], 3, 1))
        assert t_star == 4
        assert plan.classes[0].count == 3
        assert [load for load, _ in plan.classes[0].pieces] == [4, 4, 4]

    def test_two_singleton_classes_one_slot_each(self):
        # both classes need a machine of their own, the big one sets T*
        t_star, _plan = border_search_splittable(inst([8, 2], [1, 2], 2, 1))
        assert t_star == 8

    def test_threshold_may_undercut_the_load_average(self):
        # 8 slots allow quarter pieces; the average (1/2) is not binding
        t_star, _plan = border_search_splittable(inst([1, 1], [1, 2], 4, 2))
        assert t_star == Fraction(1, 4)

    def test_example_with_ample_slots_takes_a_deep_cut(self):
        t_star, _plan = border_search_splittable(inst([6], [1], 3, 1))
        assert t_star == 2

    @given(instances(max_machines=6))
    @settings(max_examples=120, deadline=None)
    def test_plan_shape_and_conservation(self, instance):
        t_star, plan = border_search_splittable(instance)
        totals = {cl.class_id: cl.total for cl in class_loads(instance)}
        budget = instance.slot_budget * instance.machine_count
        assert plan.total_sub_classes <= budget
        for split in plan.classes:
            assert split.count == max(1, math.ceil(split.total / t_star))
            loads = [load for load, _ in split.pieces]
            assert loads[:-1] == [t_star] * (len(loads) - 1)
            assert 0 < loads[-1] <= t_star
            assert sum(loads) == totals[split.class_id]
            for load, parts in split.pieces:
                shares = sum(
                    frac * instance.processing_times[j] for j, frac in parts
                )
                assert shares == load

    @given(oracle_instances())
    @settings(max_examples=40, deadline=None)
    def test_threshold_is_an_optimum_lower_bound(self, instance):
        t_star, _plan = border_search_splittable(instance)
        assert t_star <= opt_splittable(instance)


class TestApproxSplittable:
    def test_self_parallel_pieces_use_every_machine(self):
        instance = inst([6], [1], 3, 1)
        schedule = approx_splittable(instance)
        assert isinstance(schedule, CompactSchedule)
        assert dict(schedule.trivial_machine_counts) == {1: 3}
        assert schedule.piece_size == 2
        assert schedule.explicit_machines.pieces == ()
        assert makespan(schedule, instance) == 2
        assert validate(schedule, instance) == []

    def test_ten_singleton_classes_round_robin(self):
        instance = inst([5, 5, 4, 3, 3, 2, 2, 1, 1, 1], range(1, 11), 4, 3)
        schedule = approx_splittable(instance)
        assert isinstance(schedule, SplittableSchedule)
        assert sorted(machine_loads(schedule, instance).values(), reverse=True) == [
            8,
            7,
            7,
            5,
        ]
        assert validate(schedule, instance) == []

    def test_partial_piece_stays_explicit(self):
        instance = inst([9, 2], [1, 2], 3, 1)
        schedule = approx_splittable(instance)
        assert dict(schedule.trivial_machine_counts) == {1: 2}
        assert schedule.explicit_machines.pieces == ((1, Fraction(1), 0),)
        assert makespan(schedule, instance) == Fraction(9, 2)
        assert validate(schedule, instance) == []

    def test_doubled_up_machines_are_listed(self):
        # 8 quarter-pieces on 4 machines: every machine carries two classes
        instance = inst([6, 6], [1, 2], 4, 2)
        schedule = approx_splittable(instance)
        assert isinstance(schedule, CompactSchedule)
        assert dict(schedule.trivial_machine_counts) == {}
        explicit = {mach for _j, _f, mach in schedule.explicit_machines.pieces}
        assert len(explicit) == 4
        assert makespan(schedule, instance) == 3
        assert validate(schedule, instance) == []

    def test_expansion_preserves_value(self):
        for sizes, labels, m, c in [
            ([6], [1], 3, 1),
            ([9, 2], [1, 2], 3, 1),
            ([6, 6], [1, 2], 4, 2),
            ([1, 1], [1, 2], 4, 2),
        ]:
            instance = inst(sizes, labels, m, c)
            schedule = approx_splittable(instance)
            assert isinstance(schedule, CompactSchedule)
            expanded = expand_compact(schedule, instance)
            assert validate(expanded, instance) == []
            assert makespan(expanded, instance) == makespan(schedule, instance)

    @given(instances(max_machines=6))
    @settings(max_examples=150, deadline=None)
    def test_feasible_and_within_additive_bound(self, instance):
        t_star, _plan = border_search_splittable(instance)
        schedule = approx_splittable(instance)
        compact = instance.machine_count > instance.job_count
        assert isinstance(
            schedule, CompactSchedule if compact else SplittableSchedule
        )
        assert validate(schedule, instance) == []
        lb, _ub = lower_bound(instance, SPLITTABLE)
        assert makespan(schedule, instance) <= lb + t_star

    @given(oracle_instances())
    @settings(max_examples=30, deadline=None)
    def test_within_twice_the_optimum(self, instance):
        schedule = approx_splittable(instance)
        assert makespan(schedule, instance) <= 2 * opt_splittable(instance)


class TestRepackStacks:
    def test_second_layer_lifted_to_threshold(self):
        starts = repack_stacks([[5, 3, 1], [5, 2, 1], [4, 2], [3, 1]], 5)
        assert starts == [[0, 5, 8], [0, 5, 7], [0, 5], [0, 5]]

    def test_plain_stacking_without_full_pieces(self):
        starts = repack_stacks([[5, 3, 1], [4, 2]], 7)
        assert starts == [[0, 5, 8], [0, 4]]

    def test_empty_stacks(self):
        assert repack_stacks([[], []], 3) == [[], []]


class TestApproxPreemptive:
    def test_single_job_runs_sequentially(self):
        # extra machines are useless without self-parallelism
        instance = inst([6], [1], 3, 1)
        schedule = approx_preemptive(instance)
        assert schedule.pieces == ((0, Fraction(1), 0, Fraction(0)),)
        assert makespan(schedule, instance) == 6

    def test_straddling_job_parts_stay_disjoint(self):
        instance = inst([7, 5, 5, 5], [1, 1, 1, 1], 2, 1)
        schedule = approx_preemptive(instance)
        assert makespan(schedule, instance) == 11
        assert validate(schedule, instance) == []

    def test_whole_classes_stack_plainly(self):
        instance = inst([5, 5, 4, 3, 3, 2, 2, 1, 1, 1], range(1, 11), 4, 3)
        schedule = approx_preemptive(instance)
        assert makespan(schedule, instance) == 9
        assert validate(schedule, instance) == []

    @given(instances(max_machines=6))
    @settings(max_examples=150, deadline=None)
    def test_feasible_and_within_additive_bound(self, instance):
        t_star, m_used, lb = _preemptive_guess(instance)
        schedule = approx_preemptive(instance)
        assert validate(schedule, instance) == []
        assert makespan(schedule, instance) <= lb + t_star

    @given(instances())
    @settings(max_examples=60, deadline=None)
    def test_machines_beyond_job_count_change_nothing(self, instance):
        clamped = Instance(
            instance.processing_times,
            instance.class_labels,
            machine_count=min(instance.machine_count, instance.job_count),
            slot_budget=instance.slot_budget,
        )
        assert makespan(approx_preemptive(instance), instance) == makespan(
            approx_preemptive(clamped), clamped
        )

    @given(oracle_instances())
    @settings(max_examples=30, deadline=None)
    def test_within_twice_the_optimum(self, instance):
        schedule = approx_preemptive(instance)
        assert makespan(schedule, instance) <= 2 * opt_preemptive(instance)


class TestComputeCu:
    def test_pairing_saves_a_piece(self):
        # 7 hosts one 5; the two leftover 5s share a piece
        assert compute_cu_nonpreemptive([7, 5, 5, 5], 12) == (2, 1, 2)

    def test_two_heavies_cannot_pair(self):
        assert compute_cu_nonpreemptive([7, 7], 12) == (2, 2, 0)

    def test_small_jobs_need_one_piece(self):
        assert compute_cu_nonpreemptive([1, 1], 12) == (1, 0, 0)

    def test_volume_bound_can_dominate(self):
        # no job above T/3, still two pieces by volume
        assert compute_cu_nonpreemptive([2, 2, 2, 2], 7) == (2, 0, 0)

    def test_medium_too_big_for_its_host_stays_loose(self):
        # 6 does not fit next to the 7 (slack 5); the 5 does
        count, heavy, loose = compute_cu_nonpreemptive([7, 6, 5], 12)
        assert (count, heavy, loose) == (2, 1, 1)


class TestApproxNonPreemptive:
    def test_singleton_classes_spread_out(self):
        instance = inst([2, 2, 2], [1, 2, 3], 3, 1)
        schedule = approx_nonpreemptive(instance)
        assert makespan(schedule, instance) == 2
        assert validate(schedule, instance) == []

    def test_one_class_two_machines(self):
        instance = inst([7, 5, 5, 5], [1, 1, 1, 1], 2, 1)
        threshold, m_used, lb = nonpreemptive_threshold(instance)
        assert (threshold, m_used, lb) == (12, 2, 11)
        schedule = approx_nonpreemptive(instance)
        assert sorted(machine_loads(schedule, instance).values(), reverse=True) == [
            12,
            10,
        ]
        assert validate(schedule, instance) == []

    def test_fractional_sizes_use_geometric_search(self):
        instance = inst([Fraction(5, 2), Fraction(3, 2)], [1, 1], 2, 1)
        threshold, _m, lb = nonpreemptive_threshold(instance)
        assert threshold == Fraction(5, 2) == lb
        schedule = approx_nonpreemptive(instance)
        assert makespan(schedule, instance) == Fraction(5, 2)
        assert validate(schedule, instance) == []

    @given(instances(max_machines=6))
    @settings(max_examples=150, deadline=None)
    def test_feasible_and_within_additive_bound(self, instance):
        threshold, m_used, lb = nonpreemptive_threshold(instance)
        schedule = approx_nonpreemptive(instance)
        assert validate(schedule, instance) == []
        assert makespan(schedule, instance) <= lb + Fraction(4, 3) * threshold

    @given(instances())
    @settings(max_examples=60, deadline=None)
    def test_integer_threshold_is_minimal(self, instance):
        # integer sizes: the search returns the smallest feasible integer
        threshold, m_used, lb = nonpreemptive_threshold(instance)
        assert threshold.denominator == 1
        budget = instance.slot_budget * m_used

        def total_pieces(guess):
            by_class = {}
            for p, lab in zip(instance.processing_times, instance.class_labels):
                by_class.setdefault(lab, []).append(p)
            return sum(
                compute_cu_nonpreemptive(sizes, guess)[0]
                for sizes in by_class.values()
            )

        assert total_pieces(threshold) <= budget
        assert threshold == math.ceil(lb) or total_pieces(threshold - 1) > budget

    @given(oracle_instances())
    @settings(max_examples=30, deadline=None)
    def test_within_seven_thirds_of_the_optimum(self, instance):
        schedule = approx_nonpreemptive(instance)
        value, _opt_schedule = opt_nonpreemptive(instance)
        assert makespan(schedule, instance) <= Fraction(7, 3) * value


class TestVariantDominanceOfApproximations:
    @given(oracle_instances())
    @settings(max_examples=30, deadline=None)
    def test_each_approximation_beats_no_stronger_oracle(self, instance):
        # sanity chain: every approximation is bounded below by its own
        # variant's optimum
        split_opt = opt_splittable(instance)
        pre_opt = opt_preemptive(instance)
        np_value, _ = opt_nonpreemptive(instance)
        assert makespan(approx_splittable(instance), instance) >= split_opt
        assert makespan(approx_preemptive(instance), instance) >= pre_opt
        assert makespan(approx_nonpreemptive(instance), instance) >= np_value
