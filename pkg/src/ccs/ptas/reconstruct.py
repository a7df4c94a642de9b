"""Turning a feasible block-program point into an actual schedule.

Machines are materialized from the configuration counts (configuration
index ascending). Large classes claim module slots in deterministic order
(classes ascending, module sizes descending, machines ascending); small
classes spread round-robin over the machines of their hosting cell, which
keeps both the per-machine host count within the free slots and the
per-machine hosted volume within leftover plus one small class. The
original jobs then pour back into the space their rounded carriers
reserved, in job id order.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction

from ..core import (
    Instance,
    NonPreemptiveSchedule,
    PreemptiveSchedule,
    SPLITTABLE,
    NONPREEMPTIVE,
    SplittableSchedule,
)
from ..greedy import round_robin
from ..nfold import NFoldSolution
from .builder import BuiltProgram


def _machine_table(solution: NFoldSolution, built: BuiltProgram) -> list:
    """Configuration index per machine id."""
    layout = built.layout
    t = built.program.brick_width
    counts = [0] * layout.config_count
    for u in range(built.program.brick_count):
        base = u * t
        for i in range(layout.config_count):
            counts[i] += solution.x[base + i]
    machines = []
    for i, count in enumerate(counts):
        machines.extend([i] * count)
    assert len(machines) == built.rounded.machine_count
    return machines


def _brick_slice(solution, built, u, offset, length):
    base = u * built.program.brick_width + offset
    return solution.x[base : base + length]


def _host_assignments(solution, built, machines) -> dict:
    """Small class id -> hosting machine id, via round robin per cell."""
    layout = built.layout
    confs = built.configurations
    cell_of_config = {}
    for pos, pair in enumerate(confs.pairs):
        for i in confs.groups[pair]:
            cell_of_config[i] = pos
    cell_machines: dict = {}
    for mach_id, cfg in enumerate(machines):
        pos = cell_of_config.get(cfg)
        if pos is not None:
            cell_machines.setdefault(pos, []).append(mach_id)
    cell_classes: dict = {}
    for u, cls in enumerate(built.rounded.classes):
        if not cls.small:
            continue
        z = _brick_slice(solution, built, u, layout.z_offset, layout.pair_count)
        chosen = [pos for pos, val in enumerate(z) if val]
        assert len(chosen) == 1, f"class {cls.class_id} hosted {len(chosen)} times"
        cell_classes.setdefault(chosen[0], []).append(
            (cls.class_id, cls.jobs[0].scaled_size)
        )
    hosts: dict = {}
    for pos in sorted(cell_classes):
        members = cell_classes[pos]
        slots = cell_machines.get(pos, [])
        assert slots, f"hosting cell {built.configurations.pairs[pos]} is empty"
        bins = round_robin(members, len(slots))
        for bin_idx in range(len(slots)):
            for class_id in bins[bin_idx]:
                hosts[class_id] = slots[bin_idx]
    return hosts


def _pour(job_ids, instance, room_list, emit) -> None:
    """Pour the given original jobs (id ascending) into the capacity list.

    room_list holds mutable [capacity, context] cells; emit(job, take,
    context) receives each nonzero piece. Advances through cells in order.
    """
    idx = 0
    for j in sorted(job_ids):
        need = instance.processing_times[j]
        while need > 0:
            while room_list[idx][0] == 0:
                idx += 1
            cell = room_list[idx]
            take = min(need, cell[0])
            emit(j, take, cell[1])
            cell[0] -= take
            need -= take


def _reconstruct_splittable(
    instance: Instance, solution: NFoldSolution, built: BuiltProgram
) -> SplittableSchedule:
    layout = built.layout
    rounded = built.rounded
    machines = _machine_table(solution, built)
    scale = rounded.scale
    slot_pool: dict = {g: deque() for g in range(layout.module_count)}
    for mach_id, cfg in enumerate(machines):
        vec = built.configurations.configs[cfg]
        for g, count in enumerate(vec):
            for _ in range(count):
                slot_pool[g].append(mach_id)
    hosts = _host_assignments(solution, built, machines)
    pieces: list = []
    for u, cls in enumerate(rounded.classes):
        if cls.small:
            mach = hosts[cls.class_id]
            room = [[cls.jobs[0].raw_size, mach]]
        else:
            y = _brick_slice(solution, built, u, layout.y_offset, layout.module_count)
            room = []
            for g in reversed(range(layout.module_count)):
                size_raw = Fraction(built.modules.sizes[g]) / scale
                for _ in range(y[g]):
                    room.append([size_raw, slot_pool[g].popleft()])
        job_ids = [j for job in cls.jobs for j in job.job_ids]
        _pour(
            job_ids,
            instance,
            room,
            lambda j, take, mach: pieces.append(
                (j, take / instance.processing_times[j], mach)
            ),
        )
    return SplittableSchedule(pieces=tuple(pieces))


def _reconstruct_nonpreemptive(
    instance: Instance, solution: NFoldSolution, built: BuiltProgram
) -> NonPreemptiveSchedule:
    layout = built.layout
    rounded = built.rounded
    machines = _machine_table(solution, built)
    values = built.modules.size_values
    slot_pool: dict = {q: deque() for q in values}
    for mach_id, cfg in enumerate(machines):
        vec = built.configurations.configs[cfg]
        for vq, count in enumerate(vec):
            for _ in range(count):
                slot_pool[values[vq]].append(mach_id)
    hosts = _host_assignments(solution, built, machines)
    assignment: dict = {}
    ground = built.modules.ground
    module_order = sorted(
        range(built.modules.count),
        key=lambda g: (-built.modules.sizes[g], g),
    )
    for u, cls in enumerate(rounded.classes):
        if cls.small:
            mach = hosts[cls.class_id]
            for j in cls.jobs[0].job_ids:
                assignment[j] = mach
            continue
        pools = {p: deque() for p in ground}
        for job in cls.jobs:
            pools[job.scaled_size].append(job)
        y = _brick_slice(solution, built, u, layout.y_offset, layout.module_count)
        for g in module_order:
            vec = built.modules.modules[g]
            for _ in range(y[g]):
                mach = slot_pool[built.modules.sizes[g]].popleft()
                for p_pos in reversed(range(len(ground))):
                    for _n in range(vec[p_pos]):
                        job = pools[ground[p_pos]].popleft()
                        for j in job.job_ids:
                            assignment[j] = mach
        assert not any(pools.values()), f"class {cls.class_id} jobs left over"
    return NonPreemptiveSchedule(assignment=assignment)


def _reconstruct_preemptive(
    instance: Instance, solution: NFoldSolution, built: BuiltProgram
) -> PreemptiveSchedule:
    layout = built.layout
    rounded = built.rounded
    machines = _machine_table(solution, built)
    c = rounded.slot_budget
    window = Fraction(c) / rounded.scale
    layer_count = layout.layer_count
    sizes = layout.piece_sizes
    module_pool: dict = {g: deque() for g in range(layout.module_count)}
    for mach_id, cfg in enumerate(machines):
        for g in built.configurations.configs[cfg]:
            module_pool[g].append(mach_id)
    occupied = [0] * len(machines)
    pieces: list = []
    for u, cls in enumerate(rounded.classes):
        if cls.small:
            continue
        y = _brick_slice(solution, built, u, layout.y_offset, layout.module_count)
        layer_slots: dict = {layer: deque() for layer in range(1, layer_count + 1)}
        for g in range(layout.module_count):
            mask = built.modules.modules[g]
            for _ in range(y[g]):
                mach = module_pool[g].popleft()
                occupied[mach] |= mask
                for layer in range(1, layer_count + 1):
                    if mask & (1 << (layer - 1)):
                        layer_slots[layer].append(mach)
        remaining: dict = {}
        windows: dict = {}
        pools: dict = {p: [] for p in sizes}
        for idx, job in enumerate(cls.jobs):
            pools[job.scaled_size].append(idx)
            remaining[idx] = job.scaled_size // c
            windows[idx] = []
        taken_layers: dict = {idx: set() for idx in remaining}
        a_vals = _brick_slice(
            solution, built, u, layout.a_offset, layout.piece_count
        )
        for layer in range(1, layer_count + 1):
            for p_pos, p in enumerate(sizes):
                need = a_vals[p_pos * layer_count + (layer - 1)]
                if not need:
                    continue
                order = sorted(
                    (idx for idx in pools[p] if remaining[idx] > 0),
                    key=lambda idx: (-remaining[idx], cls.jobs[idx].lead_id),
                )
                assert len(order) >= need, (
                    f"class {cls.class_id}: {need} pieces of size {p} "
                    f"in layer {layer} but only {len(order)} open jobs"
                )
                for idx in order[:need]:
                    mach = layer_slots[layer].popleft()
                    assert layer not in taken_layers[idx]
                    taken_layers[idx].add(layer)
                    remaining[idx] -= 1
                    windows[idx].append((layer, mach))
        assert all(v == 0 for v in remaining.values())
        for idx, job in enumerate(cls.jobs):
            room = [
                [window, (mach, (layer - 1) * window)]
                for layer, mach in sorted(windows[idx])
            ]
            cursor: dict = {}

            def emit(j, take, ctx, cursor=cursor):
                mach, start = ctx
                used = cursor.get(ctx, Fraction(0))
                pieces.append(
                    (j, take / instance.processing_times[j], mach, start + used)
                )
                cursor[ctx] = used + take

            _pour(job.job_ids, instance, room, emit)
    hosts = _host_assignments(solution, built, machines)
    by_machine: dict = {}
    for u, cls in enumerate(rounded.classes):
        if cls.small:
            by_machine.setdefault(hosts[cls.class_id], []).append(cls)
    for mach in sorted(by_machine):
        mask = occupied[mach]
        free_layers = (
            layer for layer in range(1, 10**9) if not mask & (1 << (layer - 1))
        )
        offset = Fraction(0)
        layer = next(free_layers)
        for cls in by_machine[mach]:
            for j in sorted(cls.jobs[0].job_ids):
                need = instance.processing_times[j]
                while need > 0:
                    room = window - offset
                    if room == 0:
                        layer = next(free_layers)
                        offset = Fraction(0)
                        room = window
                    take = min(need, room)
                    start = (layer - 1) * window + offset
                    pieces.append(
                        (j, take / instance.processing_times[j], mach, start)
                    )
                    offset += take
                    need -= take
    return PreemptiveSchedule(pieces=tuple(pieces))


def construct_schedule(
    instance: Instance, solution: NFoldSolution, built: BuiltProgram
):
    """Schedule of the original instance from a feasible program point."""
    variant = built.layout.variant
    if variant == SPLITTABLE:
        return _reconstruct_splittable(instance, solution, built)
    if variant == NONPREEMPTIVE:
        return _reconstruct_nonpreemptive(instance, solution, built)
    return _reconstruct_preemptive(instance, solution, built)
