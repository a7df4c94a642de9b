"""Guess search and the public entry point of the approximation schemes.

The makespan guess is searched over a bracket warmed up by the
constant-factor algorithms: their ratio guarantees pin the optimum between
a fraction of their makespan and the makespan itself. Integral
non-splittable instances search the integers in that bracket (the optimum
is a sum of job sizes, hence integral); everything else walks a geometric
(1 + delta) grid, which costs at most a factor (1 + delta) in the guess.

Machine counts beyond what any schedule can use are clamped first: a
splittable schedule never occupies more than n*c machines, the other
variants never more than n. Splittable results for machine counts beyond
the job count are wrapped compactly.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional

from ..approx import approx_nonpreemptive, approx_preemptive, approx_splittable
from ..core import (
    CCSError,
    CompactSchedule,
    Instance,
    NONPREEMPTIVE,
    PREEMPTIVE,
    Rational,
    SPLITTABLE,
    SplittableSchedule,
    VARIANTS,
    lower_bound,
    makespan,
)
from ..nfold import solve_feasible
from .builder import build_program
from .reconstruct import construct_schedule
from .rounding import PtasParams, derive_delta, preprocess

# constant-factor guarantees of the warm-start algorithms: OPT is at least
# makespan/ratio
_WARM_RATIO = {
    SPLITTABLE: Fraction(2),
    NONPREEMPTIVE: Fraction(7, 3),
    PREEMPTIVE: Fraction(2),
}

_WARM_ALGO = {
    SPLITTABLE: approx_splittable,
    NONPREEMPTIVE: approx_nonpreemptive,
    PREEMPTIVE: approx_preemptive,
}


def _clamp(instance: Instance, variant: str):
    """Machine count actually worth modelling."""
    n = instance.job_count
    ceiling = n * instance.slot_budget if variant == SPLITTABLE else n
    m_eff = min(instance.machine_count, ceiling)
    if m_eff == instance.machine_count:
        return instance
    return Instance(
        processing_times=instance.processing_times,
        class_labels=instance.class_labels,
        machine_count=m_eff,
        slot_budget=instance.slot_budget,
    )


class _Prober:
    """Builds and solves the program at a guess, memoized per guess."""

    def __init__(self, work, delta, variant, cap):
        self.work = work
        self.delta = delta
        self.variant = variant
        self.cap = cap
        self.memo: dict = {}

    def __call__(self, guess: Fraction):
        guess = Fraction(guess)
        hit = self.memo.get(guess)
        if hit is None:
            params = PtasParams.at_guess(guess, self.delta, self.variant)
            rounded = preprocess(self.work, params, self.variant)
            built = build_program(rounded, cap=self.cap)
            solution = solve_feasible(built.program)
            hit = (built, solution)
            self.memo[guess] = hit
        return hit


def _search_integers(probe, lo: int, hi: int):
    """Smallest feasible integer guess in [lo, hi]; hi must be feasible."""
    built, solution = probe(hi)
    if solution is None:
        raise CCSError(
            f"feasibility program rejected the safe guess {hi}"
        )
    best = (hi, built, solution)
    while lo < hi:
        mid = (lo + hi) // 2
        built, solution = probe(mid)
        if solution is None:
            lo = mid + 1
        else:
            best = (mid, built, solution)
            hi = mid
    return best


def _search_grid(probe, lo: Fraction, hi: Fraction, delta: Fraction):
    """Smallest feasible guess on the grid lo*(1+delta)^i covering hi."""
    step = 1 + delta
    if hi <= lo:
        top = 0
    else:
        top = math.ceil(math.log(hi / lo) / math.log(step))
        while lo * step**top < hi:
            top += 1
    built, solution = probe(lo * step**top)
    if solution is None:
        raise CCSError(
            f"feasibility program rejected the safe guess {lo * step ** top}"
        )
    best = (top, built, solution)
    lo_i, hi_i = 0, top
    while lo_i < hi_i:
        mid = (lo_i + hi_i) // 2
        built, solution = probe(lo * step**mid)
        if solution is None:
            lo_i = mid + 1
        else:
            best = (mid, built, solution)
            hi_i = mid
    exponent, built, solution = best
    return (lo * step**exponent, built, solution)


def ptas_solve(
    instance: Instance,
    epsilon: Optional[Rational],
    variant: str,
    *,
    delta: Optional[Rational] = None,
    enum_cap=None,
    report: Optional[dict] = None,
):
    """A schedule within a factor 1 + epsilon of the variant's optimum.

    epsilon must lie in (0, 1]. The keyword delta overrides the derived
    accuracy with a coarser or finer grid 1/k (mainly for experiments);
    epsilon may then be None. A dict passed as ``report`` receives the
    accepted guess and the program it was solved on ("guess", "built",
    "solution").
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if delta is None:
        if epsilon is None:
            raise ValueError("either epsilon or delta is required")
        delta = derive_delta(epsilon, variant)
    else:
        delta = Fraction(delta)
        if delta.numerator != 1 or delta > Fraction(1, 2):
            raise ValueError(f"delta must be 1/k with k >= 2, got {delta}")
    lower_bound(instance, variant)
    work = _clamp(instance, variant)
    floor, _ub = lower_bound(work, variant)
    warm = _WARM_ALGO[variant](work)
    reach = makespan(warm, work)
    assert reach > 0
    lo = max(floor, reach / _WARM_RATIO[variant])
    hi = reach
    probe = _Prober(work, delta, variant, enum_cap)
    integral = all(
        p.denominator == 1 for p in work.processing_times
    )
    if variant != SPLITTABLE and integral:
        _guess, built, solution = _search_integers(
            probe, math.ceil(lo), math.ceil(hi)
        )
    else:
        _guess, built, solution = _search_grid(probe, lo, hi, delta)
    if report is not None:
        report["guess"] = _guess
        report["built"] = built
        report["solution"] = solution
    # The output always comes from the plain program: runs that clamp to
    # the same effective machine count must produce identical schedules,
    # so the bounded-irregular-machines row is exercised by its own tests
    # rather than rerouted through here.
    schedule = construct_schedule(instance, solution, built)
    if variant == SPLITTABLE and instance.machine_count > instance.job_count:
        if isinstance(schedule, SplittableSchedule):
            schedule = CompactSchedule(
                explicit_machines=schedule,
                trivial_machine_counts={},
                piece_size=Fraction(0),
            )
    return schedule
