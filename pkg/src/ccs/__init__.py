"""Class-constrained scheduling toolkit.

Makespan minimization on identical machines where each machine may host jobs
from at most c distinct classes, in three variants (splittable, preemptive,
non-preemptive): constant-factor approximation algorithms, exact oracles for
tiny instances, and (1+epsilon)-schemes built on block-structured integer
programs.
"""

from ccs.approx import (
    ClassSplit,
    SubClassPlan,
    approx_nonpreemptive,
    approx_preemptive,
    approx_splittable,
    border_search_splittable,
    compute_cu_nonpreemptive,
    nonpreemptive_threshold,
    repack_stacks,
    split_class,
)
from ccs.core import (
    CCSError,
    ClassLoad,
    CompactSchedule,
    EnumerationCapError,
    Instance,
    InvalidInstanceError,
    InvalidScheduleError,
    NONPREEMPTIVE,
    NonPreemptiveSchedule,
    PREEMPTIVE,
    PreemptiveSchedule,
    SPLITTABLE,
    SplittableSchedule,
    StructuralInfeasibleError,
    VARIANTS,
    class_loads,
    expand_compact,
    format_rational,
    lower_bound,
    machine_loads,
    makespan,
    parse_rational,
    validate,
)
from ccs.greedy import lpt, round_robin
from ccs.oracle import (
    opt_nonpreemptive,
    opt_preemptive,
    opt_splittable,
    preemptive_feasible,
)

__all__ = [
    "CCSError",
    "ClassLoad",
    "ClassSplit",
    "SubClassPlan",
    "approx_nonpreemptive",
    "approx_preemptive",
    "approx_splittable",
    "border_search_splittable",
    "compute_cu_nonpreemptive",
    "nonpreemptive_threshold",
    "repack_stacks",
    "split_class",
    "lpt",
    "round_robin",
    "opt_nonpreemptive",
    "opt_preemptive",
    "opt_splittable",
    "preemptive_feasible",
    "CompactSchedule",
    "EnumerationCapError",
    "Instance",
    "InvalidInstanceError",
    "InvalidScheduleError",
    "NONPREEMPTIVE",
    "NonPreemptiveSchedule",
    "PREEMPTIVE",
    "PreemptiveSchedule",
    "SPLITTABLE",
    "SplittableSchedule",
    "StructuralInfeasibleError",
    "VARIANTS",
    "class_loads",
    "expand_compact",
    "format_rational",
    "lower_bound",
    "machine_loads",
    "makespan",
    "parse_rational",
    "validate",
]

__version__ = "0.1.0"
