#!/usr/bin/env python3
"""Survey approximation ratios of every algorithm against the exact
oracles on seeded random instances, and print a small summary table.

Example:
    python scripts/ratio_survey.py --count 120 --seed 7 --out ratios.csv
"""

import argparse
import random
import sys
from fractions import Fraction

from ccs import (
    Instance,
    NONPREEMPTIVE,
    PREEMPTIVE,
    SPLITTABLE,
    approx_nonpreemptive,
    approx_preemptive,
    approx_splittable,
    makespan,
    opt_nonpreemptive,
    opt_preemptive,
    opt_splittable,
    validate,
)
from ccs.core import EnumerationCapError
from ccs.ptas import ptas_solve

ALGOS = {
    (SPLITTABLE, "approx"): approx_splittable,
    (PREEMPTIVE, "approx"): approx_preemptive,
    (NONPREEMPTIVE, "approx"): approx_nonpreemptive,
}

ORACLES = {
    SPLITTABLE: opt_splittable,
    PREEMPTIVE: opt_preemptive,
    NONPREEMPTIVE: lambda inst: opt_nonpreemptive(inst)[0],
}


def draw(rng: random.Random) -> Instance:
    n = rng.randint(1, 7)
    m = rng.randint(1, 3)
    c = rng.randint(1, 3)
    palette = min(n, m * c, 5)
    labels = tuple(rng.randint(1, palette) for _ in range(n))
    sizes = tuple(rng.randint(1, 12) for _ in range(n))
    return Instance(sizes, labels, m, c)


def in_scheme_regime(inst: Instance, variant: str) -> bool:
    # outside this regime the splittable scheme clamps the machine count
    # and its ratio guarantee does not apply
    if variant != SPLITTABLE:
        return True
    return inst.machine_count <= inst.job_count * inst.slot_budget


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--epsilon", default="1",
                        help="accuracy for the scheme runs")
    parser.add_argument("--out", default=None, help="optional CSV path")
    args = parser.parse_args(argv)

    eps = Fraction(args.epsilon)
    rng = random.Random(args.seed)
    instances = [draw(rng) for _ in range(args.count)]

    rows = []
    stats: dict = {}
    for variant in (SPLITTABLE, PREEMPTIVE, NONPREEMPTIVE):
        oracle = ORACLES[variant]
        for algo in ("approx", "ptas"):
            ratios = []
            refused = 0
            for idx, inst in enumerate(instances):
                if algo == "ptas" and not in_scheme_regime(inst, variant):
                    continue
                try:
                    if algo == "approx":
                        schedule = ALGOS[(variant, algo)](inst)
                    else:
                        schedule = ptas_solve(inst, eps, variant)
                except EnumerationCapError:
                    refused += 1
                    continue
                assert validate(schedule, inst, variant) == []
                ratio = makespan(schedule, inst) / oracle(inst)
                ratios.append(ratio)
                rows.append((idx, variant, algo, str(ratio)))
            stats[(variant, algo)] = (ratios, refused)

    print(f"{'variant':<15}{'algo':<8}{'runs':>6}{'refused':>9}"
          f"{'mean':>9}{'worst':>8}")
    for (variant, algo), (ratios, refused) in stats.items():
        if ratios:
            mean = float(sum(ratios) / len(ratios))
            worst = float(max(ratios))
            print(f"{variant:<15}{algo:<8}{len(ratios):>6}{refused:>9}"
                  f"{mean:>9.3f}{worst:>8.3f}")
        else:
            print(f"{variant:<15}{algo:<8}{0:>6}{refused:>9}"
                  f"{'-':>9}{'-':>8}")

    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write("instance,variant,algo,ratio\n")
            for row in rows:
                handle.write(",".join(str(v) for v in row) + "\n")
        print(f"wrote {len(rows)} rows to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
