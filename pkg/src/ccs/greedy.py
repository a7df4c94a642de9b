"""Round-robin and LPT list scheduling, shared by the approximation
algorithms and the scheme reconstruction phases.

Both functions are deterministic: weight ties break by ascending item id,
bin ties by lowest bin index. Bins are numbered 0..bin_count-1 and all of
them appear in the result, possibly empty.
"""

from __future__ import annotations

from fractions import Fraction


def _sorted_items(items):
    # Non-ascending weight, ascending id on ties.
    return sorted(items, key=lambda pair: (-Fraction(pair[1]), pair[0]))


def round_robin(loads, bin_count: int) -> dict:
    """Cyclic assignment in non-ascending weight order: the k-th heaviest
    item lands in bin k mod bin_count. Max bin weight is bounded by
    total/bin_count + max single weight."""
    if bin_count < 1:
        raise ValueError("bin_count must be positive")
    bins = {i: [] for i in range(bin_count)}
    for k, (item_id, _weight) in enumerate(_sorted_items(loads)):
        bins[k % bin_count].append(item_id)
    return bins


def lpt(weights, bin_count: int) -> dict:
    """Longest processing time first: items in non-increasing weight order
    each go to the currently least-loaded bin."""
    if bin_count < 1:
        raise ValueError("bin_count must be positive")
    bins = {i: [] for i in range(bin_count)}
    totals = [Fraction(0)] * bin_count
    for item_id, weight in _sorted_items(weights):
        target = min(range(bin_count), key=lambda i: (totals[i], i))
        bins[target].append(item_id)
        totals[target] += Fraction(weight)
    return bins
