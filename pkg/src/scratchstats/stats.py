"""Two-group comparison statistics and outlier trimming for plot data.

The rank-sum test reports U for the first group computed from midranks.
Small pooled samples (n <= 12) get an exact two-sided p value over all
assignments of ranks to groups; larger samples use the normal
approximation with tie correction and a 0.5 continuity correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

EXACT_LIMIT = 12  # pooled size at or below which the exact null is enumerated


@dataclass(frozen=True)
class GroupComparison:
    metric: str
    group_a: str
    group_b: str
    n_a: int
    n_b: int
    u_statistic: float
    p_value: float
    method: str  # "exact" or "normal-approximation"
    note: str = ""


def _midranks(pooled: list[float]) -> list[float]:
    """Rank each value 1..n, ties sharing the mean of their positions."""
    order = sorted(range(len(pooled)), key=lambda i: pooled[i])
    ranks = [0.0] * len(pooled)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        shared = (i + j + 2) / 2.0  # positions are 0-based, ranks 1-based
        for idx in order[i : j + 1]:
            ranks[idx] = shared
        i = j + 1
    return ranks


def _exact_p_doubled(doubled: list[int], n_a: int, u_doubled_observed: int) -> float:
    """Exact two-sided p via the distribution of 2*U over all group splits.

    doubled holds 2*midrank per pooled observation (integers, so the tail
    comparison is exact).  Counts size-n_a subsets by their doubled rank
    sum with a subset-sum table.
    """
    n = len(doubled)
    # table[c][s] = number of c-subsets with doubled-rank sum s
    table: list[dict[int, int]] = [dict() for _ in range(n_a + 1)]
    table[0][0] = 1
    for value in doubled:
        for c in range(min(n_a, n) - 1, -1, -1):
            if not table[c]:
                continue
            bucket = table[c + 1]
            for s, ways in table[c].items():
                bucket[s + value] = bucket.get(s + value, 0) + ways
    mean_doubled = n_a * (n - n_a)  # 2 * (n_a * n_b / 2)
    offset = n_a * (n_a + 1)  # 2U = sum(doubled ranks of group) - offset
    observed_dev = abs(u_doubled_observed - mean_doubled)
    extreme = 0
    total = 0
    for s, ways in table[n_a].items():
        total += ways
        if abs((s - offset) - mean_doubled) >= observed_dev:
            extreme += ways
    return extreme / total


def rank_sum_test(
    a: list[float],
    b: list[float],
    metric: str = "",
    group_a: str = "a",
    group_b: str = "b",
) -> GroupComparison:
    if not a or not b:
        raise ValueError("both groups must be non-empty")
    values_a = [float(v) for v in a]
    values_b = [float(v) for v in b]
    n_a, n_b = len(values_a), len(values_b)
    n = n_a + n_b
    pooled = values_a + values_b
    ranks = _midranks(pooled)
    rank_sum_a = sum(ranks[:n_a])
    u = rank_sum_a - n_a * (n_a + 1) / 2.0
    method = "exact" if n <= EXACT_LIMIT else "normal-approximation"
    note = ""

    if len(set(pooled)) == 1:
        return GroupComparison(
            metric, group_a, group_b, n_a, n_b, u, 1.0, method,
            note="all values identical",
        )

    if method == "exact":
        doubled = [int(round(2.0 * r)) for r in ranks]
        u_doubled = int(round(2.0 * u))
        p = _exact_p_doubled(doubled, n_a, u_doubled)
    else:
        mu = n_a * n_b / 2.0
        tie_term = 0.0
        seen: dict[float, int] = {}
        for v in pooled:
            seen[v] = seen.get(v, 0) + 1
        for t in seen.values():
            tie_term += t * t * t - t
        variance = (n_a * n_b / 12.0) * ((n + 1) - tie_term / (n * (n - 1)))
        if variance <= 0.0:
            return GroupComparison(
                metric, group_a, group_b, n_a, n_b, u, 1.0, method,
                note="zero variance under ties",
            )
        deviation = abs(u - mu)
        z = max(deviation - 0.5, 0.0) / math.sqrt(variance)
        p = min(1.0, math.erfc(z / math.sqrt(2.0)))
    return GroupComparison(metric, group_a, group_b, n_a, n_b, u, p, method, note)


def quartiles(values: list[float]) -> tuple[float, float]:
    """First and third quartile by linear interpolation between order stats."""
    if not values:
        raise ValueError("quartiles of an empty sequence")
    ordered = sorted(float(v) for v in values)
    n = len(ordered)

    def at(q: float) -> float:
        if n == 1:
            return ordered[0]
        h = (n - 1) * q
        low = math.floor(h)
        high = min(low + 1, n - 1)
        return ordered[low] + (h - low) * (ordered[high] - ordered[low])

    return at(0.25), at(0.75)


def filter_outliers_iqr(values: list[float]) -> list[float]:
    """Drop values outside [Q1 - 1.5*IQR, Q3 + 1.5*IQR], repeated to a fixpoint.

    One sweep can expose new outliers once extremes leave the sample, so
    the fences are recomputed until the kept set stops changing; that
    makes the filter idempotent.  Survivors keep their input order.
    """
    kept = [float(v) for v in values]
    while kept:
        q1, q3 = quartiles(kept)
        spread = q3 - q1
        low = q1 - 1.5 * spread
        high = q3 + 1.5 * spread
        narrowed = [v for v in kept if low <= v <= high]
        if len(narrowed) == len(kept):
            break
        kept = narrowed
    return kept
