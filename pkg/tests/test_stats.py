"""Tests for the rank-sum comparison and the IQR plot-data filter."""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from scratchstats.stats import (
    EXACT_LIMIT,
    filter_outliers_iqr,
    quartiles,
    rank_sum_test,
)


def _oracle_exact_p(a: list[float], b: list[float]) -> float:
    """Two-sided exact p by brute-force enumeration of all group splits.

    Independent of the implementation: midranks come from scipy, the null
    is walked with itertools.combinations, and ranks are doubled so every
    comparison is integer-exact.
    """
    pooled = list(a) + list(b)
    doubled = [int(round(2.0 * r)) for r in scipy.stats.rankdata(pooled)]
    n_a = len(a)
    n = len(pooled)
    doubled_mu = n_a * (n - n_a)
    offset = n_a * (n_a + 1)
    observed = abs(sum(doubled[:n_a]) - offset - doubled_mu)
    extreme = 0
    total = 0
    for combo in itertools.combinations(range(n), n_a):
        total += 1
        if abs(sum(doubled[i] for i in combo) - offset - doubled_mu) >= observed:
            extreme += 1
    assert total == math.comb(n, n_a)
    return extreme / total


def test_textbook_separation():
    result = rank_sum_test([1, 2, 3], [4, 5, 6])
    assert result.u_statistic == 0.0
    assert result.p_value == pytest.approx(0.1, abs=1e-15)
    assert result.method == "exact"
    assert result.note == ""


def test_u_is_computed_for_the_first_group():
    result = rank_sum_test([10, 20], [5])
    # pooled ranks: 5 -> 1, 10 -> 2, 20 -> 3; U = (2 + 3) - 2*3/2 = 2
    assert result.u_statistic == 2.0
    assert (result.n_a, result.n_b) == (2, 1)


def test_tied_values_share_midranks():
    result = rank_sum_test([1, 2], [2, 3])
    # ranks 1, 2.5, 2.5, 4: U = 3.5 - 3 = 0.5; of the six splits, four
    # deviate at least as far from the mean, so p = 2/3.
    assert result.u_statistic == 0.5
    assert result.p_value == pytest.approx(2.0 / 3.0, abs=1e-15)


def test_exact_p_matches_enumeration_for_every_small_tiefree_sample():
    # Tie-free data is rank-equivalent to a subset of 1..n, so sweeping
    # every subset of every pooled size covers all configurations.
    for n in range(2, 9):
        for n_a in range(1, n):
            for combo in itertools.combinations(range(1, n + 1), n_a):
                a = [float(v) for v in combo]
                b = [float(v) for v in range(1, n + 1) if v not in combo]
                result = rank_sum_test(a, b)
                assert result.method == "exact"
                expected = _oracle_exact_p(a, b)
                assert result.p_value == pytest.approx(expected, abs=1e-15), (
                    f"n_a={n_a} n_b={n - n_a} ranks={combo}"
                )


def test_exact_p_matches_scipy_on_random_tiefree_pairs():
    rng = np.random.default_rng(1234)
    for _ in range(30):
        n_a = int(rng.integers(2, 7))
        n_b = int(rng.integers(2, 7))
        pooled = rng.permutation(rng.normal(size=n_a + n_b) * 10.0)
        a = [float(v) for v in pooled[:n_a]]
        b = [float(v) for v in pooled[n_a:]]
        ours = rank_sum_test(a, b)
        reference = scipy.stats.mannwhitneyu(
            a, b, alternative="two-sided", method="exact"
        )
        assert ours.u_statistic == pytest.approx(float(reference.statistic))
        assert ours.p_value == pytest.approx(float(reference.pvalue), abs=1e-12)


def test_normal_approximation_tracks_enumerated_truth():
    rng = np.random.default_rng(77)
    for _ in range(20):
        n_a = int(rng.integers(5, 9))
        n_b = int(rng.integers(max(4, EXACT_LIMIT + 1 - n_a), 9))
        values = rng.normal(size=n_a + n_b)
        a = [float(v) for v in values[:n_a]]
        b = [float(v) for v in values[n_a:]]
        result = rank_sum_test(a, b)
        assert result.method == "normal-approximation"
        assert abs(result.p_value - _oracle_exact_p(a, b)) <= 0.02


def test_method_switches_at_the_pooled_size_limit():
    at_limit = rank_sum_test([1.0] * 6 + [2.0], list(range(5)))
    assert at_limit.n_a + at_limit.n_b == EXACT_LIMIT
    assert at_limit.method == "exact"
    above = rank_sum_test([1.0] * 7 + [2.0], list(range(5)))
    assert above.method == "normal-approximation"


def test_monotone_transforms_leave_u_and_p_unchanged():
    rng = np.random.default_rng(55)
    transforms = [
        lambda x: math.exp(x / 4.0),
        lambda x: 3.0 * x + 7.0,
        lambda x: x ** 3,
        math.atan,
    ]
    for trial in range(100):
        n_a = int(rng.integers(2, 8))
        n_b = int(rng.integers(2, 8))
        # integer draws keep ties intact under the transforms
        a = [float(v) for v in rng.integers(-10, 11, size=n_a)]
        b = [float(v) for v in rng.integers(-10, 11, size=n_b)]
        base = rank_sum_test(a, b)
        transform = transforms[trial % len(transforms)]
        mapped = rank_sum_test([transform(v) for v in a],
                               [transform(v) for v in b])
        assert mapped.u_statistic == base.u_statistic
        assert mapped.p_value == base.p_value


def test_identical_values_are_reported_not_divided_by_zero():
    small = rank_sum_test([3, 3, 3], [3, 3])
    assert small.p_value == 1.0
    assert small.note == "all values identical"
    assert small.u_statistic == 3.0  # midranks are all 3

    large = rank_sum_test([7.0] * 10, [7.0] * 10)
    assert large.method == "normal-approximation"
    assert large.p_value == 1.0
    assert large.note == "all values identical"


def test_groups_must_be_non_empty():
    with pytest.raises(ValueError, match="non-empty"):
        rank_sum_test([], [1.0])
    with pytest.raises(ValueError, match="non-empty"):
        rank_sum_test([1.0], [])


def test_labels_pass_through():
    result = rank_sum_test(
        [1, 2], [3, 4], metric="wmc", group_a="games", group_b="stories"
    )
    assert result.metric == "wmc"
    assert result.group_a == "games"
    assert result.group_b == "stories"


def test_quartiles_match_numpy_linear_interpolation():
    rng = np.random.default_rng(8)
    for size in [1, 2, 3, 4, 5, 8, 13, 40]:
        values = [float(v) for v in rng.normal(size=size) * 5.0]
        q1, q3 = quartiles(values)
        assert q1 == pytest.approx(float(np.percentile(values, 25)), abs=1e-9)
        assert q3 == pytest.approx(float(np.percentile(values, 75)), abs=1e-9)


def test_quartiles_reject_empty_input():
    with pytest.raises(ValueError, match="empty"):
        quartiles([])


def test_iqr_filter_drops_the_far_outlier():
    assert filter_outliers_iqr([1, 2, 3, 4, 100]) == [1.0, 2.0, 3.0, 4.0]


def test_iqr_filter_preserves_input_order():
    assert filter_outliers_iqr([5, 1, 100, 3]) == [5.0, 1.0, 3.0]


def test_iqr_filter_repeats_until_stable():
    # The first sweep's fences are stretched by the extreme point, so 40
    # survives it; only after 100 is gone does 40 become an outlier.
    values = [1, 2, 3, 4, 40, 100]
    q1, q3 = quartiles(values)
    first_sweep = [
        v for v in values
        if q1 - 1.5 * (q3 - q1) <= v <= q3 + 1.5 * (q3 - q1)
    ]
    assert 40 in first_sweep and 100 not in first_sweep
    assert filter_outliers_iqr(values) == [1.0, 2.0, 3.0, 4.0]


def test_iqr_filter_edge_cases():
    assert filter_outliers_iqr([]) == []
    assert filter_outliers_iqr([7.0]) == [7.0]
    assert filter_outliers_iqr([5, 5, 5]) == [5.0, 5.0, 5.0]


@settings(max_examples=200)
@given(st.lists(st.floats(-1e6, 1e6), max_size=30))
def test_iqr_filter_is_idempotent_and_selective(values):
    once = filter_outliers_iqr(values)
    assert filter_outliers_iqr(once) == once
    # survivors are a subsequence of the input
    iterator = iter(values)
    assert all(any(kept == v for v in iterator) for kept in once)
