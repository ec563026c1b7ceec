import itertools
import math
import random

import numpy as np
import pytest
from scipy.stats import rankdata

from faultrank.errors import DegenerateStatisticError
from faultrank.stats import (
    PairedVectors,
    cliffs_delta,
    delta_band,
    kendall_tau,
    tau_band,
    wilcoxon_signed_rank,
)


def pair_of(a, b):
    return PairedVectors(
        bug_ids=tuple(f"b{i}" for i in range(len(a))),
        values_a=tuple(float(x) for x in a),
        values_b=tuple(float(x) for x in b),
    )


def tau_b_oracle(a, b):
    """O(n^2) pair counting, written independently of the implementation."""
    n = len(a)
    concordant = discordant = 0
    tied_a = tied_b = 0
    for i, j in itertools.combinations(range(n), 2):
        sign_a = (a[i] > a[j]) - (a[i] < a[j])
        sign_b = (b[i] > b[j]) - (b[i] < b[j])
        if sign_a == 0:
            tied_a += 1
        if sign_b == 0:
            tied_b += 1
        product = sign_a * sign_b
        if product > 0:
            concordant += 1
        elif product < 0:
            discordant += 1
    pairs = n * (n - 1) // 2
    return (concordant - discordant) / math.sqrt((pairs - tied_a) * (pairs - tied_b))


class TestKendall:
    def test_identical_vectors(self):
        result = kendall_tau(pair_of([1, 2, 3, 4], [1, 2, 3, 4]))
        assert result.tau == 1.0
        assert result.band == "strong"

    def test_reversed_order(self):
        result = kendall_tau(pair_of([1, 2, 3, 4], [4, 3, 2, 1]))
        assert result.tau == -1.0

    def test_fixture_with_tie_matches_pair_counting(self):
        a = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0]  # one tie in a
        b = [2.0, 7.0, 1.0, 8.0, 2.0, 8.0]
        result = kendall_tau(pair_of(a, b))
        assert result.tau == tau_b_oracle(a, b)

    def test_random_vectors_match_oracle_exactly(self):
        rng = random.Random(7)
        for _ in range(100):
            n = rng.randint(2, 50)
            a = [float(rng.randint(0, 8)) for _ in range(n)]
            b = [float(rng.randint(0, 8)) for _ in range(n)]
            pairs = n * (n - 1) // 2
            tied_a = sum(1 for i, j in itertools.combinations(range(n), 2) if a[i] == a[j])
            tied_b = sum(1 for i, j in itertools.combinations(range(n), 2) if b[i] == b[j])
            if tied_a == pairs or tied_b == pairs:
                continue
            assert kendall_tau(pair_of(a, b)).tau == tau_b_oracle(a, b)

    def test_agrees_with_scipy(self):
        from scipy.stats import kendalltau

        rng = random.Random(13)
        for _ in range(30):
            n = rng.randint(3, 30)
            a = [float(rng.randint(0, 5)) for _ in range(n)]
            b = [float(rng.randint(0, 5)) for _ in range(n)]
            if len(set(a)) < 2 or len(set(b)) < 2:
                continue
            assert kendall_tau(pair_of(a, b)).tau == pytest.approx(
                kendalltau(a, b).statistic, abs=1e-12)

    def test_zero_variance_is_degenerate(self):
        with pytest.raises(DegenerateStatisticError):
            kendall_tau(pair_of([2, 2, 2], [1, 2, 3]))

    def test_swap_negates_tau(self):
        pair = pair_of([1, 5, 2, 4], [2, 3, 5, 1])
        assert kendall_tau(pair.swapped()).tau == -kendall_tau(pair).tau

    def test_joint_monotone_transform_invariance(self):
        pair = pair_of([1, 5, 2, 4, 3], [2, 3, 5, 1, 4])
        transformed = pair_of(
            [math.exp(x) for x in pair.values_a],
            [math.exp(x) for x in pair.values_b],
        )
        assert kendall_tau(transformed).tau == kendall_tau(pair).tau

    def test_band_boundaries(self):
        assert tau_band(0.3) == "negligible"
        assert tau_band(0.30001) == "weak"
        assert tau_band(0.5) == "weak"
        assert tau_band(0.50001) == "medium"
        assert tau_band(0.7) == "medium"
        assert tau_band(0.70001) == "strong"
        assert tau_band(-0.9) == "strong"


def exact_wilcoxon_p(a, b):
    """Two-sided p from enumerating every sign assignment (2^n), with
    midranks so tied magnitudes are handled the same way as the statistic.
    """
    diffs = np.asarray(a, float) - np.asarray(b, float)
    nonzero = diffs[diffs != 0]
    ranks = rankdata(np.abs(nonzero))
    observed = ranks[nonzero > 0].sum()
    total = ranks.sum()
    w_values = np.array([
        sum(r for r, keep in zip(ranks, signs) if keep)
        for signs in itertools.product([False, True], repeat=len(nonzero))
    ])
    low, high = min(observed, total - observed), max(observed, total - observed)
    return ((w_values <= low).sum() + (w_values >= high).sum()) / len(w_values)


# frozen fixture, chosen so the mid-range p exercises the approximation
WILCOXON_A = [13.1, 1.5, 6.2, 5.2, 15.0, 13.9, 18.0, 2.7, 9.0, 1.6]
WILCOXON_B = [11.1, 2.0, 2.4, 3.0, 16.8, 14.8, 16.0, 4.0, 12.3, -2.3]


class TestWilcoxon:
    def test_large_shift_is_significant(self):
        a = [float(i) for i in range(1, 21)]
        b = [x + 100.0 for x in a]
        assert wilcoxon_signed_rank(pair_of(a, b)) < 0.001

    def test_equal_vectors_are_degenerate(self):
        with pytest.raises(DegenerateStatisticError):
            wilcoxon_signed_rank(pair_of([1, 2, 3, 4, 5], [1, 2, 3, 4, 5]))

    def test_short_vectors_rejected(self):
        with pytest.raises(ValueError):
            wilcoxon_signed_rank(pair_of([1, 2], [2, 1]))

    def test_near_exact_at_ten_pairs(self):
        p_exact = exact_wilcoxon_p(WILCOXON_A, WILCOXON_B)
        p_approx = wilcoxon_signed_rank(pair_of(WILCOXON_A, WILCOXON_B))
        assert p_approx == pytest.approx(p_exact, rel=0.05)

    def test_swap_keeps_p_value(self):
        pair = pair_of(WILCOXON_A, WILCOXON_B)
        assert wilcoxon_signed_rank(pair.swapped()) == wilcoxon_signed_rank(pair)

    def test_p_in_unit_interval(self):
        rng = random.Random(21)
        for _ in range(20):
            a = [rng.uniform(0, 10) for _ in range(12)]
            b = [rng.uniform(0, 10) for _ in range(12)]
            if a == b:
                continue
            assert 0.0 < wilcoxon_signed_rank(pair_of(a, b)) <= 1.0


def cliffs_oracle(a, b):
    greater = sum(1 for x in a for y in b if x > y)
    less = sum(1 for x in a for y in b if x < y)
    return (greater - less) / (len(a) * len(b))


class TestCliffsDelta:
    def test_complete_dominance(self):
        result = cliffs_delta(pair_of([5, 6, 7], [1, 2, 3]))
        assert result.delta == 1.0
        assert result.band == "large"

    def test_identical_multisets(self):
        result = cliffs_delta(pair_of([1, 2, 2, 3], [3, 2, 1, 2]))
        assert result.delta == 0.0
        assert result.band == "negligible"

    def test_eight_by_eight_matches_brute_force(self):
        rng = random.Random(17)
        a = [float(rng.randint(0, 9)) for _ in range(8)]
        b = [float(rng.randint(0, 9)) for _ in range(8)]
        assert cliffs_delta(pair_of(a, b)).delta == cliffs_oracle(a, b)

    def test_random_vectors_match_brute_force_exactly(self):
        rng = random.Random(19)
        for _ in range(50):
            n = rng.randint(1, 20)
            a = [float(rng.randint(0, 6)) for _ in range(n)]
            b = [float(rng.randint(0, 6)) for _ in range(n)]
            assert cliffs_delta(pair_of(a, b)).delta == cliffs_oracle(a, b)

    def test_swap_negates_delta(self):
        pair = pair_of([1, 4, 2, 5], [3, 2, 4, 1])
        assert cliffs_delta(pair.swapped()).delta == -cliffs_delta(pair).delta

    def test_joint_monotone_transform_invariance(self):
        pair = pair_of([1, 4, 2, 5], [3, 2, 4, 1])
        cubed = pair_of([x ** 3 for x in pair.values_a], [x ** 3 for x in pair.values_b])
        assert cliffs_delta(cubed).delta == cliffs_delta(pair).delta

    def test_band_boundaries(self):
        assert delta_band(0.146) == "negligible"
        assert delta_band(0.147) == "small"
        assert delta_band(0.33) == "medium"
        assert delta_band(0.474) == "large"
        assert delta_band(-0.9) == "large"


def test_paired_vectors_validate_alignment():
    with pytest.raises(ValueError):
        PairedVectors(("b1",), (1.0, 2.0), (1.0,))
    with pytest.raises(ValueError):
        PairedVectors((), (), ())
