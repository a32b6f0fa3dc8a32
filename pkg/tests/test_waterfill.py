"""Tests for the closed-form water-filling solver."""

import numpy as np
import pytest

from oia.errors import InvalidInputError
from oia.waterfill import waterfill

from oracles import allocation_rate, grid_search_rate


def random_problem(rng):
    n = int(rng.integers(1, 5))
    ig = np.exp(rng.normal(0.0, 1.2, n))
    budget = float(np.exp(rng.uniform(np.log(0.05), np.log(50.0))))
    return ig, budget


class TestAnalyticCases:
    def test_two_modes_both_active(self):
        alloc = waterfill([0.25, 1.0], 1.0)
        assert np.allclose(alloc.powers, [0.875, 0.125], atol=1e-15)
        assert abs(alloc.water_level - 1.125) < 1e-15
        assert alloc.active_count == 2

    def test_two_modes_one_drops(self):
        alloc = waterfill([0.25, 1.0], 0.5)
        assert np.allclose(alloc.powers, [0.5, 0.0], atol=1e-15)
        assert alloc.powers[1] == 0.0
        assert abs(alloc.water_level - 0.75) < 1e-15
        assert alloc.active_count == 1

    def test_symmetric_modes_split_evenly(self):
        alloc = waterfill([1.0, 1.0, 1.0], 3.0)
        assert np.allclose(alloc.powers, [1.0, 1.0, 1.0])
        assert abs(alloc.water_level - 2.0) < 1e-15

    def test_infinite_gain_excluded(self):
        alloc = waterfill([0.5, np.inf], 1.0)
        assert alloc.powers[1] == 0.0
        assert abs(alloc.powers[0] - 1.0) < 1e-15
        assert alloc.active_count == 1

    def test_unsorted_input_keeps_mode_order(self):
        alloc = waterfill([1.0, 0.25], 1.0)
        assert np.allclose(alloc.powers, [0.125, 0.875], atol=1e-15)


class TestValidation:
    def test_empty_gains(self):
        with pytest.raises(InvalidInputError):
            waterfill([], 1.0)

    @pytest.mark.parametrize("budget", [0.0, -1.0, np.inf, np.nan])
    def test_bad_budget(self, budget):
        with pytest.raises(InvalidInputError):
            waterfill([1.0], budget)

    def test_all_infinite_gains(self):
        with pytest.raises(InvalidInputError):
            waterfill([np.inf, np.inf], 1.0)

    @pytest.mark.parametrize("gains", [[0.0, 1.0], [-1.0], [np.nan]])
    def test_bad_gains(self, gains):
        with pytest.raises(InvalidInputError):
            waterfill(gains, 1.0)


class TestKktProperties:
    def test_budget_conservation_and_slackness(self):
        rng = np.random.default_rng(2024)
        for _ in range(300):
            ig, budget = random_problem(rng)
            alloc = waterfill(ig, budget)
            assert abs(alloc.powers.sum() - budget) <= 1e-9 * budget
            level = alloc.water_level
            for power, gain in zip(alloc.powers, ig):
                if power > 0:
                    assert abs(power - (level - gain)) <= 1e-9 * level
                else:
                    assert power == 0.0
                    assert gain >= level - 1e-9 * level
            assert alloc.active_count == int(np.count_nonzero(alloc.powers))

    def test_active_count_monotone_in_budget(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            ig = np.exp(rng.normal(0.0, 1.0, 4))
            counts = [waterfill(ig, b).active_count
                      for b in np.logspace(-3, 3, 25)]
            assert all(a <= b for a, b in zip(counts, counts[1:]))

    def test_matches_grid_search_oracle(self):
        rng = np.random.default_rng(99)
        for _ in range(30):
            ig, budget = random_problem(rng)
            alloc = waterfill(ig, budget)
            fast = allocation_rate(alloc.powers, ig)
            reference = grid_search_rate(ig, budget)
            assert abs(fast - reference) <= 1e-4
