"""Bandit instances and the seeded stream layout."""

import numpy as np
import pytest

from decbandits.environment import (
    BanditInstance,
    child_seed_sequence,
    draw_reward,
    policy_stream,
    presample_rewards,
    reward_stream,
    schedule_seed,
    suboptimality_gaps,
)


class TestBanditInstance:
    def test_basic_fields(self):
        inst = BanditInstance("bernoulli", (0.5, 0.1, 0.3))
        assert inst.n_arms == 3
        assert inst.best_mean == 0.5
        assert inst.best_arm == 0

    def test_best_arm_ties_go_low(self):
        inst = BanditInstance("gaussian", (0.2, 0.7, 0.7))
        assert inst.best_arm == 1

    def test_means_coerced_to_floats(self):
        inst = BanditInstance("bernoulli", (1, 0))
        assert inst.means == (1.0, 0.0)

    def test_gaps(self):
        inst = BanditInstance("bernoulli", (0.5, 0.1, 0.1))
        np.testing.assert_allclose(suboptimality_gaps(inst), [0.0, 0.4, 0.4])

    def test_single_arm_allowed(self):
        inst = BanditInstance("gaussian", (1.5,), noise_sd=2.0)
        assert suboptimality_gaps(inst).tolist() == [0.0]

    def test_rejects_unknown_family(self):
        with pytest.raises(ValueError, match="family"):
            BanditInstance("poisson", (0.5,))

    def test_rejects_empty_means(self):
        with pytest.raises(ValueError, match="at least one arm"):
            BanditInstance("bernoulli", ())

    def test_rejects_bernoulli_mean_out_of_range(self):
        with pytest.raises(ValueError, match=r"\[0, 1\]"):
            BanditInstance("bernoulli", (0.5, 1.2))

    def test_gaussian_means_unrestricted(self):
        BanditInstance("gaussian", (-3.0, 12.5))

    def test_rejects_bad_noise_sd(self):
        with pytest.raises(ValueError, match="noise_sd"):
            BanditInstance("gaussian", (0.5,), noise_sd=0.0)


class TestStreams:
    def test_child_sequences_are_deterministic(self):
        s1 = child_seed_sequence(42, run=3, slot=5)
        s2 = child_seed_sequence(42, run=3, slot=5)
        assert s1.generate_state(4).tolist() == s2.generate_state(4).tolist()

    def test_child_sequences_differ_across_slots_and_runs(self):
        base = child_seed_sequence(42, 0, 0).generate_state(4).tolist()
        assert child_seed_sequence(42, 0, 1).generate_state(4).tolist() != base
        assert child_seed_sequence(42, 1, 0).generate_state(4).tolist() != base
        assert child_seed_sequence(43, 0, 0).generate_state(4).tolist() != base

    def test_reward_stream_reproducible(self):
        a = reward_stream(7, 0, 2).random(10)
        b = reward_stream(7, 0, 2).random(10)
        np.testing.assert_array_equal(a, b)

    def test_policy_and_schedule_slots_distinct_from_agents(self):
        # policy stream slot sits right after the agent slots, schedule after it
        n = 4
        agent_draws = {reward_stream(9, 0, i).random() for i in range(n)}
        pol = policy_stream(9, 0, n).random()
        assert pol not in agent_draws
        s1 = schedule_seed(9, 0, n)
        s2 = schedule_seed(9, 1, n)
        assert s1 != s2
        assert schedule_seed(9, 0, n) == s1

    def test_rejects_negative_master_seed(self):
        with pytest.raises(ValueError, match="non-negative"):
            reward_stream(-1, 0, 0)

    def test_rejects_negative_agent(self):
        with pytest.raises(ValueError, match="agent"):
            reward_stream(1, 0, -2)


class TestDrawReward:
    def test_bernoulli_rewards_are_binary(self):
        inst = BanditInstance("bernoulli", (0.4, 0.9))
        rng = reward_stream(0, 0, 0)
        values = {draw_reward(inst, 0, rng) for _ in range(50)}
        assert values <= {0.0, 1.0}

    def test_bernoulli_degenerate_means(self):
        inst = BanditInstance("bernoulli", (0.0, 1.0))
        rng = reward_stream(0, 0, 0)
        assert all(draw_reward(inst, 0, rng) == 0.0 for _ in range(20))
        assert all(draw_reward(inst, 1, rng) == 1.0 for _ in range(20))

    def test_bernoulli_frequency_matches_mean(self):
        inst = BanditInstance("bernoulli", (0.3,))
        rng = reward_stream(123, 0, 0)
        draws = [draw_reward(inst, 0, rng) for _ in range(20000)]
        assert np.mean(draws) == pytest.approx(0.3, abs=0.01)

    def test_gaussian_moments(self):
        inst = BanditInstance("gaussian", (2.0,), noise_sd=0.5)
        rng = reward_stream(5, 0, 0)
        draws = np.array([draw_reward(inst, 0, rng) for _ in range(20000)])
        assert draws.mean() == pytest.approx(2.0, abs=0.02)
        assert draws.std() == pytest.approx(0.5, abs=0.02)

    def test_rejects_arm_out_of_range(self):
        inst = BanditInstance("bernoulli", (0.4,))
        with pytest.raises(IndexError):
            draw_reward(inst, 1, reward_stream(0, 0, 0))
        with pytest.raises(IndexError):
            draw_reward(inst, -1, reward_stream(0, 0, 0))


class TestPresampleRewards:
    def test_shape_and_determinism(self):
        inst = BanditInstance("bernoulli", (0.2, 0.8))
        table1 = presample_rewards(inst, reward_stream(3, 1, 0), 100)
        table2 = presample_rewards(inst, reward_stream(3, 1, 0), 100)
        assert table1.shape == (100, 2)
        np.testing.assert_array_equal(table1, table2)

    def test_bernoulli_table_statistics(self):
        inst = BanditInstance("bernoulli", (0.2, 0.8))
        table = presample_rewards(inst, reward_stream(11, 0, 0), 30000)
        assert set(np.unique(table)) <= {0.0, 1.0}
        assert table[:, 0].mean() == pytest.approx(0.2, abs=0.01)
        assert table[:, 1].mean() == pytest.approx(0.8, abs=0.01)

    def test_gaussian_table_statistics(self):
        inst = BanditInstance("gaussian", (-1.0, 3.0), noise_sd=2.0)
        table = presample_rewards(inst, reward_stream(11, 0, 0), 30000)
        assert table[:, 0].mean() == pytest.approx(-1.0, abs=0.05)
        assert table[:, 1].mean() == pytest.approx(3.0, abs=0.05)
        assert table[:, 0].std() == pytest.approx(2.0, abs=0.05)

    def test_rejects_bad_horizon(self):
        inst = BanditInstance("bernoulli", (0.2,))
        with pytest.raises(ValueError, match="horizon"):
            presample_rewards(inst, reward_stream(0, 0, 0), 0)
