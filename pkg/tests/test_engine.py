"""Simulation loop, regret accounting, aggregation, and CSV output."""

import os

import numpy as np
import pytest

from decbandits.engine import (
    AggregateResult,
    Scenario,
    messages_for_matrix,
    run_round,
    run_scenario,
    simulate_run,
    write_per_run_csv,
    write_regret_csv,
    write_stats_sidecar,
)
from decbandits.environment import (
    BanditInstance,
    presample_rewards,
    reward_stream,
    suboptimality_gaps,
)
from decbandits.network import MatrixSchedule, Topology, build_metropolis
from decbandits.policy import PolicyConfig
from decbandits.posterior import BetaBank, beta_params_from_history


def bernoulli_scenario(**overrides):
    defaults = dict(
        instance=BanditInstance("bernoulli", (0.7, 0.4, 0.2)),
        n_agents=4,
        policy=PolicyConfig("dec_thompson"),
        horizon=50,
        schedule=MatrixSchedule.static(build_metropolis(Topology.cycle(4))),
        n_runs=1,
        master_seed=123,
    )
    defaults.update(overrides)
    return Scenario(**defaults)


class TestScenario:
    def test_validation(self):
        with pytest.raises(ValueError, match="n_agents"):
            bernoulli_scenario(n_agents=0, schedule=None, policy=PolicyConfig("isolated_thompson"))
        with pytest.raises(ValueError, match="horizon"):
            bernoulli_scenario(horizon=0)
        with pytest.raises(ValueError, match="n_runs"):
            bernoulli_scenario(n_runs=0)
        with pytest.raises(ValueError, match="record_every"):
            bernoulli_scenario(record_every=0)
        with pytest.raises(ValueError, match="regret_mode"):
            bernoulli_scenario(regret_mode="averaged")
        with pytest.raises(ValueError, match="master_seed"):
            bernoulli_scenario(master_seed=-1)

    def test_merge_policy_needs_matching_schedule(self):
        with pytest.raises(ValueError, match="needs a schedule"):
            bernoulli_scenario(schedule=None)
        with pytest.raises(ValueError, match="schedule is for"):
            bernoulli_scenario(
                schedule=MatrixSchedule.static(build_metropolis(Topology.cycle(3)))
            )

    def test_non_merge_policies_ignore_schedule(self):
        scn = bernoulli_scenario(policy=PolicyConfig("isolated_thompson"), schedule=None)
        assert scn.schedule is None
        bernoulli_scenario(policy=PolicyConfig("centralized_thompson"), schedule=None)

    def test_recorded_rounds_every_round(self):
        scn = bernoulli_scenario(horizon=5)
        np.testing.assert_array_equal(scn.recorded_rounds, [1, 2, 3, 4, 5])

    def test_recorded_rounds_strided_always_ends_at_horizon(self):
        scn = bernoulli_scenario(horizon=25, record_every=10)
        np.testing.assert_array_equal(scn.recorded_rounds, [10, 20, 25])
        scn = bernoulli_scenario(horizon=30, record_every=10)
        np.testing.assert_array_equal(scn.recorded_rounds, [10, 20, 30])

    def test_recorded_rounds_final_only(self):
        scn = bernoulli_scenario(horizon=50, record_every=50)
        np.testing.assert_array_equal(scn.recorded_rounds, [50])
        scn = bernoulli_scenario(horizon=50, record_every=1000)
        np.testing.assert_array_equal(scn.recorded_rounds, [50])


class TestMessagesForMatrix:
    def test_complete_graph(self):
        W = build_metropolis(Topology.complete(4))
        assert messages_for_matrix(W, 2) == 24  # 4*3 directed links, 2 arms

    def test_gossip_pair(self):
        from decbandits.network import gossip_matrix

        assert messages_for_matrix(gossip_matrix(10, 3, 7), 5) == 10  # 2 links

    def test_identity_costs_nothing(self):
        assert messages_for_matrix(np.eye(6), 9) == 0


class TestRunRound:
    def test_update_then_merge_ordering(self):
        # two agents, uniform pooling: agent 1's post-merge parameters
        # must include agent 0's update from the same round
        inst = BanditInstance("bernoulli", (0.9, 0.1))
        bank = BetaBank(2, 2)
        W = np.full((2, 2), 0.5)
        policy = PolicyConfig("dec_bayes_ucb", horizon=100)
        rewards_t = np.array([[1.0, 0.0], [1.0, 0.0]])
        arms, rewards = run_round(
            bank, W, inst, policy, 2, np.random.default_rng(0), rewards_t, eta=2.0
        )
        # quantile index on a flat prior ties, so both agents play arm 0
        np.testing.assert_array_equal(arms, [0, 0])
        np.testing.assert_array_equal(rewards, [1.0, 1.0])
        # both updated alpha on arm 0 to 1 + 2*1 = 3, then averaged
        np.testing.assert_allclose(bank.alpha, [[3.0, 1.0], [3.0, 1.0]])
        np.testing.assert_allclose(bank.beta, [[1.0, 1.0], [1.0, 1.0]])

    def test_none_matrix_skips_merge(self):
        inst = BanditInstance("bernoulli", (0.9, 0.1))
        bank = BetaBank(2, 2)
        policy = PolicyConfig("dec_bayes_ucb", horizon=100)
        rewards_t = np.array([[1.0, 0.0], [0.0, 1.0]])
        run_round(bank, None, inst, policy, 2, np.random.default_rng(0), rewards_t, 1.0)
        np.testing.assert_allclose(bank.alpha, [[2.0, 1.0], [1.0, 1.0]])
        np.testing.assert_allclose(bank.beta, [[1.0, 1.0], [2.0, 1.0]])


class TestSimulateRun:
    def test_deterministic_replay(self):
        scn = bernoulli_scenario(horizon=100)
        a = simulate_run(scn, 0, record_plays=True)
        b = simulate_run(scn, 0, record_plays=True)
        np.testing.assert_array_equal(a.regret, b.regret)
        np.testing.assert_array_equal(a.arms, b.arms)
        assert a.messages == b.messages

    def test_runs_differ(self):
        scn = bernoulli_scenario(horizon=100)
        a = simulate_run(scn, 0, record_plays=True)
        b = simulate_run(scn, 1, record_plays=True)
        assert not np.array_equal(a.arms, b.arms)

    def test_param_snapshots_match_closed_form(self):
        scn = bernoulli_scenario(horizon=30)
        trace = simulate_run(scn, 0, record_plays=True, record_params=True)
        W = scn.schedule.matrix
        eta = scn.policy.resolved_eta(scn.n_agents)
        for t in (1, 2, 15, 31):
            alpha, beta = beta_params_from_history(
                trace.arms, trace.rewards, W, eta, t, scn.instance.n_arms
            )
            np.testing.assert_allclose(trace.params_a[t - 1], alpha, atol=1e-9)
            np.testing.assert_allclose(trace.params_b[t - 1], beta, atol=1e-9)

    def test_pseudo_regret_accumulates_gaps(self):
        scn = bernoulli_scenario(horizon=40)
        trace = simulate_run(scn, 3, record_plays=True)
        gaps = suboptimality_gaps(scn.instance)
        expected = np.cumsum(gaps[trace.arms].sum(axis=1)) / scn.n_agents
        np.testing.assert_allclose(trace.regret, expected, rtol=1e-12)

    def test_realized_regret_uses_presampled_tables(self):
        scn = bernoulli_scenario(horizon=40, regret_mode="realized")
        trace = simulate_run(scn, 2, record_plays=True)
        tables = np.stack(
            [
                presample_rewards(
                    scn.instance,
                    reward_stream(scn.master_seed, 2, agent),
                    scn.horizon,
                )
                for agent in range(scn.n_agents)
            ],
            axis=1,
        )
        best = scn.instance.best_arm
        diffs = tables[:, :, best] - trace.rewards
        expected = np.cumsum(diffs.sum(axis=1)) / scn.n_agents
        np.testing.assert_allclose(trace.regret, expected, rtol=1e-12)

    def test_message_counts(self):
        n, k, T = 4, 3, 10
        inst = BanditInstance("bernoulli", (0.5, 0.3, 0.1))
        complete = MatrixSchedule.static(build_metropolis(Topology.complete(n)))
        scn = bernoulli_scenario(instance=inst, horizon=T, schedule=complete)
        assert simulate_run(scn, 0).messages == T * n * (n - 1) * k

        iso = bernoulli_scenario(
            instance=inst, horizon=T, policy=PolicyConfig("isolated_thompson"), schedule=None
        )
        assert simulate_run(iso, 0).messages == 0

        cen = bernoulli_scenario(
            instance=inst, horizon=T, policy=PolicyConfig("centralized_thompson"), schedule=None
        )
        assert simulate_run(cen, 0).messages == T * n * (n - 1) * k

        gos = bernoulli_scenario(
            instance=inst, horizon=T, schedule=MatrixSchedule.gossip(n, seed=0)
        )
        assert simulate_run(gos, 0).messages == T * 2 * k

    def test_gossip_runs_use_independent_schedules(self):
        scn = bernoulli_scenario(
            horizon=60, schedule=MatrixSchedule.gossip(4, seed=0)
        )
        a = simulate_run(scn, 0, record_params=True)
        b = simulate_run(scn, 1, record_params=True)
        assert not np.allclose(a.params_a[-1], b.params_a[-1])
        # and replaying run 0 is still exact
        c = simulate_run(scn, 0, record_params=True)
        np.testing.assert_array_equal(a.params_a, c.params_a)

    def test_single_agent_merge_equals_isolated(self):
        inst = BanditInstance("bernoulli", (0.8, 0.3))
        dec = Scenario(
            instance=inst,
            n_agents=1,
            policy=PolicyConfig("dec_thompson", eta=1.0),
            horizon=200,
            schedule=MatrixSchedule.static(np.array([[1.0]])),
            master_seed=7,
        )
        iso = Scenario(
            instance=inst,
            n_agents=1,
            policy=PolicyConfig("isolated_thompson"),
            horizon=200,
            master_seed=7,
        )
        a = simulate_run(dec, 0, record_plays=True)
        b = simulate_run(iso, 0, record_plays=True)
        np.testing.assert_array_equal(a.arms, b.arms)
        np.testing.assert_array_equal(a.regret, b.regret)
        assert a.messages == 0

    def test_record_every_subsamples_same_curve(self):
        scn_full = bernoulli_scenario(horizon=48)
        scn_thin = bernoulli_scenario(horizon=48, record_every=10)
        full = simulate_run(scn_full, 0)
        thin = simulate_run(scn_thin, 0)
        np.testing.assert_array_equal(thin.rounds, [10, 20, 30, 40, 48])
        np.testing.assert_allclose(thin.regret, full.regret[thin.rounds - 1])

    def test_gaussian_family_runs(self):
        inst = BanditInstance("gaussian", (1.0, 0.0), noise_sd=0.5)
        scn = bernoulli_scenario(instance=inst, horizon=150)
        trace = simulate_run(scn, 0)
        assert trace.regret[-1] < 150 * 1.0  # played the good arm sometimes
        assert np.all(np.diff(trace.regret) >= 0.0)

    def test_shared_bank_snapshots_are_replicated(self):
        scn = bernoulli_scenario(
            policy=PolicyConfig("centralized_thompson"), schedule=None, horizon=20
        )
        trace = simulate_run(scn, 0, record_params=True)
        assert trace.params_a.shape == (21, 4, 3)
        for t in (0, 5, 20):
            for i in range(1, 4):
                np.testing.assert_array_equal(
                    trace.params_a[t, i], trace.params_a[t, 0]
                )


class TestRunScenario:
    def test_aggregates_mean_and_stderr(self):
        scn = bernoulli_scenario(horizon=30, n_runs=5)
        result = run_scenario(scn, keep_traces=True)
        curves = np.stack([tr.regret for tr in result.traces])
        np.testing.assert_allclose(result.mean_regret, curves.mean(axis=0))
        np.testing.assert_allclose(
            result.stderr_regret, curves.std(axis=0, ddof=1) / np.sqrt(5)
        )
        assert result.n_runs == 5
        assert result.final_mean == result.mean_regret[-1]

    def test_single_run_has_zero_stderr(self):
        result = run_scenario(bernoulli_scenario(horizon=10))
        np.testing.assert_array_equal(result.stderr_regret, np.zeros(10))

    def test_parallel_matches_serial(self):
        scn = bernoulli_scenario(horizon=40, n_runs=4)
        serial = run_scenario(scn, n_jobs=1)
        parallel = run_scenario(scn, n_jobs=2)
        np.testing.assert_array_equal(serial.mean_regret, parallel.mean_regret)
        np.testing.assert_array_equal(serial.stderr_regret, parallel.stderr_regret)
        assert serial.mean_messages == parallel.mean_messages

    def test_traces_dropped_by_default(self):
        assert run_scenario(bernoulli_scenario(horizon=5)).traces is None


class TestCsvOutput:
    def make_result(self):
        return AggregateResult(
            rounds=np.array([1, 2, 3]),
            mean_regret=np.array([0.25, 0.5, 1.0 / 3.0]),
            stderr_regret=np.array([0.0, 0.125, 0.1]),
            n_runs=2,
            mean_messages=12.0,
        )

    def test_regret_csv_format(self, tmp_path):
        path = tmp_path / "curve.csv"
        write_regret_csv(path, self.make_result())
        text = path.read_text()
        lines = text.splitlines()
        assert lines[0] == "round,mean_regret,stderr_regret"
        assert lines[1] == "1,0.25,0.0"
        assert lines[3] == f"3,{1.0 / 3.0!r},0.1"
        assert text.endswith("\n")

    def test_regret_csv_is_reproducible(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_regret_csv(a, self.make_result())
        write_regret_csv(b, self.make_result())
        assert a.read_bytes() == b.read_bytes()

    def test_creates_parent_directories(self, tmp_path):
        path = tmp_path / "deep" / "nested" / "curve.csv"
        write_regret_csv(path, self.make_result())
        assert path.exists()

    def test_no_leftover_temp_files(self, tmp_path):
        path = tmp_path / "curve.csv"
        write_regret_csv(path, self.make_result())
        assert os.listdir(tmp_path) == ["curve.csv"]

    def test_per_run_csv(self, tmp_path):
        scn = bernoulli_scenario(horizon=3, n_runs=2)
        result = run_scenario(scn, keep_traces=True)
        path = tmp_path / "runs.csv"
        write_per_run_csv(path, result)
        lines = path.read_text().splitlines()
        assert lines[0] == "run,round,regret"
        assert len(lines) == 1 + 2 * 3
        assert lines[1].startswith("0,1,")
        assert lines[4].startswith("1,1,")

    def test_per_run_csv_needs_traces(self, tmp_path):
        with pytest.raises(ValueError, match="keep_traces"):
            write_per_run_csv(tmp_path / "x.csv", self.make_result())

    def test_stats_sidecar(self, tmp_path):
        scn = bernoulli_scenario(horizon=5, n_runs=2)
        result = run_scenario(scn)
        path = tmp_path / "curve.stats"
        write_stats_sidecar(path, scn, result)
        pairs = dict(
            line.split("=", 1) for line in path.read_text().splitlines()
        )
        assert pairs["family"] == "bernoulli"
        assert pairs["n_arms"] == "3"
        assert pairs["n_agents"] == "4"
        assert pairs["policy"] == "dec_thompson"
        assert pairs["eta"] == "4.0"
        assert pairs["horizon"] == "5"
        assert pairs["n_runs"] == "2"
        assert pairs["master_seed"] == "123"
        assert pairs["regret_mode"] == "pseudo"
        assert float(pairs["final_mean_regret"]) == result.final_mean
        assert float(pairs["mean_messages_per_run"]) == result.mean_messages
