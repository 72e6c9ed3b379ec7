import numpy
import pytest
from constants import N_SLOTS

from uavmec.costs import CostBreakdown, empty_parts
from uavmec.exceptions import DomainException
from uavmec.mdp import (
    action_dim,
    action_slices,
    decode_action,
    dump_trajectory,
    encode_state,
    episode,
    load_trajectory,
    objective_from_records,
    observation_dim,
    penalty,
    play_slot,
    reward,
)


def uniform_policy(n_users):
    def policy(obs, rng):
        return rng.uniform(0.0, 1.0, size=action_dim(n_users))

    return policy


def make_costs(t_total, e_lr, infeasible=(False, False), e_fly=100.0):
    parts = empty_parts(2)
    parts["t_lr"] = list(t_total)
    parts["e_lr"] = list(e_lr)
    return CostBreakdown.from_parts(parts, list(infeasible), e_fly)


def test_dimensions():
    assert observation_dim(2) == 8
    assert action_dim(2) == 9


def test_action_slices_tile_the_action():
    slices = action_slices(4)
    covered = numpy.zeros(action_dim(4), dtype=int)
    for block in slices.values():
        covered[block] += 1
    assert covered.tolist() == [1] * action_dim(4)
    assert slices["move"] == slice(12, 15)


def test_encode_state_at_the_start(still_world, start_state):
    obs = encode_state(start_state, still_world)
    assert obs.shape == (observation_dim(2),)
    numpy.testing.assert_allclose(obs[:4], [0.0, 0.0, 0.5, 1.0])
    numpy.testing.assert_allclose(obs[4:6], [0.0, 0.0])
    numpy.testing.assert_allclose(obs[6:], [1 / 3, 1 / 3])


def test_encode_state_stays_in_the_unit_box(env, rng):
    state = env.reset(rng)
    state.battery = -5.0
    obs = encode_state(state, env.config)
    assert numpy.all((obs >= 0.0) & (obs <= 1.0))


def test_decode_action_at_zero(world):
    decision = decode_action(numpy.zeros(action_dim(2)), world)
    numpy.testing.assert_allclose(decision.displacement, [0.0, 0.0, 0.0])
    numpy.testing.assert_equal(decision.alpha, [0.0, 0.0])
    numpy.testing.assert_allclose(decision.gamma, [0.5, 0.5])
    numpy.testing.assert_equal(decision.f_alloc, [0.0, 0.0])


def test_decode_action_at_one(world):
    decision = decode_action(numpy.ones(action_dim(2)), world)
    numpy.testing.assert_allclose(decision.gamma, [1.0, 1.0])
    numpy.testing.assert_allclose(decision.alpha, [1.0, 1.0])
    numpy.testing.assert_allclose(decision.f_alloc, [15e9, 15e9])
    numpy.testing.assert_allclose(decision.displacement, [0.0, 0.0, 30.0], atol=1e-12)


def test_decode_action_keeps_cpu_weights_below_one(world):
    raw = numpy.zeros(action_dim(2))
    raw[action_slices(2)["cpu"]] = [0.25, 0.5]
    decision = decode_action(raw, world)
    numpy.testing.assert_allclose(decision.f_alloc, [7.5e9, 15e9])


def test_decode_action_respects_the_limits(world, rng):
    for _ in range(200):
        decision = decode_action(rng.uniform(size=action_dim(2)), world)
        assert numpy.linalg.norm(decision.displacement) <= 30.0 + 1e-9
        assert decision.f_alloc.sum() <= 30e9 * (1 + 1e-12)
        assert numpy.all((decision.gamma >= 0.5) & (decision.gamma <= 1.0))


@pytest.mark.parametrize(
    "raw",
    [
        numpy.zeros(8),
        numpy.full(9, 1.5),
        numpy.full(9, -0.01),
        numpy.full(9, numpy.nan),
    ],
)
def test_decode_action_raises_DomainException(world, raw):
    with pytest.raises(DomainException):
        decode_action(raw, world)


def test_penalty():
    assert penalty(0.5, 1.0, 1.0) == 1.0
    assert penalty(1.0, 1.0, 1.0) == 1.0
    assert penalty(2.0, 1.0, 1.0) == pytest.approx(2 - numpy.exp(-1))
    assert penalty(1e6, 1.0, 1.0) == pytest.approx(2.0)


def test_penalty_raises_DomainException_for_non_positive_scale():
    with pytest.raises(DomainException):
        penalty(1.0, 1.0, 0.0)


def test_reward_without_penalties(still_world, start_state):
    costs = make_costs([0.5, 1.0], [2.0, 3.0])
    terms = reward(costs, start_state, 0.05, still_world)
    assert (terms.p_t, terms.p_e, terms.p_dq) == (1.0, 1.0, 1.0)
    assert terms.e_sum == pytest.approx(5.0)
    assert terms.reward == pytest.approx(-5.0)
    assert terms.e_uav_cum == pytest.approx(100.0)


def test_reward_penalises_late_tasks_and_infeasible_users(still_world, start_state):
    late = penalty(3.0, 1.5, 1.5)
    costs = make_costs([3.0, 0.0], [1.0, 1.0], infeasible=(False, True))
    terms = reward(costs, start_state, 0.0, still_world)
    assert terms.p_t == pytest.approx((late + 2.0) / 2)
    assert terms.reward == pytest.approx(-2.0 * terms.p_t)


def test_reward_speed_penalty_is_dropped_when_untreated(still_world, start_state):
    costs = make_costs([0.5, 0.5], [1.0, 1.0])
    treated = reward(costs, start_state, 0.3, still_world)
    untreated = reward(costs, start_state, 0.3, still_world, treat_jitter=False)
    assert treated.p_dq == pytest.approx(2 - numpy.exp(-2))
    assert untreated.p_dq == 1.0
    assert untreated.reward > treated.reward


def test_reward_energy_penalty(still_world, start_state):
    start_state.e_uav_cum = 2 * still_world.flight.e_uav_max
    terms = reward(make_costs([0.5, 0.5], [1.0, 1.0]), start_state, 0.0, still_world)
    assert terms.p_e > 1.5


def test_play_slot(env, rng):
    state = env.reset(rng)
    outcome = play_slot(env, state, numpy.full(action_dim(2), 0.5), rng)
    transition = outcome.transition
    assert transition.obs.shape == (observation_dim(2),)
    assert transition.next_obs.shape == (observation_dim(2),)
    assert transition.reward == outcome.terms.reward
    assert transition.reward < 0
    assert not transition.done
    assert outcome.next_state.slot_index == 2


def test_episode(env, rng):
    result = episode(env, uniform_policy(2), rng)
    assert len(result.transitions) == N_SLOTS
    assert [t.done for t in result.transitions] == [False] * (N_SLOTS - 1) + [True]
    assert [r["slot"] for r in result.records] == list(range(1, N_SLOTS + 1))
    summary = result.summary
    assert summary.slots == N_SLOTS
    rewards = [t.reward for t in result.transitions]
    assert summary.total_reward == pytest.approx(sum(rewards))
    assert 0.0 <= summary.outage_frac <= 1.0
    assert summary.final_battery == result.records[-1]["battery"]


def test_objective_is_recomputed_from_dumped_records(env, rng, tmp_path):
    result = episode(env, uniform_policy(2), rng)
    filepath = dump_trajectory(result.records, tmp_path / "trajectory.jsonl")
    records = load_trajectory(filepath)
    assert len(records) == N_SLOTS
    assert objective_from_records(records) == result.summary.objective


def test_episode_is_reproducible(env):
    first = episode(env, uniform_policy(2), numpy.random.default_rng(9))
    second = episode(env, uniform_policy(2), numpy.random.default_rng(9))
    assert first.summary == second.summary
