from unittest import mock

import numpy
import pytest
from constants import N_SLOTS, SLOT_LEN, USER_POSITIONS
from testfixtures import LogCapture

from uavmec.channel import link_rate
from uavmec.environment import (
    Environment,
    Region,
    SlotState,
    TaskInstance,
    TaskRanges,
    WorldConfig,
    place_users,
    sample_tasks,
)
from uavmec.exceptions import ConfigException, DomainException
from uavmec.mdp import DecisionVector


def make_decision(displacement=(0.0, 0.0, 0.0), alpha=(0.5, 0.5), f_alloc=(1e9, 1e9)):
    return DecisionVector(
        displacement=numpy.array(displacement, dtype=float),
        alpha=numpy.array(alpha, dtype=float),
        gamma=numpy.array([0.8, 0.8]),
        f_alloc=numpy.array(f_alloc, dtype=float),
    )


def test_Region_properties(region):
    assert region.max_step == pytest.approx(30.0)
    assert region.lower.tolist() == [0.0, 0.0, 100.0]
    assert region.upper.tolist() == [500.0, 500.0, 200.0]
    assert region.contains([0.0, 500.0, 100.0])
    assert not region.contains([0.0, 500.0, 99.0])
    assert region.clamp([-1.0, 250.0, 300.0]).tolist() == [0.0, 250.0, 200.0]


@pytest.mark.parametrize(
    "changes", [{"x_min": 500.0}, {"h_max": 50.0}, {"v_max": 0.0}, {"n_slots": 0}]
)
def test_Region_raises_ConfigException(changes):
    with pytest.raises(ConfigException):
        Region(**changes)


@pytest.mark.parametrize("changes", [{"data_min": 0.0}, {"density_max": 500.0}])
def test_TaskRanges_raises_ConfigException(changes):
    with pytest.raises(ConfigException):
        TaskRanges(**changes)


@pytest.mark.parametrize(
    "args", [(-1.0, 800.0, 1.5), (1e6, 0.0, 1.5), (1e6, 800.0, 0.0)]
)
def test_TaskInstance_raises_DomainException(args):
    with pytest.raises(DomainException):
        TaskInstance(*args)


def test_place_users(region, rng):
    users = place_users(20, region, rng)
    assert users.shape == (20, 3)
    assert numpy.all(users[:, 2] == 0.0)
    assert numpy.all((users[:, :2] >= 0.0) & (users[:, :2] <= 500.0))


def test_place_users_depends_only_on_the_stream(region):
    first = place_users(5, region, numpy.random.default_rng(3))
    second = place_users(5, region, numpy.random.default_rng(3))
    numpy.testing.assert_equal(first, second)


@pytest.mark.parametrize(
    "changes",
    [
        {"user_positions": numpy.zeros((0, 3))},
        {"user_positions": numpy.zeros((2, 2))},
        {"start_pos": numpy.array([0.0, 0.0, 50.0])},
    ],
)
def test_WorldConfig_raises_ConfigException(changes):
    kwargs = {"user_positions": USER_POSITIONS}
    kwargs.update(changes)
    with pytest.raises(ConfigException):
        WorldConfig(**kwargs)


def test_WorldConfig_replace(world):
    changed = world.replace(region=Region(n_slots=7))
    assert changed.region.n_slots == 7
    assert world.region.n_slots == N_SLOTS
    assert changed.n_users == 2


def test_sample_tasks(world, rng):
    tasks = sample_tasks(rng, world)
    assert len(tasks) == 2
    for task in tasks:
        assert 1e6 <= task.data_bits <= 2.5e6
        assert 700.0 <= task.density <= 1000.0
        assert task.t_max == SLOT_LEN


def test_sample_tasks_is_uniform_on_average(world, rng):
    tasks = [task for _ in range(5000) for task in sample_tasks(rng, world)]
    assert numpy.mean([t.data_bits for t in tasks]) == pytest.approx(1.75e6, rel=0.01)
    assert numpy.mean([t.density for t in tasks]) == pytest.approx(850.0, rel=0.01)


def test_sample_tasks_with_a_single_value(world, rng):
    fixed = world.replace(tasks=TaskRanges(2e6, 2e6, 900.0, 900.0))
    for task in sample_tasks(rng, fixed):
        assert task.data_bits == 2e6
        assert task.density == 900.0


def test_reset_without_jitter(still_env, rng):
    state = still_env.reset(rng)
    assert state.slot_index == 1
    assert state.battery == still_env.config.flight.e_uav_max
    assert state.e_uav_cum == 0.0
    assert state.n_users == 2
    numpy.testing.assert_equal(state.planned_pos, [0.0, 0.0, 150.0])
    numpy.testing.assert_equal(state.realized_pos, state.planned_pos)


def test_reset_with_jitter(env, rng):
    state = env.reset(rng)
    numpy.testing.assert_equal(state.planned_pos, [0.0, 0.0, 150.0])
    assert not numpy.array_equal(state.realized_pos, state.planned_pos)


def test_step_hovering(still_env, start_state, rng):
    next_state, costs = still_env.step(start_state, make_decision(), rng)
    flight = still_env.config.flight
    assert next_state.slot_index == 2
    numpy.testing.assert_equal(next_state.planned_pos, start_state.planned_pos)
    numpy.testing.assert_equal(next_state.realized_pos, start_state.planned_pos)
    assert costs.e_fly == pytest.approx(SLOT_LEN * (flight.p0 + flight.p1))
    assert costs.prob_violation == 0.0
    assert not costs.speed_violated
    assert not costs.infeasible.any()
    assert next_state.battery == pytest.approx(flight.e_uav_max - costs.e_uav_slot)
    assert next_state.e_uav_cum == pytest.approx(costs.e_uav_slot)
    assert numpy.all(costs.t_total > 0)


def test_step_clamps_the_plan_to_the_region(still_env, start_state, rng):
    next_state, costs = still_env.step(
        start_state, make_decision(displacement=(-10.0, -10.0, 100.0)), rng
    )
    numpy.testing.assert_equal(next_state.planned_pos, [0.0, 0.0, 200.0])
    assert costs.prob_violation == 1.0
    assert costs.speed_violated


def test_step_flags_infeasible_users_and_logs(still_env, start_state, rng):
    decision = make_decision(alpha=(0.0, 1.0), f_alloc=(0.0, 0.0))
    with LogCapture() as log:
        _, costs = still_env.step(start_state, decision, rng)
    log.check(
        (
            "root",
            "WARNING",
            "Slot 1, user 0: 800000000.0 cycles left on the UAV with no CPU allocated.",
        )
    )
    assert costs.infeasible.tolist() == [True, False]
    assert costs.t_uav_comp.tolist() == [0.0, 0.0]


def test_step_flags_users_whose_link_has_no_length(still_world, start_state, rng):
    env = Environment(still_world.replace(bs_pos=still_world.start_pos.copy()))
    with LogCapture() as log:
        next_state, costs = env.step(start_state, make_decision(), rng)
    log.check(
        ("root", "WARNING", "Slot 1, user 0: Link distance is zero."),
        ("root", "WARNING", "Slot 1, user 1: Link distance is zero."),
    )
    assert costs.infeasible.tolist() == [True, True]
    assert next_state.slot_index == 2


def test_step_evaluates_links_at_the_realized_position(env, rng):
    state = env.reset(rng)
    with mock.patch("uavmec.environment.link_rate", wraps=link_rate) as rate:
        next_state, _ = env.step(state, make_decision(), rng)
    assert rate.call_count == 4
    for call in rate.call_args_list:
        args = call[0]
        assert next_state.realized_pos.tolist() in (
            numpy.asarray(args[0]).tolist(),
            numpy.asarray(args[1]).tolist(),
        )
        assert args[4] == next_state.realized_pos[2]


def test_step_raises_DomainException_on_a_terminal_state(still_env, start_state, rng):
    state = SlotState(
        planned_pos=start_state.planned_pos,
        realized_pos=start_state.realized_pos,
        battery=1.0,
        tasks=start_state.tasks,
        slot_index=N_SLOTS + 1,
    )
    assert still_env.is_terminal(state)
    with pytest.raises(DomainException):
        still_env.step(state, make_decision(), rng)


def test_episode_ends_after_n_slots(env, rng):
    state = env.reset(rng)
    for _ in range(N_SLOTS):
        assert not env.is_terminal(state)
        state, _ = env.step(state, make_decision(), rng)
    assert env.is_terminal(state)
    assert state.slot_index == N_SLOTS + 1


def test_battery_is_floored_at_zero(still_env, start_state, rng):
    start_state.battery = 1.0
    next_state, costs = still_env.step(start_state, make_decision(), rng)
    assert costs.e_uav_slot > 1.0
    assert next_state.battery == 0.0


def test_Environment_str(env):
    assert str(env) == f"Environment with 2 users over {N_SLOTS} slots"


def test_environment_is_seeded_by_the_caller(world):
    first = Environment(world).reset(numpy.random.default_rng(4))
    second = Environment(world).reset(numpy.random.default_rng(4))
    numpy.testing.assert_equal(first.realized_pos, second.realized_pos)
    assert first.tasks == second.tasks
