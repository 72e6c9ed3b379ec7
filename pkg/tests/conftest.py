import numpy
import pytest
from constants import DATA_BITS, DENSITY, N_SLOTS, SEED, SLOT_LEN, USER_POSITIONS

from uavmec.channel import RadioParams
from uavmec.environment import (
    Environment,
    Region,
    SlotState,
    TaskInstance,
    WorldConfig,
)
from uavmec.load_csv import default_config
from uavmec.robustness import JitterModel


@pytest.fixture
def rng():
    return numpy.random.default_rng(SEED)


@pytest.fixture
def radio():
    return RadioParams()


@pytest.fixture
def region():
    return Region(slot_len=SLOT_LEN, n_slots=N_SLOTS)


@pytest.fixture
def world(region):
    return WorldConfig(user_positions=USER_POSITIONS.copy(), region=region)


@pytest.fixture
def still_world(world):
    """A world without jitter."""
    return world.replace(jitter=JitterModel(0.0))


@pytest.fixture
def env(world):
    return Environment(world)


@pytest.fixture
def still_env(still_world):
    return Environment(still_world)


@pytest.fixture
def task():
    return TaskInstance(DATA_BITS, DENSITY, SLOT_LEN)


@pytest.fixture
def start_state(still_world, task):
    """Slot 1 of the still world with known tasks."""
    return SlotState(
        planned_pos=still_world.start_pos.copy(),
        realized_pos=still_world.start_pos.copy(),
        battery=still_world.flight.e_uav_max,
        tasks=(task, task),
    )


@pytest.fixture
def tiny_config(tmp_path):
    """Desk settings shrunk so that a whole train and eval run is instant."""
    return default_config(
        "desk",
        n_users=2,
        n_slots=3,
        total_steps=12,
        eval_episodes=2,
        hidden="8",
        ensemble_size=3,
        subset_size=2,
        utd_ratio=2,
        batch_size=4,
        warmup_steps=4,
        replay_capacity=100,
        sigma_sweep="0.5",
        users_sweep="1,2",
        task_size_sweep="1.0-1.5",
        out_dir=str(tmp_path / "runs"),
    )


@pytest.fixture
def tiny_config_file(tiny_config, tmp_path):
    directory = tmp_path / "settings"
    directory.mkdir()
    return tiny_config.snapshot(directory)
