"""Slot-by-slot simulation of one UAV serving K ground users.

The UAV flies inside a box, collects (optionally compressed) tasks from the
users, computes part of each task itself and relays the rest to a base
station. Positions are jittered, so the physics is evaluated at realized
positions while the controller only sets the planned trajectory.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Tuple

import numpy

from uavmec.channel import RadioParams, link_rate
from uavmec.costs import (
    ComputeParams,
    CostBreakdown,
    FlightParams,
    empty_parts,
    flight_energy,
    uav_side_costs,
    user_side_costs,
)
from uavmec.exceptions import (
    ConfigException,
    DomainException,
    InfeasibleAllocationException,
    InfeasibleLinkException,
)
from uavmec.robustness import (
    ChanceSpec,
    JitterModel,
    sample_jitter,
    speed_violation_probability,
)
from uavmec.utils import norm


@dataclass(frozen=True)
class Region:
    """The flight box, the speed limit and the slot grid.

    **Attributes:**

    Attributes:
        x_min, x_max, y_min, y_max (float): Horizontal limits in m.
        h_min, h_max (float): Altitude limits in m.
        v_max (float): Maximum flight speed in m/s.
        slot_len (float): Slot duration delta in s.
        n_slots (int): Slots per episode N.
    """

    x_min: float = 0.0
    x_max: float = 500.0
    y_min: float = 0.0
    y_max: float = 500.0
    h_min: float = 100.0
    h_max: float = 200.0
    v_max: float = 20.0
    slot_len: float = 1.5
    n_slots: int = 50

    def __post_init__(self):
        for axis in ("x", "y", "h"):
            lower = getattr(self, f"{axis}_min")
            upper = getattr(self, f"{axis}_max")
            if not lower < upper:
                raise ConfigException(
                    f"{axis}_min ({lower}) must be below {axis}_max ({upper})."
                )
        if self.v_max <= 0 or self.slot_len <= 0:
            raise ConfigException("v_max and slot_len must be positive.")
        if self.n_slots < 1:
            raise ConfigException(f"n_slots must be at least 1, got {self.n_slots}.")

    @property
    def lower(self):
        """numpy.ndarray: The lowest corner of the box."""
        return numpy.array([self.x_min, self.y_min, self.h_min])

    @property
    def upper(self):
        """numpy.ndarray: The highest corner of the box."""
        return numpy.array([self.x_max, self.y_max, self.h_max])

    @property
    def max_step(self):
        """float: The largest displacement allowed in one slot, in m."""
        return self.v_max * self.slot_len

    def clamp(self, position):
        """Project a position onto the box.

        >>> Region().clamp([600.0, -5.0, 150.0]).tolist()
        [500.0, 0.0, 150.0]
        """
        return numpy.clip(numpy.asarray(position, dtype=float), self.lower, self.upper)

    def contains(self, position):
        position = numpy.asarray(position, dtype=float)
        inside = (position >= self.lower) & (position <= self.upper)
        return bool(numpy.all(inside))


@dataclass(frozen=True)
class TaskRanges:
    """Uniform ranges tasks are drawn from."""

    data_min: float = 1e6
    data_max: float = 2.5e6
    density_min: float = 700.0
    density_max: float = 1000.0

    def __post_init__(self):
        if not 0 < self.data_min <= self.data_max:
            raise ConfigException(
                f"Task size range [{self.data_min}, {self.data_max}] is not valid."
            )
        if not 0 < self.density_min <= self.density_max:
            raise ConfigException(
                f"Task density range [{self.density_min}, {self.density_max}] is "
                "not valid."
            )


@dataclass(frozen=True)
class TaskInstance:
    """The task a user generates at the start of a slot.

    **Attributes:**

    Attributes:
        data_bits (float): Task size D in bits.
        density (float): CPU cycles per bit C.
        t_max (float): Deadline in s.
    """

    data_bits: float
    density: float
    t_max: float

    def __post_init__(self):
        if self.data_bits < 0 or self.density <= 0 or self.t_max <= 0:
            raise DomainException(
                f"Invalid task (D={self.data_bits}, C={self.density}, "
                f"t_max={self.t_max})."
            )


@dataclass(eq=False)
class SlotState:
    """The state of the system at the start of a slot.

    **Attributes:**

    Attributes:
        planned_pos (numpy.ndarray): Planned UAV position in m.
        realized_pos (numpy.ndarray): Planned position plus jitter, in m.
        battery (float): Remaining UAV energy in J, floored at 0.
        tasks (tuple): One TaskInstance per user.
        slot_index (int): The slot n, from 1; N + 1 marks the end of an episode.
        e_uav_cum (float): UAV energy spent so far in the episode, in J.
    """

    planned_pos: numpy.ndarray
    realized_pos: numpy.ndarray
    battery: float
    tasks: Tuple[TaskInstance, ...]
    slot_index: int = 1
    e_uav_cum: float = 0.0

    @property
    def n_users(self):
        return len(self.tasks)

    def to_record(self):
        """Return a JSON-ready dict of the UAV part of the state."""
        return {
            "slot": self.slot_index,
            "planned": self.planned_pos.tolist(),
            "realized": self.realized_pos.tolist(),
            "battery": self.battery,
            "e_uav_cum": self.e_uav_cum,
        }


def place_users(n_users, region, rng):
    """Draw ground positions for the users, uniformly over the horizontal box.

    Args:
        n_users (int): The number of users.
        region (Region): The flight box.
        rng (numpy.random.Generator): The layout random stream.

    Returns:
        numpy.ndarray: A (n_users, 3) array with z = 0.
    """
    xs = rng.uniform(region.x_min, region.x_max, size=n_users)
    ys = rng.uniform(region.y_min, region.y_max, size=n_users)
    return numpy.column_stack([xs, ys, numpy.zeros(n_users)])


@dataclass(frozen=True, eq=False)
class WorldConfig:
    """Every physical parameter of a simulated world.

    **Attributes:**

    Attributes:
        user_positions (numpy.ndarray): (K, 3) ground positions of the users.
        radio (RadioParams): Radio model parameters.
        compute (ComputeParams): CPU and compression parameters.
        flight (FlightParams): Propulsion parameters and energy budget.
        region (Region): Flight box and slot grid.
        tasks (TaskRanges): Ranges tasks are drawn from.
        jitter (JitterModel): UAV position jitter.
        chance (ChanceSpec): Tolerated speed violation probability.
        start_pos (numpy.ndarray): UAV position at the start of an episode.
        bs_pos (numpy.ndarray): Base station position.
    """

    user_positions: numpy.ndarray
    radio: RadioParams = field(default_factory=RadioParams)
    compute: ComputeParams = field(default_factory=ComputeParams)
    flight: FlightParams = field(default_factory=FlightParams)
    region: Region = field(default_factory=Region)
    tasks: TaskRanges = field(default_factory=TaskRanges)
    jitter: JitterModel = field(default_factory=JitterModel)
    chance: ChanceSpec = field(default_factory=ChanceSpec)
    start_pos: numpy.ndarray = field(
        default_factory=lambda: numpy.array([0.0, 0.0, 150.0])
    )
    bs_pos: numpy.ndarray = field(
        default_factory=lambda: numpy.array([500.0, 500.0, 0.0])
    )

    def __post_init__(self):
        users = numpy.asarray(self.user_positions, dtype=float)
        if users.ndim != 2 or users.shape[0] < 1 or users.shape[1] != 3:
            raise ConfigException(
                f"User positions must be a (K, 3) array with K >= 1, got {users.shape}."
            )
        object.__setattr__(self, "user_positions", users)
        start_pos = numpy.asarray(self.start_pos, dtype=float)
        object.__setattr__(self, "start_pos", start_pos)
        object.__setattr__(self, "bs_pos", numpy.asarray(self.bs_pos, dtype=float))
        if not self.region.contains(self.start_pos):
            raise ConfigException(
                f"Start position {self.start_pos} is outside the region."
            )

    @property
    def n_users(self):
        return self.user_positions.shape[0]

    def replace(self, **changes):
        """Return a copy with some parameter groups replaced."""
        return replace(self, **changes)


def sample_tasks(rng, config):
    """Draw one task per user for a new slot.

    Task sizes for every user are drawn first, then densities.

    Args:
        rng (numpy.random.Generator): The random stream.
        config (WorldConfig): The world.

    Returns:
        tuple: One TaskInstance per user, with the slot length as deadline.
    """
    ranges = config.tasks
    data = rng.uniform(ranges.data_min, ranges.data_max, size=config.n_users)
    density = rng.uniform(ranges.density_min, ranges.density_max, size=config.n_users)
    t_max = config.region.slot_len
    return tuple(
        TaskInstance(float(d), float(c), t_max) for d, c in zip(data, density)
    )


class Environment:
    """The UAV-assisted MEC system, stepped one slot at a time.

    The environment holds no episode state itself; `reset` and `step` take
    and return SlotState objects, and every random draw comes from the
    generator the caller passes in.

    **Attributes:**

    Attributes:
        config (WorldConfig): The simulated world.
    """

    def __init__(self, config):
        """
        Args:
            config (WorldConfig): The simulated world.

        **Methods:**
        """
        self.config = config

    def __str__(self):
        return f"Environment with {self.n_users} users over {self.n_slots} slots"

    @property
    def n_users(self):
        return self.config.n_users

    @property
    def n_slots(self):
        return self.config.region.n_slots

    def is_terminal(self, state):
        """bool: Whether every slot of the episode has been played."""
        return state.slot_index > self.n_slots

    def reset(self, rng):
        """Start an episode at the start position with a full battery.

        Args:
            rng (numpy.random.Generator): The random stream.

        Returns:
            SlotState: The state of slot 1.
        """
        planned = self.config.start_pos.copy()
        realized = planned + sample_jitter(self.config.jitter, rng)
        return SlotState(
            planned_pos=planned,
            realized_pos=realized,
            battery=self.config.flight.e_uav_max,
            tasks=sample_tasks(rng, self.config),
        )

    def step(self, state, decision, rng):
        """Play one slot.

        Infeasible links or allocations, including a link whose ends
        coincide, do not raise: the affected users are flagged in the
        returned breakdown and their unevaluated terms are 0.

        Args:
            state (SlotState): The state at the start of the slot.
            decision (DecisionVector): Displacement, offload ratios, compression
                                       ratios and CPU allocations.
            rng (numpy.random.Generator): The random stream.

        Returns:
            tuple: (SlotState, CostBreakdown) for the next slot and this one.

        Raises:
            DomainException: if the state is terminal.
        """
        if self.is_terminal(state):
            raise DomainException(
                f"Slot {state.slot_index} is past the last slot ({self.n_slots})."
            )
        config = self.config
        region = config.region
        planned = region.clamp(state.planned_pos + numpy.asarray(decision.displacement))
        planned_disp = planned - state.planned_pos
        realized = planned + sample_jitter(config.jitter, rng)
        realized_disp = realized - state.realized_pos

        parts = empty_parts(self.n_users)
        infeasible = [False] * self.n_users
        bandwidth = config.radio.user_bandwidth(self.n_users)
        height = realized[2]
        for k, task in enumerate(state.tasks):
            try:
                rate_up = link_rate(
                    config.user_positions[k],
                    realized,
                    config.radio.p_user,
                    bandwidth,
                    height,
                    config.radio,
                )
                user_terms = user_side_costs(
                    task, decision.gamma[k], rate_up, config.compute, config.radio
                )
                for name, value in zip(("t_lr", "e_lr", "t_off", "e_off"), user_terms):
                    parts[name][k] = value
                rate_down = link_rate(
                    realized,
                    config.bs_pos,
                    config.radio.p_uav,
                    bandwidth,
                    height,
                    config.radio,
                )
                uav_terms = uav_side_costs(
                    task,
                    decision.gamma[k],
                    decision.alpha[k],
                    decision.f_alloc[k],
                    rate_down,
                    config.compute,
                    config.radio,
                )
                names = ("t_relay", "e_relay", "t_uav_comp", "e_uav_comp", "t_bs_comp")
                for name, value in zip(names, uav_terms):
                    parts[name][k] = value
            except (
                InfeasibleLinkException,
                InfeasibleAllocationException,
                DomainException,
            ) as exc:
                infeasible[k] = True
                logging.warning(f"Slot {state.slot_index}, user {k}: {exc}")

        costs = CostBreakdown.from_parts(
            parts,
            infeasible,
            flight_energy(realized_disp, region.slot_len, config.flight),
            prob_violation=speed_violation_probability(
                planned_disp, config.jitter, region.max_step
            ),
            speed_violated=norm(realized_disp) > region.max_step,
        )
        next_state = SlotState(
            planned_pos=planned,
            realized_pos=realized,
            battery=max(0.0, state.battery - costs.e_uav_slot),
            tasks=sample_tasks(rng, config),
            slot_index=state.slot_index + 1,
            e_uav_cum=state.e_uav_cum + costs.e_uav_slot,
        )
        return next_state, costs
