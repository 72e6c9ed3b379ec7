"""The decision process seen by a learning agent.

Observations and raw actions live in the unit box. An observation has 2K + 4
entries: the planned UAV position (3), the battery (1), then the task sizes
and densities of the K users. A raw action has 3K + 3 entries laid out in
blocks: K offloading ratios, K compression entries, K CPU weights and the
movement triple (azimuth, polar cosine, radius).
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, NamedTuple

import numpy

from uavmec.exceptions import DomainException
from uavmec.units import AffineConv


def observation_dim(n_users):
    """
    >>> observation_dim(15)
    34
    """
    return 2 * n_users + 4


def action_dim(n_users):
    """
    >>> action_dim(15)
    48
    """
    return 3 * n_users + 3


def action_slices(n_users) -> Dict[str, slice]:
    """The blocks of a raw action, by name."""
    k = n_users
    return {
        "alpha": slice(0, k),
        "gamma": slice(k, 2 * k),
        "cpu": slice(2 * k, 3 * k),
        "move": slice(3 * k, 3 * k + 3),
    }


@dataclass(eq=False)
class DecisionVector:
    """The physical controls of one slot.

    **Attributes:**

    Attributes:
        displacement (numpy.ndarray): Planned 3D displacement in m.
        alpha (numpy.ndarray): Share of each task relayed to the BS.
        gamma (numpy.ndarray): Compression ratio of each task.
        f_alloc (numpy.ndarray): UAV CPU frequency given to each user in Hz.
    """

    displacement: numpy.ndarray
    alpha: numpy.ndarray
    gamma: numpy.ndarray
    f_alloc: numpy.ndarray

    def to_record(self):
        return {
            "displacement": self.displacement.tolist(),
            "alpha": self.alpha.tolist(),
            "gamma": self.gamma.tolist(),
            "f_alloc": self.f_alloc.tolist(),
        }


@dataclass
class RewardTerms:
    """The reward of a slot and the multipliers it is made of."""

    e_sum: float
    p_t: float
    p_e: float
    p_dq: float
    reward: float
    e_uav_cum: float

    def to_record(self):
        return dict(vars(self))


class Transition(NamedTuple):
    obs: numpy.ndarray
    raw_action: numpy.ndarray
    reward: float
    next_obs: numpy.ndarray
    done: bool


def encode_state(state, config):
    """Scale a slot state into the unit box.

    Every component is clamped to its physical range before scaling.

    Args:
        state (SlotState): The state to encode.
        config (WorldConfig): The world, which supplies the ranges.

    Returns:
        numpy.ndarray: The observation, of length 2K + 4.
    """
    region = config.region
    ranges = config.tasks
    position = [
        AffineConv(region.x_min, region.x_max, "x").to_unit(state.planned_pos[0]),
        AffineConv(region.y_min, region.y_max, "y").to_unit(state.planned_pos[1]),
        AffineConv(region.h_min, region.h_max, "h").to_unit(state.planned_pos[2]),
        AffineConv(0.0, config.flight.e_uav_max, "battery").to_unit(state.battery),
    ]
    data = AffineConv(ranges.data_min, ranges.data_max, "data").to_unit(
        numpy.array([task.data_bits for task in state.tasks])
    )
    density = AffineConv(ranges.density_min, ranges.density_max, "density").to_unit(
        numpy.array([task.density for task in state.tasks])
    )
    return numpy.concatenate([numpy.array(position, dtype=float), data, density])


def decode_action(raw, config):
    """Map a raw action in the unit box to physical controls.

    Args:
        raw (array-like): The raw action, of length 3K + 3.
        config (WorldConfig): The world.

    Returns:
        DecisionVector: the controls. The displacement never exceeds
        v_max * delta and the CPU allocations never exceed F_u,max in total.

    Raises:
        DomainException: if the action has the wrong length or leaves [0, 1].
    """
    raw = numpy.asarray(raw, dtype=float)
    n_users = config.n_users
    if raw.shape != (action_dim(n_users),):
        raise DomainException(
            f"Raw action must have {action_dim(n_users)} entries, "
            f"got shape {raw.shape}."
        )
    if not numpy.all(numpy.isfinite(raw)) or numpy.any((raw < 0) | (raw > 1)):
        raise DomainException(f"Raw action entries must be in [0, 1], got {raw}.")
    blocks = action_slices(n_users)
    gamma_conv = AffineConv(config.compute.gamma_min, 1.0, "gamma")
    gamma = gamma_conv.from_unit(raw[blocks["gamma"]])
    weights = raw[blocks["cpu"]]
    f_alloc = weights * config.compute.f_uav_max / max(1.0, float(numpy.sum(weights)))
    azimuth_raw, polar_raw, radius_raw = raw[blocks["move"]]
    azimuth = 2 * numpy.pi * azimuth_raw
    cos_polar = 2 * polar_raw - 1
    sin_polar = numpy.sqrt(max(0.0, 1 - cos_polar**2))
    radius = AffineConv(0.0, config.region.max_step, "radius").from_unit(radius_raw)
    displacement = radius * numpy.array(
        [sin_polar * numpy.cos(azimuth), sin_polar * numpy.sin(azimuth), cos_polar]
    )
    return DecisionVector(
        displacement=displacement,
        alpha=raw[blocks["alpha"]].copy(),
        gamma=numpy.atleast_1d(gamma),
        f_alloc=f_alloc,
    )


def penalty(x, a, b):
    """Penalty multiplier for a quantity x with threshold a and scale b.

    Returns 1 while x <= a and rises towards 2 beyond it.

    Raises:
        DomainException: if b is not positive.

    >>> penalty(1.0, 1.0, 1.0)
    1.0
    """
    if not b > 0:
        raise DomainException(f"Penalty scale must be positive, got {b}.")
    return float(2.0 - numpy.exp(-max((x - a) / b, 0.0)))


def reward(costs, state, prob_violation, config, treat_jitter=True):
    """The penalised reward of a slot.

    Args:
        costs (CostBreakdown): The costs of the slot.
        state (SlotState): The state the slot started from.
        prob_violation (float): Probability the planned move breaks the speed
                                limit.
        config (WorldConfig): The world.
        treat_jitter (bool): If False the speed penalty is fixed at 1.

    Returns:
        RewardTerms: the reward and its parts.
    """
    e_uav_cum = state.e_uav_cum + costs.e_uav_slot
    deadline_penalties = [
        2.0 if flagged else penalty(t_k, task.t_max, task.t_max)
        for t_k, task, flagged in zip(costs.t_total, state.tasks, costs.infeasible)
    ]
    p_t = float(numpy.mean(deadline_penalties))
    e_max = config.flight.e_uav_max
    p_e = penalty(e_uav_cum, e_max, e_max)
    rho = config.chance.rho_trj
    p_dq = penalty(prob_violation, rho, rho) if treat_jitter else 1.0
    e_sum = costs.e_sum
    return RewardTerms(
        e_sum=e_sum,
        p_t=p_t,
        p_e=p_e,
        p_dq=p_dq,
        reward=-e_sum * p_t * p_e * p_dq,
        e_uav_cum=e_uav_cum,
    )


class SlotOutcome(NamedTuple):
    transition: Transition
    next_state: object
    decision: DecisionVector
    costs: object
    terms: RewardTerms

    def to_record(self, state):
        record = state.to_record()
        record["planned"] = self.next_state.planned_pos.tolist()
        record["realized"] = self.next_state.realized_pos.tolist()
        record["battery"] = self.next_state.battery
        record["e_uav_cum"] = self.next_state.e_uav_cum
        record["decision"] = self.decision.to_record()
        record["costs"] = self.costs.to_record()
        record["reward"] = self.terms.to_record()
        return record


def play_slot(env, state, raw_action, rng, treat_jitter=True):
    """Decode a raw action, step the environment and score the slot.

    Args:
        env (Environment): The environment.
        state (SlotState): The current state.
        raw_action (array-like): The raw action in [0, 1].
        rng (numpy.random.Generator): The environment random stream.
        treat_jitter (bool): Whether the speed penalty counts in the reward.

    Returns:
        SlotOutcome: the transition and everything behind it.
    """
    raw_action = numpy.asarray(raw_action, dtype=float)
    decision = decode_action(raw_action, env.config)
    next_state, costs = env.step(state, decision, rng)
    terms = reward(costs, state, costs.prob_violation, env.config, treat_jitter)
    transition = Transition(
        obs=encode_state(state, env.config),
        raw_action=raw_action,
        reward=terms.reward,
        next_obs=encode_state(next_state, env.config),
        done=env.is_terminal(next_state),
    )
    return SlotOutcome(transition, next_state, decision, costs, terms)


@dataclass
class EpisodeSummary:
    """Aggregates of one episode.

    **Attributes:**

    Attributes:
        objective (float): Total user energy over the episode, in J.
        outage_frac (float): Fraction of slots whose violation probability
                             exceeded the tolerance.
        speed_violation_frac (float): Fraction of slots whose realized move
                                      broke the speed limit.
        final_battery (float): UAV energy left at the end, in J.
        total_reward (float): Sum of the slot rewards.
        slots (int): Number of slots played.
        p_t, p_e, p_dq (float): Mean penalty multipliers.
    """

    objective: float = 0.0
    outage_frac: float = 0.0
    speed_violation_frac: float = 0.0
    final_battery: float = 0.0
    total_reward: float = 0.0
    slots: int = 0
    p_t: float = 1.0
    p_e: float = 1.0
    p_dq: float = 1.0


@dataclass
class EpisodeResult:
    transitions: List[Transition] = field(default_factory=list)
    records: List[dict] = field(default_factory=list)
    summary: EpisodeSummary = field(default_factory=EpisodeSummary)


def summarise(outcomes, rho_trj, final_battery):
    """Aggregate the outcomes of the slots of an episode.

    Args:
        outcomes (list): The SlotOutcome of every slot.
        rho_trj (float): The tolerated violation probability.
        final_battery (float): The battery after the last slot.

    Returns:
        EpisodeSummary: the aggregates.
    """
    if not outcomes:
        return EpisodeSummary(final_battery=final_battery)
    terms = [outcome.terms for outcome in outcomes]
    costs = [outcome.costs for outcome in outcomes]
    return EpisodeSummary(
        objective=float(sum(term.e_sum for term in terms)),
        outage_frac=float(numpy.mean([c.prob_violation > rho_trj for c in costs])),
        speed_violation_frac=float(numpy.mean([c.speed_violated for c in costs])),
        final_battery=float(final_battery),
        total_reward=float(sum(term.reward for term in terms)),
        slots=len(outcomes),
        p_t=float(numpy.mean([term.p_t for term in terms])),
        p_e=float(numpy.mean([term.p_e for term in terms])),
        p_dq=float(numpy.mean([term.p_dq for term in terms])),
    )


def episode(env, policy, rng, treat_jitter=True):
    """Roll out one full episode.

    Args:
        env (Environment): The environment.
        policy (callable): Maps (observation, rng) to a raw action in [0, 1].
        rng (numpy.random.Generator): Stream for both the environment and the
                                      policy.
        treat_jitter (bool): Whether the speed penalty counts in the reward.

    Returns:
        EpisodeResult: the transitions, per-slot records and summary.
    """
    state = env.reset(rng)
    result = EpisodeResult()
    outcomes = []
    while not env.is_terminal(state):
        raw_action = policy(encode_state(state, env.config), rng)
        outcome = play_slot(env, state, raw_action, rng, treat_jitter)
        result.transitions.append(outcome.transition)
        result.records.append(outcome.to_record(state))
        outcomes.append(outcome)
        state = outcome.next_state
    result.summary = summarise(outcomes, env.config.chance.rho_trj, state.battery)
    return result


def dump_trajectory(records, filepath):
    """Write one JSON object per slot to a line-delimited file."""
    filepath = Path(filepath)
    with open(filepath, "w") as f:
        for record in records:
            f.write(json.dumps(record) + "\n")
    logging.info(f"Wrote {len(records)} slots to {filepath}.")
    return filepath


def load_trajectory(filepath):
    with open(filepath) as f:
        return [json.loads(line) for line in f if line.strip()]


def objective_from_records(records):
    """Total user energy recomputed from dumped slot records.

    The sum is rebuilt from the per-user compression and offloading energies,
    not from the stored reward terms.
    """
    total = 0.0
    for record in records:
        costs = record["costs"]
        total += float(numpy.sum(numpy.add(costs["e_lr"], costs["e_off"])))
    return total
