"""Randomised ensembled double Q-learning (REDQ) with a tanh-Gaussian actor.

The X critics are trained as one batched ensemble. Every environment step
past warm-up runs G critic rounds, each against a shared target that takes
the minimum over a fresh random subset of Y target critics, then one actor
update and one entropy-weight update.
"""

import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy

import uavmec
from uavmec.exceptions import CheckpointException, ConfigException, DomainException
from uavmec.mdp import (
    action_dim,
    action_slices,
    encode_state,
    observation_dim,
    play_slot,
    summarise,
)
from uavmec.neural import (
    AdamState,
    MlpSpec,
    ParamSet,
    adam_step,
    backward,
    flatten,
    forward,
    init_params,
    load_checkpoint,
    save_checkpoint,
    soft_update,
    squashed_gaussian,
    squashed_gradients,
    unflatten,
)
from uavmec.robustness import JitterModel

METRICS_COLUMNS = (
    "step",
    "episode",
    "reward",
    "e_sum",
    "outage_frac",
    "p_t",
    "p_e",
    "p_dq",
    "alpha_ent",
    "critic_loss",
    "actor_loss",
    "skipped_updates",
    "scheme",
    "seed",
)


@dataclass(frozen=True)
class AgentConfig:
    """Settings of the learner.

    **Attributes:**

    Attributes:
        ensemble_size (int): Number of critics X.
        subset_size (int): Critics in the target minimum Y.
        utd_ratio (int): Critic update rounds per environment step G.
        discount (float): Discount factor.
        batch_size (int): Mini-batch size.
        replay_capacity (int): Replay buffer capacity.
        lr_actor, lr_critic, lr_entropy (float): Adam learning rates.
        tau (float): Weight of the old target in soft updates.
        entropy_target (float): Target policy entropy.
        initial_entropy_weight (float): Starting entropy weight.
        warmup_steps (int): Uniform random steps before learning starts.
        hidden (tuple): Hidden widths of the actor and critics.
        log_std_min, log_std_max (float): Clamp of the policy log std.
        adam_beta1, adam_beta2, adam_eps (float): Adam settings.
        reward_scale (float): Factor on rewards stored for learning.
    """

    ensemble_size: int = 10
    subset_size: int = 2
    utd_ratio: int = 20
    discount: float = 0.9
    batch_size: int = 256
    replay_capacity: int = 20000
    lr_actor: float = 1e-4
    lr_critic: float = 1e-3
    lr_entropy: float = 3e-4
    tau: float = 0.995
    entropy_target: float = -48.0
    initial_entropy_weight: float = 0.01
    warmup_steps: int = 1000
    hidden: Tuple[int, ...] = (128, 128)
    log_std_min: float = -20.0
    log_std_max: float = 2.0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    reward_scale: float = 1.0

    def __post_init__(self):
        if not 1 <= self.subset_size <= self.ensemble_size:
            raise ConfigException(
                f"subset_size ({self.subset_size}) must be in [1, ensemble_size "
                f"({self.ensemble_size})]."
            )
        if self.utd_ratio < 1 or self.batch_size < 1 or self.replay_capacity < 1:
            raise ConfigException(
                "utd_ratio, batch_size and replay_capacity must be at least 1."
            )
        if not 0 <= self.discount <= 1:
            raise ConfigException(f"discount must be in [0, 1], got {self.discount}.")
        if not 0 <= self.tau <= 1:
            raise ConfigException(f"tau must be in [0, 1], got {self.tau}.")
        if min(self.lr_actor, self.lr_critic, self.lr_entropy) <= 0:
            raise ConfigException("Learning rates must be positive.")
        if self.initial_entropy_weight <= 0:
            raise ConfigException("initial_entropy_weight must be positive.")
        if self.warmup_steps < 0:
            raise ConfigException(
                f"warmup_steps must not be negative, got {self.warmup_steps}."
            )
        if not self.log_std_min < self.log_std_max:
            raise ConfigException("log_std_min must be below log_std_max.")
        if not self.hidden or min(self.hidden) < 1:
            raise ConfigException(
                f"Hidden widths must be at least 1, got {self.hidden}."
            )

    def adam_settings(self):
        return dict(beta1=self.adam_beta1, beta2=self.adam_beta2, eps=self.adam_eps)


class Batch(NamedTuple):
    obs: numpy.ndarray
    actions: numpy.ndarray
    rewards: numpy.ndarray
    next_obs: numpy.ndarray
    dones: numpy.ndarray


class ReplayBuffer:
    """Fixed-capacity ring buffer of transitions, sampled uniformly.

    **Attributes:**

    Attributes:
        capacity (int): The most transitions held; older ones are overwritten.
        reward_scale (float): Factor applied to rewards as they are stored.
    """

    def __init__(self, obs_dim, act_dim, capacity, reward_scale=1.0):
        """
        Args:
            obs_dim (int): Observation width.
            act_dim (int): Raw action width.
            capacity (int): The most transitions held.
            reward_scale (float): Factor applied to stored rewards.

        **Methods:**
        """
        self.capacity = capacity
        self.reward_scale = reward_scale
        self._obs = numpy.zeros((capacity, obs_dim))
        self._actions = numpy.zeros((capacity, act_dim))
        self._rewards = numpy.zeros(capacity)
        self._next_obs = numpy.zeros((capacity, obs_dim))
        self._dones = numpy.zeros(capacity)
        self._next = 0
        self._size = 0

    def __len__(self):
        return self._size

    def add(self, transition):
        if not numpy.isfinite(transition.reward):
            raise DomainException(f"Reward must be finite, got {transition.reward}.")
        i = self._next
        self._obs[i] = transition.obs
        self._actions[i] = transition.raw_action
        self._rewards[i] = self.reward_scale * transition.reward
        self._next_obs[i] = transition.next_obs
        self._dones[i] = float(transition.done)
        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample_indices(self, batch_size, rng):
        if self._size == 0:
            raise DomainException("Cannot sample from an empty replay buffer.")
        return rng.integers(0, self._size, size=batch_size)

    def sample(self, batch_size, rng):
        """Draw a mini-batch uniformly, with replacement."""
        idx = self.sample_indices(batch_size, rng)
        return Batch(
            self._obs[idx],
            self._actions[idx],
            self._rewards[idx],
            self._next_obs[idx],
            self._dones[idx],
        )


class CriticEnsemble:
    """X online critics and their X targets, each stored as one batched set."""

    def __init__(self, online):
        self.online = online
        self.target = online.copy()

    @property
    def size(self):
        return self.online.ensemble_size


class ActorOutput(NamedTuple):
    mean: numpy.ndarray
    log_std: numpy.ndarray
    clip_mask: numpy.ndarray
    cache: object


def actor_head(actor, obs, log_std_min, log_std_max):
    """Run the actor and split its output into mean and clamped log std."""
    out, cache = forward(actor, obs)
    act_dim = out.shape[-1] // 2
    raw_log_std = out[..., act_dim:]
    log_std = numpy.clip(raw_log_std, log_std_min, log_std_max)
    mask = (raw_log_std >= log_std_min) & (raw_log_std <= log_std_max)
    return ActorOutput(out[..., :act_dim], log_std, mask, cache)


def critic_input(obs, tanh_action):
    """Critics see the observation and the action mapped to [0, 1]."""
    return numpy.concatenate([obs, (tanh_action + 1.0) / 2.0], axis=-1)


def compute_target(batch, subset, critics, actor, alpha_ent, discount, rng, config):
    """Shared regression target of one critic round.

    Args:
        batch (Batch): The mini-batch.
        subset (array-like): Indices of the target critics in the minimum.
        critics (CriticEnsemble): The critics.
        actor (ParamSet): The actor, sampled at the next observations.
        alpha_ent (float): The entropy weight.
        discount (float): The discount factor.
        rng (numpy.random.Generator): The random stream.
        config (AgentConfig): Supplies the log std clamp.

    Returns:
        numpy.ndarray: One target per sample.

    Raises:
        DomainException: if the subset is empty.
    """
    subset = numpy.asarray(subset, dtype=int)
    if subset.size == 0:
        raise DomainException("The target critic subset is empty.")
    head = actor_head(actor, batch.next_obs, config.log_std_min, config.log_std_max)
    sample = squashed_gaussian(
        head.mean, head.log_std, rng.standard_normal(head.mean.shape)
    )
    q_next, _ = forward(
        critics.target.select(subset), critic_input(batch.next_obs, sample.action)
    )
    soft_value = q_next[..., 0].min(axis=0) - alpha_ent * sample.log_prob
    return batch.rewards + discount * (1.0 - batch.dones) * soft_value


def critic_loss_and_grads(batch, y, online):
    """Sum over critics of their mean squared error to y, and its gradient.

    Each critic's parameters only enter its own term, so one step on the sum
    is one step of every critic on its own loss.

    Returns:
        tuple: (summed loss, ParamSet of gradients).
    """
    q, cache = forward(online, numpy.concatenate([batch.obs, batch.actions], axis=-1))
    error = q[..., 0] - y
    loss = float(numpy.sum(numpy.mean(error**2, axis=-1)))
    grads, _ = backward(online, cache, (2.0 / y.shape[0]) * error[..., None])
    return loss, grads


def update_critics(batch, y, critics, optimizer, tau):
    """One Adam step of every online critic towards the same targets, then a
    soft update of every target critic.

    Returns:
        float: The mean over critics of their squared error, before the step.
    """
    loss, grads = critic_loss_and_grads(batch, y, critics.online)
    loss /= critics.size
    if not numpy.isfinite(loss):
        optimizer.skipped += 1
        logging.warning(f"Skipped critic update: loss is {loss}.")
        return loss
    adam_step(optimizer, critics.online, grads)
    soft_update(critics.target, critics.online, tau)
    return loss


def actor_loss_and_grads(batch_obs, critics, actor, alpha_ent, noise, config):
    """Soft actor loss and its gradient for fixed reparameterisation noise.

    The loss is mean_b[alpha * log pi(a|s) - mean_i Q_i(s, a)].

    Returns:
        tuple: (loss, ParamSet of actor gradients, log-probabilities).
    """
    head = actor_head(actor, batch_obs, config.log_std_min, config.log_std_max)
    sample = squashed_gaussian(head.mean, head.log_std, noise)
    obs_dim = batch_obs.shape[-1]
    q, q_cache = forward(critics.online, critic_input(batch_obs, sample.action))
    n_critics, n_samples = q.shape[0], q.shape[1]
    loss = float(numpy.mean(alpha_ent * sample.log_prob - q[..., 0].mean(axis=0)))
    grad_q = numpy.full(q.shape, -1.0 / (n_critics * n_samples))
    _, input_grad = backward(critics.online, q_cache, grad_q)
    action_grad = 0.5 * input_grad[..., obs_dim:]
    log_prob_grad = numpy.full(n_samples, alpha_ent / n_samples)
    mean_grad, log_std_grad = squashed_gradients(sample, action_grad, log_prob_grad)
    log_std_grad = log_std_grad * head.clip_mask
    head_grad = numpy.concatenate([mean_grad, log_std_grad], axis=-1)
    grads, _ = backward(actor, head.cache, head_grad)
    return loss, grads, sample.log_prob


def update_actor(batch, critics, actor, alpha_ent, optimizer, rng, config):
    """One Adam step of the actor on the ensemble-mean soft objective.

    Returns:
        tuple: (loss, log-probabilities of the reparameterised samples).
    """
    n_actions = actor.spec.output_dim // 2
    noise = rng.standard_normal((batch.obs.shape[0], n_actions))
    loss, grads, log_prob = actor_loss_and_grads(
        batch.obs, critics, actor, alpha_ent, noise, config
    )
    if not numpy.isfinite(loss):
        optimizer.skipped += 1
        logging.warning(f"Skipped actor update: loss is {loss}.")
        return loss, log_prob
    adam_step(optimizer, actor, grads)
    return loss, log_prob


def update_entropy_weight(log_probs, log_alpha, entropy_target, optimizer):
    """One Adam step on L = mean[-alpha * (log pi + target entropy)] in log
    space, so the weight stays positive.

    Args:
        log_probs (numpy.ndarray): Log-probabilities of policy samples.
        log_alpha (numpy.ndarray): One-element array, updated in place.
        entropy_target (float): The target entropy.
        optimizer (AdamState): Optimiser of log_alpha.

    Returns:
        float: The new entropy weight.
    """
    alpha = float(numpy.exp(log_alpha[0]))
    grad = -alpha * float(numpy.mean(log_probs + entropy_target))
    adam_step(optimizer, [log_alpha], [numpy.array([grad])])
    return float(numpy.exp(log_alpha[0]))


class UpdateStats(NamedTuple):
    critic_loss: float
    actor_loss: float
    alpha_ent: float


class RedqAgent:
    """A REDQ learner: actor, critic ensemble, entropy weight and replay.

    **Attributes:**

    Attributes:
        config (AgentConfig): The learner settings.
        obs_dim (int): Observation width.
        act_dim (int): Raw action width.
        actor (ParamSet): Actor parameters, outputs mean and log std.
        critics (CriticEnsemble): The online and target critics.
        buffer (ReplayBuffer): The replay memory.
        env_steps (int): Transitions observed so far.
        critic_updates (int): Critic rounds applied so far.
        actor_updates (int): Actor updates applied so far.
        entropy_updates (int): Entropy-weight updates applied so far.
    """

    def __init__(self, obs_dim, act_dim, config, rng):
        """
        Args:
            obs_dim (int): Observation width.
            act_dim (int): Raw action width.
            config (AgentConfig): The learner settings.
            rng (numpy.random.Generator): Stream for the initial parameters.

        **Methods:**
        """
        self.config = config
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        self.actor = init_params(MlpSpec(obs_dim, config.hidden, 2 * act_dim), rng)
        self.critics = CriticEnsemble(
            init_params(
                MlpSpec(obs_dim + act_dim, config.hidden, 1), rng, config.ensemble_size
            )
        )
        self.log_alpha = numpy.array([numpy.log(config.initial_entropy_weight)])
        adam = config.adam_settings()
        self.actor_opt = AdamState.for_params(self.actor, config.lr_actor, **adam)
        self.critic_opt = AdamState.for_params(
            self.critics.online, config.lr_critic, **adam
        )
        self.alpha_opt = AdamState.for_params(
            [self.log_alpha], config.lr_entropy, **adam
        )
        self.buffer = ReplayBuffer(
            obs_dim, act_dim, config.replay_capacity, config.reward_scale
        )
        self.env_steps = 0
        self.critic_updates = 0
        self.actor_updates = 0
        self.entropy_updates = 0

    def __str__(self):
        return (
            f"RedqAgent with {self.config.ensemble_size} critics, "
            f"{self.env_steps} steps observed"
        )

    @property
    def alpha(self):
        """float: The entropy weight."""
        return float(numpy.exp(self.log_alpha[0]))

    @property
    def skipped_updates(self):
        """int: Optimiser steps skipped for non-finite values."""
        return self.actor_opt.skipped + self.critic_opt.skipped + self.alpha_opt.skipped

    @property
    def warming_up(self):
        return self.env_steps < self.config.warmup_steps

    def act(self, obs, mode, rng):
        """Choose a raw action in [0, 1] for one observation.

        Args:
            obs (numpy.ndarray): The observation.
            mode (str): uavmec.EXPLORE samples (uniformly during warm-up),
                        uavmec.EXPLOIT returns the squashed mean.
            rng (numpy.random.Generator): The random stream.

        Returns:
            numpy.ndarray: The raw action, of length act_dim.
        """
        if mode == uavmec.EXPLORE and self.warming_up:
            return rng.uniform(0.0, 1.0, size=self.act_dim)
        head = actor_head(
            self.actor,
            numpy.asarray(obs, dtype=float)[None, :],
            self.config.log_std_min,
            self.config.log_std_max,
        )
        if mode == uavmec.EXPLOIT:
            noise = numpy.zeros_like(head.mean)
        elif mode == uavmec.EXPLORE:
            noise = rng.standard_normal(head.mean.shape)
        else:
            raise DomainException(f"Unknown action mode {mode}.")
        sample = squashed_gaussian(head.mean, head.log_std, noise)
        return numpy.clip((sample.action[0] + 1.0) / 2.0, 0.0, 1.0)

    def observe(self, transition):
        self.buffer.add(transition)
        self.env_steps += 1

    def update(self, rng) -> Optional[UpdateStats]:
        """Run the learning work of one environment step.

        Nothing happens until more than warmup_steps transitions have been
        observed.

        Returns:
            UpdateStats: mean critic loss, actor loss and entropy weight, or
            None during warm-up.
        """
        if self.env_steps <= self.config.warmup_steps:
            return None
        config = self.config
        critic_losses = []
        for _ in range(config.utd_ratio):
            batch = self.buffer.sample(config.batch_size, rng)
            subset = rng.choice(
                config.ensemble_size, size=config.subset_size, replace=False
            )
            y = compute_target(
                batch,
                subset,
                self.critics,
                self.actor,
                self.alpha,
                config.discount,
                rng,
                config,
            )
            critic_losses.append(
                update_critics(batch, y, self.critics, self.critic_opt, config.tau)
            )
            self.critic_updates += 1
        batch = self.buffer.sample(config.batch_size, rng)
        actor_loss, log_probs = update_actor(
            batch, self.critics, self.actor, self.alpha, self.actor_opt, rng, config
        )
        self.actor_updates += 1
        update_entropy_weight(
            log_probs, self.log_alpha, config.entropy_target, self.alpha_opt
        )
        self.entropy_updates += 1
        return UpdateStats(float(numpy.mean(critic_losses)), actor_loss, self.alpha)

    def save(self, filepath, **header):
        """Write the actor, critics and entropy weight to a checkpoint."""
        full_header = {
            "obs_dim": self.obs_dim,
            "act_dim": self.act_dim,
            "hidden": list(self.config.hidden),
            "ensemble_size": self.config.ensemble_size,
            "alpha_ent": self.alpha,
            "log_alpha": float(self.log_alpha[0]),
            "env_steps": self.env_steps,
        }
        full_header.update(header)
        arrays = flatten("actor", self.actor)
        arrays.update(flatten("critic", self.critics.online))
        arrays.update(flatten("target", self.critics.target))
        return save_checkpoint(filepath, full_header, arrays)

    @classmethod
    def load(cls, filepath, config, obs_dim, act_dim, rng, scheme=None):
        """Restore an agent saved with `save`.

        Args:
            scheme (str): If given, the scheme the checkpoint must have been
                          trained for.

        Raises:
            CheckpointException: if the checkpoint does not fit the dimensions,
                                 the network settings or the scheme.
        """
        header, arrays = load_checkpoint(filepath)
        expected = {
            "obs_dim": obs_dim,
            "act_dim": act_dim,
            "hidden": list(config.hidden),
            "ensemble_size": config.ensemble_size,
        }
        if scheme is not None:
            expected["scheme"] = scheme
        for key, value in expected.items():
            if header.get(key) != value:
                raise CheckpointException(
                    f"Checkpoint {key} is {header.get(key)}, the config needs {value}."
                )
        agent = cls(obs_dim, act_dim, config, rng)
        agent.actor = unflatten("actor", agent.actor.spec, arrays)
        online = unflatten("critic", agent.critics.online.spec, arrays)
        agent.critics.online = online
        agent.critics.target = unflatten("target", online.spec, arrays)
        agent.log_alpha[0] = header["log_alpha"]
        agent.env_steps = int(header.get("env_steps", 0))
        adam = config.adam_settings()
        agent.actor_opt = AdamState.for_params(agent.actor, config.lr_actor, **adam)
        agent.critic_opt = AdamState.for_params(online, config.lr_critic, **adam)
        return agent


def scheme_world(world, scheme):
    """The world a scheme is trained and evaluated in."""
    if scheme == uavmec.CONVENTIONAL:
        return world.replace(jitter=JitterModel(0.0))
    return world


def apply_scheme(raw, scheme, n_users, rng, evaluating):
    """Override parts of a raw action as a scheme requires.

    no_compression pins every compression entry to 1 (gamma = 1), and
    random_move draws the movement triple uniformly at evaluation.
    """
    raw = numpy.array(raw, dtype=float)
    blocks = action_slices(n_users)
    if scheme == uavmec.NO_COMPRESSION:
        raw[blocks["gamma"]] = 1.0
    elif scheme == uavmec.RANDOM_MOVE and evaluating:
        raw[blocks["move"]] = rng.uniform(0.0, 1.0, size=3)
    return raw


def baseline_policy(kind, agent, n_users):
    """Evaluation policy of a baseline scheme.

    Args:
        kind (str): uavmec.RANDOM_MOVE or uavmec.UNTREATED.
        agent (RedqAgent): The trained agent supplying the other actions.
        n_users (int): The number of users.

    Returns:
        callable: Maps (observation, rng) to a raw action.

    Raises:
        DomainException: if the kind is not a baseline.
    """
    if kind not in (uavmec.RANDOM_MOVE, uavmec.UNTREATED):
        raise DomainException(f"{kind} is not a baseline scheme.")

    def policy(obs, rng):
        raw = agent.act(obs, uavmec.EXPLOIT, rng)
        return apply_scheme(raw, kind, n_users, rng, evaluating=True)

    return policy


def scheme_policy(scheme, agent, n_users):
    """Deterministic evaluation policy of any scheme."""
    if scheme in (uavmec.RANDOM_MOVE, uavmec.UNTREATED):
        return baseline_policy(scheme, agent, n_users)

    def policy(obs, rng):
        raw = agent.act(obs, uavmec.EXPLOIT, rng)
        return apply_scheme(raw, scheme, n_users, rng, evaluating=True)

    return policy


def training_scheme(scheme):
    """The scheme whose agent is trained for a given evaluation scheme."""
    return uavmec.PROPOSED if scheme == uavmec.RANDOM_MOVE else scheme


def train(
    env, agent_config, run_config, rng, scheme=uavmec.PROPOSED, on_episode=None
) -> Tuple[RedqAgent, List[dict]]:
    """Train an agent for a number of environment steps.

    Args:
        env (Environment): The training environment.
        agent_config (AgentConfig): The learner settings.
        run_config (RunConfig): Supplies total_steps and the seed.
        rng (numpy.random.Generator): Stream for the agent and the environment.
        scheme (str): Scheme being trained; untreated drops the speed penalty
                      and no_compression pins gamma to 1.
        on_episode (callable): Called with each metrics row as soon as its
                               episode ends.

    Returns:
        tuple: (RedqAgent, one metrics row per finished episode).
    """
    n_users = env.n_users
    agent = RedqAgent(observation_dim(n_users), action_dim(n_users), agent_config, rng)
    treat_jitter = scheme != uavmec.UNTREATED
    rows: List[dict] = []
    outcomes = []
    critic_losses: List[float] = []
    actor_losses: List[float] = []
    state = env.reset(rng)
    for step in range(1, run_config.total_steps + 1):
        raw = agent.act(encode_state(state, env.config), uavmec.EXPLORE, rng)
        raw = apply_scheme(raw, scheme, n_users, rng, evaluating=False)
        outcome = play_slot(env, state, raw, rng, treat_jitter)
        agent.observe(outcome.transition)
        stats = agent.update(rng)
        if stats is not None:
            critic_losses.append(stats.critic_loss)
            actor_losses.append(stats.actor_loss)
        outcomes.append(outcome)
        state = outcome.next_state
        if outcome.transition.done:
            summary = summarise(outcomes, env.config.chance.rho_trj, state.battery)
            rows.append(
                {
                    "step": step,
                    "episode": len(rows) + 1,
                    "reward": summary.total_reward,
                    "e_sum": summary.objective,
                    "outage_frac": summary.outage_frac,
                    "p_t": summary.p_t,
                    "p_e": summary.p_e,
                    "p_dq": summary.p_dq,
                    "alpha_ent": agent.alpha,
                    "critic_loss": _mean_or_nan(critic_losses),
                    "actor_loss": _mean_or_nan(actor_losses),
                    "skipped_updates": agent.skipped_updates,
                    "scheme": scheme,
                    "seed": run_config.seed,
                }
            )
            if on_episode is not None:
                on_episode(rows[-1])
            logging.info(
                f"{scheme} episode {len(rows)} (step {step}): reward "
                f"{summary.total_reward:.6g}, energy {summary.objective:.6g} J"
            )
            outcomes, critic_losses, actor_losses = [], [], []
            state = env.reset(rng)
    if outcomes:
        logging.warning(
            f"Training ended {len(outcomes)} of {env.n_slots} slots into "
            f"episode {len(rows) + 1}; that episode has no metrics row."
        )
    return agent, rows


def _mean_or_nan(values):
    return float(numpy.mean(values)) if values else float("nan")
