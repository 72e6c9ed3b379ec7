"""Self-checks of the physics, the chance constraint, the gradients and the
REDQ bookkeeping, run by ``uavmec validate``.
"""

import logging
from typing import List, NamedTuple

import numpy

from uavmec.agent import (
    AgentConfig,
    Batch,
    CriticEnsemble,
    actor_loss_and_grads,
    compute_target,
    critic_loss_and_grads,
    train,
)
from uavmec.channel import RadioParams, link_rate
from uavmec.costs import (
    CostBreakdown,
    FlightParams,
    compression_density,
    propulsion_power,
)
from uavmec.environment import Environment, Region, WorldConfig
from uavmec.load_csv import RunConfig
from uavmec.neural import (
    MlpSpec,
    finite_difference_gradient,
    forward,
    init_params,
    relative_error,
)
from uavmec.robustness import (
    JitterModel,
    mc_violation_probability,
    speed_violation_probability,
)

PHYSICS = "physics"
CHANCE = "chance"
GRADIENTS = "gradients"
REDQ = "redq"
SUITES = (PHYSICS, CHANCE, GRADIENTS, REDQ)

CHANCE_TOLERANCE = 3e-3
GRADIENT_TOLERANCE = 1e-4
# Gradients smaller than this are compared in absolute terms.
GRADIENT_FLOOR = 1e-5


class CheckResult(NamedTuple):
    suite: str
    name: str
    passed: bool
    value: float
    threshold: float


def physics_checks(rng, n_vectors=10000):
    """Closed-form identities of the cost model."""
    results = []
    flight = FlightParams()
    hover = propulsion_power(0.0, 0.0, flight)
    error = abs(hover - (flight.p0 + flight.p1)) / (flight.p0 + flight.p1)
    results.append(CheckResult(PHYSICS, "hover power", error <= 1e-9, error, 1e-9))
    j_one = compression_density(1.0, 2.0)
    results.append(CheckResult(PHYSICS, "J(1) = 0", j_one == 0.0, j_one, 0.0))
    radio = RadioParams()
    rate = link_rate([0, 0, 0], [0, 0, 150.0], 0.0, 2e6, 150.0, radio)
    results.append(CheckResult(PHYSICS, "rate at zero power", rate == 0.0, rate, 0.0))

    names = CostBreakdown.PER_USER[:9]
    parts = {name: rng.uniform(0.0, 10.0, size=(n_vectors, 3)) for name in names}
    e_fly = rng.uniform(0.0, 500.0, size=n_vectors)
    worst = 0.0
    for i in range(n_vectors):
        costs = CostBreakdown.from_parts(
            {name: parts[name][i] for name in names}, [False] * 3, e_fly[i]
        )
        t_total = (
            parts["t_lr"][i]
            + parts["t_off"][i]
            + numpy.maximum(
                parts["t_uav_comp"][i], parts["t_relay"][i] + parts["t_bs_comp"][i]
            )
        )
        e_user = parts["e_lr"][i] + parts["e_off"][i]
        e_uav = numpy.sum(parts["e_relay"][i] + parts["e_uav_comp"][i]) + e_fly[i]
        worst = max(
            worst,
            relative_error(costs.t_total, t_total, 1e-300),
            relative_error(costs.e_user, e_user, 1e-300),
            relative_error(costs.e_uav_slot, e_uav, 1e-300),
        )
    results.append(
        CheckResult(PHYSICS, "aggregation identities", worst <= 1e-12, worst, 1e-12)
    )
    return results


def chance_checks(rng, n_samples=10**6, limit=30.0):
    """Analytic violation probability against Monte Carlo over a grid."""
    worst = 0.0
    for fraction in (0.0, 0.5, 0.9, 1.1):
        for sigma in (0.5, 1.0, 2.0):
            model = JitterModel(sigma)
            disp = [fraction * limit, 0.0, 0.0]
            analytic = speed_violation_probability(disp, model, limit)
            estimate = mc_violation_probability(disp, model, limit, n_samples, rng)
            worst = max(worst, abs(analytic - estimate))
    return [
        CheckResult(
            CHANCE,
            "analytic vs Monte Carlo",
            worst <= CHANCE_TOLERANCE,
            worst,
            CHANCE_TOLERANCE,
        )
    ]


def _small_problem(rng, obs_dim=3, act_dim=2, batch_size=6, ensemble=2):
    hidden = (16, 16)
    config = AgentConfig(
        ensemble_size=ensemble,
        subset_size=ensemble,
        hidden=hidden,
        entropy_target=-act_dim,
    )
    actor = init_params(MlpSpec(obs_dim, hidden, 2 * act_dim), rng)
    critic_spec = MlpSpec(obs_dim + act_dim, hidden, 1)
    critics = CriticEnsemble(init_params(critic_spec, rng, ensemble))
    batch = Batch(
        obs=rng.uniform(size=(batch_size, obs_dim)),
        actions=rng.uniform(size=(batch_size, act_dim)),
        rewards=rng.normal(size=batch_size),
        next_obs=rng.uniform(size=(batch_size, obs_dim)),
        dones=numpy.zeros(batch_size),
    )
    return config, actor, critics, batch


def gradient_checks(rng):
    """Hand-written gradients of both losses against central differences."""
    config, actor, critics, batch = _small_problem(rng)
    y = rng.normal(size=batch.rewards.shape)

    _, critic_grads = critic_loss_and_grads(batch, y, critics.online)
    numeric = finite_difference_gradient(
        lambda: critic_loss_and_grads(batch, y, critics.online)[0],
        critics.online.arrays(),
    )
    critic_error = max(
        relative_error(a, n, GRADIENT_FLOOR)
        for a, n in zip(critic_grads.arrays(), numeric)
    )

    alpha_ent = 0.2
    noise = rng.standard_normal((batch.obs.shape[0], actor.spec.output_dim // 2))

    def actor_loss():
        return actor_loss_and_grads(batch.obs, critics, actor, alpha_ent, noise, config)

    _, actor_grads, _ = actor_loss()
    numeric = finite_difference_gradient(lambda: actor_loss()[0], actor.arrays())
    actor_error = max(
        relative_error(a, n, GRADIENT_FLOOR)
        for a, n in zip(actor_grads.arrays(), numeric)
    )
    return [
        CheckResult(
            GRADIENTS,
            "critic loss gradient",
            critic_error <= GRADIENT_TOLERANCE,
            critic_error,
            GRADIENT_TOLERANCE,
        ),
        CheckResult(
            GRADIENTS,
            "actor loss gradient",
            actor_error <= GRADIENT_TOLERANCE,
            actor_error,
            GRADIENT_TOLERANCE,
        ),
    ]


def _tiny_environment():
    region = Region(n_slots=5)
    users = numpy.array([[250.0, 250.0, 0.0]])
    return Environment(WorldConfig(user_positions=users, region=region))


def redq_checks(rng, steps=500, utd_ratio=20):
    """Target, subset and update-count properties of the learner."""
    results = []
    config, actor, critics, batch = _small_problem(rng, ensemble=4)
    y = compute_target(batch, [0, 1], critics, actor, 0.3, 0.0, rng, config)
    error = float(numpy.max(numpy.abs(y - batch.rewards)))
    results.append(CheckResult(REDQ, "zero discount target", error == 0.0, error, 0.0))

    head_obs = batch.next_obs
    worst_gap = 0.0
    for _ in range(50):
        subset = rng.choice(4, size=2, replace=False)
        actions = rng.uniform(size=batch.actions.shape)
        x = numpy.concatenate([head_obs, actions], axis=-1)
        q_all, _ = forward(critics.target, x)
        q_subset, _ = forward(critics.target.select(subset), x)
        gap = q_subset[..., 0].min(axis=0) - q_all[..., 0].min(axis=0)
        worst_gap = min(worst_gap, float(gap.min()))
    results.append(
        CheckResult(REDQ, "subset minimum bound", worst_gap >= 0.0, worst_gap, 0.0)
    )

    env = _tiny_environment()
    warmup = 20
    agent_config = AgentConfig(
        ensemble_size=4,
        subset_size=2,
        utd_ratio=utd_ratio,
        batch_size=8,
        hidden=(8,),
        warmup_steps=warmup,
        entropy_target=-6.0,
    )
    run_config = RunConfig(total_steps=warmup + steps, user_count=1)
    agent, _ = train(env, agent_config, run_config, rng)
    expected = (steps * utd_ratio, steps, steps)
    counted = (agent.critic_updates, agent.actor_updates, agent.entropy_updates)
    results.append(
        CheckResult(
            REDQ,
            "update accounting",
            counted == expected,
            float(counted[0]),
            float(expected[0]),
        )
    )
    results.append(
        CheckResult(REDQ, "entropy weight positive", agent.alpha > 0, agent.alpha, 0.0)
    )
    return results


def run_all(seed=0, suites=SUITES) -> List[CheckResult]:
    """Run the requested suites with a fixed seed.

    Returns:
        list: every CheckResult, in suite order.
    """
    rng = numpy.random.default_rng(seed)
    checks = {
        PHYSICS: physics_checks,
        CHANCE: chance_checks,
        GRADIENTS: gradient_checks,
        REDQ: redq_checks,
    }
    results: List[CheckResult] = []
    for suite in suites:
        logging.info(f"Running {suite} checks.")
        results.extend(checks[suite](rng))
    return results


def format_report(results):
    """Render check results as a fixed-width table."""
    lines = [f"{'suite':<10} {'check':<26} {'value':>12} {'threshold':>12}  result"]
    for result in results:
        verdict = "PASS" if result.passed else "FAIL"
        lines.append(
            f"{result.suite:<10} {result.name:<26} {result.value:>12.4g} "
            f"{result.threshold:>12.4g}  {verdict}"
        )
    return "\n".join(lines)
