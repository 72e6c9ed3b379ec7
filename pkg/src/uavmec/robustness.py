"""Positional jitter of the UAV and the speed chance constraint.

The realized position of the UAV in each slot is its planned position plus an
isotropic Gaussian offset. The displacement between two slots therefore
carries the difference of two independent offsets, whose per-axis variance is
twice the jitter variance.
"""

from dataclasses import dataclass

import numpy
from scipy.stats import chi2, ncx2

from uavmec.exceptions import ConfigException, DomainException

# Draws per chunk in the Monte Carlo estimate.
_MC_CHUNK = 100000


@dataclass(frozen=True)
class JitterModel:
    """Isotropic Gaussian jitter of the UAV position.

    **Attributes:**

    Attributes:
        sigma (float): Standard deviation of each axis in m.
        dims (int): Number of axes, always 3.
    """

    sigma: float = 1.0
    dims: int = 3

    def __post_init__(self):
        if not self.sigma >= 0:
            raise ConfigException(
                f"Jitter sigma must not be negative, got {self.sigma}."
            )
        if self.dims != 3:
            raise ConfigException(f"Jitter must be three dimensional, got {self.dims}.")


@dataclass(frozen=True)
class ChanceSpec:
    """Tolerated probability of breaking the speed limit in a slot."""

    rho_trj: float = 0.1

    def __post_init__(self):
        if not 0 < self.rho_trj < 1:
            raise ConfigException(f"rho_trj must be in (0, 1), got {self.rho_trj}.")


def sample_jitter(model, rng):
    """
    Args:
        model (JitterModel): The jitter model.
        rng (numpy.random.Generator): The random generator to draw from.

    Returns:
        numpy.ndarray: A 3D offset in m with independent N(0, sigma^2) axes.
    """
    return model.sigma * rng.standard_normal(model.dims)


def _check_inputs(planned_disp, limit):
    disp = numpy.asarray(planned_disp, dtype=float)
    if disp.shape != (3,):
        raise DomainException(f"Planned displacement must have 3 entries, got {disp}.")
    if not numpy.all(numpy.isfinite(disp)) or not numpy.isfinite(limit):
        raise DomainException("Displacement and limit must be finite.")
    if limit <= 0:
        raise DomainException(f"Speed limit distance must be positive, got {limit}.")
    return disp


def speed_violation_probability(planned_disp, model, limit):
    """Probability that the realized displacement exceeds the limit.

    The realized displacement is the planned one plus Gaussian noise with
    per-axis variance 2*sigma^2, so its squared norm scaled by that variance
    follows a noncentral chi-square law with three degrees of freedom.

    Args:
        planned_disp (array-like): Planned 3D displacement in m.
        model (JitterModel): The jitter model.
        limit (float): The largest allowed displacement, v_max * delta, in m.

    Returns:
        float: The violation probability.

    Raises:
        DomainException: if an input is not finite or the limit not positive.

    >>> speed_violation_probability([10.0, 0.0, 0.0], JitterModel(0.0), 30.0)
    0.0
    """
    disp = _check_inputs(planned_disp, limit)
    distance_sq = float(disp @ disp)
    if model.sigma == 0:
        return float(distance_sq > limit**2)
    variance = 2 * model.sigma**2
    threshold = limit**2 / variance
    noncentrality = distance_sq / variance
    if noncentrality == 0:
        return float(chi2.sf(threshold, model.dims))
    return float(ncx2.sf(threshold, model.dims, noncentrality))


def mc_violation_probability(planned_disp, model, limit, n_samples, rng):
    """Monte Carlo estimate of speed_violation_probability.

    Each sample draws the jitter of both slot endpoints independently.

    Args:
        planned_disp (array-like): Planned 3D displacement in m.
        model (JitterModel): The jitter model.
        limit (float): The largest allowed displacement in m.
        n_samples (int): The number of samples, at least 1.
        rng (numpy.random.Generator): The random generator to draw from.

    Returns:
        float: The fraction of samples that broke the limit.

    Raises:
        DomainException: if n_samples is less than 1.
    """
    disp = _check_inputs(planned_disp, limit)
    if n_samples < 1:
        raise DomainException(f"Need at least one sample, got {n_samples}.")
    if model.sigma == 0:
        return float(disp @ disp > limit**2)
    violations = 0
    remaining = int(n_samples)
    while remaining:
        size = min(remaining, _MC_CHUNK)
        start = rng.standard_normal((size, model.dims))
        end = rng.standard_normal((size, model.dims))
        realized = disp + model.sigma * (end - start)
        outside = numpy.sum(realized**2, axis=1) > limit**2
        violations += int(numpy.count_nonzero(outside))
        remaining -= size
    return violations / n_samples


def chance_satisfied(prob_violation, spec):
    """
    Args:
        prob_violation (float): Probability of breaking the speed limit.
        spec (ChanceSpec): The tolerated probability.

    Returns:
        bool: True if the probability is within the tolerance (inclusive).

    Raises:
        DomainException: if prob_violation is not in [0, 1].

    >>> chance_satisfied(0.1, ChanceSpec(0.1))
    True
    """
    if not 0 <= prob_violation <= 1:
        raise DomainException(
            f"Violation probability must be in [0, 1], got {prob_violation}."
        )
    return bool(prob_violation <= spec.rho_trj)
