"""Time and energy cost model of one slot: compression at the users, offloading
to the UAV, relaying to the BS, computing at the UAV and the BS, and the
propulsion power of the rotary-wing UAV.
"""

from dataclasses import dataclass
from typing import Dict, List

import numpy

from uavmec.exceptions import (
    ConfigException,
    DomainException,
    InfeasibleAllocationException,
    InfeasibleLinkException,
)


@dataclass(frozen=True)
class ComputeParams:
    """CPU and compression parameters.

    **Attributes:**

    Attributes:
        f_user (float): User CPU frequency F_k in Hz.
        f_uav_max (float): Total UAV CPU frequency in Hz.
        f_bs (float): BS CPU frequency given to each user in Hz.
        tau_user (float): Effective capacitance of the user CPUs.
        tau_uav (float): Effective capacitance of the UAV CPU.
        epsilon_comp (float): Constant of the compression algorithm.
        gamma_min (float): Minimum compression ratio.
    """

    f_user: float = 1.5e9
    f_uav_max: float = 30e9
    f_bs: float = 15e9
    tau_user: float = 1e-29
    tau_uav: float = 1e-29
    epsilon_comp: float = 2.0
    gamma_min: float = 0.5

    def __post_init__(self):
        if min(self.f_user, self.f_uav_max, self.f_bs) <= 0:
            raise ConfigException("CPU frequencies must be positive.")
        if min(self.tau_user, self.tau_uav) <= 0:
            raise ConfigException("Effective capacitances must be positive.")
        if self.epsilon_comp <= 0:
            raise ConfigException(
                f"Compression constant must be positive, got {self.epsilon_comp}."
            )
        if not 0 < self.gamma_min <= 1:
            raise ConfigException(
                f"Minimum compression ratio must be in (0, 1], got {self.gamma_min}."
            )


@dataclass(frozen=True)
class FlightParams:
    """Rotary-wing propulsion parameters and the UAV energy budget.

    **Attributes:**

    Attributes:
        p0 (float): Blade profile power in hover, W.
        p1 (float): Induced power in hover, W.
        p2 (float): Climb/descent power coefficient, W.s/m.
        u_tip (float): Rotor blade tip speed, m/s.
        v0 (float): Mean rotor induced speed in hover, m/s.
        d0 (float): Fuselage drag ratio.
        rho_air (float): Air density, kg/m^3.
        s_solidity (float): Rotor solidity.
        disc_area (float): Rotor disc area, m^2.
        e_uav_max (float): On-board energy of the UAV, J.
    """

    p0: float = 79.86
    p1: float = 88.63
    p2: float = 10.0
    u_tip: float = 120.0
    v0: float = 4.03
    d0: float = 0.6
    rho_air: float = 1.225
    s_solidity: float = 0.05
    disc_area: float = 0.503
    e_uav_max: float = 20000.0

    def __post_init__(self):
        for name, value in vars(self).items():
            if not value > 0:
                raise ConfigException(f"Flight parameter {name} must be positive.")


@dataclass(eq=False)
class CostBreakdown:
    """Every time and energy term of one slot.

    Per-user quantities are arrays of length K. Entries of users flagged
    infeasible hold zero for the terms that could not be evaluated.

    **Attributes:**

    Attributes:
        t_lr, e_lr: Local compression time (s) and energy (J).
        t_off, e_off: User to UAV offloading time (s) and energy (J).
        t_relay, e_relay: UAV to BS relaying time (s) and energy (J).
        t_uav_comp, e_uav_comp: UAV computing time (s) and energy (J).
        t_bs_comp: BS computing time (s).
        t_total: Completion time of each user's task (s).
        e_user: Energy spent by each user (J).
        infeasible: Users whose link or allocation made the slot infeasible.
        e_fly: Propulsion energy of the UAV in the slot (J).
        e_uav_slot: Total UAV energy in the slot (J).
        prob_violation: Probability that the planned move breaks the speed limit.
        speed_violated: Whether the realized move broke the speed limit.
    """

    t_lr: numpy.ndarray
    e_lr: numpy.ndarray
    t_off: numpy.ndarray
    e_off: numpy.ndarray
    t_relay: numpy.ndarray
    e_relay: numpy.ndarray
    t_uav_comp: numpy.ndarray
    e_uav_comp: numpy.ndarray
    t_bs_comp: numpy.ndarray
    t_total: numpy.ndarray
    e_user: numpy.ndarray
    infeasible: numpy.ndarray
    e_fly: float
    e_uav_slot: float
    prob_violation: float = 0.0
    speed_violated: bool = False

    PER_USER = (
        "t_lr",
        "e_lr",
        "t_off",
        "e_off",
        "t_relay",
        "e_relay",
        "t_uav_comp",
        "e_uav_comp",
        "t_bs_comp",
        "t_total",
        "e_user",
    )

    @classmethod
    def from_parts(cls, parts, infeasible, e_fly, **extra):
        """Build a breakdown, deriving the aggregates from the components.

        Args:
            parts (dict): Per-user arrays for t_lr, e_lr, t_off, e_off,
                           t_relay, e_relay, t_uav_comp, e_uav_comp, t_bs_comp.
            infeasible (array-like): Per-user infeasibility flags.
            e_fly (float): Propulsion energy of the slot.
            extra: prob_violation and speed_violated.

        Returns:
            CostBreakdown: with t_total, e_user and e_uav_slot filled in.
        """
        arrays = {
            name: numpy.asarray(value, dtype=float) for name, value in parts.items()
        }
        t_total = slot_latency(
            arrays["t_lr"],
            arrays["t_off"],
            arrays["t_uav_comp"],
            arrays["t_relay"],
            arrays["t_bs_comp"],
        )
        e_user = arrays["e_lr"] + arrays["e_off"]
        e_uav_slot = float(numpy.sum(arrays["e_relay"] + arrays["e_uav_comp"]) + e_fly)
        return cls(
            t_total=t_total,
            e_user=e_user,
            infeasible=numpy.asarray(infeasible, dtype=bool),
            e_fly=float(e_fly),
            e_uav_slot=e_uav_slot,
            **arrays,
            **extra,
        )

    @property
    def e_sum(self):
        """float: The energy spent by all users in the slot."""
        return float(numpy.sum(self.e_user))

    def to_record(self) -> Dict[str, object]:
        """Return a JSON-ready dict of every field."""
        record: Dict[str, object] = {
            name: getattr(self, name).tolist() for name in self.PER_USER
        }
        record["infeasible"] = self.infeasible.tolist()
        record["e_fly"] = self.e_fly
        record["e_uav_slot"] = self.e_uav_slot
        record["prob_violation"] = self.prob_violation
        record["speed_violated"] = bool(self.speed_violated)
        return record


def compression_density(gamma, epsilon_comp):
    """CPU cycles per bit needed to compress data to a given ratio.

    Args:
        gamma (float): Compressed size over original size, in (0, 1].
        epsilon_comp (float): Constant of the compression algorithm.

    Returns:
        float: J = exp(epsilon / gamma) - exp(epsilon), zero when gamma is 1.

    Raises:
        DomainException: if gamma is outside (0, 1].

    >>> compression_density(1.0, 2.0)
    0.0
    """
    if not 0 < gamma <= 1:
        raise DomainException(f"Compression ratio {gamma} outside (0, 1].")
    if gamma == 1:
        return 0.0
    return float(numpy.exp(epsilon_comp / gamma) - numpy.exp(epsilon_comp))


def user_side_costs(task, gamma, rate_up, compute, radio):
    """Compression and offloading costs paid by one user.

    Args:
        task (TaskInstance): The user's task.
        gamma (float): Compression ratio.
        rate_up (float): User to UAV rate in bits/s.
        compute (ComputeParams): CPU parameters.
        radio (RadioParams): Radio parameters (for the user transmit power).

    Returns:
        tuple: (t_lr, e_lr, t_off, e_off).

    Raises:
        InfeasibleLinkException: if rate_up is not positive.
    """
    if not rate_up > 0:
        raise InfeasibleLinkException(f"User uplink rate {rate_up} is not positive.")
    cycles = task.data_bits * compression_density(gamma, compute.epsilon_comp)
    t_lr = cycles / compute.f_user
    e_lr = cycles * compute.f_user**2 * compute.tau_user
    t_off = gamma * task.data_bits / rate_up
    e_off = t_off * radio.p_user
    return t_lr, e_lr, t_off, e_off


def uav_side_costs(task, gamma, alpha_off, f_alloc, rate_down, compute, radio):
    """Relaying and computing costs of one user's task at the UAV and the BS.

    Args:
        task (TaskInstance): The user's task.
        gamma (float): Compression ratio.
        alpha_off (float): Share of the task relayed to the BS, in [0, 1].
        f_alloc (float): UAV CPU frequency given to the user in Hz.
        rate_down (float): UAV to BS rate in bits/s.
        compute (ComputeParams): CPU parameters.
        radio (RadioParams): Radio parameters (for the UAV transmit power).

    Returns:
        tuple: (t_relay, e_relay, t_uav_comp, e_uav_comp, t_bs_comp).

    Raises:
        DomainException: if alpha_off is outside [0, 1] or f_alloc is negative.
        InfeasibleLinkException: if rate_down is not positive.
        InfeasibleAllocationException: if the UAV must compute with f_alloc 0.
    """
    if not 0 <= alpha_off <= 1:
        raise DomainException(f"Offloading ratio {alpha_off} outside [0, 1].")
    if f_alloc < 0:
        raise DomainException(f"CPU allocation must not be negative, got {f_alloc}.")
    if not rate_down > 0:
        raise InfeasibleLinkException(f"UAV to BS rate {rate_down} is not positive.")
    t_relay = alpha_off * gamma * task.data_bits / rate_down
    e_relay = t_relay * radio.p_uav
    local_cycles = (1 - alpha_off) * task.density * task.data_bits
    if local_cycles == 0:
        t_uav_comp = 0.0
    elif f_alloc == 0:
        raise InfeasibleAllocationException(
            f"{local_cycles} cycles left on the UAV with no CPU allocated."
        )
    else:
        t_uav_comp = local_cycles / f_alloc
    e_uav_comp = local_cycles * compute.tau_uav * f_alloc**2
    t_bs_comp = alpha_off * task.density * task.data_bits / compute.f_bs
    return t_relay, e_relay, t_uav_comp, e_uav_comp, t_bs_comp


def slot_latency(t_lr, t_off, t_uav_comp, t_relay, t_bs_comp):
    """Completion time of a task: compression, then offloading, then the
    slower of UAV computing and relay-plus-BS computing.

    Works elementwise on arrays.

    >>> float(slot_latency(1, 2, 3, 4, 5))
    12.0
    """
    return numpy.add(t_lr, t_off) + numpy.maximum(
        t_uav_comp, numpy.add(t_relay, t_bs_comp)
    )


def propulsion_power(v_h, v_v, flight):
    """Propulsion power of a rotary-wing UAV.

    Args:
        v_h (float): Horizontal speed in m/s.
        v_v (float): Vertical speed in m/s.
        flight (FlightParams): The propulsion parameters.

    Returns:
        float: Power in W.

    Raises:
        DomainException: if a speed is negative.

    >>> flight = FlightParams()
    >>> propulsion_power(0.0, 0.0, flight) == flight.p0 + flight.p1
    True
    """
    if v_h < 0 or v_v < 0:
        raise DomainException(f"Speeds must not be negative, got ({v_h}, {v_v}).")
    blade = flight.p0 * (1 + 3 * v_h**2 / flight.u_tip**2)
    parasite = (
        0.5 * flight.d0 * flight.rho_air * flight.s_solidity * flight.disc_area * v_h**3
    )
    ratio = v_h**2 / (2 * flight.v0**2)
    induced = flight.p1 * numpy.sqrt(numpy.sqrt(1 + ratio**2) - ratio)
    return float(blade + parasite + induced + flight.p2 * v_v)


def flight_energy(displacement, slot_len, flight):
    """Energy to fly a displacement within one slot.

    Args:
        displacement (array-like): Realized 3D displacement in m.
        slot_len (float): Slot duration in s.
        flight (FlightParams): The propulsion parameters.

    Returns:
        float: Energy in J.
    """
    displacement = numpy.asarray(displacement, dtype=float)
    v_h = float(numpy.linalg.norm(displacement[:2])) / slot_len
    v_v = abs(float(displacement[2])) / slot_len
    return slot_len * propulsion_power(v_h, v_v, flight)


def empty_parts(n_users) -> Dict[str, List[float]]:
    """Per-user component arrays, all zero, ready to be filled by a slot."""
    names = CostBreakdown.PER_USER[:9]
    return {name: [0.0] * n_users for name in names}


__all__ = [
    "ComputeParams",
    "FlightParams",
    "CostBreakdown",
    "compression_density",
    "user_side_costs",
    "uav_side_costs",
    "slot_latency",
    "propulsion_power",
    "flight_energy",
    "empty_parts",
]
