import json

import numpy
import pytest
from constants import DATA_BITS, DENSITY

from uavmec.costs import (
    ComputeParams,
    CostBreakdown,
    FlightParams,
    compression_density,
    empty_parts,
    flight_energy,
    propulsion_power,
    slot_latency,
    uav_side_costs,
    user_side_costs,
)
from uavmec.exceptions import (
    ConfigException,
    DomainException,
    InfeasibleAllocationException,
    InfeasibleLinkException,
)


@pytest.fixture
def compute():
    return ComputeParams()


@pytest.fixture
def flight():
    return FlightParams()


def test_compression_density():
    assert compression_density(1.0, 2.0) == 0.0
    assert compression_density(0.5, 2.0) == pytest.approx(numpy.exp(4) - numpy.exp(2))
    densities = [compression_density(g, 2.0) for g in (0.5, 0.6, 0.8, 1.0)]
    assert densities == sorted(densities, reverse=True)


@pytest.mark.parametrize("gamma", [0.0, -0.5, 1.01])
def test_compression_density_raises_DomainException_outside_range(gamma):
    with pytest.raises(DomainException):
        compression_density(gamma, 2.0)


def test_user_side_costs(task, compute, radio):
    t_lr, e_lr, t_off, e_off = user_side_costs(task, 0.5, 1e6, compute, radio)
    cycles = DATA_BITS * (numpy.exp(4) - numpy.exp(2))
    assert t_lr == pytest.approx(cycles / 1.5e9)
    assert e_lr == pytest.approx(cycles * 1.5e9**2 * 1e-29)
    assert t_off == pytest.approx(0.5)
    assert e_off == pytest.approx(0.05)


def test_user_side_costs_without_compression(task, compute, radio):
    t_lr, e_lr, t_off, _ = user_side_costs(task, 1.0, 2e6, compute, radio)
    assert t_lr == 0.0
    assert e_lr == 0.0
    assert t_off == pytest.approx(0.5)


def test_user_side_costs_raises_InfeasibleLinkException(task, compute, radio):
    with pytest.raises(InfeasibleLinkException):
        user_side_costs(task, 0.5, 0.0, compute, radio)


def test_uav_side_costs(task, compute, radio):
    t_relay, e_relay, t_uav, e_uav, t_bs = uav_side_costs(
        task, 0.5, 0.25, 1e9, 2e6, compute, radio
    )
    assert t_relay == pytest.approx(0.0625)
    assert e_relay == pytest.approx(0.03125)
    assert t_uav == pytest.approx(0.6)
    assert e_uav == pytest.approx(6e-3)
    assert t_bs == pytest.approx(0.25 * DENSITY * DATA_BITS / 15e9)


def test_uav_side_costs_all_relayed_needs_no_cpu(task, compute, radio):
    _, _, t_uav, e_uav, t_bs = uav_side_costs(task, 0.5, 1.0, 0.0, 2e6, compute, radio)
    assert t_uav == 0.0
    assert e_uav == 0.0
    assert t_bs > 0


def test_uav_side_costs_raises_InfeasibleAllocationException(task, compute, radio):
    with pytest.raises(InfeasibleAllocationException):
        uav_side_costs(task, 0.5, 0.5, 0.0, 2e6, compute, radio)


@pytest.mark.parametrize(
    "alpha_off, f_alloc, rate_down, exception",
    [
        (1.2, 1e9, 2e6, DomainException),
        (0.5, -1.0, 2e6, DomainException),
        (0.5, 1e9, 0.0, InfeasibleLinkException),
    ],
)
def test_uav_side_costs_raises(
    task, compute, radio, alpha_off, f_alloc, rate_down, exception
):
    with pytest.raises(exception):
        uav_side_costs(task, 0.5, alpha_off, f_alloc, rate_down, compute, radio)


def test_slot_latency_takes_the_slower_branch():
    t_lr = numpy.array([0.1, 0.1])
    t_off = numpy.array([0.2, 0.2])
    t_uav = numpy.array([0.5, 0.1])
    t_relay = numpy.array([0.1, 0.3])
    t_bs = numpy.array([0.1, 0.3])
    numpy.testing.assert_allclose(
        slot_latency(t_lr, t_off, t_uav, t_relay, t_bs), [0.8, 0.9]
    )


def test_propulsion_power_in_hover_and_climb(flight):
    hover = propulsion_power(0.0, 0.0, flight)
    assert hover == pytest.approx(flight.p0 + flight.p1)
    assert propulsion_power(0.0, 2.0, flight) == pytest.approx(hover + 2 * flight.p2)


def test_propulsion_power_forward_flight(flight):
    v = 10.0
    ratio = v**2 / (2 * flight.v0**2)
    expected = (
        flight.p0 * (1 + 3 * v**2 / flight.u_tip**2)
        + 0.5 * flight.d0 * flight.rho_air * flight.s_solidity * flight.disc_area * v**3
        + flight.p1 * numpy.sqrt(numpy.sqrt(1 + ratio**2) - ratio)
    )
    assert propulsion_power(v, 0.0, flight) == pytest.approx(expected)


def test_propulsion_power_raises_DomainException_for_negative_speed(flight):
    with pytest.raises(DomainException):
        propulsion_power(-1.0, 0.0, flight)


def test_flight_energy(flight):
    hover = flight.p0 + flight.p1
    assert flight_energy([0.0, 0.0, 0.0], 1.5, flight) == pytest.approx(1.5 * hover)
    assert flight_energy([0.0, 0.0, -3.0], 1.5, flight) == pytest.approx(
        1.5 * (hover + 2 * flight.p2)
    )
    assert flight_energy([15.0, 0.0, 0.0], 1.5, flight) == pytest.approx(
        1.5 * propulsion_power(10.0, 0.0, flight)
    )


@pytest.mark.parametrize(
    "params, changes",
    [
        (ComputeParams, {"f_user": 0.0}),
        (ComputeParams, {"tau_uav": -1.0}),
        (ComputeParams, {"gamma_min": 1.5}),
        (ComputeParams, {"epsilon_comp": 0.0}),
        (FlightParams, {"p0": 0.0}),
        (FlightParams, {"e_uav_max": -1.0}),
    ],
)
def test_params_raise_ConfigException_for_invalid_values(params, changes):
    with pytest.raises(ConfigException):
        params(**changes)


def test_empty_parts():
    parts = empty_parts(3)
    assert len(parts) == 9
    assert "t_total" not in parts
    assert all(values == [0.0, 0.0, 0.0] for values in parts.values())


def test_CostBreakdown_from_parts_derives_aggregates():
    parts = empty_parts(2)
    parts["t_lr"] = [0.1, 0.2]
    parts["e_lr"] = [1.0, 2.0]
    parts["t_off"] = [0.3, 0.1]
    parts["e_off"] = [0.5, 0.25]
    parts["t_uav_comp"] = [0.4, 0.0]
    parts["e_uav_comp"] = [3.0, 0.0]
    parts["t_relay"] = [0.0, 0.2]
    parts["e_relay"] = [0.0, 0.1]
    parts["t_bs_comp"] = [0.0, 0.5]
    costs = CostBreakdown.from_parts(parts, [False, True], 200.0, prob_violation=0.2)
    numpy.testing.assert_allclose(costs.t_total, [0.8, 1.0])
    numpy.testing.assert_allclose(costs.e_user, [1.5, 2.25])
    assert costs.e_sum == pytest.approx(3.75)
    assert costs.e_uav_slot == pytest.approx(203.1)
    assert costs.infeasible.tolist() == [False, True]
    assert costs.prob_violation == 0.2
    assert costs.speed_violated is False


def test_CostBreakdown_to_record_is_json_ready():
    costs = CostBreakdown.from_parts(empty_parts(2), [False, False], 10.0)
    record = json.loads(json.dumps(costs.to_record()))
    assert set(CostBreakdown.PER_USER) <= set(record)
    assert record["e_fly"] == 10.0
    assert record["infeasible"] == [False, False]
