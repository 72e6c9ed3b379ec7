import numpy
import pytest

from uavmec.channel import RadioParams, link_rate, logistic_fading
from uavmec.exceptions import ConfigException, DomainException


def expected_rate(tx, rx, power, bandwidth, height, radio):
    distance = numpy.linalg.norm(numpy.subtract(tx, rx))
    u = min(height / distance, 1.0)
    gain = radio.c1 + radio.c2 / (1 + numpy.exp(-(radio.b1 + radio.b2 * u)))
    noise = bandwidth * radio.noise_psd * distance**radio.alpha
    snr = radio.beta0 * power * gain / noise
    return bandwidth * numpy.log2(1 + snr)


def test_user_bandwidth_splits_equally(radio):
    assert radio.user_bandwidth(15) == pytest.approx(2e6)
    assert radio.user_bandwidth(1) == radio.total_bandwidth


@pytest.mark.parametrize(
    "changes",
    [
        {"beta0": 0.0},
        {"alpha": 1.5},
        {"c1": 0.3},
        {"b1": 1.0},
        {"b2": -1.0},
        {"p_user": -0.1},
        {"total_bandwidth": 0.0},
    ],
)
def test_RadioParams_raises_ConfigException_for_invalid_values(changes):
    with pytest.raises(ConfigException):
        RadioParams(**changes)


def test_logistic_fading_is_bounded_and_increasing(radio):
    values = [logistic_fading(u, radio) for u in numpy.linspace(0, 1, 11)]
    assert all(radio.c1 < v < radio.c1 + radio.c2 for v in values)
    assert values == sorted(values)


@pytest.mark.parametrize("sin_elevation", [-0.1, 1.5, numpy.nan])
def test_logistic_fading_raises_DomainException_outside_unit_interval(
    radio, sin_elevation
):
    with pytest.raises(DomainException):
        logistic_fading(sin_elevation, radio)


def test_logistic_fading_matches_the_logistic_curve(radio):
    for u in numpy.linspace(0, 1, 11):
        logistic = 1 / (1 + numpy.exp(-(radio.b1 + radio.b2 * u)))
        assert logistic_fading(u, radio) == pytest.approx(
            radio.c1 + radio.c2 * logistic, rel=1e-12
        )


def test_logistic_fading_saturates():
    steep = RadioParams(b1=-50.0, b2=100.0)
    assert logistic_fading(0.0, steep) == pytest.approx(steep.c1, abs=1e-12)
    assert logistic_fading(1.0, steep) == pytest.approx(steep.c1 + steep.c2, abs=1e-12)


@pytest.mark.parametrize(
    "tx, rx, height",
    [
        ([100.0, 100.0, 0.0], [0.0, 0.0, 150.0], 150.0),
        ([0.0, 0.0, 0.0], [0.0, 0.0, 100.0], 100.0),
        ([250.0, 250.0, 120.0], [500.0, 500.0, 0.0], 120.0),
    ],
)
def test_link_rate_matches_closed_form(radio, tx, rx, height):
    bandwidth = radio.user_bandwidth(15)
    rate = link_rate(tx, rx, radio.p_user, bandwidth, height, radio)
    assert rate == pytest.approx(
        expected_rate(tx, rx, radio.p_user, bandwidth, height, radio), rel=1e-12
    )


def test_link_rate_falls_with_distance(radio):
    rates = [
        link_rate([0, 0, 0], [x, 0, 150.0], 0.1, 2e6, 150.0, radio)
        for x in (0.0, 100.0, 300.0, 600.0)
    ]
    assert rates == sorted(rates, reverse=True)
    assert rates[-1] > 0


def test_link_rate_snr_falls_with_the_path_loss_exponent(radio):
    bandwidth = 2e6
    near = link_rate([0, 0, 0], [120.0, 0, 90.0], 0.1, bandwidth, 90.0, radio)
    far = link_rate([0, 0, 0], [240.0, 0, 180.0], 0.1, bandwidth, 180.0, radio)
    snr_near = 2 ** (near / bandwidth) - 1
    snr_far = 2 ** (far / bandwidth) - 1
    assert snr_far == pytest.approx(snr_near / 2**radio.alpha, rel=1e-9)


def test_link_rate_is_zero_without_power(radio):
    assert link_rate([0, 0, 0], [0, 0, 150.0], 0.0, 2e6, 150.0, radio) == 0.0


@pytest.mark.parametrize(
    "power, bandwidth, rx",
    [(-1.0, 2e6, [0, 0, 150.0]), (0.1, 0.0, [0, 0, 150.0]), (0.1, 2e6, [0, 0, 0])],
)
def test_link_rate_raises_DomainException(radio, power, bandwidth, rx):
    with pytest.raises(DomainException):
        link_rate([0, 0, 0], rx, power, bandwidth, 150.0, radio)
