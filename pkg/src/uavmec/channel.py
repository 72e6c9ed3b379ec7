"""Air-to-ground radio model: logistic fading approximation and link rates.

The small-scale fading power of both links (user to UAV, UAV to BS) is
replaced by a logistic function of the elevation sine, so link rates are
deterministic given the positions.
"""

from dataclasses import dataclass

import numpy
from scipy.special import expit

from uavmec.exceptions import ConfigException, DomainException


@dataclass(frozen=True)
class RadioParams:
    """Parameters of the radio model.

    **Attributes:**

    Attributes:
        beta0 (float): Linear channel power gain at 1 m.
        alpha (float): Path-loss exponent, at least 2.
        total_bandwidth (float): Bandwidth in Hz, split equally between users.
        noise_psd (float): Noise power spectral density N0 in W/Hz.
        p_user (float): User transmit power in W.
        p_uav (float): UAV transmit power towards the BS in W.
        c1 (float): Logistic floor, c1 + c2 == 1.
        c2 (float): Logistic span.
        b1 (float): Logistic offset, negative.
        b2 (float): Logistic growth rate, positive.
    """

    beta0: float = 1e-5
    alpha: float = 2.2
    total_bandwidth: float = 30e6
    noise_psd: float = 10 ** (-17.4) * 1e-3
    p_user: float = 0.1
    p_uav: float = 0.5
    c1: float = 0.2
    c2: float = 0.8
    b1: float = -4.3221
    b2: float = 6.075

    def __post_init__(self):
        if self.beta0 <= 0:
            raise ConfigException(f"beta0 must be positive, got {self.beta0}.")
        if self.alpha < 2:
            raise ConfigException(f"Path-loss exponent must be >= 2, got {self.alpha}.")
        if self.total_bandwidth <= 0 or self.noise_psd <= 0:
            raise ConfigException("Bandwidth and noise density must be positive.")
        if self.p_user < 0 or self.p_uav < 0:
            raise ConfigException("Transmit powers must not be negative.")
        if self.c1 <= 0 or self.c2 <= 0 or abs(self.c1 + self.c2 - 1.0) > 1e-9:
            raise ConfigException(
                f"Logistic c1 ({self.c1}) and c2 ({self.c2}) must be positive "
                "and sum to 1."
            )
        if self.b1 >= 0 or self.b2 <= 0:
            raise ConfigException(
                f"Logistic b1 ({self.b1}) must be negative and b2 ({self.b2}) "
                "positive."
            )

    def user_bandwidth(self, n_users):
        """
        Args:
            n_users (int): The number of users sharing the band.

        Returns:
            float: The bandwidth of one user's channel in Hz.
        """
        return self.total_bandwidth / n_users


def logistic_fading(sin_elevation, radio):
    """Approximate fading power gain for a given elevation sine.

    Args:
        sin_elevation (float): Sine of the elevation angle, in [0, 1].
        radio (RadioParams): The radio parameters.

    Returns:
        float: The gain v, within (c1, c1 + c2).

    Raises:
        DomainException: if sin_elevation is outside [0, 1].

    >>> radio = RadioParams()
    >>> round(logistic_fading(-radio.b1 / radio.b2, radio), 12)
    0.6
    """
    if not numpy.isfinite(sin_elevation) or not 0 <= sin_elevation <= 1:
        raise DomainException(f"Elevation sine {sin_elevation} outside [0, 1].")
    return float(radio.c1 + radio.c2 * expit(radio.b1 + radio.b2 * sin_elevation))


def link_rate(tx_pos, rx_pos, tx_power, bandwidth, uav_height, radio):
    """Maximum achievable rate of a link with logistic fading.

    Args:
        tx_pos (array-like): Transmitter position in m.
        rx_pos (array-like): Receiver position in m.
        tx_power (float): Transmit power in W.
        bandwidth (float): Bandwidth of the link in Hz.
        uav_height (float): Altitude of the UAV end of the link above ground.
        radio (RadioParams): The radio parameters.

    Returns:
        float: The rate in bits/s.

    Raises:
        DomainException: if the ends coincide, the power is negative or the
                          bandwidth is not positive.
    """
    if tx_power < 0:
        raise DomainException(f"Transmit power must not be negative, got {tx_power}.")
    if bandwidth <= 0:
        raise DomainException(f"Bandwidth must be positive, got {bandwidth}.")
    distance = float(
        numpy.linalg.norm(
            numpy.asarray(tx_pos, dtype=float) - numpy.asarray(rx_pos, dtype=float)
        )
    )
    if distance == 0:
        raise DomainException("Link distance is zero.")
    gain = logistic_fading(min(abs(uav_height) / distance, 1.0), radio)
    snr = radio.beta0 * tx_power * gain / (bandwidth * radio.noise_psd)
    snr /= (distance**2) ** (radio.alpha / 2)
    return float(bandwidth * numpy.log2(1.0 + snr))
