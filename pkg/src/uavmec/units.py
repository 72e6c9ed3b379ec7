"""Unit conversions for radio quantities and the [0, 1] scalings used by the
agent interface."""

import numpy
import scipy.constants

from uavmec.exceptions import DomainException


def db_to_linear(value_db):
    """Convert a power ratio from decibels to a linear ratio.

    Args:
        value_db (float): The ratio in dB.

    Returns:
        float: The linear ratio.

    >>> db_to_linear(-50.0)
    1e-05
    """
    return 10.0 ** (value_db / 10.0)


def dbm_to_watts(value_dbm):
    """Convert a power (or power spectral density) from dBm to watts.

    Args:
        value_dbm (float): The power in dBm, or dBm/Hz for a density.

    Returns:
        float: The power in W, or W/Hz for a density.
    """
    return db_to_linear(value_dbm) * scipy.constants.milli


class AffineConv:
    """Convert between a physical quantity and the unit interval.

    The physical range is [lower, upper]. Physical values are clamped to the
    range before scaling, so scaled values never leave [0, 1]. A degenerate
    range (lower == upper) scales every value to 0.

    **Attributes:**

    Attributes:
        lower (float): The physical value mapped to 0.
        upper (float): The physical value mapped to 1.
        name (str): An identifier used in error messages.
    """

    def __init__(self, lower, upper, name=None):
        """
        Args:
            lower (float): The physical value mapped to 0.
            upper (float): The physical value mapped to 1.
            name (str): An identifier used in error messages.

        Raises:
            DomainException: if lower is greater than upper.

        **Methods:**
        """
        if lower > upper:
            raise DomainException(
                f"Lower limit ({lower}) must not exceed the upper limit ({upper})."
            )
        self.lower = float(lower)
        self.upper = float(upper)
        self.name = name

    def __str__(self):
        string_rep = self.__class__.__name__
        if self.name is not None:
            string_rep += f" {self.name}"
        return string_rep

    def to_unit(self, value):
        """Scale physical values into [0, 1].

        Args:
            value (float or numpy.ndarray): Physical value(s).

        Returns:
            float or numpy.ndarray: The scaled value(s).

        >>> float(AffineConv(100.0, 200.0).to_unit(150.0))
        0.5
        """
        span = self.upper - self.lower
        clamped = numpy.clip(value, self.lower, self.upper)
        if span == 0:
            return numpy.zeros_like(clamped, dtype=float)[()]
        return (clamped - self.lower) / span

    def from_unit(self, raw):
        """Map values from [0, 1] back to the physical range.

        Args:
            raw (float or numpy.ndarray): Value(s) in [0, 1].

        Returns:
            float or numpy.ndarray: The physical value(s).

        Raises:
            DomainException: if any raw value is outside [0, 1].
        """
        raw = numpy.asarray(raw, dtype=float)
        if numpy.any(~numpy.isfinite(raw)) or numpy.any((raw < 0) | (raw > 1)):
            raise DomainException(f"{self}: raw value {raw} outside [0, 1].")
        return (self.lower + raw * (self.upper - self.lower))[()]
