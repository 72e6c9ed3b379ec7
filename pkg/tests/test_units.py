import numpy
import pytest

from uavmec.exceptions import DomainException
from uavmec.units import AffineConv, db_to_linear, dbm_to_watts


def test_db_to_linear():
    assert db_to_linear(0.0) == 1.0
    assert db_to_linear(10.0) == pytest.approx(10.0)
    assert db_to_linear(-3.0) == pytest.approx(0.501187, rel=1e-6)


def test_dbm_to_watts():
    assert dbm_to_watts(30.0) == pytest.approx(1.0)
    assert dbm_to_watts(-174.0) == pytest.approx(10 ** (-20.4))


def test_AffineConv_to_unit_clamps_to_the_range():
    uc = AffineConv(0.0, 10.0)
    assert uc.to_unit(2.5) == 0.25
    assert uc.to_unit(15.0) == 1.0
    assert uc.to_unit(-3.0) == 0.0
    values = numpy.array([-1.0, 5.0, 11.0])
    numpy.testing.assert_allclose(uc.to_unit(values), [0, 0.5, 1])


def test_AffineConv_degenerate_range_scales_to_zero():
    uc = AffineConv(4.0, 4.0)
    assert uc.to_unit(4.0) == 0.0
    numpy.testing.assert_equal(uc.to_unit(numpy.array([1.0, 9.0])), [0.0, 0.0])


def test_AffineConv_from_unit():
    uc = AffineConv(100.0, 200.0)
    assert uc.from_unit(0.0) == 100.0
    assert uc.from_unit(1.0) == 200.0
    numpy.testing.assert_allclose(uc.from_unit([0.25, 0.5]), [125.0, 150.0])


@pytest.mark.parametrize("raw", [-0.1, 1.1, numpy.nan, [0.5, 2.0]])
def test_AffineConv_from_unit_raises_DomainException_outside_unit_interval(raw):
    with pytest.raises(DomainException):
        AffineConv(0.0, 1.0, "x").from_unit(raw)


def test_AffineConv_raises_DomainException_if_lower_above_upper():
    with pytest.raises(DomainException):
        AffineConv(2.0, 1.0)


def test_AffineConv_str():
    assert str(AffineConv(0, 1)) == "AffineConv"
    assert str(AffineConv(0, 1, "gamma")) == "AffineConv gamma"
