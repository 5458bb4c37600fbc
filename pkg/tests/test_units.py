import math

import pytest
from hypothesis import given, strategies as st

from irsplan.units import db_to_linear, dbm_to_mw, linear_to_db, mw_to_dbm


def test_reference_points():
    assert dbm_to_mw(0.0) == 1.0
    assert dbm_to_mw(30.0) == pytest.approx(1000.0)
    assert mw_to_dbm(1.0) == 0.0
    assert mw_to_dbm(100.0) == pytest.approx(20.0)
    assert db_to_linear(10.0) == pytest.approx(10.0)
    assert linear_to_db(0.001) == pytest.approx(-30.0)


@given(st.floats(min_value=-120.0, max_value=80.0))
def test_dbm_round_trip(dbm):
    assert mw_to_dbm(dbm_to_mw(dbm)) == pytest.approx(dbm, abs=1e-9)


@given(st.floats(min_value=1e-12, max_value=1e12))
def test_linear_round_trip(x):
    assert db_to_linear(linear_to_db(x)) == pytest.approx(x, rel=1e-12)


def test_non_positive_rejected():
    with pytest.raises(ValueError):
        mw_to_dbm(0.0)
    with pytest.raises(ValueError):
        mw_to_dbm(-1.0)
    with pytest.raises(ValueError):
        linear_to_db(0.0)


def test_monotone():
    assert dbm_to_mw(-52.0) < dbm_to_mw(-51.9)
    assert mw_to_dbm(2.0) > mw_to_dbm(1.0)
    assert math.isclose(dbm_to_mw(-52.0), 10.0 ** -5.2)
