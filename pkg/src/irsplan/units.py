"""dB/linear conversions.

All powers are held in linear milliwatts internally; dBm/dB appear only
at file boundaries (scenario documents, CSV tables, reports).
"""

import math


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw: float) -> float:
    if mw <= 0.0:
        raise ValueError("dBm undefined for non-positive power %r" % (mw,))
    return 10.0 * math.log10(mw)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    if x <= 0.0:
        raise ValueError("dB undefined for non-positive ratio %r" % (x,))
    return 10.0 * math.log10(x)
