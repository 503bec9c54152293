"""dB / linear conversions.

Every power ratio in the package goes through these helpers so that
10*log10 is never confused with 20*log10 (amplitude) anywhere else.
"""

import numpy as np


def db_to_linear(db):
    return np.power(10.0, np.asarray(db, dtype=float) / 10.0)


def linear_to_db(ratio):
    return 10.0 * np.log10(ratio)


def dbm_to_mw(dbm):
    return db_to_linear(dbm)


def mw_to_dbm(mw):
    return linear_to_db(mw)


def dbm_to_w(dbm):
    return db_to_linear(dbm) / 1000.0


def w_to_dbm(w):
    return linear_to_db(np.asarray(w, dtype=float) * 1000.0)
