"""CC/CV charge-control core shared by the solar and USB chargers.

Both chargers regulate the same way once a source is selected: a current
limit in CC, a voltage limit at ``v_cv`` in CV whose current also decays at
least as fast as ``i_entry * exp(-t / tau_cv)``, and termination when the
CV current falls to ``i_term``. In CV the voltage limit is the physical one:
with an OCV-plus-IR pack, holding the terminal at ``v_cv`` allows
``(v_cv - ocv) / r`` amperes.
"""

from __future__ import annotations

import math
from enum import IntEnum

from numba import njit

V_CV = 4.2
V_RECHARGE = 4.05


class ChargeMode(IntEnum):
    IDLE = 0
    TRICKLE = 1
    CC = 2
    CV = 3
    FULL = 4


class InputSource(IntEnum):
    NONE = 0
    SOLAR = 1
    USB = 2


IDLE = 0
TRICKLE = 1
CC = 2
CV = 3
FULL = 4


@njit(cache=True)
def _cv_current(ocv, r, v_cv):
    if r > 0.0:
        return max((v_cv - ocv) / r, 0.0)
    return math.inf if ocv < v_cv else 0.0


@njit(cache=True)
def _cccv_limit(mode, cv_elapsed, i_cv_entry, ocv, r, i_cc, v_cv, tau_cv, i_term, v_recharge):
    """Return ``(mode, i_limit, full_event, i_cv_limit)`` for the coming step.

    ``mode`` must already be one of CC, CV or FULL (IDLE/TRICKLE promote to CC).
    """
    i_cvl = _cv_current(ocv, r, v_cv)
    if mode == FULL:
        if ocv >= v_recharge:
            return FULL, 0.0, False, i_cvl
        mode = CC
    if mode == CV:
        cap = min(i_cvl, i_cv_entry * math.exp(-cv_elapsed / tau_cv))
        if cap <= i_term:
            return FULL, 0.0, True, i_cvl
        return CV, min(i_cc, cap), False, i_cvl
    return CC, min(i_cc, i_cvl), False, i_cvl


@njit(cache=True)
def _cccv_advance(mode, cv_elapsed, i_cv_entry, i_charge, i_cvl, i_cc, dt):
    """Post-step bookkeeping: enter CV once the voltage limit was binding."""
    if mode == CC and i_cvl <= i_cc and i_charge >= i_cvl * (1.0 - 1e-12):
        return CV, 0.0, i_charge
    if mode == CV:
        return CV, cv_elapsed + dt, i_cv_entry
    return mode, cv_elapsed, i_cv_entry
