"""USB step-down charger: trickle, CC, CV, full; LED blinks while charging.

When USB is present the power-path switch feeds the 5 V load straight from
the USB rail, so only what is left over reaches the charger.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import IntEnum

from numba import njit

from pmcs.battery import BatteryPack, _ocv
from pmcs.cccv import CC, CV, FULL, IDLE, TRICKLE, V_RECHARGE, ChargeMode, _cccv_advance, _cccv_limit, _cv_current
from pmcs.errors import ConfigError, DomainError
from pmcs.powerpath import _solve_node

P_USB_MAX = 15.0


class UsbLed(IntEnum):
    OFF = 0
    BLINK = 1
    SOLID = 2


@dataclass(frozen=True)
class UsbChargerState:
    mode: ChargeMode = ChargeMode.IDLE
    led: UsbLed = UsbLed.OFF
    i_cc_A: float = 2.65
    i_trickle_A: float = 0.10
    eta: float = 0.94
    v_trickle: float = 3.0
    i_term_A: float = 0.265
    tau_cv_s: float = 1800.0
    v_recharge: float = V_RECHARGE
    cv_elapsed_s: float = 0.0
    i_cv_entry_A: float = 0.0

    def __post_init__(self):
        if not 0 < self.eta <= 1:
            raise ConfigError("usb_charger.eta", f"must be in (0, 1], got {self.eta}")
        if not self.tau_cv_s > 0:
            raise ConfigError("usb_charger.tau_cv_s", "must be > 0")


@dataclass(frozen=True)
class UsbSupply:
    """When USB power is plugged in, and how much it can deliver."""

    p_usb_W: float = 10.0
    windows_s: tuple[tuple[float, float], ...] = field(default_factory=tuple)
    usb_data_connected: bool = False

    def __post_init__(self):
        if not 0 <= self.p_usb_W <= P_USB_MAX:
            raise ConfigError("usb.p_usb_w", f"must be in [0, {P_USB_MAX}] W, got {self.p_usb_W}")
        wins = tuple(sorted((float(a), float(b)) for a, b in self.windows_s))
        for a, b in wins:
            if not 0 <= a < b:
                raise ConfigError("usb.windows_s", f"bad window {a}:{b}")
        if any(nxt[0] < cur[1] for cur, nxt in zip(wins, wins[1:])):
            raise ConfigError("usb.windows_s", "windows overlap")
        object.__setattr__(self, "windows_s", wins)


@njit(cache=True)
def _usb_pre(mode, cv_el, i_entry, p_usb, ocv, r, charge_enabled, i_cc, i_tr, v_tr, i_term, tau, v_rech, eta):
    """Returns ``(mode, led, p_usable, i_limit, full_event, i_cv_limit)``."""
    if p_usb <= 0.0:
        return IDLE, 0, 0.0, 0.0, False, 0.0
    if not charge_enabled:
        return IDLE, 0, eta * p_usb, 0.0, False, 0.0
    i_cvl = _cv_current(ocv, r, 4.2)
    if mode == FULL and ocv >= v_rech:
        return FULL, 2, eta * p_usb, 0.0, False, i_cvl
    if mode != CV and ocv < v_tr:
        return TRICKLE, 1, eta * p_usb, min(i_tr, i_cvl), False, i_cvl
    if mode == IDLE or mode == TRICKLE:
        mode = CC
    mode, lim, full, i_cvl = _cccv_limit(mode, cv_el, i_entry, ocv, r, i_cc, 4.2, tau, i_term, v_rech)
    led = 2 if mode == FULL else 1
    return mode, led, eta * p_usb, lim, full, i_cvl


def usb_charger_step(
    st: UsbChargerState,
    p_usb_W: float,
    pack: BatteryPack,
    i_load_5v_A: float,
    dt_s: float,
) -> tuple[UsbChargerState, float, float, float]:
    """Run the USB charger for one step.

    ``i_load_5v_A`` is the system load, fed directly from the USB rail.
    Returns ``(state, i_charge_A, i_to_load_A, p_loss_W)`` where
    ``i_to_load_A`` is the 5 V current USB supplied to the load.
    """
    if not dt_s > 0:
        raise DomainError(f"dt_s must be > 0, got {dt_s}")
    if not 0 <= p_usb_W <= P_USB_MAX:
        raise DomainError(f"p_usb_W must be in [0, {P_USB_MAX}], got {p_usb_W}")
    socs, volts = pack.anchor_arrays
    ocv = float(_ocv(pack.soc, socs, volts))
    r = pack.r_internal_ohm
    prot = pack.protection
    mode, led, p_usable, lim, _, i_cvl = _usb_pre(
        int(st.mode), st.cv_elapsed_s, st.i_cv_entry_A, float(p_usb_W), ocv, r, prot.charge_enabled,
        st.i_cc_A, st.i_trickle_A, st.v_trickle, st.i_term_A, st.tau_cv_s, st.v_recharge, st.eta,
    )
    sol = _solve_node(2, p_usable, ocv, r, float(i_load_5v_A), 0.0, lim, prot.discharge_enabled, 0.0)
    v, to_load_bs, i_chg, served5 = sol[0], sol[1], sol[2], sol[5]
    delivered = v * (to_load_bs + i_chg) + 5.0 * served5
    p_loss = delivered * (1.0 / st.eta - 1.0)
    cv_el, i_entry = st.cv_elapsed_s, st.i_cv_entry_A
    if mode == IDLE:
        cv_el, i_entry = 0.0, 0.0
    else:
        mode, cv_el, i_entry = _cccv_advance(mode, cv_el, i_entry, i_chg, i_cvl, st.i_cc_A, float(dt_s))
    new = dataclasses.replace(
        st, mode=ChargeMode(mode), led=UsbLed(led), cv_elapsed_s=float(cv_el), i_cv_entry_A=float(i_entry)
    )
    return new, float(i_chg), float(served5), float(p_loss)
