"""Load-sharing power path, 5 V boost regulator and the soft-latch switch.

The battery node voltage and the currents flowing through it depend on each
other (a boost converter draws more input current at lower voltage, and the
pack voltage sags with its own current), so :func:`_solve_node` finds the
self-consistent operating point by fixed-point iteration on the node
voltage. Near the stable root the map is a contraction and converges to
~1e-13 V in a handful of iterations. When the boost stage asks for more
power than the pack can source through its resistance (above about
OCV^2 / 4r) there is no operating point; the node collapses and the
solver reports it as a voltage below the regulator's dropout limit.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import IntEnum

from numba import njit

from pmcs.battery import BatteryPack, _ocv
from pmcs.cccv import InputSource
from pmcs.errors import BoostOverCurrent, DomainError, RegulatorDropout

V_OUT = 5.0
I_OUT_MAX = 2.4
V_IN_MIN = 2.2
ETA_PEAK = 0.98
ETA_AT_MAX = 0.85
I_ETA_KNEE = 0.1

T_LONG_PRESS = 3.0
T_SHUTDOWN_HOLD = 3.0

_EPS_T = 1e-6


@dataclass(frozen=True)
class PowerFlows:
    """Currents at the battery node for one step (amperes, battery side
    unless noted). ``i_batt_net_A`` is positive while charging."""

    i_src_to_load_A: float = 0.0
    i_src_to_batt_A: float = 0.0
    i_batt_net_A: float = 0.0
    i_load_5v_A: float = 0.0
    p_loss_W: float = 0.0
    v_term_V: float = 0.0
    p_src_W: float = 0.0
    i_load_batt_side_A: float = 0.0
    brownout: bool = False
    load_shed: bool = False
    dropout: bool = False


@dataclass(frozen=True)
class LatchState:
    on: bool = False
    press_elapsed_s: float = 0.0
    shutdown_low_elapsed_s: float = 0.0
    button_down: bool = False


class ButtonKind(IntEnum):
    NONE = 0
    PRESS_START = 1
    PRESS_END = 2
    RTC_PULSE = 3


@dataclass(frozen=True)
class ButtonEvent:
    """Inputs to the latch for one step.

    ``held_s`` is how long the button was actually down within the step for
    ``PRESS_START``/``PRESS_END`` (defaults: the whole step on start, none on
    end). Steps in between are counted while the button stays down.
    """

    kind: ButtonKind = ButtonKind.NONE
    shutdown_line_low: bool = False
    held_s: float | None = None


# -- boost regulator ---------------------------------------------------------


@njit(cache=True)
def _boost_eff(i_out):
    if i_out <= I_ETA_KNEE:
        return ETA_PEAK
    return ETA_PEAK - (i_out - I_ETA_KNEE) / (I_OUT_MAX - I_ETA_KNEE) * (ETA_PEAK - ETA_AT_MAX)


@njit(cache=True)
def _boost_in(v_in, i_out):
    if i_out <= 0.0:
        return 0.0
    return V_OUT * i_out / (_boost_eff(i_out) * v_in)


def boost_efficiency(i_out_A: float) -> float:
    """Efficiency of the 5 V boost stage at output current ``i_out_A``."""
    if i_out_A < 0:
        raise DomainError(f"i_out_A must be >= 0, got {i_out_A}")
    if i_out_A > I_OUT_MAX:
        raise BoostOverCurrent(f"{i_out_A} A exceeds the {I_OUT_MAX} A limit")
    return float(_boost_eff(float(i_out_A)))


def boost_input_current(v_in: float, i_out_A: float) -> float:
    """Battery-side current needed to deliver ``i_out_A`` at 5 V.

    The regulator quiescent current is not included; it is part of the
    sleep floor.
    """
    if v_in < V_IN_MIN:
        raise RegulatorDropout(f"v_in {v_in} V is below {V_IN_MIN} V")
    boost_efficiency(i_out_A)
    return float(_boost_in(float(v_in), float(i_out_A)))


# -- node solver ---------------------------------------------------------------


@njit(cache=True)
def _solve_node(src, p_usable, ocv, r, i5, i_aux, i_chg_lim, allow_discharge, i_guess):
    """Self-consistent currents at the battery node.

    Returns ``(v, src_to_load, src_to_batt, i_net, deficit, served5_direct,
    i_boost_in, i_boost_out)``. ``v`` is 0 when no operating point exists
    (node collapse); the caller treats that as regulator dropout. ``deficit`` is battery-side current the loads
    needed but could not get because discharge is disabled. USB feeds the
    5 V load directly; solar feeds it through the boost stage.
    """
    if src == 2:
        served5 = min(V_OUT * i5, p_usable) / V_OUT
    else:
        served5 = 0.0
    i_out = i5 - served5
    p_rem = p_usable - V_OUT * served5
    if p_rem < 0.0:
        p_rem = 0.0

    v = ocv + r * i_guess
    if v < 0.5 * ocv:
        v = ocv
    src_load = 0.0
    src_batt = 0.0
    i_net = 0.0
    deficit = 0.0
    i_bin = 0.0
    converged = False
    for _ in range(500):
        i_src = p_rem / v
        i_bin = _boost_in(v, i_out)
        i_load = i_bin + i_aux
        src_load = min(i_load, i_src)
        src_batt = min(i_chg_lim, i_src - src_load)
        if src_batt < 0.0:
            src_batt = 0.0
        short = i_load - src_load
        deficit = 0.0
        if not allow_discharge and short > 0.0:
            deficit = short
            short = 0.0
        i_net = src_batt - short
        v_new = ocv + r * i_net
        if abs(v_new - v) <= 1e-13:
            converged = True
            break
        v = v_new
    if not converged:
        v = 0.0
    return v, src_load, src_batt, i_net, deficit, served5, i_bin, i_out


@njit(cache=True)
def _allocate_kernel(src, p_usable, ocv, r, i5, i_aux, i_chg_lim, allow_discharge, i_guess):
    """Solve the node, then apply regulator dropout and brown-out.

    Returns ``(solution, i5_served, dropout, brownout)``.
    """
    sol = _solve_node(src, p_usable, ocv, r, i5, i_aux, i_chg_lim, allow_discharge, i_guess)
    dropout = False
    brownout = False
    if sol[7] > 0.0 and sol[0] < V_IN_MIN:
        dropout = True
        i5 = sol[5]
        sol = _solve_node(src, p_usable, ocv, r, i5, i_aux, i_chg_lim, allow_discharge, sol[3])
    if sol[4] > 0.0 and sol[7] > 0.0:
        brownout = True
        i5 = 0.0
        sol = _solve_node(src, p_usable, ocv, r, i5, i_aux, i_chg_lim, allow_discharge, sol[3])
    return sol, i5, dropout, brownout


def allocate(
    source: InputSource,
    p_src_batt_side_W: float,
    charge_setpoint_A: float,
    i_load_5v_A: float,
    latch_on: bool,
    pack: BatteryPack,
    *,
    i_aux_batt_side_A: float = 0.0,
    eta_src: float = 1.0,
) -> PowerFlows:
    """Split source power between the load and the battery.

    Parameters
    ----------
    source : Active input.
    p_src_batt_side_W : Source power available after the charger stage (W).
    charge_setpoint_A : Charge-current ceiling from the active charger.
    i_load_5v_A : Load on the 5 V rail (A). Ignored while the latch is off.
    latch_on : Soft-latch state.
    pack : Battery pack (SoC, resistance, protection flags).
    i_aux_batt_side_A : Loads hanging directly on the battery node.
    eta_src : Charger-stage efficiency, used only to report source power and
        its conversion loss.

    The load is fed from the source first, the remainder charges the battery
    up to ``charge_setpoint_A``, and any shortfall comes from the battery.
    If the battery may not discharge, a 5 V shortfall is a brown-out: the
    load goes unpowered and the returned flows carry ``brownout=True``.
    """
    if min(p_src_batt_side_W, charge_setpoint_A, i_load_5v_A, i_aux_batt_side_A) < 0:
        raise DomainError("allocate inputs must be nonnegative")
    i5 = i_load_5v_A if latch_on else 0.0
    load_shed = False
    if i5 > I_OUT_MAX:
        i5 = 0.0
        load_shed = True
    socs, volts = pack.anchor_arrays
    ocv = float(_ocv(pack.soc, socs, volts))
    r = pack.r_internal_ohm
    allow = pack.protection.discharge_enabled
    chg = charge_setpoint_A if pack.protection.charge_enabled else 0.0
    p_usable = p_src_batt_side_W if source != InputSource.NONE else 0.0

    sol, i5, dropout, brownout = _allocate_kernel(
        int(source), p_usable, ocv, r, i5, i_aux_batt_side_A, chg, allow, 0.0
    )
    return _flows_from(sol, i5, i_aux_batt_side_A, eta_src, brownout, load_shed, dropout)


def _flows_from(sol, i5, i_aux, eta_src, brownout, load_shed, dropout) -> PowerFlows:
    v, src_load, src_batt, i_net, deficit, served5, i_bin, i_out = (float(x) for x in sol)
    delivered = v * (src_load + src_batt) + V_OUT * served5
    p_src = delivered / eta_src if delivered > 0 else 0.0
    boost_loss = v * i_bin - V_OUT * i_out
    return PowerFlows(
        i_src_to_load_A=src_load,
        i_src_to_batt_A=src_batt,
        i_batt_net_A=i_net,
        i_load_5v_A=i5,
        p_loss_W=(p_src - delivered) + boost_loss,
        v_term_V=v,
        p_src_W=p_src,
        i_load_batt_side_A=i_bin + i_aux - deficit,
        brownout=brownout,
        load_shed=load_shed,
        dropout=dropout,
    )


# -- soft latch ------------------------------------------------------------------


@njit(cache=True)
def _latch_update(on, down, press_el, sd_el, press_s, released, sd_s, rtc_pulse, t_long, t_sd):
    """One step of the soft-latch machine.

    ``press_s``/``sd_s`` are the seconds the button / shutdown line were
    active within the step; ``released`` marks the end of a press.
    """
    if press_s > 0.0:
        press_el += press_s
        down = True
    if on and down and press_el >= t_long - _EPS_T:
        on = False
    if released:
        if not on and press_el < t_long - _EPS_T:
            on = True
        press_el = 0.0
        down = False
    if on and sd_s > 0.0:
        sd_el += sd_s
        if sd_el >= t_sd - _EPS_T:
            on = False
    if not on or sd_s <= 0.0:
        sd_el = 0.0
    if rtc_pulse and not on:
        on = True
    return on, down, press_el, sd_el


def latch_step(
    st: LatchState,
    ev: ButtonEvent,
    dt_s: float,
    *,
    t_long_s: float = T_LONG_PRESS,
    t_shutdown_s: float = T_SHUTDOWN_HOLD,
) -> LatchState:
    """Advance the soft latch by one step.

    A short press turns the output on at release, a press held for
    ``t_long_s`` turns it off, the shutdown line held low for
    ``t_shutdown_s`` turns it off, and an RTC pulse acts like a short press.
    """
    if not dt_s > 0:
        raise DomainError(f"dt_s must be > 0, got {dt_s}")
    press_s = 0.0
    released = False
    if ev.kind == ButtonKind.PRESS_START:
        press_s = dt_s if ev.held_s is None else ev.held_s
    elif ev.kind == ButtonKind.PRESS_END:
        press_s = 0.0 if ev.held_s is None else ev.held_s
        released = True
    elif st.button_down:
        press_s = dt_s
    sd_s = dt_s if ev.shutdown_line_low else 0.0
    on, down, press_el, sd_el = _latch_update(
        st.on,
        st.button_down,
        st.press_elapsed_s,
        st.shutdown_low_elapsed_s,
        float(press_s),
        released,
        sd_s,
        ev.kind == ButtonKind.RTC_PULSE,
        float(t_long_s),
        float(t_shutdown_s),
    )
    return dataclasses.replace(
        st,
        on=bool(on),
        button_down=bool(down),
        press_elapsed_s=float(press_el),
        shutdown_low_elapsed_s=float(sd_el),
    )
