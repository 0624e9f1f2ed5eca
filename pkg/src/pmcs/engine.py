"""Discrete-time simulation of the whole power board.

Each step runs, in this order: RTC tick, soft latch, load phase, input
selection, active charger, allocation at the battery node, protection
check, coulomb count, energy ledger. The loop is compiled with numba and is
fully deterministic; identical configs give bit-identical results.

Output rows may be decimated with ``output_stride``. A decimated row covers
the ``stride`` steps ending at ``t_s``: state columns (soc, source, modes,
LEDs, latch) are taken from the last step, currents and ``p_loss_W`` are
window means, ``v_bat_V`` is the mean voltage, and ``i_batt_net_A`` is the
mean battery power divided by that voltage so that
``sum(v_bat_V * i_batt_net_A * dt_row)`` is the exact battery energy.
Event counts are summed over the window.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field, fields
from typing import NamedTuple

import numpy as np
from numba import njit

from pmcs.battery import BatteryPack, Fault, _ocv, _protect
from pmcs.cccv import IDLE, _cccv_advance
from pmcs.control import I_RTC_QUIESCENT, AdcDivider, RtcConfig, _rtc_tick
from pmcs.errors import ConfigError, DomainError
from pmcs.harvest import IrradianceProfile, SolarChargerState, SolarPanel, _irradiance, _solar_pre
from pmcs.load import DutyCycleSchedule, LoadModel, _next_wake
from pmcs.powerpath import I_OUT_MAX, T_LONG_PRESS, T_SHUTDOWN_HOLD, V_OUT, _allocate_kernel, _latch_update
from pmcs.usbcharge import UsbChargerState, UsbSupply, _usb_pre

DAY_S = 86400.0

EVENT_NAMES = (
    "RTC_PULSE",
    "LATCH_ON",
    "LATCH_OFF",
    "WAKE",
    "CAPTURE_START",
    "SHUTDOWN_REQUEST",
    "SOURCE_NONE",
    "SOURCE_SOLAR",
    "SOURCE_USB",
    "CHARGE_FULL",
    "LOAD_SHED",
    "DROPOUT",
    "BROWNOUT",
    "OVER_CHARGE",
    "OVER_DISCHARGE",
    "OVER_CURRENT",
    "SHORT_CIRCUIT",
    "REVERSE_POLARITY",
    "SOLAR_REVERSE",
    "SOC_CLAMP",
    "ADC_READ",
    "PROTECTION_RESET",
)
EV = {name: i for i, name in enumerate(EVENT_NAMES)}
N_EV = len(EVENT_NAMES)

_E_RTC, _E_ON, _E_OFF, _E_WAKE, _E_CAPTURE, _E_SDREQ = 0, 1, 2, 3, 4, 5
_E_SRC0 = 6
_E_FULL, _E_SHED, _E_DROPOUT, _E_BROWNOUT = 9, 10, 11, 12
_E_FAULT0 = 12  # + fault code (1..5)
_E_SOLAR_REV, _E_CLAMP, _E_ADC, _E_RESET = 18, 19, 20, 21

SOURCE_NAMES = ("none", "solar", "usb")
MODE_NAMES = ("idle", "trickle", "cc", "cv", "full")
SOLAR_LED_NAMES = ("off", "red", "green", "fault")
USB_LED_NAMES = ("off", "blink", "solid")

CSV_COLUMNS = (
    "t_s",
    "v_bat_V",
    "soc",
    "source",
    "i_solar_A",
    "i_usb_A",
    "i_charge_A",
    "i_load_5v_A",
    "i_batt_net_A",
    "latch_on",
    "charger_mode",
    "led_solar",
    "led_usb",
    "p_loss_W",
    "e_harvested_J",
    "e_consumed_J",
    "e_loss_J",
    "events",
)

_FLOAT_COLS = (
    "t_s",
    "v_bat_V",
    "soc",
    "i_solar_A",
    "i_usb_A",
    "i_charge_A",
    "i_load_5v_A",
    "i_batt_net_A",
    "p_loss_W",
    "e_harvested_J",
    "e_consumed_J",
    "e_loss_J",
)
_INT_COLS = ("source", "latch_on", "charger_mode", "led_solar", "led_usb")

_EPS_T = 1e-6


def _windows(pairs, name):
    out = []
    for a, b in pairs:
        a, b = float(a), float(b)
        if not 0 <= a < b:
            raise ConfigError(name, f"bad interval {a}:{b}")
        out.append((a, b))
    return tuple(sorted(out))


@dataclass(frozen=True)
class SimConfig:
    """Everything a run needs. All sections default to the field case study."""

    dt_s: float = 1.0
    duration_days: float = 1.0
    battery: BatteryPack = field(default_factory=BatteryPack)
    panel: SolarPanel = field(default_factory=SolarPanel)
    irradiance: IrradianceProfile = field(default_factory=IrradianceProfile)
    solar_charger: SolarChargerState = field(default_factory=SolarChargerState)
    usb_charger: UsbChargerState = field(default_factory=UsbChargerState)
    usb: UsbSupply = field(default_factory=UsbSupply)
    load: LoadModel = field(default_factory=LoadModel)
    schedule: DutyCycleSchedule = field(default_factory=DutyCycleSchedule)
    rtc: RtcConfig = field(default_factory=RtcConfig)
    adc: AdcDivider = field(default_factory=AdcDivider)
    adc_sample_on_wake: bool = True
    sensors_enabled: bool = True
    latch_on: bool = False
    auto_shutdown: bool = True
    battery_connected: bool = True
    presses: tuple[tuple[float, float], ...] = ()
    shutdown_times_s: tuple[float, ...] = ()
    solar_reverse_windows_s: tuple[tuple[float, float], ...] = ()
    battery_reverse_times_s: tuple[float, ...] = ()
    battery_reset_times_s: tuple[float, ...] = ()
    t_long_press_s: float = T_LONG_PRESS
    t_shutdown_s: float = T_SHUTDOWN_HOLD
    output_stride: int = 1
    threshold_V: float = 4.0

    def __post_init__(self):
        if not (isinstance(self.dt_s, (int, float)) and self.dt_s > 0 and math.isfinite(self.dt_s)):
            raise ConfigError("simulation.dt_s", f"must be > 0, got {self.dt_s}")
        if not self.duration_days >= 1:
            raise ConfigError("simulation.duration_days", f"must be >= 1, got {self.duration_days}")
        if int(self.output_stride) != self.output_stride or self.output_stride < 1:
            raise ConfigError("simulation.output_stride", "must be an integer >= 1")
        if self.t_long_press_s <= 0 or self.t_shutdown_s <= 0:
            raise ConfigError("buttons.t_long_press_s", "hold times must be > 0")
        presses = []
        for t, d in self.presses:
            if t < 0 or not d > 0:
                raise ConfigError("buttons.presses", f"bad press {t}:{d}")
            presses.append((float(t), float(d)))
        object.__setattr__(self, "presses", tuple(sorted(presses)))
        object.__setattr__(
            self, "solar_reverse_windows_s", _windows(self.solar_reverse_windows_s, "faults.solar_reverse_windows_s")
        )
        for name in ("shutdown_times_s", "battery_reverse_times_s", "battery_reset_times_s"):
            vals = tuple(sorted(float(x) for x in getattr(self, name)))
            if any(x < 0 for x in vals):
                raise ConfigError(name, "times must be >= 0")
            object.__setattr__(self, name, vals)

    @property
    def n_steps(self) -> int:
        return int(round(self.duration_days * DAY_S / self.dt_s))


@dataclass(frozen=True)
class SimStep:
    """One output row. ``t_s`` is the end of the interval the row covers."""

    t_s: float
    v_bat_V: float
    soc: float
    source: str
    i_solar_A: float
    i_usb_A: float
    i_charge_A: float
    i_load_5v_A: float
    i_batt_net_A: float
    latch_on: bool
    charger_mode: str
    led_solar: str
    led_usb: str
    p_loss_W: float
    e_harvested_J: float
    e_consumed_J: float
    e_loss_J: float
    events: tuple[str, ...] = ()


@dataclass(frozen=True)
class Report:
    min_v_bat_V: float
    min_soc: float
    self_sustainable: bool
    total_captures: int
    charge_full_count: int
    brownout_count: int
    energy_residual_J: float
    threshold_V: float
    min_daily_mean_v_bat_V: float
    e_harvested_J: float
    e_consumed_J: float
    e_loss_J: float


class SimResult(Sequence):
    """Column store of output rows; indexing yields :class:`SimStep`.

    ``stats`` holds full-resolution figures that decimation would hide
    (``min_v_bat_V``, ``e_adc_J``, ``e_battery_J``, ``n_steps``).
    """

    def __init__(self, columns: dict[str, np.ndarray], event_counts: np.ndarray, stats: dict | None = None):
        self.columns = columns
        self.event_counts = event_counts
        self.stats = stats or {}

    def __len__(self) -> int:
        return len(self.columns["t_s"])

    def __getitem__(self, i):
        if isinstance(i, slice):
            idx = range(*i.indices(len(self)))
            return [self[j] for j in idx]
        c = self.columns
        if i < 0:
            i += len(self)
        return SimStep(
            t_s=float(c["t_s"][i]),
            v_bat_V=float(c["v_bat_V"][i]),
            soc=float(c["soc"][i]),
            source=SOURCE_NAMES[c["source"][i]],
            i_solar_A=float(c["i_solar_A"][i]),
            i_usb_A=float(c["i_usb_A"][i]),
            i_charge_A=float(c["i_charge_A"][i]),
            i_load_5v_A=float(c["i_load_5v_A"][i]),
            i_batt_net_A=float(c["i_batt_net_A"][i]),
            latch_on=bool(c["latch_on"][i]),
            charger_mode=MODE_NAMES[c["charger_mode"][i]],
            led_solar=SOLAR_LED_NAMES[c["led_solar"][i]],
            led_usb=USB_LED_NAMES[c["led_usb"][i]],
            p_loss_W=float(c["p_loss_W"][i]),
            e_harvested_J=float(c["e_harvested_J"][i]),
            e_consumed_J=float(c["e_consumed_J"][i]),
            e_loss_J=float(c["e_loss_J"][i]),
            events=event_tokens(self.event_counts[i]),
        )

    def __getattr__(self, name):
        cols = self.__dict__.get("columns")
        if cols is not None and name in cols:
            return cols[name]
        raise AttributeError(name)

    def event_count(self, name: str) -> int:
        return int(self.event_counts[:, EV[name]].sum())

    @classmethod
    def from_steps(cls, steps: Sequence[SimStep]) -> SimResult:
        if isinstance(steps, SimResult):
            return steps
        cols: dict[str, list] = {name: [] for name in _FLOAT_COLS + _INT_COLS}
        counts = np.zeros((len(steps), N_EV), dtype=np.int64)
        lookups = {
            "source": SOURCE_NAMES,
            "charger_mode": MODE_NAMES,
            "led_solar": SOLAR_LED_NAMES,
            "led_usb": USB_LED_NAMES,
        }
        for j, s in enumerate(steps):
            for name in _FLOAT_COLS:
                cols[name].append(getattr(s, name))
            for name, table in lookups.items():
                cols[name].append(table.index(getattr(s, name)))
            cols["latch_on"].append(int(bool(s.latch_on)))
            for tok in s.events:
                counts[j, EV[tok]] += 1
        arrays = {name: np.asarray(cols[name], dtype=np.float64) for name in _FLOAT_COLS}
        arrays.update({name: np.asarray(cols[name], dtype=np.int64) for name in _INT_COLS})
        return cls(arrays, counts)


def event_tokens(counts) -> tuple[str, ...]:
    out = []
    for k in np.flatnonzero(counts):
        out.extend([EVENT_NAMES[k]] * int(counts[k]))
    return tuple(out)


# -- kernel ----------------------------------------------------------------------


class _Params(NamedTuple):
    dt: float
    n_steps: int
    stride: int
    soc0: float
    cap_as: float
    r: float
    fault0: int
    dis0: bool
    chg0: bool
    batt_connected: bool
    latch0: bool
    p_rated: float
    k_mppt: float
    v_mpp: float
    irr_kind: int
    irr_sunrise: float
    irr_sunset: float
    irr_peak: float
    s_iset: float
    s_eta: float
    s_tau: float
    s_pmin: float
    s_vrech: float
    u_icc: float
    u_itr: float
    u_vtr: float
    u_iterm: float
    u_tau: float
    u_vrech: float
    u_eta: float
    p_usb: float
    i_sleep: float
    i_idle: float
    i_boot: float
    i_cap: float
    t_boot: float
    t_cap: float
    i_sens: float
    sensors: bool
    sch_sunrise: float
    sch_sunset: float
    sch_interval: float
    rtc_enabled: bool
    rtc_period: float
    rtc_follow: bool
    adc_on_wake: bool
    adc_r: float
    auto_shutdown: bool
    t_long: float
    t_sd: float


@njit(cache=True)
def _overlap(win, j, t, te):
    """Seconds of [t, te) covered by sorted windows, and whether one ends in it."""
    n = win.shape[0]
    while j < n and win[j, 1] <= t:
        j += 1
    tot = 0.0
    ended = False
    k = j
    while k < n and win[k, 0] < te:
        a = max(win[k, 0], t)
        b = min(win[k, 1], te)
        if b > a:
            tot += b - a
        if t < win[k, 1] <= te:
            ended = True
        k += 1
    return j, tot, ended


@njit(cache=True)
def _inside(win, j, t):
    n = win.shape[0]
    while j < n and win[j, 1] <= t:
        j += 1
    return j, j < n and win[j, 0] <= t


@njit(cache=True)
def _hits(times, j, t, te):
    n = times.shape[0]
    while j < n and times[j] < t:
        j += 1
    c = 0
    while j < n and times[j] < te:
        c += 1
        j += 1
    return j, c


@njit(cache=True)
def _run(P, ocv_x, ocv_y, tr_t, tr_g, usb_win, press_win, sd_win, srev_win, brev_t, reset_t):
    n = P.n_steps
    stride = P.stride
    dt = P.dt
    n_rows = (n + stride - 1) // stride
    fcol = np.zeros((n_rows, 12))
    icol = np.zeros((n_rows, 5), dtype=np.int64)
    ev = np.zeros((n_rows, 22), dtype=np.int64)

    soc = P.soc0
    fault = P.fault0
    dis = P.dis0 and P.batt_connected
    chg = P.chg0 and P.batt_connected
    on = P.latch0
    down = False
    press_el = 0.0
    sd_el = 0.0
    epu_sd = False
    phase = 1
    ph_el = 0.0
    if on:
        phase = 2

    armed = P.rtc_enabled
    cd = P.rtc_period
    period = P.rtc_period
    if armed and P.rtc_follow:
        cd = _next_wake(-_EPS_T, P.sch_sunrise, P.sch_sunset, P.sch_interval)
        period = max(cd, dt)

    s_mode = IDLE
    s_cvel = 0.0
    s_ient = 0.0
    u_mode = IDLE
    u_cvel = 0.0
    u_ient = 0.0
    i_net_prev = 0.0
    prev_src = -1
    prev_srev = False

    eh = 0.0
    ec = 0.0
    el = 0.0
    e_adc = 0.0
    e_batt = 0.0
    v_min = math.inf

    jp = 0
    js = 0
    ju = 0
    jv = 0
    jb = 0
    jr = 0

    a_cnt = 0
    a_v = 0.0
    a_vi = 0.0
    a_isol = 0.0
    a_iusb = 0.0
    a_ichg = 0.0
    a_i5 = 0.0
    a_loss = 0.0

    for k in range(n):
        t = k * dt
        te = t + dt
        row = k // stride

        # 1. RTC; a pulse belongs to the step whose end reaches the expiry
        pulse = False
        if armed:
            cd, pulse = _rtc_tick(cd, period, dt)
            if pulse:
                ev[row, _E_RTC] += 1

        # scripted protection events
        jr, c = _hits(reset_t, jr, t, te)
        if c > 0 and P.batt_connected:
            fault = 0
            dis = True
            chg = True
            ev[row, _E_RESET] += c
        jb, c = _hits(brev_t, jb, t, te)
        if c > 0:
            fault = 5
            dis = False
            chg = False
            ev[row, _E_FAULT0 + 5] += c

        # 2. soft latch
        jp, press_s, released = _overlap(press_win, jp, t, te)
        js, sd_s, _ended = _overlap(sd_win, js, t, te)
        if epu_sd:
            sd_s = dt
        was_on = on
        on, down, press_el, sd_el = _latch_update(
            on, down, press_el, sd_el, press_s, released, sd_s, pulse, P.t_long, P.t_sd
        )
        if on and not was_on:
            ev[row, _E_ON] += 1
        if was_on and not on:
            ev[row, _E_OFF] += 1

        # 3. load phase
        if not on:
            phase = 1 if dis else 0
            ph_el = 0.0
            epu_sd = False
        elif phase <= 1:
            phase = 2
            ph_el = 0.0
            ev[row, _E_WAKE] += 1
        elif phase == 2 and ph_el >= P.t_boot - _EPS_T:
            phase = 3
            ph_el = 0.0
            ev[row, _E_CAPTURE] += 1
            if P.adc_on_wake:
                ev[row, _E_ADC] += 1
        elif phase == 3 and ph_el >= P.t_cap - _EPS_T:
            phase = 4
            ph_el = 0.0
            if armed and P.rtc_follow:
                cd = _next_wake(t, P.sch_sunrise, P.sch_sunset, P.sch_interval) - te
                period = max(cd, dt)
            if P.auto_shutdown:
                epu_sd = True
                ev[row, _E_SDREQ] += 1

        ocv = _ocv(soc, ocv_x, ocv_y)
        i5 = 0.0
        aux = 0.0
        adc_drain = 0.0
        if phase == 2:
            i5 = P.i_boot
        elif phase == 3:
            i5 = P.i_cap
            if P.sensors:
                i5 += P.i_sens
            if P.adc_on_wake:
                adc_drain = ocv / P.adc_r
                aux += adc_drain
        elif phase == 4:
            i5 = P.i_idle
        elif phase == 1:
            aux = P.i_sleep
        if on:
            i5 += I_RTC_QUIESCENT
        if i5 > I_OUT_MAX:
            i5 = 0.0
            ev[row, _E_SHED] += 1

        # 4. input selection
        sod = t - math.floor(t / DAY_S) * DAY_S
        g = _irradiance(P.irr_kind, P.irr_sunrise, P.irr_sunset, P.irr_peak, tr_t, tr_g, sod)
        p_pv = P.k_mppt * g * P.p_rated
        ju, usb_now = _inside(usb_win, ju, t)
        jv, srev = _inside(srev_win, jv, t)
        srev = srev and p_pv > 0.0
        if usb_now:
            src = 2
        elif p_pv > 0.0:
            src = 1
        else:
            src = 0
        if src != prev_src:
            ev[row, _E_SRC0 + src] += 1
        if srev and not prev_srev:
            ev[row, _E_SOLAR_REV] += 1

        # 5. active charger
        p_use = 0.0
        lim = 0.0
        full = False
        i_cvl = 0.0
        s_led = 3 if srev else 0
        u_led = 0
        eta_src = 1.0
        if src == 1:
            s_mode, s_led, p_use, lim, full, i_cvl = _solar_pre(
                s_mode, s_cvel, s_ient, p_pv, ocv, P.r, chg, srev,
                P.s_iset, P.s_pmin, P.s_tau, P.s_vrech, P.s_eta,
            )
            eta_src = P.s_eta
            u_mode = IDLE
        elif src == 2:
            u_mode, u_led, p_use, lim, full, i_cvl = _usb_pre(
                u_mode, u_cvel, u_ient, P.p_usb, ocv, P.r, chg,
                P.u_icc, P.u_itr, P.u_vtr, P.u_iterm, P.u_tau, P.u_vrech, P.u_eta,
            )
            eta_src = P.u_eta
            s_mode = IDLE
        else:
            s_mode = IDLE
            u_mode = IDLE
        if full:
            ev[row, _E_FULL] += 1

        # 6. allocation
        sol, i5, dropout, brown = _allocate_kernel(src, p_use, ocv, P.r, i5, aux, lim, dis, i_net_prev)
        if dropout:
            ev[row, _E_DROPOUT] += 1

        # 7. protection
        for _ in range(4):
            if brown:
                ev[row, _E_BROWNOUT] += 1
                if on:
                    ev[row, _E_OFF] += 1
                on = False
                down = False
                press_el = 0.0
                sd_el = 0.0
                epu_sd = False
                phase = 0
                ph_el = 0.0
                brown = False
            i_net = sol[3]
            v_chk = sol[0]
            if i_net < 0.0 and soc + i_net * dt / P.cap_as < -1e-12:
                v_chk = 0.0
            f2, dis2, chg2 = _protect(fault, dis, chg, i_net, v_chk)
            if f2 == fault and dis2 == dis and chg2 == chg:
                break
            ev[row, _E_FAULT0 + f2] += 1
            fault = f2
            dis = dis2
            if chg and not chg2:
                lim = 0.0
            chg = chg2
            sol, i5, dropout, brown = _allocate_kernel(src, p_use, ocv, P.r, i5, aux, lim, dis, sol[3])
            if dropout:
                ev[row, _E_DROPOUT] += 1
        if brown:
            ev[row, _E_BROWNOUT] += 1
            if on:
                ev[row, _E_OFF] += 1
            on = False
            down = False
            press_el = 0.0
            sd_el = 0.0
            epu_sd = False
            phase = 0
            ph_el = 0.0

        v = sol[0]
        src_load = sol[1]
        src_batt = sol[2]
        i_net = sol[3]
        deficit = sol[4]
        served5 = sol[5]
        i_bin = sol[6]
        i_out = sol[7]

        # 8. coulomb count
        soc_new = soc + i_net * dt / P.cap_as
        if soc_new > 1.0:
            soc_new = 1.0
            ev[row, _E_CLAMP] += 1
        elif soc_new < 0.0:
            soc_new = 0.0
            ev[row, _E_CLAMP] += 1

        # the reported mode is the one the step ended in, so a step whose
        # current was already held down by the voltage limit reads as CV
        out_mode = 0
        if src == 1:
            if s_mode != IDLE:
                s_mode, s_cvel, s_ient = _cccv_advance(s_mode, s_cvel, s_ient, src_batt, i_cvl, P.s_iset, dt)
            out_mode = s_mode
        elif src == 2:
            if u_mode != IDLE:
                u_mode, u_cvel, u_ient = _cccv_advance(u_mode, u_cvel, u_ient, src_batt, i_cvl, P.u_icc, dt)
            out_mode = u_mode
        if s_mode == IDLE:
            s_cvel = 0.0
            s_ient = 0.0
        if u_mode == IDLE:
            u_cvel = 0.0
            u_ient = 0.0

        # 9. ledger
        delivered = v * (src_load + src_batt) + V_OUT * served5
        p_src = delivered / eta_src if delivered > 0.0 else 0.0
        p_loss = (p_src - delivered) + (v * i_bin - V_OUT * i_out)
        aux_served = aux - deficit
        p_cons = V_OUT * i5 + v * aux_served
        eh += p_src * dt
        ec += p_cons * dt
        el += p_loss * dt
        e_batt += v * i_net * dt
        if deficit <= 0.0:
            e_adc += v * adc_drain * dt
        if v < v_min:
            v_min = v

        i_sol = p_src / P.v_mpp if src == 1 else 0.0
        i_usb = p_src / V_OUT if src == 2 else 0.0

        a_cnt += 1
        a_v += v
        a_vi += v * i_net
        a_isol += i_sol
        a_iusb += i_usb
        a_ichg += src_batt
        a_i5 += i5
        a_loss += p_loss
        if a_cnt == stride or k == n - 1:
            fcol[row, 0] = te
            fcol[row, 1] = a_v / a_cnt
            fcol[row, 2] = soc_new
            fcol[row, 3] = a_isol / a_cnt
            fcol[row, 4] = a_iusb / a_cnt
            fcol[row, 5] = a_ichg / a_cnt
            fcol[row, 6] = a_i5 / a_cnt
            fcol[row, 7] = i_net if a_cnt == 1 else a_vi / a_v
            fcol[row, 8] = a_loss / a_cnt
            fcol[row, 9] = eh
            fcol[row, 10] = ec
            fcol[row, 11] = el
            icol[row, 0] = src
            icol[row, 1] = 1 if on else 0
            icol[row, 2] = out_mode
            icol[row, 3] = s_led
            icol[row, 4] = u_led
            a_cnt = 0
            a_v = 0.0
            a_vi = 0.0
            a_isol = 0.0
            a_iusb = 0.0
            a_ichg = 0.0
            a_i5 = 0.0
            a_loss = 0.0

        soc = soc_new
        i_net_prev = i_net
        prev_src = src
        prev_srev = srev
        if on:
            ph_el += dt

    stats = np.array([v_min, e_adc, e_batt])
    return fcol, icol, ev, stats


def _win_array(pairs) -> np.ndarray:
    if not pairs:
        return np.zeros((0, 2))
    return np.ascontiguousarray(np.asarray(pairs, dtype=np.float64).reshape(-1, 2))


def _times_array(times) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(times, dtype=np.float64).reshape(-1))


def _params(cfg: SimConfig) -> _Params:
    b, pn, irr, sc, uc, ld, sch = (
        cfg.battery, cfg.panel, cfg.irradiance, cfg.solar_charger, cfg.usb_charger, cfg.load, cfg.schedule,
    )
    prot = b.protection
    return _Params(
        dt=float(cfg.dt_s),
        n_steps=cfg.n_steps,
        stride=int(cfg.output_stride),
        soc0=float(b.soc),
        cap_as=b.capacity_Ah * 3600.0,
        r=float(b.r_internal_ohm),
        fault0=int(prot.fault),
        dis0=bool(prot.discharge_enabled),
        chg0=bool(prot.charge_enabled),
        batt_connected=bool(cfg.battery_connected),
        latch0=bool(cfg.latch_on),
        p_rated=float(pn.p_rated_W),
        k_mppt=float(pn.k_mppt),
        v_mpp=float(pn.v_mpp),
        irr_kind=int(irr.kind),
        irr_sunrise=float(irr.sunrise_s),
        irr_sunset=float(irr.sunset_s),
        irr_peak=float(irr.peak_fraction),
        s_iset=float(sc.i_setpoint_A),
        s_eta=float(sc.eta),
        s_tau=float(sc.tau_cv_s),
        s_pmin=float(sc.p_min_W),
        s_vrech=float(sc.v_recharge),
        u_icc=float(uc.i_cc_A),
        u_itr=float(uc.i_trickle_A),
        u_vtr=float(uc.v_trickle),
        u_iterm=float(uc.i_term_A),
        u_tau=float(uc.tau_cv_s),
        u_vrech=float(uc.v_recharge),
        u_eta=float(uc.eta),
        p_usb=float(cfg.usb.p_usb_W),
        i_sleep=float(ld.i_sleep_A),
        i_idle=float(ld.i_idle_5v_A),
        i_boot=float(ld.i_boot_5v_A),
        i_cap=float(ld.i_capture_5v_A),
        t_boot=float(ld.t_boot_s),
        t_cap=float(ld.t_capture_s),
        i_sens=float(ld.i_sensors_5v_A),
        sensors=bool(cfg.sensors_enabled),
        sch_sunrise=float(sch.sunrise_s),
        sch_sunset=float(sch.sunset_s),
        sch_interval=float(sch.capture_interval_s),
        rtc_enabled=bool(cfg.rtc.enabled),
        rtc_period=float(cfg.rtc.wake_period_s),
        rtc_follow=bool(cfg.rtc.follow_schedule),
        adc_on_wake=bool(cfg.adc_sample_on_wake),
        adc_r=float(cfg.adc.r_total_ohm),
        auto_shutdown=bool(cfg.auto_shutdown),
        t_long=float(cfg.t_long_press_s),
        t_sd=float(cfg.t_shutdown_s),
    )


def round_sig(a: np.ndarray, digits: int = 9) -> np.ndarray:
    """Round to ``digits`` significant digits (to within one ulp)."""
    a = np.asarray(a, dtype=np.float64)
    out = a.copy()
    nz = (a != 0) & np.isfinite(a)
    e = np.floor(np.log10(np.abs(a[nz])))
    scale = 10.0 ** (digits - 1 - e)
    out[nz] = np.round(a[nz] * scale) / scale
    return out


def simulate(cfg: SimConfig) -> SimResult:
    """Run ``cfg`` and return its output rows.

    Output columns carry the CSV precision (9 significant digits), so a
    report computed here and one recomputed from the written CSV agree. The
    simulation state itself is integrated at full double precision.
    """
    socs, volts = cfg.battery.anchor_arrays
    tr_t, tr_g = cfg.irradiance.trace_arrays
    presses = _win_array([(t, t + d) for t, d in cfg.presses])
    shutdowns = _win_array([(t, t + cfg.t_shutdown_s) for t in cfg.shutdown_times_s])
    fcol, icol, ev, stats = _run(
        _params(cfg),
        socs,
        volts,
        tr_t,
        tr_g,
        _win_array(cfg.usb.windows_s),
        presses,
        shutdowns,
        _win_array(cfg.solar_reverse_windows_s),
        _times_array(cfg.battery_reverse_times_s),
        _times_array(cfg.battery_reset_times_s),
    )
    columns = {name: round_sig(fcol[:, i]) for i, name in enumerate(_FLOAT_COLS)}
    columns.update({name: icol[:, i] for i, name in enumerate(_INT_COLS)})
    return SimResult(
        columns,
        ev,
        {"min_v_bat_V": float(stats[0]), "e_adc_J": float(stats[1]), "e_battery_J": float(stats[2]), "n_steps": cfg.n_steps},
    )


# -- analysis --------------------------------------------------------------------


def _row_durations(t: np.ndarray) -> np.ndarray:
    return np.diff(t, prepend=0.0)


def ledger_residual(steps: Sequence[SimStep]) -> float:
    """|battery energy - (harvested - consumed - lost)| over the whole run (J)."""
    res = SimResult.from_steps(steps)
    if len(res) == 0:
        raise DomainError("ledger_residual needs a nonempty series")
    c = res.columns
    e_batt = math.fsum(c["v_bat_V"] * c["i_batt_net_A"] * _row_durations(c["t_s"]))
    return abs(e_batt - (c["e_harvested_J"][-1] - c["e_consumed_J"][-1] - c["e_loss_J"][-1]))


def daily_mean(
    steps: Sequence[SimStep], column: str = "v_bat_V", window_s: tuple[float, float] | None = None
) -> np.ndarray:
    """Time-weighted mean of ``column`` per simulated day.

    ``window_s`` restricts each day to ``(start, end)`` seconds of day, e.g.
    ``(7 * 3600, 16.5 * 3600)``. Days with no rows in the window are NaN.
    """
    res = SimResult.from_steps(steps)
    if len(res) == 0:
        raise DomainError("daily_mean needs a nonempty series")
    t = res.columns["t_s"]
    w = _row_durations(t)
    mid = t - 0.5 * w
    day = np.floor(mid / DAY_S).astype(np.int64)
    keep = np.ones(len(t), dtype=bool)
    if window_s is not None:
        sod = mid - day * DAY_S
        keep = (sod >= window_s[0]) & (sod <= window_s[1])
    n_days = int(day.max()) + 1
    num = np.bincount(day[keep], weights=(res.columns[column] * w)[keep], minlength=n_days)
    den = np.bincount(day[keep], weights=w[keep], minlength=n_days)
    with np.errstate(invalid="ignore", divide="ignore"):
        return num / den


def summarize(steps: Sequence[SimStep], threshold_V: float = 4.0) -> Report:
    res = SimResult.from_steps(steps)
    if len(res) == 0:
        raise DomainError("summarize needs a nonempty series")
    c = res.columns
    min_v = float(np.min(c["v_bat_V"]))
    return Report(
        min_v_bat_V=min_v,
        min_soc=float(np.min(c["soc"])),
        self_sustainable=bool(min_v >= threshold_V),
        total_captures=res.event_count("CAPTURE_START"),
        charge_full_count=res.event_count("CHARGE_FULL"),
        brownout_count=res.event_count("BROWNOUT"),
        energy_residual_J=float(ledger_residual(res)),
        threshold_V=float(threshold_V),
        min_daily_mean_v_bat_V=float(np.nanmin(daily_mean(res))),
        e_harvested_J=float(c["e_harvested_J"][-1]),
        e_consumed_J=float(c["e_consumed_J"][-1]),
        e_loss_J=float(c["e_loss_J"][-1]),
    )


def report_fields() -> tuple[str, ...]:
    return tuple(f.name for f in fields(Report))


__all__ = [
    "CSV_COLUMNS",
    "EVENT_NAMES",
    "Report",
    "SimConfig",
    "SimResult",
    "SimStep",
    "daily_mean",
    "ledger_residual",
    "simulate",
    "summarize",
    "Fault",
]
