"""Solar input: irradiance profile, panel, and the solar CC/CV charger.

The charger tracks the panel's maximum power point with a fixed input
voltage, which costs a constant fraction ``k_mppt`` of the ideal power.
Its load-sharing topology taps the system load ahead of the charge-current
sense resistor, so the load is served from solar first and never eats into
the measured charge current.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from numba import njit

from pmcs.battery import BatteryPack, _ocv
from pmcs.cccv import CC, CV, FULL, IDLE, V_RECHARGE, ChargeMode, InputSource, _cccv_advance, _cccv_limit
from pmcs.errors import ConfigError, DomainError
from pmcs.powerpath import _solve_node

__all__ = [
    "ChargeMode",
    "InputSource",
    "IrradianceKind",
    "IrradianceProfile",
    "SolarChargerState",
    "SolarLed",
    "SolarPanel",
    "irradiance_at",
    "pv_available_power",
    "select_input",
    "solar_charger_step",
]

DAY_S = 86400.0


class IrradianceKind(IntEnum):
    CLEAR_SKY = 0
    CONSTANT = 1
    TRACE = 2


class SolarLed(IntEnum):
    OFF = 0
    RED = 1
    GREEN = 2
    FAULT = 3


@dataclass(frozen=True)
class SolarPanel:
    p_rated_W: float = 5.0
    v_oc: float = 21.6
    v_mpp: float = 18.0
    k_mppt: float = 0.85

    def __post_init__(self):
        if not self.p_rated_W > 0:
            raise ConfigError("panel.p_rated_w", f"must be > 0, got {self.p_rated_W}")
        if not 0 < self.v_mpp < self.v_oc:
            raise ConfigError("panel.v_mpp", "need 0 < v_mpp < v_oc")
        if not 0 < self.k_mppt <= 1:
            raise ConfigError("panel.k_mppt", f"must be in (0, 1], got {self.k_mppt}")


@dataclass(frozen=True)
class IrradianceProfile:
    """Daily irradiance as a fraction of the panel's rated condition.

    ``CLEAR_SKY`` is a half-sine between sunrise and sunset scaled by
    ``peak_fraction``; ``CONSTANT`` is flat daylight; ``TRACE`` linearly
    interpolates ``(seconds_of_day, fraction)`` points. The profile repeats
    every day.
    """

    kind: IrradianceKind = IrradianceKind.CLEAR_SKY
    sunrise_s: float = 6.5 * 3600
    sunset_s: float = 17.5 * 3600
    peak_fraction: float = 1.0
    trace: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", IrradianceKind(self.kind))
        if not 0 <= self.sunrise_s < self.sunset_s <= DAY_S:
            raise ConfigError("irradiance.sunrise_s", "need 0 <= sunrise < sunset <= 86400")
        if not 0 <= self.peak_fraction <= 1:
            raise ConfigError("irradiance.peak_fraction", "must be in [0, 1]")
        if self.kind == IrradianceKind.TRACE:
            if self.trace is None or len(self.trace) < 2:
                raise ConfigError("irradiance.trace", "a trace needs at least 2 points")
            tr = tuple((float(t), float(g)) for t, g in self.trace)
            if any(b[0] <= a[0] for a, b in zip(tr, tr[1:])):
                raise ConfigError("irradiance.trace", "times must be strictly increasing")
            if any(not 0 <= g <= 1 for _, g in tr):
                raise ConfigError("irradiance.trace", "fractions must be in [0, 1]")
            object.__setattr__(self, "trace", tr)

    @property
    def trace_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if self.trace is None:
            return np.zeros(1), np.zeros(1)
        a = np.asarray(self.trace, dtype=np.float64)
        return np.ascontiguousarray(a[:, 0]), np.ascontiguousarray(a[:, 1])


@dataclass(frozen=True)
class SolarChargerState:
    """Solar charger state and settings.

    ``i_setpoint_A`` is 2 A, or 3 A with the jumper fitted. Termination
    happens at a tenth of the setpoint.
    """

    mode: ChargeMode = ChargeMode.IDLE
    i_setpoint_A: float = 2.0
    led: SolarLed = SolarLed.OFF
    eta: float = 0.94
    tau_cv_s: float = 1800.0
    p_min_W: float = 0.05
    v_recharge: float = V_RECHARGE
    cv_elapsed_s: float = 0.0
    i_cv_entry_A: float = 0.0

    def __post_init__(self):
        if self.i_setpoint_A not in (2.0, 3.0):
            raise ConfigError("solar_charger.jumper_3a", "setpoint must be 2 A or 3 A")
        if not 0 < self.eta <= 1:
            raise ConfigError("solar_charger.eta", f"must be in (0, 1], got {self.eta}")
        if not self.tau_cv_s > 0:
            raise ConfigError("solar_charger.tau_cv_s", "must be > 0")
        if self.p_min_W < 0:
            raise ConfigError("solar_charger.p_min_w", "must be >= 0")

    @classmethod
    def with_jumper(cls, jumper_3A: bool, **kw) -> SolarChargerState:
        return cls(i_setpoint_A=3.0 if jumper_3A else 2.0, **kw)

    @property
    def i_term_A(self) -> float:
        return 0.1 * self.i_setpoint_A


@njit(cache=True)
def _irradiance(kind, sunrise, sunset, peak, tt, tg, t_sod):
    if kind == 2:
        return np.interp(t_sod, tt, tg)
    if t_sod < sunrise or t_sod > sunset:
        return 0.0
    if kind == 1:
        return peak
    return max(peak * math.sin(math.pi * (t_sod - sunrise) / (sunset - sunrise)), 0.0)


@njit(cache=True)
def _solar_pre(mode, cv_el, i_entry, p_pv, ocv, r, charge_enabled, reverse, i_set, p_min, tau, v_rech, eta):
    """Charger decision before allocation.

    Returns ``(mode, led, p_usable, i_limit, full_event, i_cv_limit)``.
    """
    if reverse:
        return IDLE, 3, 0.0, 0.0, False, 0.0
    if p_pv <= 0.0 or p_pv < p_min:
        return IDLE, 0, 0.0, 0.0, False, 0.0
    if not charge_enabled:
        return IDLE, 0, eta * p_pv, 0.0, False, 0.0
    if mode == IDLE:
        mode = CC
    mode, lim, full, i_cvl = _cccv_limit(mode, cv_el, i_entry, ocv, r, i_set, 4.2, tau, 0.1 * i_set, v_rech)
    led = 2 if mode == FULL else 1
    return mode, led, eta * p_pv, lim, full, i_cvl


def irradiance_at(profile: IrradianceProfile, t_s: float) -> float:
    """Irradiance fraction at ``t_s`` seconds into the day."""
    if not 0 <= t_s < DAY_S:
        raise DomainError(f"t_s must be in [0, 86400), got {t_s}")
    tt, tg = profile.trace_arrays
    return float(
        _irradiance(int(profile.kind), profile.sunrise_s, profile.sunset_s, profile.peak_fraction, tt, tg, float(t_s))
    )


def pv_available_power(panel: SolarPanel, g: float) -> float:
    """Power the fixed-voltage tracker extracts at irradiance fraction ``g``."""
    if not 0 <= g <= 1:
        raise DomainError(f"g must be in [0, 1], got {g}")
    return panel.k_mppt * g * panel.p_rated_W


def select_input(solar_present: bool, usb_present: bool) -> InputSource:
    """USB wins whenever it is present; solar is disconnected from its charger."""
    if usb_present:
        return InputSource.USB
    if solar_present:
        return InputSource.SOLAR
    return InputSource.NONE


def solar_charger_step(
    st: SolarChargerState,
    p_pv_W: float,
    pack: BatteryPack,
    i_load_batt_side_A: float,
    dt_s: float,
    *,
    reverse_polarity: bool = False,
) -> tuple[SolarChargerState, float, float, float]:
    """Run the solar charger for one step.

    Returns ``(state, i_charge_A, i_to_load_A, p_loss_W)``. The load is fed
    from the usable power first; the remainder charges the pack. Any load
    the panel cannot cover is left to the battery (not reported here).
    """
    if not dt_s > 0:
        raise DomainError(f"dt_s must be > 0, got {dt_s}")
    if p_pv_W < 0 or i_load_batt_side_A < 0:
        raise DomainError("p_pv_W and i_load_batt_side_A must be >= 0")
    socs, volts = pack.anchor_arrays
    ocv = float(_ocv(pack.soc, socs, volts))
    r = pack.r_internal_ohm
    prot = pack.protection
    mode, led, p_usable, lim, _, i_cvl = _solar_pre(
        int(st.mode), st.cv_elapsed_s, st.i_cv_entry_A, float(p_pv_W), ocv, r,
        prot.charge_enabled, reverse_polarity, st.i_setpoint_A, st.p_min_W,
        st.tau_cv_s, st.v_recharge, st.eta,
    )
    sol = _solve_node(1, p_usable, ocv, r, 0.0, float(i_load_batt_side_A), lim, prot.discharge_enabled, 0.0)
    v, to_load, i_chg = sol[0], sol[1], sol[2]
    delivered = v * (to_load + i_chg)
    p_loss = delivered * (1.0 / st.eta - 1.0)
    cv_el, i_entry = st.cv_elapsed_s, st.i_cv_entry_A
    if mode == IDLE:
        cv_el, i_entry = 0.0, 0.0
    else:
        mode, cv_el, i_entry = _cccv_advance(mode, cv_el, i_entry, i_chg, i_cvl, st.i_setpoint_A, float(dt_s))
    new = dataclasses.replace(
        st, mode=ChargeMode(mode), led=SolarLed(led), cv_elapsed_s=float(cv_el), i_cv_entry_A=float(i_entry)
    )
    return new, float(i_chg), float(to_load), float(p_loss)
