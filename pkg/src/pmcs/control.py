"""Always-on RTC, switched battery-voltage divider, external supply enable."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import IntEnum

from numba import njit

from pmcs.errors import ConfigError, DomainError

I_RTC_QUIESCENT = 400e-9
_EPS_T = 1e-6


class RtcSupply(IntEnum):
    PRIMARY_5V = 0
    BATTERY = 1


@dataclass(frozen=True)
class RtcState:
    """Countdown timer with periodic auto-rearm.

    ``countdown_s`` is ``None`` while no countdown is programmed. The clock
    is ideal: ``epoch_s`` advances by exactly ``dt`` per tick.
    """

    epoch_s: float = 0.0
    countdown_s: float | None = None
    period_s: float | None = None
    pulse_width_s: float = 1.0
    supply: RtcSupply = RtcSupply.BATTERY
    i_quiescent_A: float = I_RTC_QUIESCENT

    def __post_init__(self):
        if self.countdown_s is not None:
            if self.countdown_s < 0:
                raise ConfigError("rtc.countdown_s", "must be >= 0")
            if self.period_s is None:
                object.__setattr__(self, "period_s", self.countdown_s)
        if self.period_s is not None and not self.period_s > 0:
            raise ConfigError("rtc.wake_period_s", "must be > 0")

    def program(self, countdown_s: float) -> RtcState:
        """Program a new countdown; it re-arms with the same period."""
        return dataclasses.replace(self, countdown_s=countdown_s, period_s=countdown_s)


@dataclass(frozen=True)
class RtcConfig:
    """How the RTC wakes the system during a simulation.

    With ``follow_schedule`` the camera firmware programs each countdown to
    land on the next scheduled capture; otherwise the RTC simply pulses
    every ``wake_period_s`` from the start of the run.
    """

    enabled: bool = True
    wake_period_s: float = 1800.0
    follow_schedule: bool = True

    def __post_init__(self):
        if not self.wake_period_s > 0:
            raise ConfigError("rtc.wake_period_s", "must be > 0")


@dataclass(frozen=True)
class AdcDivider:
    enabled: bool = False
    ratio: float = 0.5
    r_total_ohm: float = 200_000.0

    def __post_init__(self):
        if not 0 < self.ratio < 1:
            raise ConfigError("adc.ratio", f"must be in (0, 1), got {self.ratio}")
        if not self.r_total_ohm > 0:
            raise ConfigError("adc.r_total_ohm", "must be > 0")


@njit(cache=True)
def _rtc_tick(countdown, period, dt):
    countdown -= dt
    if countdown <= _EPS_T:
        return countdown + period, True
    return countdown, False


def rtc_tick(st: RtcState, dt_s: float) -> tuple[RtcState, bool]:
    """Advance the clock; ``pulse`` is true on the tick the countdown expires."""
    if not dt_s > 0:
        raise DomainError(f"dt_s must be > 0, got {dt_s}")
    epoch = st.epoch_s + dt_s
    if st.countdown_s is None:
        return dataclasses.replace(st, epoch_s=epoch), False
    countdown, pulse = _rtc_tick(st.countdown_s, st.period_s, float(dt_s))
    return dataclasses.replace(st, epoch_s=epoch, countdown_s=float(countdown)), bool(pulse)


def rtc_supply_select(latch_on: bool, v_bat: float) -> RtcSupply:
    """The 5 V output takes priority; the battery backs the clock otherwise."""
    return RtcSupply.PRIMARY_5V if latch_on else RtcSupply.BATTERY


def adc_read_vbat(div: AdcDivider, v_bat: float) -> tuple[float, float]:
    """Return ``(reading_V, drain_A)``; a disabled divider reads and draws nothing."""
    if not div.enabled or v_bat <= 0:
        return 0.0, 0.0
    return div.ratio * v_bat, v_bat / div.r_total_ohm


def ext_power_enable(enabled: bool, i_ext_A: float, latch_on: bool = True) -> float:
    """5 V current drawn by external devices behind the ground-side switch."""
    if i_ext_A < 0:
        raise DomainError(f"i_ext_A must be >= 0, got {i_ext_A}")
    return i_ext_A if enabled and latch_on else 0.0
