"""Duty-cycled camera-and-sensor load and the capture schedule.

Default active currents are typical datasheet-order values for the camera
board and sensors; only the sleep floor (211 uA on the battery side) is a
measured figure. All active currents are on the 5 V rail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

from numba import njit

from pmcs.control import ext_power_enable
from pmcs.errors import ConfigError, DomainError

I_SLEEP = 211e-6
DAY_S = 86400.0


class LoadPhase(IntEnum):
    OFF = 0
    SLEEP = 1
    BOOT = 2
    CAPTURE = 3
    IDLE = 4


@dataclass(frozen=True)
class LoadModel:
    i_sleep_A: float = I_SLEEP
    i_idle_5v_A: float = 0.15
    i_boot_5v_A: float = 0.25
    i_capture_5v_A: float = 0.40
    t_boot_s: float = 5.0
    t_capture_s: float = 25.0
    i_sensors_5v_A: float = 0.012

    def __post_init__(self):
        for name in ("i_sleep_A", "i_idle_5v_A", "i_boot_5v_A", "i_capture_5v_A", "i_sensors_5v_A"):
            if getattr(self, name) < 0:
                raise ConfigError(f"load.{name.lower()}", "must be >= 0")
        for name in ("t_boot_s", "t_capture_s"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"load.{name}", "must be > 0")


@dataclass(frozen=True)
class DutyCycleSchedule:
    sunrise_s: float = 6.5 * 3600
    sunset_s: float = 17.5 * 3600
    capture_interval_s: float = 1800.0
    day_count: int = 1

    def __post_init__(self):
        if not self.capture_interval_s > 0:
            raise ConfigError("schedule.capture_interval_s", "must be > 0")
        if not 0 <= self.sunrise_s < self.sunset_s < DAY_S:
            raise ConfigError("schedule.sunrise_s", "need 0 <= sunrise < sunset < 86400")


def schedule_events(sched: DutyCycleSchedule, day: int) -> list[float]:
    """Wake times (seconds since the start of day 0) for one day."""
    if not 0 <= day < sched.day_count:
        raise DomainError(f"day must be in [0, {sched.day_count}), got {day}")
    n = int(math.floor((sched.sunset_s - sched.sunrise_s) / sched.capture_interval_s + 1e-9)) + 1
    base = day * DAY_S + sched.sunrise_s
    return [base + k * sched.capture_interval_s for k in range(n)]


@njit(cache=True)
def _next_wake(t, sunrise, sunset, interval):
    """First scheduled wake strictly after ``t``."""
    day = math.floor(t / DAY_S)
    sod = t - day * DAY_S
    if sod < sunrise:
        return day * DAY_S + sunrise
    k = math.floor((sod - sunrise) / interval + 1e-9) + 1
    cand = sunrise + k * interval
    if cand > sunset + 1e-9:
        return (day + 1) * DAY_S + sunrise
    return day * DAY_S + cand


def load_current_at(
    phase: LoadPhase,
    model: LoadModel,
    sensors_enabled: bool,
    *,
    battery_connected: bool = True,
) -> tuple[float, float]:
    """Return ``(i_5v_A, i_batt_side_extra_A)`` drawn in ``phase``."""
    if phase in (LoadPhase.OFF, LoadPhase.SLEEP):
        return 0.0, model.i_sleep_A if battery_connected else 0.0
    if phase == LoadPhase.BOOT:
        return model.i_boot_5v_A, 0.0
    if phase == LoadPhase.CAPTURE:
        return model.i_capture_5v_A + ext_power_enable(sensors_enabled, model.i_sensors_5v_A), 0.0
    return model.i_idle_5v_A, 0.0
