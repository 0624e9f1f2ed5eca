"""Lithium-ion pack: coulomb counting on an OCV curve, plus the protection IC.

The pack is a value type. Every operation returns a new object; nothing is
mutated in place. The scalar kernels (``_ocv``, ``_protect``) are compiled
with numba and shared with the simulation loop in :mod:`pmcs.engine`.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np
from numba import njit

from pmcs.errors import ConfigError, DomainError

DEFAULT_OCV_ANCHORS: tuple[tuple[float, float], ...] = (
    (0.0, 3.0),
    (0.1, 3.5),
    (0.5, 3.7),
    (0.9, 4.0),
    (1.0, 4.2),
)

V_OVER_DISCHARGE = 2.4
V_OVER_CHARGE = 4.28
I_OVER_CURRENT = 6.0
I_SHORT_CIRCUIT = 12.0


class Fault(IntEnum):
    NONE = 0
    OVER_CHARGE = 1
    OVER_DISCHARGE = 2
    OVER_CURRENT = 3
    SHORT_CIRCUIT = 4
    REVERSE_POLARITY = 5


@dataclass(frozen=True)
class ProtectionState:
    discharge_enabled: bool = True
    charge_enabled: bool = True
    fault: Fault = Fault.NONE


@dataclass(frozen=True)
class BatteryPack:
    """Battery pack state.

    Parameters
    ----------
    capacity_Ah : Usable capacity (Ah).
    soc : State of charge, fraction in [0, 1].
    r_internal_ohm : Series resistance of the pack (ohm).
    ocv_anchors : ``(soc, volts)`` pairs, strictly increasing in both, from
        soc 0 to soc 1. OCV is linearly interpolated between anchors.
    protection : Protection IC state.
    """

    capacity_Ah: float = 10.0
    soc: float = 1.0
    r_internal_ohm: float = 0.05
    ocv_anchors: tuple[tuple[float, float], ...] = DEFAULT_OCV_ANCHORS
    protection: ProtectionState = field(default_factory=ProtectionState)

    def __post_init__(self):
        if not self.capacity_Ah > 0:
            raise ConfigError("battery.capacity_ah", f"must be > 0, got {self.capacity_Ah}")
        if not 0.0 <= self.soc <= 1.0:
            raise ConfigError("battery.soc", f"must be in [0, 1], got {self.soc}")
        if not 0.0 <= self.r_internal_ohm <= 0.5:
            raise ConfigError(
                "battery.r_internal_ohm", f"must be in [0, 0.5], got {self.r_internal_ohm}"
            )
        anchors = tuple((float(s), float(v)) for s, v in self.ocv_anchors)
        object.__setattr__(self, "ocv_anchors", anchors)
        _validate_anchors(anchors)

    @property
    def anchor_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        a = np.asarray(self.ocv_anchors, dtype=np.float64)
        return np.ascontiguousarray(a[:, 0]), np.ascontiguousarray(a[:, 1])


def _validate_anchors(anchors):
    if len(anchors) < 2:
        raise ConfigError("battery.ocv_anchors", "need at least two anchors")
    socs = [s for s, _ in anchors]
    volts = [v for _, v in anchors]
    if socs[0] != 0.0 or socs[-1] != 1.0:
        raise ConfigError("battery.ocv_anchors", "first anchor must be soc 0 and last soc 1")
    if any(b <= a for a, b in zip(socs, socs[1:])):
        raise ConfigError("battery.ocv_anchors", "soc values must be strictly increasing")
    if any(b <= a for a, b in zip(volts, volts[1:])):
        raise ConfigError("battery.ocv_anchors", "voltages must be strictly increasing")
    if volts[0] <= 0:
        raise ConfigError("battery.ocv_anchors", "voltages must be positive")


@njit(cache=True)
def _ocv(soc, socs, volts):
    return np.interp(soc, socs, volts)


@njit(cache=True)
def _protect(fault, discharge_enabled, charge_enabled, i_a, v_term):
    """Evaluate protection thresholds; flags only ever latch off."""
    new = 0
    if abs(i_a) > I_SHORT_CIRCUIT:
        new = 4
    elif abs(i_a) > I_OVER_CURRENT:
        new = 3
    elif i_a < 0.0 and v_term <= V_OVER_DISCHARGE:
        new = 2
    elif i_a > 0.0 and v_term >= V_OVER_CHARGE:
        new = 1
    if new == 0:
        return fault, discharge_enabled, charge_enabled
    if new == 1 or ((new == 3 or new == 4) and i_a > 0.0):
        charge_enabled = False
    else:
        discharge_enabled = False
    return new, discharge_enabled, charge_enabled


def ocv_from_soc(pack: BatteryPack, soc: float) -> float:
    """Open-circuit voltage at ``soc`` by piecewise-linear interpolation."""
    if not 0.0 <= soc <= 1.0:
        raise DomainError(f"soc must be in [0, 1], got {soc}")
    socs, volts = pack.anchor_arrays
    return float(_ocv(float(soc), socs, volts))


def terminal_voltage(pack: BatteryPack, i_net_A: float) -> float:
    """OCV plus the IR term; ``i_net_A`` is positive while charging."""
    return ocv_from_soc(pack, pack.soc) + i_net_A * pack.r_internal_ohm


def step_soc(pack: BatteryPack, i_net_A: float, dt_s: float) -> BatteryPack:
    """Coulomb-count one step and clamp the result to [0, 1]."""
    if not dt_s > 0:
        raise DomainError(f"dt_s must be > 0, got {dt_s}")
    soc = pack.soc + i_net_A * dt_s / (pack.capacity_Ah * 3600.0)
    return dataclasses.replace(pack, soc=min(max(soc, 0.0), 1.0))


def check_protection(pack: BatteryPack, i_A: float, v_term: float) -> ProtectionState:
    p = pack.protection
    fault, dis, chg = _protect(int(p.fault), p.discharge_enabled, p.charge_enabled, float(i_A), float(v_term))
    return ProtectionState(discharge_enabled=bool(dis), charge_enabled=bool(chg), fault=Fault(fault))


def reset_protection(pack: BatteryPack) -> BatteryPack:
    """Press the reset button on the protection IC."""
    return dataclasses.replace(pack, protection=ProtectionState())
