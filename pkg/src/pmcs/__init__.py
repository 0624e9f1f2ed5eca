"""Discrete-time digital twin of a solar/USB power-management board for an
embedded vision camera: battery, chargers, power path, soft latch, RTC and
duty-cycled load, composed by a deterministic simulation engine."""

from pmcs.battery import (
    BatteryPack,
    Fault,
    ProtectionState,
    check_protection,
    ocv_from_soc,
    reset_protection,
    step_soc,
    terminal_voltage,
)
from pmcs.cccv import ChargeMode, InputSource
from pmcs.control import AdcDivider, RtcConfig, RtcState, RtcSupply, adc_read_vbat, ext_power_enable, rtc_supply_select, rtc_tick
from pmcs.engine import EVENT_NAMES, Report, SimConfig, SimResult, SimStep, daily_mean, ledger_residual, simulate, summarize
from pmcs.errors import BoostOverCurrent, ConfigError, CsvFormatError, DomainError, RegulatorDropout
from pmcs.harvest import (
    IrradianceKind,
    IrradianceProfile,
    SolarChargerState,
    SolarLed,
    SolarPanel,
    irradiance_at,
    pv_available_power,
    select_input,
    solar_charger_step,
)
from pmcs.load import DutyCycleSchedule, LoadModel, LoadPhase, load_current_at, schedule_events
from pmcs.powerpath import (
    ButtonEvent,
    ButtonKind,
    LatchState,
    PowerFlows,
    allocate,
    boost_efficiency,
    boost_input_current,
    latch_step,
)
from pmcs.scenario import load_scenario, loads_scenario
from pmcs.usbcharge import UsbChargerState, UsbLed, UsbSupply, usb_charger_step

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
