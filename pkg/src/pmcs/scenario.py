"""Scenario files: ``[section]`` headers, ``key = value`` lines, ``#`` comments.

Parsing is fail-closed. Unknown sections or keys, malformed values and
missing required sections all raise :class:`~pmcs.errors.ConfigError` naming
the offending ``section.key``. Units live in the key names.

Example::

    [simulation]
    dt_s = 1
    duration_days = 120

    [battery]
    capacity_ah = 10
    soc = 1.0
"""

from __future__ import annotations

import configparser
import dataclasses
from pathlib import Path

from pmcs.battery import BatteryPack
from pmcs.control import AdcDivider, RtcConfig
from pmcs.engine import SimConfig
from pmcs.errors import ConfigError
from pmcs.harvest import IrradianceKind, IrradianceProfile, SolarChargerState, SolarPanel
from pmcs.load import DutyCycleSchedule, LoadModel
from pmcs.usbcharge import UsbChargerState, UsbSupply

REQUIRED_SECTIONS = ("simulation", "battery")

# section -> {key: value kind}
SCHEMA: dict[str, dict[str, str]] = {
    "simulation": {
        "dt_s": "float",
        "duration_days": "float",
        "output_stride": "int",
        "threshold_v": "float",
        "latch_on": "bool",
        "auto_shutdown": "bool",
        "sensors_enabled": "bool",
    },
    "battery": {
        "capacity_ah": "float",
        "soc": "float",
        "r_internal_ohm": "float",
        "ocv_anchors": "pairs",
        "connected": "bool",
        "reset_times_s": "floats",
    },
    "panel": {"p_rated_w": "float", "v_oc": "float", "v_mpp": "float", "k_mppt": "float"},
    "irradiance": {
        "kind": "str",
        "sunrise_s": "float",
        "sunset_s": "float",
        "peak_fraction": "float",
        "trace": "pairs",
    },
    "solar_charger": {"jumper_3a": "bool", "eta": "float", "tau_cv_s": "float", "p_min_w": "float"},
    "usb": {"windows_s": "pairs", "p_usb_w": "float", "usb_data_connected": "bool"},
    "usb_charger": {"eta": "float", "tau_cv_s": "float"},
    "load": {
        "i_sleep_a": "float",
        "i_idle_5v_a": "float",
        "i_boot_5v_a": "float",
        "i_capture_5v_a": "float",
        "t_boot_s": "float",
        "t_capture_s": "float",
        "i_sensors_5v_a": "float",
    },
    "schedule": {"sunrise_s": "float", "sunset_s": "float", "capture_interval_s": "float"},
    "rtc": {"enabled": "bool", "wake_period_s": "float", "follow_schedule": "bool"},
    "adc": {"sample_on_wake": "bool", "ratio": "float", "r_total_ohm": "float"},
    "buttons": {"presses": "pairs", "t_long_press_s": "float"},
    "shutdown": {"times_s": "floats", "t_hold_s": "float"},
    "faults": {"solar_reverse_windows_s": "pairs", "battery_reverse_times_s": "floats"},
}

_BOOLS = {"true": True, "1": True, "yes": True, "on": True, "false": False, "0": False, "no": False, "off": False}


def _convert(where: str, kind: str, raw: str):
    raw = raw.strip()
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "bool":
            return _BOOLS[raw.lower()]
        if kind == "str":
            return raw
        items = [x.strip() for x in raw.split(",") if x.strip()]
        if kind == "floats":
            return tuple(float(x) for x in items)
        if kind == "pairs":
            out = []
            for item in items:
                a, b = item.split(":")
                out.append((float(a), float(b)))
            return tuple(out)
    except (ValueError, KeyError) as exc:
        raise ConfigError(where, f"cannot parse {raw!r} as {kind}") from exc
    raise AssertionError(kind)


def parse_scenario(text: str) -> dict[str, dict[str, object]]:
    """Parse and type-check scenario text into ``{section: {key: value}}``."""
    cp = configparser.ConfigParser(
        comment_prefixes=("#",), inline_comment_prefixes=("#",), interpolation=None, strict=True
    )
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("scenario", str(exc).splitlines()[0]) from exc
    out: dict[str, dict[str, object]] = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(section, "unknown section")
        keys = SCHEMA[section]
        values = {}
        for key, raw in cp.items(section):
            if key not in keys:
                raise ConfigError(f"{section}.{key}", "unknown key")
            values[key] = _convert(f"{section}.{key}", keys[key], raw)
        out[section] = values
    for section in REQUIRED_SECTIONS:
        if section not in out:
            raise ConfigError(section, "missing required section")
    return out


def _build(cls, section: str, values: dict, mapping: dict[str, str], **extra):
    kwargs = {attr: values[key] for key, attr in mapping.items() if key in values}
    kwargs.update(extra)
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(section, str(exc)) from exc


def config_from_sections(sec: dict[str, dict[str, object]]) -> SimConfig:
    """Build a validated :class:`SimConfig` from parsed sections."""
    g = lambda name: sec.get(name, {})  # noqa: E731
    sim = g("simulation")
    bat = g("battery")

    battery = _build(
        BatteryPack,
        "battery",
        bat,
        {"capacity_ah": "capacity_Ah", "soc": "soc", "r_internal_ohm": "r_internal_ohm", "ocv_anchors": "ocv_anchors"},
    )
    panel = _build(SolarPanel, "panel", g("panel"), {"p_rated_w": "p_rated_W", "v_oc": "v_oc", "v_mpp": "v_mpp", "k_mppt": "k_mppt"})

    irr_sec = dict(g("irradiance"))
    extra = {}
    if "kind" in irr_sec:
        try:
            extra["kind"] = IrradianceKind[str(irr_sec.pop("kind")).upper()]
        except KeyError as exc:
            raise ConfigError("irradiance.kind", "expected clear_sky, constant or trace") from exc
    irradiance = _build(
        IrradianceProfile,
        "irradiance",
        irr_sec,
        {"sunrise_s": "sunrise_s", "sunset_s": "sunset_s", "peak_fraction": "peak_fraction", "trace": "trace"},
        **extra,
    )

    sc_sec = g("solar_charger")
    solar = _build(
        SolarChargerState,
        "solar_charger",
        sc_sec,
        {"eta": "eta", "tau_cv_s": "tau_cv_s", "p_min_w": "p_min_W"},
        i_setpoint_A=3.0 if sc_sec.get("jumper_3a", False) else 2.0,
    )
    usb_chg = _build(UsbChargerState, "usb_charger", g("usb_charger"), {"eta": "eta", "tau_cv_s": "tau_cv_s"})
    usb = _build(
        UsbSupply,
        "usb",
        g("usb"),
        {"windows_s": "windows_s", "p_usb_w": "p_usb_W", "usb_data_connected": "usb_data_connected"},
    )
    load = _build(
        LoadModel,
        "load",
        g("load"),
        {
            "i_sleep_a": "i_sleep_A",
            "i_idle_5v_a": "i_idle_5v_A",
            "i_boot_5v_a": "i_boot_5v_A",
            "i_capture_5v_a": "i_capture_5v_A",
            "t_boot_s": "t_boot_s",
            "t_capture_s": "t_capture_s",
            "i_sensors_5v_a": "i_sensors_5v_A",
        },
    )
    schedule = _build(
        DutyCycleSchedule,
        "schedule",
        g("schedule"),
        {"sunrise_s": "sunrise_s", "sunset_s": "sunset_s", "capture_interval_s": "capture_interval_s"},
    )
    rtc = _build(
        RtcConfig, "rtc", g("rtc"), {"enabled": "enabled", "wake_period_s": "wake_period_s", "follow_schedule": "follow_schedule"}
    )
    adc_sec = g("adc")
    adc = _build(AdcDivider, "adc", adc_sec, {"ratio": "ratio", "r_total_ohm": "r_total_ohm"})

    kwargs = dict(
        battery=battery,
        panel=panel,
        irradiance=irradiance,
        solar_charger=solar,
        usb_charger=usb_chg,
        usb=usb,
        load=load,
        schedule=schedule,
        rtc=rtc,
        adc=adc,
    )
    for key, attr in {
        "dt_s": "dt_s",
        "duration_days": "duration_days",
        "output_stride": "output_stride",
        "threshold_v": "threshold_V",
        "latch_on": "latch_on",
        "auto_shutdown": "auto_shutdown",
        "sensors_enabled": "sensors_enabled",
    }.items():
        if key in sim:
            kwargs[attr] = sim[key]
    if "sample_on_wake" in adc_sec:
        kwargs["adc_sample_on_wake"] = adc_sec["sample_on_wake"]
    if "connected" in bat:
        kwargs["battery_connected"] = bat["connected"]
    if "reset_times_s" in bat:
        kwargs["battery_reset_times_s"] = bat["reset_times_s"]
    buttons = g("buttons")
    if "presses" in buttons:
        kwargs["presses"] = buttons["presses"]
    if "t_long_press_s" in buttons:
        kwargs["t_long_press_s"] = buttons["t_long_press_s"]
    shutdown = g("shutdown")
    if "times_s" in shutdown:
        kwargs["shutdown_times_s"] = shutdown["times_s"]
    if "t_hold_s" in shutdown:
        kwargs["t_shutdown_s"] = shutdown["t_hold_s"]
    faults = g("faults")
    if "solar_reverse_windows_s" in faults:
        kwargs["solar_reverse_windows_s"] = faults["solar_reverse_windows_s"]
    if "battery_reverse_times_s" in faults:
        kwargs["battery_reverse_times_s"] = faults["battery_reverse_times_s"]
    try:
        return SimConfig(**kwargs)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError("simulation", str(exc)) from exc


def load_scenario(path: str | Path) -> SimConfig:
    """Read a scenario file. I/O errors propagate as :class:`OSError`."""
    return config_from_sections(parse_scenario(Path(path).read_text(encoding="utf-8")))


def loads_scenario(text: str) -> SimConfig:
    return config_from_sections(parse_scenario(text))


def with_overrides(cfg: SimConfig, **changes) -> SimConfig:
    return dataclasses.replace(cfg, **changes)
