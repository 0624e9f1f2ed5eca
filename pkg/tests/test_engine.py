from __future__ import annotations

import dataclasses

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import ALWAYS_SUN, DARK, NO_RTC
from pmcs import (
    BatteryPack,
    ConfigError,
    DomainError,
    LoadModel,
    SimConfig,
    SimResult,
    SolarChargerState,
    SolarPanel,
    UsbSupply,
    daily_mean,
    ledger_residual,
    simulate,
    summarize,
)

SLEEP_ONLY = SimConfig(battery=BatteryPack(soc=0.5), irradiance=DARK, rtc=NO_RTC)


def residual_budget(res):
    c = res.columns
    return 1e-6 * max(c["e_harvested_J"][-1], c["e_consumed_J"][-1], 1.0)


class TestSleepOnly:
    def test_soc_drop(self):
        res = simulate(SLEEP_ONLY)
        # 211 uA * 86400 s = 18.23 C out of 36000 C
        assert 0.5 - res.soc[-1] == pytest.approx(5.064e-4, rel=1e-6)

    def test_consumed_energy(self):
        res = simulate(SLEEP_ONLY)
        assert res.e_consumed_J[-1] == pytest.approx(211e-6 * 3.7 * 86400, rel=2e-4)
        assert res.e_harvested_J[-1] == 0.0
        assert res.e_loss_J[-1] == 0.0

    def test_current_is_the_floor(self):
        res = simulate(SLEEP_ONLY)
        assert np.all(res.i_batt_net_A == -211e-6)

    def test_latch_stays_off(self):
        res = simulate(SLEEP_ONLY)
        assert not res.latch_on.any()
        assert res.event_count("LATCH_ON") == 0

    def test_disconnected_battery_is_constant(self):
        res = simulate(dataclasses.replace(SLEEP_ONLY, battery_connected=False))
        for name in ("v_bat_V", "soc", "i_batt_net_A", "e_consumed_J", "i_load_5v_A"):
            assert np.ptp(res.columns[name]) == 0.0

    def test_zero_load_no_sleep_floor(self):
        cfg = dataclasses.replace(SLEEP_ONLY, load=LoadModel(i_sleep_A=0.0))
        res = simulate(cfg)
        assert np.all(res.soc == 0.5)


@pytest.fixture(scope="module")
def day():
    return simulate(SimConfig())


class TestDefaultDay:
    def test_one_capture_per_scheduled_wake(self, day):
        assert day.event_count("CAPTURE_START") == 23
        assert day.event_count("WAKE") == 23
        assert day.event_count("RTC_PULSE") == 23
        assert day.event_count("LATCH_ON") == day.event_count("LATCH_OFF") == 23
        assert day.event_count("SHUTDOWN_REQUEST") == 23

    def test_wakes_land_on_schedule(self, day):
        k = np.flatnonzero(day.event_counts[:, 0])
        assert list(day.t_s[k]) == [23400.0 + 1800.0 * j for j in range(23)]

    def test_capture_follows_boot(self, day):
        k = np.flatnonzero(day.event_counts[:, 4])
        assert day.t_s[k][0] == 23400.0 + 5.0

    def test_on_time_per_wake(self, day):
        # 5 s boot, 25 s capture, 3 s shutdown hold
        assert day.latch_on.sum() == 23 * 33

    def test_sun_charges_after_morning_dip(self, day):
        assert day.event_count("CHARGE_FULL") >= 1
        assert day.soc[-1] > 0.997
        assert day.soc.max() > 0.9999

    def test_conservation(self, day):
        assert ledger_residual(day) <= residual_budget(day)

    def test_energies_nondecreasing(self, day):
        for name in ("e_harvested_J", "e_consumed_J", "e_loss_J"):
            assert np.all(np.diff(day.columns[name]) >= 0)

    def test_timestamps(self, day):
        assert day.t_s[0] == 1.0 and day.t_s[-1] == 86400.0

    def test_deterministic(self, day):
        again = simulate(SimConfig())
        for name, col in day.columns.items():
            assert np.array_equal(col, again.columns[name])
        assert np.array_equal(day.event_counts, again.event_counts)


class TestStride:
    def test_rows_and_totals(self, day):
        full = day
        dec = simulate(SimConfig(output_stride=60))
        assert len(dec) == 1440
        for name in ("e_harvested_J", "e_consumed_J", "e_loss_J", "soc"):
            assert dec.columns[name][-1] == full.columns[name][-1]
        assert dec.event_counts.sum(axis=0).tolist() == full.event_counts.sum(axis=0).tolist()

    def test_residual_survives_decimation(self):
        dec = simulate(SimConfig(output_stride=60))
        assert ledger_residual(dec) <= residual_budget(dec)

    def test_ragged_last_row(self):
        res = simulate(SimConfig(dt_s=7.0, output_stride=1000))
        assert res.t_s[-1] == pytest.approx(7.0 * res.stats["n_steps"])

    def test_mean_voltage(self, day):
        full = day
        dec = simulate(SimConfig(output_stride=60))
        assert dec.v_bat_V[600] == pytest.approx(full.v_bat_V[600 * 60 : 601 * 60].mean(), rel=1e-8)


class TestSources:
    def test_usb_window(self):
        cfg = SimConfig(irradiance=DARK, battery=BatteryPack(soc=0.5), usb=UsbSupply(windows_s=((3600.0, 7200.0),)))
        res = simulate(cfg)
        src = np.array([res[i].source for i in range(3590, 3610)])
        assert src[9] == "none" and src[10] == "usb"
        assert res.event_count("SOURCE_USB") == 1
        assert (res.i_usb_A > 0).sum() == 3600

    def test_usb_over_solar(self):
        cfg = SimConfig(irradiance=ALWAYS_SUN, battery=BatteryPack(soc=0.5), usb=UsbSupply(windows_s=((0.0, 43200.0),)))
        res = simulate(cfg)
        first_half = res.t_s <= 43200.0
        assert np.all(res.i_solar_A[first_half] == 0.0)
        assert np.all(res.source[first_half] == 2)
        assert np.all(res.source[~first_half] == 1)

    def test_jumper_setpoint_in_loop(self):
        cfg = SimConfig(
            irradiance=ALWAYS_SUN,
            panel=SolarPanel(p_rated_W=30.0),
            battery=BatteryPack(soc=0.3),
            solar_charger=SolarChargerState.with_jumper(True),
            rtc=NO_RTC,
        )
        res = simulate(cfg)
        assert res.i_charge_A.max() == 3.0

    def test_solar_reverse(self):
        cfg = SimConfig(irradiance=ALWAYS_SUN, battery=BatteryPack(soc=0.5), solar_reverse_windows_s=((0.0, 3600.0),), rtc=NO_RTC)
        res = simulate(cfg)
        assert res.event_count("SOLAR_REVERSE") == 1
        assert np.all(res.i_charge_A[:3600] == 0.0)
        assert res[0].led_solar == "fault"
        assert res.i_charge_A[3600] > 0


class TestButtonsAndShutdown:
    def test_short_press_runs_one_cycle(self):
        cfg = SimConfig(irradiance=DARK, rtc=NO_RTC, presses=((1000.0, 0.5),))
        res = simulate(cfg)
        assert res.event_count("LATCH_ON") == 1
        assert res.event_count("CAPTURE_START") == 1
        assert res.latch_on.sum() == 33

    def test_long_press_turns_off(self):
        cfg = SimConfig(irradiance=DARK, rtc=NO_RTC, latch_on=True, auto_shutdown=False, presses=((1000.0, 4.0),))
        res = simulate(cfg)
        assert res.latch_on[1001] and not res.latch_on[1003]
        assert res.event_count("LATCH_OFF") == 1

    def test_shutdown_line(self):
        cfg = SimConfig(irradiance=DARK, rtc=NO_RTC, latch_on=True, auto_shutdown=False, shutdown_times_s=(500.0,))
        res = simulate(cfg)
        assert res.latch_on[:500].all() and not res.latch_on[503:].any()


class TestProtection:
    def test_exhaustion_trips_over_discharge(self):
        cfg = SimConfig(irradiance=DARK, battery=BatteryPack(capacity_Ah=0.02, soc=1.0))
        res = simulate(cfg)
        assert res.event_count("OVER_DISCHARGE") == 1
        assert res.event_count("BROWNOUT") >= 1
        assert res.soc.min() >= 0.0
        assert ledger_residual(res) <= residual_budget(res)

    def test_reverse_then_reset(self):
        cfg = SimConfig(
            irradiance=DARK, battery=BatteryPack(soc=0.5), rtc=NO_RTC,
            battery_reverse_times_s=(100.0,), battery_reset_times_s=(200.0,),
        )
        res = simulate(cfg)
        assert res.event_count("REVERSE_POLARITY") == 1
        assert res.event_count("PROTECTION_RESET") == 1
        assert np.all(res.i_batt_net_A[100:200] == 0.0)
        assert np.all(res.i_batt_net_A[201:] == -211e-6)

    def test_load_shed_in_loop(self):
        cfg = SimConfig(irradiance=DARK, load=LoadModel(i_capture_5v_A=2.5))
        res = simulate(cfg)
        assert res.event_count("LOAD_SHED") == 23 * 25
        assert res.i_load_5v_A.max() <= 2.4


class TestProperties:
    @settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    @given(
        soc=st.floats(0.0, 1.0),
        cap=st.floats(0.05, 20.0),
        peak=st.floats(0.0, 1.0),
        usb_start=st.floats(0.0, 80000.0),
        usb_len=st.floats(0.0, 20000.0).map(lambda x: round(x, 1)),
        i_cap=st.floats(0.05, 2.0),
    )
    def test_invariants(self, soc, cap, peak, usb_start, usb_len, i_cap):
        wins = ((usb_start, usb_start + usb_len),) if usb_len > 0 else ()
        cfg = SimConfig(
            dt_s=30.0,
            battery=BatteryPack(soc=soc, capacity_Ah=cap),
            irradiance=dataclasses.replace(SimConfig().irradiance, peak_fraction=peak),
            usb=UsbSupply(windows_s=wins),
            load=LoadModel(i_capture_5v_A=i_cap),
        )
        res = simulate(cfg)
        assert np.all((res.soc >= 0) & (res.soc <= 1))
        assert np.all(res.v_bat_V <= 4.2 + 0.05 * 3.0 + 1e-9)
        assert ledger_residual(res) <= residual_budget(res)
        brown = res.event_counts[:, 12] > 0
        at_setpoint = np.isin(res.i_charge_A, (2.0, 2.65))
        assert not np.any(brown & at_setpoint)


class TestSummaries:
    def test_single_row(self):
        res = simulate(SimConfig(dt_s=86400.0))
        rep = summarize(res)
        assert len(res) == 1
        assert rep.min_v_bat_V == res.v_bat_V[0]
        assert rep.min_soc == res.soc[0]

    def test_threshold(self):
        res = simulate(SLEEP_ONLY)
        assert not summarize(res, 4.0).self_sustainable
        assert summarize(res, 3.5).self_sustainable

    def test_daily_mean_window(self):
        res = simulate(SimConfig(duration_days=2, output_stride=60))
        dm = daily_mean(res)
        assert dm.shape == (2,)
        day = daily_mean(res, window_s=(7 * 3600, 16.5 * 3600))
        assert np.all(np.isfinite(day))

    def test_rows_roundtrip_through_steps(self):
        res = simulate(SimConfig(output_stride=600))
        again = SimResult.from_steps(list(res))
        assert summarize(again) == summarize(res)

    def test_empty(self):
        with pytest.raises(DomainError):
            ledger_residual([])
        with pytest.raises(DomainError):
            summarize([])


class TestConfigValidation:
    @pytest.mark.parametrize(
        "kwargs, field",
        [
            ({"dt_s": 0.0}, "simulation.dt_s"),
            ({"dt_s": -1.0}, "simulation.dt_s"),
            ({"duration_days": 0.5}, "simulation.duration_days"),
            ({"output_stride": 0}, "simulation.output_stride"),
            ({"presses": ((10.0, 0.0),)}, "buttons.presses"),
        ],
    )
    def test_rejected(self, kwargs, field):
        with pytest.raises(ConfigError) as exc:
            SimConfig(**kwargs)
        assert exc.value.field == field


class TestTimestepRobustness:
    def test_golden_min_voltage_dt1_vs_dt10(self):
        a = summarize(simulate(SimConfig(duration_days=120, dt_s=1.0, output_stride=60)))
        b = summarize(simulate(SimConfig(duration_days=120, dt_s=10.0, output_stride=6)))
        assert abs(a.min_v_bat_V - b.min_v_bat_V) / a.min_v_bat_V < 0.005
        assert abs(a.min_daily_mean_v_bat_V - b.min_daily_mean_v_bat_V) / a.min_daily_mean_v_bat_V < 0.005
