"""Compiled simulation loop against the fine-step pure-Python CC/CV oracle."""

from __future__ import annotations

import numpy as np
import pytest

from conftest import ALWAYS_SUN, NO_RTC
from oracles import cccv_charge
from pmcs import BatteryPack, SimConfig, SolarChargerState, SolarPanel, UsbSupply, simulate

T_END = 8 * 3600.0


def charge_run(source: str, jumper: bool = False, dt: float = 1.0):
    kw = dict(battery=BatteryPack(soc=0.05), rtc=NO_RTC, panel=SolarPanel(p_rated_W=30.0), irradiance=ALWAYS_SUN, dt_s=dt)
    if source == "usb":
        kw["usb"] = UsbSupply(p_usb_W=15.0, windows_s=((0.0, 86400.0),))
    if jumper:
        kw["solar_charger"] = SolarChargerState.with_jumper(True)
    res = simulate(SimConfig(**kw))
    upto = res.t_s <= T_END
    q = float(np.sum(res.i_charge_A[upto]) * dt)
    return res, q, float(res.v_bat_V[upto][-1])


CASES = {"solar": ("solar", False, 2.0, 0.2), "solar_3a": ("solar", True, 3.0, 0.3), "usb": ("usb", False, 2.65, 0.265)}


@pytest.mark.parametrize("case", list(CASES))
class TestAgainstOracle:
    def test_delivered_charge(self, case):
        src, jumper, i_cc, i_term = CASES[case]
        q_ref, _, _, _ = cccv_charge(i_cc, i_term, t_end_s=T_END)
        _, q, _ = charge_run(src, jumper)
        assert abs(q - q_ref) / q_ref < 0.005

    def test_final_voltage(self, case):
        src, jumper, i_cc, i_term = CASES[case]
        _, v_ref, _, _ = cccv_charge(i_cc, i_term, t_end_s=T_END)
        _, _, v = charge_run(src, jumper)
        assert abs(v - v_ref) < 0.010

    def test_phase_timing(self, case):
        src, jumper, i_cc, i_term = CASES[case]
        _, _, t_cv, t_full = cccv_charge(i_cc, i_term, t_end_s=T_END)
        res, _, _ = charge_run(src, jumper)
        t_cv_sim = res.t_s[np.argmax(res.charger_mode == 3)]
        t_full_sim = res.t_s[np.argmax(res.charger_mode == 4)]
        assert t_cv_sim == pytest.approx(t_cv, abs=5.0)
        assert t_full_sim == pytest.approx(t_full, abs=5.0)


def test_cc_cv_ordering_in_loop():
    res, _, _ = charge_run("usb")
    modes = res.charger_mode[res.t_s <= T_END]
    changes = modes[np.r_[True, modes[1:] != modes[:-1]]]
    assert list(changes) == [2, 3, 4]


def test_coarse_step_still_close():
    _, q1, v1 = charge_run("solar")
    _, q10, v10 = charge_run("solar", dt=10.0)
    assert abs(q10 - q1) / q1 < 0.005 and abs(v10 - v1) < 0.010
