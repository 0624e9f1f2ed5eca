from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import battery_node_voltage, boost_eta, ocv as ref_ocv
from pmcs import (
    BatteryPack,
    BoostOverCurrent,
    ButtonEvent,
    ButtonKind,
    DomainError,
    InputSource,
    LatchState,
    ProtectionState,
    RegulatorDropout,
    allocate,
    boost_efficiency,
    boost_input_current,
    latch_step,
)


class TestBoost:
    def test_light_load_peak(self):
        assert boost_efficiency(0.05) == 0.98

    def test_full_load(self):
        assert boost_efficiency(2.4) == pytest.approx(0.85, abs=1e-15)

    def test_midpoint(self):
        assert boost_efficiency(1.25) == pytest.approx(0.915, abs=1e-12)

    @given(st.floats(0.0, 2.4))
    def test_matches_reference(self, i):
        assert boost_efficiency(i) == pytest.approx(boost_eta(i), abs=1e-12)

    @given(st.floats(0.0, 2.4), st.floats(0.0, 2.4))
    def test_nonincreasing(self, a, b):
        lo, hi = min(a, b), max(a, b)
        assert boost_efficiency(hi) <= boost_efficiency(lo)

    def test_input_current(self):
        # 5 V * 1 A / (0.9291304 * 3.7 V)
        assert boost_input_current(3.7, 1.0) == pytest.approx(1.4544259, rel=1e-7)

    def test_zero_output(self):
        assert boost_input_current(3.7, 0.0) == 0.0

    def test_over_current(self):
        with pytest.raises(BoostOverCurrent):
            boost_efficiency(2.41)

    def test_dropout(self):
        with pytest.raises(RegulatorDropout):
            boost_input_current(2.1, 0.5)

    def test_negative(self):
        with pytest.raises(DomainError):
            boost_efficiency(-0.1)


class TestAllocate:
    def test_battery_only_constant_power(self):
        pack = BatteryPack(soc=0.5)
        fl = allocate(InputSource.NONE, 0.0, 0.0, 1.0, True, pack)
        p = 5.0 / boost_eta(1.0)
        v = battery_node_voltage(3.7, 0.05, p)
        assert fl.v_term_V == pytest.approx(v, abs=1e-12)
        assert fl.i_batt_net_A == pytest.approx(-p / v, rel=1e-12)
        assert fl.i_load_5v_A == 1.0 and not fl.brownout

    def test_latch_off_draws_nothing(self):
        fl = allocate(InputSource.NONE, 0.0, 0.0, 1.0, False, BatteryPack(soc=0.5))
        assert fl.i_batt_net_A == 0.0 and fl.i_load_5v_A == 0.0

    def test_load_shed_above_limit(self):
        fl = allocate(InputSource.NONE, 0.0, 0.0, 2.5, True, BatteryPack(soc=0.5))
        assert fl.load_shed and fl.i_load_5v_A == 0.0 and fl.i_batt_net_A == 0.0

    def test_surplus_charges_at_setpoint(self):
        fl = allocate(InputSource.SOLAR, 20.0, 2.0, 0.4, True, BatteryPack(soc=0.5))
        assert fl.i_src_to_batt_A == 2.0
        assert fl.i_batt_net_A == 2.0
        assert fl.i_src_to_load_A > 0

    def test_shortfall_from_battery(self):
        fl = allocate(InputSource.SOLAR, 1.0, 2.0, 1.0, True, BatteryPack(soc=0.5))
        assert fl.i_src_to_batt_A == 0.0
        assert fl.i_batt_net_A < 0
        assert fl.i_src_to_load_A == pytest.approx(1.0 / fl.v_term_V)

    def test_usb_feeds_5v_rail_directly(self):
        fl = allocate(InputSource.USB, 15.0, 2.65, 0.5, True, BatteryPack(soc=0.5))
        assert fl.i_load_batt_side_A == 0.0
        assert fl.i_src_to_batt_A == 2.65

    def test_usb_power_limited(self):
        # 15 W less the 5 W load leaves 10 W for the pack: v*i = 10, v = 3.7 + 0.05 i
        fl = allocate(InputSource.USB, 15.0, 2.65, 1.0, True, BatteryPack(soc=0.5))
        i = (-3.7 + (3.7**2 + 4 * 0.05 * 10.0) ** 0.5) / (2 * 0.05)
        assert fl.i_src_to_batt_A == pytest.approx(i, rel=1e-12)

    def test_brownout_when_discharge_disabled(self):
        pack = BatteryPack(soc=0.5, protection=ProtectionState(discharge_enabled=False))
        fl = allocate(InputSource.NONE, 0.0, 0.0, 0.5, True, pack)
        assert fl.brownout and fl.i_load_5v_A == 0.0 and fl.i_batt_net_A == 0.0

    def test_no_brownout_if_source_covers_load(self):
        pack = BatteryPack(soc=0.5, protection=ProtectionState(discharge_enabled=False))
        fl = allocate(InputSource.SOLAR, 20.0, 2.0, 0.5, True, pack)
        assert not fl.brownout and fl.i_load_5v_A == 0.5

    def test_regulator_dropout(self):
        anchors = ((0.0, 2.0), (1.0, 4.2))
        fl = allocate(InputSource.NONE, 0.0, 0.0, 1.0, True, BatteryPack(soc=0.0, ocv_anchors=anchors))
        assert fl.dropout and fl.i_load_5v_A == 0.0

    def test_negative_inputs(self):
        with pytest.raises(DomainError):
            allocate(InputSource.NONE, -1.0, 0.0, 0.0, True, BatteryPack())

    def test_demand_beyond_max_power_transfer_drops_out(self):
        # 2.25 A at 5 V needs ~12.9 W from the pack; 3.7^2 / (4 * 0.28125) ~ 12.2 W
        pack = BatteryPack(soc=0.5, r_internal_ohm=0.28125)
        fl = allocate(InputSource.NONE, 0.0, 2.0, 2.25, True, pack)
        assert fl.dropout
        assert fl.i_load_5v_A == 0.0
        assert fl.v_term_V == pytest.approx(3.7)
        assert fl.p_loss_W >= 0.0

    @settings(max_examples=300)
    @given(
        st.sampled_from(list(InputSource)),
        st.floats(0.0, 20.0),
        st.sampled_from([2.0, 3.0, 2.65, 0.1]),
        st.floats(0.0, 2.4),
        st.floats(0.0, 0.01),
        st.floats(0.05, 1.0),
        st.floats(0.0, 0.3),
    )
    def test_power_balance(self, src, p, lim, i5, aux, soc, r):
        pack = BatteryPack(soc=soc, r_internal_ohm=r)
        fl = allocate(src, p, lim, i5, True, pack, i_aux_batt_side_A=aux, eta_src=0.94)
        consumed = 5.0 * fl.i_load_5v_A + fl.v_term_V * aux
        lhs = fl.p_src_W - fl.p_loss_W - consumed
        assert lhs == pytest.approx(fl.v_term_V * fl.i_batt_net_A, abs=1e-9)
        ocv = ref_ocv(soc)
        assert fl.v_term_V == pytest.approx(ocv + r * fl.i_batt_net_A, abs=1e-12)
        assert 0.0 <= fl.i_src_to_batt_A <= lim
        assert fl.p_loss_W >= -1e-12


def press(held=None):
    return ButtonEvent(ButtonKind.PRESS_START, held_s=held)


def release(held=None):
    return ButtonEvent(ButtonKind.PRESS_END, held_s=held)


class TestLatch:
    def run(self, events, st_=None, dt=1.0):
        st_ = st_ or LatchState()
        out = []
        for ev in events:
            st_ = latch_step(st_, ev, dt)
            out.append(st_.on)
        return st_, out

    def test_short_press_turns_on_at_release(self):
        _, seq = self.run([press(), ButtonEvent(), release()])
        assert seq == [False, False, True]

    def test_long_press_turns_off(self):
        _, seq = self.run([press(), ButtonEvent(), ButtonEvent(), release()], LatchState(on=True))
        assert seq == [True, True, False, False]

    def test_long_press_while_off_stays_off(self):
        _, seq = self.run([press(), ButtonEvent(), ButtonEvent(), ButtonEvent(), release()])
        assert seq == [False] * 5

    def test_short_press_while_on_stays_on(self):
        _, seq = self.run([press(), release()], LatchState(on=True))
        assert seq == [True, True]

    def test_shutdown_line_hold(self):
        low = ButtonEvent(shutdown_line_low=True)
        _, seq = self.run([low, low, low, ButtonEvent()], LatchState(on=True))
        assert seq == [True, True, False, False]

    def test_shutdown_glitch_resets(self):
        low = ButtonEvent(shutdown_line_low=True)
        _, seq = self.run([low, low, ButtonEvent(), low, low], LatchState(on=True))
        assert seq == [True] * 5

    def test_rtc_pulse_turns_on(self):
        _, seq = self.run([ButtonEvent(ButtonKind.RTC_PULSE)])
        assert seq == [True]

    def test_rtc_pulse_while_on_is_harmless(self):
        _, seq = self.run([ButtonEvent(ButtonKind.RTC_PULSE)], LatchState(on=True))
        assert seq == [True]

    def test_sub_step_press(self):
        st_, seq = self.run([ButtonEvent(ButtonKind.PRESS_END, held_s=0.2)], dt=10.0)
        assert seq == [True] and not st_.button_down

    def test_bad_dt(self):
        with pytest.raises(DomainError):
            latch_step(LatchState(), ButtonEvent(), 0.0)
