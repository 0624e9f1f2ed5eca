# %% [markdown]
# # Soft latch and RTC wake-ups
#
# The 5 V output is switched by a soft latch. A short press turns it on,
# and a press held for 3 s turns it off. The camera turns itself off by
# holding the shutdown line low for 3 s. The RTC countdown pulse acts like
# a short press, which is how the camera wakes on schedule.

# %%
from pmcs import ButtonEvent, ButtonKind, LatchState, RtcState, latch_step, rtc_tick

script = [
    ("short press (down)", ButtonEvent(ButtonKind.PRESS_START)),
    ("short press (up)", ButtonEvent(ButtonKind.PRESS_END, held_s=0.0)),
    ("long press (down)", ButtonEvent(ButtonKind.PRESS_START)),
    ("  ...held", ButtonEvent()),
    ("  ...held", ButtonEvent()),
    ("long press (up)", ButtonEvent(ButtonKind.PRESS_END, held_s=0.0)),
    ("RTC pulse", ButtonEvent(ButtonKind.RTC_PULSE)),
    ("shutdown low", ButtonEvent(shutdown_line_low=True)),
    ("shutdown low", ButtonEvent(shutdown_line_low=True)),
    ("shutdown low", ButtonEvent(shutdown_line_low=True)),
]
st = LatchState()
for label, ev in script:
    st = latch_step(st, ev, 1.0)
    print(f"{label:20s} -> {'ON' if st.on else 'off'}")

# %% [markdown]
# The RTC re-arms itself after each pulse, so over D seconds with period P
# it fires floor(D / P) times whatever the step size.

# %%
for dt in (0.1, 1.0, 10.0):
    rtc, n = RtcState().program(1800.0), 0
    for _ in range(int(round(86400 / dt))):
        rtc, pulse = rtc_tick(rtc, dt)
        n += pulse
    print(f"dt = {dt:5.1f} s: {n} pulses in a day")
