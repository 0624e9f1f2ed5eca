# %% [markdown]
# # CC/CV charge curves
#
# Charge an almost empty pack (5 %) from an ample source. The solar charger
# holds 2 A (3 A with the jumper) and USB holds 2.65 A. Each switches to
# constant voltage at 4.2 V and stops at a tenth of its setpoint.

# %%
import numpy as np

from pmcs import (
    BatteryPack,
    IrradianceKind,
    IrradianceProfile,
    RtcConfig,
    SimConfig,
    SolarChargerState,
    SolarPanel,
    UsbSupply,
    simulate,
)
from _plot import save

sun = IrradianceProfile(kind=IrradianceKind.CONSTANT, sunrise_s=0.0, sunset_s=86400.0)
base = dict(battery=BatteryPack(soc=0.05), rtc=RtcConfig(enabled=False), panel=SolarPanel(p_rated_W=30.0), irradiance=sun)
runs = {
    "solar 2 A": SimConfig(**base),
    "solar 3 A": SimConfig(**base, solar_charger=SolarChargerState.with_jumper(True)),
    "usb 2.65 A": SimConfig(**base, usb=UsbSupply(p_usb_W=15.0, windows_s=((0.0, 86400.0),))),
}
results = {name: simulate(cfg) for name, cfg in runs.items()}

# %%
print(f"{'charger':12s} {'CV at':>8s} {'full at':>8s} {'delivered':>10s}")
for name, res in results.items():
    t_cv = res.t_s[np.argmax(res.charger_mode == 3)] / 3600
    t_full = res.t_s[np.argmax(res.charger_mode == 4)] / 3600
    q_Ah = res.i_charge_A.sum() / 3600
    print(f"{name:12s} {t_cv:7.2f}h {t_full:7.2f}h {q_Ah:8.2f}Ah")


# %%
def fig(plt):
    f, (a1, a2) = plt.subplots(2, 1, sharex=True, figsize=(7, 5))
    for name, res in results.items():
        h = res.t_s / 3600
        a1.plot(h, res.i_charge_A, label=name)
        a2.plot(h, res.v_bat_V, label=name)
    a1.set_ylabel("charge current (A)")
    a2.set_ylabel("terminal voltage (V)")
    a2.set_xlabel("hours")
    a2.set_xlim(0, 10)
    a1.legend()
    return f


save(fig, "charge_curves")
