# %% [markdown]
# # Sleep budget
#
# With the output latch off, the only drain is the always-on floor: the
# protection IC, the boost regulator's quiescent current and the RTC. It
# totals 211 uA on the battery side. Here we check what that costs per day
# and how long a full pack would last on the floor alone.

# %%
from pmcs import BatteryPack, IrradianceKind, IrradianceProfile, RtcConfig, SimConfig, simulate

dark = IrradianceProfile(kind=IrradianceKind.CONSTANT, peak_fraction=0.0)
cfg = SimConfig(battery=BatteryPack(soc=0.5), irradiance=dark, rtc=RtcConfig(enabled=False))
res = simulate(cfg)

# %%
p_avg = -res.stats["e_battery_J"] / 86400.0
print(f"average battery-side power  {p_avg * 1e6:8.2f} uW")
print(f"battery current             {-res.i_batt_net_A.mean() * 1e6:8.2f} uA")
print(f"energy per day              {res.e_consumed_J[-1]:8.2f} J")
print(f"soc lost per day            {0.5 - res.soc[-1]:.3e}")

# %% [markdown]
# A 10 Ah pack holds roughly 133 kJ between empty and full, so the floor
# alone would take years to drain it. The duty-cycled camera dominates.

# %%
pack_J = 10 * 3600 * 3.7
print(f"floor-only runtime          {pack_J / res.e_consumed_J[-1] / 365:8.1f} years")
