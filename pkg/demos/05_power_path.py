# %% [markdown]
# # Power path and boost regulator
#
# The camera runs from a 5 V boost stage fed by the battery node. A source
# feeds the load first and charges the pack with what is left. USB takes
# priority over solar and powers the 5 V rail directly.

# %%
import numpy as np

from pmcs import BatteryPack, InputSource, allocate, boost_efficiency

for i in (0.05, 0.4, 1.0, 2.0, 2.4):
    print(f"boost efficiency at {i:4.2f} A: {boost_efficiency(i):.3f}")

# %%
pack = BatteryPack(soc=0.5)
cases = [
    ("battery only, 0.4 A", InputSource.NONE, 0.0, 0.0),
    ("weak sun, 0.4 A", InputSource.SOLAR, 1.0, 2.0),
    ("full sun, 0.4 A", InputSource.SOLAR, 4.0, 2.0),
    ("USB 10 W, 0.4 A", InputSource.USB, 9.4, 2.65),
]
print(f"{'case':22s} {'v_term':>7s} {'to load':>8s} {'to batt':>8s} {'net':>8s}")
for name, src, p, lim in cases:
    fl = allocate(src, p, lim, 0.4, True, pack, eta_src=0.94)
    print(f"{name:22s} {fl.v_term_V:7.3f} {fl.i_src_to_load_A:8.3f} {fl.i_src_to_batt_A:8.3f} {fl.i_batt_net_A:8.3f}")

# %% [markdown]
# Above 2.4 A on the 5 V side the load is shed rather than served.

# %%
fl = allocate(InputSource.NONE, 0.0, 0.0, 2.6, True, pack)
print("2.6 A request -> shed:", fl.load_shed, "served:", fl.i_load_5v_A)
