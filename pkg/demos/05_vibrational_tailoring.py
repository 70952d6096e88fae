"""
Choosing the final vibrational level with the detuning
======================================================

With weaker pulses and a different detuning the same pulse pair moves the
packet into an excited Pi level. Starting from X(nu=1), a 200 cm-1 change
of delta2 decides whether the packet ends in the right or the left well.
"""

# %%
from dataclasses import replace

from lipdyn.runner import simulate
from lipdyn.units import to_internal

from _common import coarse

for name in ("fig3_tailoring", "fig5a", "fig5b"):
    rep = simulate(coarse(name)).report
    print(f"{name:15s} start {rep.initial}  ->  {rep.final}  weight {rep.final_weight:.3f}")

# %%
# A small detuning scan around the fig5 pair.
base = coarse("fig5a")
for d2 in (-2260, -2160, -2060, -1960, -1860):
    cp = replace(base.potential, delta2=to_internal(d2, "cm-1"))
    rep = simulate(replace(base, potential=cp)).report
    print(f"delta2 = {d2} cm-1: dominant {rep.final} weight {rep.final_weight:.3f}  P_Pi {rep.final_populations[2]:.3f}")
