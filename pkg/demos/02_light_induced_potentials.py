"""
Light-induced potentials
========================

Diagonalizing the 3x3 potential matrix at every R gives the adiabatic
surfaces. Before the pulses the active surface is the X / dressed-Pi double
well; as the pulses rise it reshapes into a single deformed well and back.
"""

# %%
import numpy as np

from lipdyn import active_spectrum, lip_at
from lipdyn.units import BOHR_IN_ANGSTROM, from_internal, to_internal

from _common import OUT, coarse, figure

config = coarse("fig3_tailoring")
cp, grid, mass = config.potential, config.grid, config.mass

# %%
# Active-surface spectrum at a few times; the alternation of left- and
# right-well states at t=0 is what the tailoring scheme exploits.
for t_ps in (0.0, 18.0, 23.0, 28.0, 50.0):
    e = active_spectrum(cp, grid, mass, to_internal(t_ps, "ps"), 5).energies
    print(f"t = {t_ps:5.1f} ps  levels [cm-1]:", np.round(from_internal(e, "cm-1"), 1))

# %%
plt = figure()
if plt is not None:
    r = grid.r * BOHR_IN_ANGSTROM
    fig, axes = plt.subplots(1, 3, figsize=(12, 4), sharey=True)
    for ax, t_ps in zip(axes, (0.0, 23.0, 50.0)):
        s = lip_at(cp, grid, to_internal(t_ps, "ps"))
        ax.plot(r, from_internal(s.values, "cm-1"), color="0.7")
        ax.plot(r, from_internal(s.active, "cm-1"), color="k", lw=2)
        ax.set_title(f"t = {t_ps} ps")
        ax.set_xlim(2.5, 5.5)
        ax.set_ylim(-1500, 3000)
        ax.set_xlabel("R [angstrom]")
    axes[0].set_ylabel("energy [cm-1]")
    fig.savefig(OUT / "light_induced_potentials.png", dpi=120)
    print("wrote", OUT / "light_induced_potentials.png")
