"""
Following the active-surface eigenstates in time
================================================

The five lowest states of the active light-induced potential are tracked by
overlap continuity. A rank swap between consecutive samples marks an avoided
crossing too narrow to resolve, i.e. a diabatic passage.

With the shipped Morse curves the left and right wells are separated only by
a low cusp, so the avoided crossings are several cm-1 wide and the tracker
follows them adiabatically (no events). Moving the Pi well outwards raises
the cusp and produces narrow, diabatically tracked crossings; see the second
cell.
"""

# %%
import numpy as np

from lipdyn import track_trajectories
from lipdyn.units import from_internal, to_internal

from _common import OUT, coarse, figure

config = coarse("fig3_tailoring")
times = to_internal(np.arange(0.0, 50.001, 0.1), "ps")
traj = track_trajectories(config.potential, config.grid, config.mass, times, 5)
print(f"{len(traj.events)} rank-swap events")
for ev in traj.events:
    print(f"  t = {from_internal(ev.t, 'ps'):6.2f} ps  states {ev.state_a}<->{ev.state_b}"
          f"  gap {from_internal(ev.min_gap, 'cm-1'):.3f} cm-1")

# %%
plt = figure()
if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(from_internal(times, "ps"), from_internal(traj.energies, "cm-1"))
    ax.set_xlabel("t [ps]")
    ax.set_ylabel("energy [cm-1]")
    fig.savefig(OUT / "eigenenergies.png", dpi=120)
    print("wrote", OUT / "eigenenergies.png")

# %%
# Same pulses, Pi well moved out to 4.3 angstrom: narrow crossings appear as events.
from dataclasses import replace


far = replace(config.potential, pi=replace(config.potential.pi, Re=to_internal(4.3, "angstrom")))
traj = track_trajectories(far, config.grid, config.mass, to_internal(np.arange(0.0, 50.001, 0.05), "ps"), 4)
print(f"separated wells: {len(traj.events)} events, {len(traj.events_for(2))} on the trajectory starting 2nd-lowest")
