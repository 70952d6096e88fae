"""
Adiabatic passage in light-induced potentials
=============================================

Counterintuitively ordered pulses (the Pi-A pulse first) carry the ground
vibrational state of X into the ground state of the Pi well while the
intermediate A channel stays nearly empty.
"""

# %%
from lipdyn.runner import simulate

from _common import OUT, coarse, figure

config = coarse("fig2_aplip")
run = simulate(config)
rep = run.report
pops = run.result.population_array
print(f"final state {rep.final} weight {rep.final_weight:.3f}")
print(f"final populations X {pops[-1, 0]:.3f}  A {pops[-1, 1]:.3f}  Pi {pops[-1, 2]:.3f}; peak A {pops[:, 1].max():.3f}")

# %%
plt = figure()
if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for i, label in enumerate(("X", "A", "Pi")):
        ax.plot(run.result.times_ps, pops[:, i], label=label)
    ax.set_xlabel("t [ps]")
    ax.set_ylabel("population")
    ax.legend()
    fig.savefig(OUT / "aplip_populations.png", dpi=120)
    print("wrote", OUT / "aplip_populations.png")
