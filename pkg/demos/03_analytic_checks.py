"""
Propagator checks against closed forms
======================================

Three textbook limits the split-operator propagator must reproduce: resonant
Rabi flopping, Landau-Zener transitions, and agreement with the exact
exponential of the full Hamiltonian.
"""

# %%
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from oracles import brute_force_difference, landau_zener, rabi  # noqa: E402

# %%
# Flat potentials and a constant coupling: P_A(t) = sin^2(Omega t).
t, numeric, exact = rabi()
print(f"Rabi: max |P_A - sin^2(Omega t)| over two periods = {np.abs(numeric - exact).max():.1e}")

# %%
# A linear sweep through a crossing: diabatic survival exp(-2 pi Omega^2 / alpha).
for p in (0.1, 0.5, 0.9):
    numeric, exact = landau_zener(p)
    print(f"Landau-Zener: target {p:.1f}  propagated {numeric:.4f}  formula {exact:.4f}")

# %%
# 64-point toy: 1000 split-operator steps against dense matrix exponentials (~30 s).
worst, moved = brute_force_difference(steps=1000)
print(f"split operator vs expm: max difference {worst:.1e}, population moved off X {moved:.2f}")
