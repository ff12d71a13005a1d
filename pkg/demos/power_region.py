"""Where does the Lasso first step beat the SN two-step test?

Evaluates the sufficient conditions over the default (p, M) grid and prints a
coarse text map: '#' where both the low-level and the high-level conditions
hold, '+' where only the high-level one does, '.' where neither holds.
"""
import numpy as np

from momineq.diagnostics import heatmap_grid

grid = heatmap_grid(n=400, beta_n=0.001, C=2.0, steps_p=20, steps_M=41)
symbols = np.where(grid.lowlevel, "#", np.where(grid.highlevel, "+", "."))
print("p \\ M  " + "".join("|" if i % 10 == 0 else " " for i in range(grid.M_values.size)))
for p, row in zip(grid.p_values[::-1], symbols[::-1]):
    print(f"{p:>6} " + "".join(row))
print(f"M from {grid.M_values[0]:g} to {grid.M_values[-1]:g}, ticks every 2.5")
print(f"high-level failures: {100 * grid.highlevel_failure_fraction():.2f}% of cells")
print(f"nesting violations: {grid.nesting_violations()}")
