"""Paths of the full nonlinear game.

Without noise every start near the stationary state returns to it.  With
alpha = beta = 2 (negative exponent) noisy paths also collapse onto it,
since the noise vanishes there; with alpha = 0, beta = 2 (positive
exponent) they wander away.
"""

# %%
import numpy as np

from stoch_duopoly import simulate, simulate_ensemble, stationary_state
from stoch_duopoly.output import line_plot, write_svg, write_trajectory_csv
from _common import game, out

x0 = stationary_state(game()).as_array()
ode = simulate(game(), x0 + [0.1, 0.1], "ode_rk4", 1e-2, 5000)
print("ODE distance after T=50:", np.linalg.norm(ode.states[-1] - x0))

# %%
for alpha, beta in ((2.0, 2.0), (0.0, 2.0)):
    ens = simulate_ensemble(game(alpha, beta), x0 * 1.01, "euler2", 1e-3, 100000, n_paths=100, seed=2, keep_every=10000)
    d = np.linalg.norm(ens.states - x0, axis=2)
    d = np.where(np.isfinite(d), d, np.inf)
    print(f"alpha={alpha}, beta={beta}: median distance at T=0,10,...,100:",
          " ".join(f"{m:.1e}" for m in np.median(d, axis=1)))

# %%
tr = simulate(game(2.0, 2.0), x0 * 1.05, "euler2", 1e-3, 20000, seed=4, keep_every=10)
write_trajectory_csv(out("trajectory.csv"), tr)
write_svg(out("trajectory.svg"), line_plot([("x1", tr.times, tr.x1), ("x2", tr.times, tr.x2)],
                                           title="alpha = beta = 2", xlabel="t", ylabel="x"))
