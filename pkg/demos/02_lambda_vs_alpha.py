"""Top Lyapunov exponent against alpha at beta = 2.

Noise destabilizes a band of alpha around 0 and stabilizes outside it.
The curve comes from the exact stationary phase density; a few Monte Carlo
points check it independently.  The curve from the printed game density
is shown as well: it puts the band edges near -1.2 and 1.1, but the
simulation does not follow it.
"""

# %%
import numpy as np

from stoch_duopoly import find_sign_changes, game_lambda, lambda_monte_carlo, linearize, sweep
from stoch_duopoly.output import line_plot, write_svg
from _common import game, out

exact = sweep(game(0.0, 2.0), "alpha", -3, 3, 121, n_grid=4096)
printed = sweep(game(0.0, 2.0), "alpha", -3, 3, 121, n_grid=4096, density="printed_game")
for name, res in (("exact", exact), ("printed", printed)):
    roots = [round(c.root_estimate, 4) for c in find_sign_changes(res)]
    print(f"{name:8s} sign changes at {roots}")

# %% Monte Carlo at a handful of alphas (weak order 2 scheme, 64 paths)
alphas = np.array([-2.0, -1.1, 0.0, 1.0, 2.0])
mc = [lambda_monte_carlo(linearize(game(a, 2.0)), horizon=100, n_paths=64, seed=1) for a in alphas]
for a, est in zip(alphas, mc):
    ex = game_lambda(game(a, 2.0)).value
    pr = game_lambda(game(a, 2.0), density="printed_game").value
    print(f"alpha={a:+.1f}  mc {est.value:+.4f} +- {est.standard_error:.4f}   exact {ex:+.4f}   printed {pr:+.4f}")

# %%
svg = line_plot(
    [("exact density", exact.params, exact.values),
     ("printed density", printed.params, printed.values),
     ("Monte Carlo", alphas, [e.value for e in mc])],
    title="lambda(alpha), beta = 2", xlabel="alpha", ylabel="lambda", zero_line=True,
    markers=[c.root_estimate for c in find_sign_changes(exact)],
)
write_svg(out("lambda_alpha.svg"), svg)
