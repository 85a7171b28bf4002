"""The stationary phase density, three ways, against simulation.

For alpha = beta = 2 the phase process carries a probability current, so
the density is not exp(potential).  The closed forms, the backward
difference recurrence and a long simulated histogram should all agree.
"""

# %%
import numpy as np

from stoch_duopoly import (
    AngularCoeffs,
    density_backward_difference,
    density_closed_form,
    density_rotation_closed_form,
    linearize,
    phase_histogram,
    total_variation,
)
from stoch_duopoly.output import line_plot, write_svg
from _common import game, out

c = AngularCoeffs(linearize(game(2.0, 2.0)))
rot = density_rotation_closed_form(c, 2.0, 2.0, 4096).fold()
gen = density_closed_form(c, 4096).fold()
bd = density_backward_difference(c, 2048)
print("rotation vs general closed form:", np.max(np.abs(rot.values - gen.values)))
print("rotation vs backward difference:", np.max(np.abs(rot.values - bd.values)))

# %% Simulated histogram of the phase modulo pi
edges, counts = phase_histogram(c, n_bins=64, horizon=2000, n_paths=16)
print("total variation to backward difference:", round(total_variation(bd, edges, counts), 4))
printed = density_rotation_closed_form(c, 2.0, 2.0, 4096, form="printed_game").fold()
print("total variation to the printed game density:", round(total_variation(printed, edges, counts), 4))

# %%
centers = 0.5 * (edges[1:] + edges[:-1])
hist = counts / counts.sum() / np.diff(edges)
svg = line_plot([("closed form", rot.theta, rot.values), ("backward difference", bd.theta, bd.values),
                 ("histogram", centers, hist), ("printed game form", printed.theta, printed.values)],
                title="stationary phase density, alpha = beta = 2", xlabel="theta", ylabel="p")
write_svg(out("phase_density.svg"), svg)
