"""Top Lyapunov exponent against beta at alpha = 2.

Small rotational noise keeps the state stable; past beta ~ 2.7 the
exponent turns positive.
"""

# %%
from stoch_duopoly import find_sign_changes, sweep
from stoch_duopoly.output import line_plot, write_svg
from _common import game, out

res = sweep(game(2.0, 1.0), "beta", -4, 4, 161, n_grid=4096)
changes = find_sign_changes(res)
print("sign changes:", [round(c.root_estimate, 4) for c in changes])
print("gaps (dead zone around beta = 0):", [p.param for p in res.points if not p.ok])

# %% Flipping the sign of beta reverses the phase current, and lambda is not
# symmetric in beta.
for b in (1.0, 2.5, 3.5):
    print(b, round(res.evaluate(b).value, 6), round(res.evaluate(-b).value, 6))

# %%
svg = line_plot([("lambda", res.params, res.values)], title="lambda(beta), alpha = 2",
                xlabel="beta", ylabel="lambda", zero_line=True, markers=[c.root_estimate for c in changes])
write_svg(out("lambda_beta.svg"), svg)
