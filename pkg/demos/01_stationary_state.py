"""Where the game settles without noise, and how fast.

The reference game has marginal costs c1=0.2, c2=2 and adjustment speeds
k1=0.2, k2=0.4.  The stationary state, the drift Jacobian there and its
eigenvalues decide deterministic stability.
"""

# %%
import numpy as np

from stoch_duopoly import characteristic_roots, gamma_offsets, half_trace_identity, linearize, stationary_state
from _common import game

g = game()
x0 = stationary_state(g)
print(f"x10 = {x0.x10:.6f}, x20 = {x0.x20:.6f}")

# %% The low-cost firm produces ten times as much.  The Jacobian:
sys_ = linearize(g)
print(np.array2string(sys_.a, precision=4))

# %% Both roots are real and negative, so the ODE is a stable node.
mu1, mu2 = characteristic_roots(sys_)
print(f"mu1 = {mu1.real:.6f}, mu2 = {mu2.real:.6f}")
print(f"mean of roots {0.5 * (mu1 + mu2).real:.6f} = {half_trace_identity(g):.6f}")

# %% With noise B = [[a, -b], [b, a]] the offsets gamma_i switch the noise
# off at the stationary state, so x0 stays a fixed point of the SDE.
print(gamma_offsets(game(2.0, 2.0)))
