"""Strong convergence of the stochastic schemes on the game.

All runs share one Brownian path per sample: coarse increments are sums of
fine ones.  euler2 carries every order-1 Ito-Taylor term and converges
with order ~1.  The printed variant keeps only b11 g1 (b22 g2) in its
Milstein term and drops to order ~0.5, like Euler-Maruyama.
"""

# %%
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "tests"))
from conftest import observed_order, strong_errors  # noqa: E402
from _common import game  # noqa: E402

hs = 2.0 ** -np.arange(6, 11)
for scheme in ("euler2", "euler2_printed", "euler_maruyama"):
    errs = strong_errors(game(2.0, 2.0), scheme, hs, n_paths=500, seed=7)
    print(f"{scheme:15s} order {observed_order(hs, errs):.2f}  errors {' '.join(f'{e:.2e}' for e in errs)}")
