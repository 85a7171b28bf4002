import numpy as np
import pytest

from stoch_duopoly import AngularCoeffs, GameParams, linearize

# reference game used throughout: c1=0.2, c2=2, k1=0.2, k2=0.4
REF = dict(c1=0.2, c2=2.0, k1=0.2, k2=0.4)


def ref_game(alpha=0.0, beta=0.0):
    return GameParams.with_rotation_noise(alpha=alpha, beta=beta, **REF)


@pytest.fixture
def game():
    return ref_game(2.0, 2.0)


@pytest.fixture
def coeffs(game):
    return AngularCoeffs(linearize(game))


def random_stable_a(rng):
    """Drift matrix with entries in [-5, 5], trace < 0 and det > 0."""
    while True:
        a = rng.uniform(-5, 5, (2, 2))
        if np.trace(a) < 0 and np.linalg.det(a) > 0:
            return a


def strong_errors(game, scheme, hs, n_paths=500, seed=7, ref_factor=64, horizon=1.0, bump=0.01):
    """Mean |X_h(T) - X_ref(T)| over paths for each step in ``hs``.

    The reference uses step min(hs)/ref_factor; coarse increments are sums
    of the fine ones, so all runs share one Brownian path per sample.  Paths
    whose reference leaves the positive quadrant (they pass near the demand
    singularity, where no scheme is accurate) are left out of the mean.
    """
    from stoch_duopoly import simulate_ensemble, stationary_state
    from stoch_duopoly.sde_sim import ensemble_increments

    h_ref = min(hs) / ref_factor
    n_ref = int(round(horizon / h_ref))
    inc = ensemble_increments(seed, h_ref, n_ref, n_paths)
    x0 = stationary_state(game).as_array() * (1 + bump)
    ref = simulate_ensemble(game, x0, scheme, h_ref, n_ref, increments=inc, keep_every=n_ref // 64)
    inside = np.all(ref.states > 0, axis=(0, 2))
    errs = []
    for h in hs:
        f = int(round(h / h_ref))
        coarse = inc.reshape(n_paths, -1, f).sum(axis=2)
        n = coarse.shape[1]
        x = simulate_ensemble(game, x0, scheme, h, n, increments=coarse, keep_every=n).final()
        errs.append(float(np.mean(np.linalg.norm(x - ref.final(), axis=1)[inside])))
    return np.array(errs)


def observed_order(hs, errs):
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
