"""Path simulation for the stochastic game and for the phase process.

Schemes for the game SDE (one scalar Wiener process drives both firms):

``euler_maruyama``
    x + h drift + g G.
``euler2``
    Second-order Euler scheme with the Ito-Taylor coefficients of the game:
    Milstein term (g . grad g_i)(G**2 - h)/2, deterministic term
    (L0 f_i) h**2/2 and mixed term (L1 f_i + L0 g_i) h G/2.
``euler2_printed``
    The same recurrence with the correction factors exactly as published:
    b11 g1 (resp. b22 g2) in the Milstein term, x1 x2 / (x1+x2)**3 factors in
    the h**2 term and (b11 - 2 x2/(x1+x2)**3) g1 (resp. (b21 - 2 x1/(x1+x2)**3) g2)
    in the h G term.  Its Milstein factor drops b12 g2 (resp. b21 g1), which
    caps its strong order at 1/2 whenever b12 or b21 is nonzero.
``ode_rk4``
    Classic Runge-Kutta on the noise-free drift.

Brownian increments come from ``numpy.random.default_rng(seed)`` (PCG64)
via ``standard_normal`` scaled by sqrt(h).
"""

from dataclasses import dataclass
import math

import numba
import numpy as np

from .duopoly_model import gamma_offsets
from .errors import ConfigError, DegenerateInput

SCHEMES = ("euler_maruyama", "euler2", "euler2_printed", "ode_rk4")
_SCHEME_ID = {name: i for i, name in enumerate(SCHEMES)}
DEGENERATE_SUM = 1e-9
BLOWUP = 1e12
DEFAULT_STEP = 1e-3
_CHUNK = 8192


@dataclass(frozen=True, eq=False)
class WienerPath:
    step: float
    increments: np.ndarray
    seed: int = None

    def coarsen(self, factor):
        """Path at step ``factor * step`` with each increment the sum of ``factor`` fine ones."""
        n = len(self.increments)
        if n % factor:
            raise ValueError("path length is not a multiple of the coarsening factor")
        inc = self.increments.reshape(-1, factor).sum(axis=1)
        return WienerPath(self.step * factor, inc, self.seed)


def wiener_path(seed, h, n_steps):
    """``n_steps`` Brownian increments G(n) ~ Normal(0, h)."""
    if not h > 0:
        raise ConfigError("step h must be positive")
    rng = np.random.default_rng(seed)
    return WienerPath(h, rng.standard_normal(int(n_steps)) * math.sqrt(h), seed)


def _params(game, gamma):
    return (game.c1, game.c2, game.k1, game.k2, game.b11, game.b12, game.b21, game.b22, gamma.gamma1, gamma.gamma2)


# Step formulas are plain arithmetic so they run on floats, numpy arrays and
# inside numba kernels alike.

def _em(x1, x2, h, G, c1, c2, k1, k2, b11, b12, b21, b22, g1c, g2c):
    s = x1 + x2
    f1 = k1 * (x2 / (s * s) - c1)
    f2 = k2 * (x1 / (s * s) - c2)
    g1 = b11 * x1 + b12 * x2 + g1c
    g2 = b21 * x1 + b22 * x2 + g2c
    return x1 + h * f1 + g1 * G, x2 + h * f2 + g2 * G


def _euler2(x1, x2, h, G, c1, c2, k1, k2, b11, b12, b21, b22, g1c, g2c):
    s = x1 + x2
    s3 = s * s * s
    s4 = s3 * s
    f1 = k1 * (x2 / (s * s) - c1)
    f2 = k2 * (x1 / (s * s) - c2)
    g1 = b11 * x1 + b12 * x2 + g1c
    g2 = b21 * x1 + b22 * x2 + g2c
    # gradients and Hessians of k_i f_i
    f1_1 = -2.0 * k1 * x2 / s3
    f1_2 = k1 * (x1 - x2) / s3
    f2_1 = k2 * (x2 - x1) / s3
    f2_2 = -2.0 * k2 * x1 / s3
    h1_11 = 6.0 * k1 * x2 / s4
    h1_12 = k1 * (4.0 * x2 - 2.0 * x1) / s4
    h1_22 = k1 * (2.0 * x2 - 4.0 * x1) / s4
    h2_11 = k2 * (2.0 * x1 - 4.0 * x2) / s4
    h2_12 = k2 * (4.0 * x1 - 2.0 * x2) / s4
    h2_22 = 6.0 * k2 * x1 / s4
    mil1 = b11 * g1 + b12 * g2
    mil2 = b21 * g1 + b22 * g2
    l0f1 = f1_1 * f1 + f1_2 * f2 + 0.5 * (h1_11 * g1 * g1 + 2.0 * h1_12 * g1 * g2 + h1_22 * g2 * g2)
    l0f2 = f2_1 * f1 + f2_2 * f2 + 0.5 * (h2_11 * g1 * g1 + 2.0 * h2_12 * g1 * g2 + h2_22 * g2 * g2)
    mix1 = f1_1 * g1 + f1_2 * g2 + b11 * f1 + b12 * f2
    mix2 = f2_1 * g1 + f2_2 * g2 + b21 * f1 + b22 * f2
    w = 0.5 * (G * G - h)
    n1 = x1 + h * f1 + g1 * G + mil1 * w + l0f1 * 0.5 * h * h + mix1 * 0.5 * h * G
    n2 = x2 + h * f2 + g2 * G + mil2 * w + l0f2 * 0.5 * h * h + mix2 * 0.5 * h * G
    return n1, n2


def _euler2_printed(x1, x2, h, G, c1, c2, k1, k2, b11, b12, b21, b22, g1c, g2c):
    s = x1 + x2
    s3 = s * s * s
    f1 = k1 * (x2 / (s * s) - c1)
    f2 = k2 * (x1 / (s * s) - c2)
    g1 = b11 * x1 + b12 * x2 + g1c
    g2 = b21 * x1 + b22 * x2 + g2c
    m = x1 * x2 / s3
    w = 0.5 * (G * G - h)
    n1 = (x1 + h * f1 + g1 * G + b11 * g1 * w + (-2.0 * m * f1 + g1 * m) * 0.5 * h * h
          + (b11 - 2.0 * x2 / s3) * g1 * 0.5 * h * G)
    n2 = (x2 + h * f2 + g2 * G + b22 * g2 * w + (-2.0 * m * f2 + g2 * m) * 0.5 * h * h
          + (b21 - 2.0 * x1 / s3) * g2 * 0.5 * h * G)
    return n1, n2


def _rk4(x1, x2, h, G, c1, c2, k1, k2, b11, b12, b21, b22, g1c, g2c):
    def f(u, v):
        s = u + v
        return k1 * (v / (s * s) - c1), k2 * (u / (s * s) - c2)

    a1, a2 = f(x1, x2)
    b1_, b2_ = f(x1 + 0.5 * h * a1, x2 + 0.5 * h * a2)
    c1_, c2_ = f(x1 + 0.5 * h * b1_, x2 + 0.5 * h * b2_)
    d1, d2 = f(x1 + h * c1_, x2 + h * c2_)
    return (x1 + h / 6.0 * (a1 + 2.0 * b1_ + 2.0 * c1_ + d1),
            x2 + h / 6.0 * (a2 + 2.0 * b2_ + 2.0 * c2_ + d2))


_em_jit = numba.njit(cache=True)(_em)
_euler2_jit = numba.njit(cache=True)(_euler2)
_euler2_printed_jit = numba.njit(cache=True)(_euler2_printed)


@numba.njit(cache=True)
def _rk4_jit(x1, x2, h, c1, c2, k1, k2):
    s = x1 + x2
    a1 = k1 * (x2 / (s * s) - c1)
    a2 = k2 * (x1 / (s * s) - c2)
    u, v = x1 + 0.5 * h * a1, x2 + 0.5 * h * a2
    s = u + v
    b1 = k1 * (v / (s * s) - c1)
    b2 = k2 * (u / (s * s) - c2)
    u, v = x1 + 0.5 * h * b1, x2 + 0.5 * h * b2
    s = u + v
    e1 = k1 * (v / (s * s) - c1)
    e2 = k2 * (u / (s * s) - c2)
    u, v = x1 + h * e1, x2 + h * e2
    s = u + v
    d1 = k1 * (v / (s * s) - c1)
    d2 = k2 * (u / (s * s) - c2)
    return (x1 + h / 6.0 * (a1 + 2.0 * b1 + 2.0 * e1 + d1),
            x2 + h / 6.0 * (a2 + 2.0 * b2 + 2.0 * e2 + d2))


def _check_state(x1, x2):
    if np.any(np.abs(np.asarray(x1) + np.asarray(x2)) <= DEGENERATE_SUM):
        raise DegenerateInput(f"|x1 + x2| <= {DEGENERATE_SUM}: demand singularity")


def step_euler2(game, gamma, state, h, G):
    """One step of ``euler2``; ``state`` entries may be arrays (one per path)."""
    _check_state(*state)
    return _euler2(state[0], state[1], h, G, *_params(game, gamma))


def step_euler2_printed(game, gamma, state, h, G):
    _check_state(*state)
    return _euler2_printed(state[0], state[1], h, G, *_params(game, gamma))


def step_euler_maruyama(game, gamma, state, h, G):
    _check_state(*state)
    return _em(state[0], state[1], h, G, *_params(game, gamma))


def step_rk4(game, state, h):
    """Runge-Kutta step of the noise-free drift."""
    _check_state(*state)
    return _rk4(state[0], state[1], h, 0.0, game.c1, game.c2, game.k1, game.k2, 0, 0, 0, 0, 0, 0)


@numba.njit(cache=True)
def _integrate(scheme, x, dw, h, p, keep_every, out, stopped):
    """Advance every path of ``x`` through the columns of ``dw``.

    ``out[j, i]`` receives the state after (j + 1) * keep_every steps.
    ``stopped[i]`` is the index of the first invalid state of path i (or -1);
    such paths are frozen and their later outputs are NaN.
    """
    c1, c2, k1, k2, b11, b12, b21, b22, g1c, g2c = p
    n_paths, n_steps = dw.shape
    for i in range(n_paths):
        x1 = x[i, 0]
        x2 = x[i, 1]
        for n in range(n_steps):
            if stopped[i] >= 0:
                break
            G = dw[i, n]
            if scheme == 0:
                y1, y2 = _em_jit(x1, x2, h, G, c1, c2, k1, k2, b11, b12, b21, b22, g1c, g2c)
            elif scheme == 1:
                y1, y2 = _euler2_jit(x1, x2, h, G, c1, c2, k1, k2, b11, b12, b21, b22, g1c, g2c)
            elif scheme == 2:
                y1, y2 = _euler2_printed_jit(x1, x2, h, G, c1, c2, k1, k2, b11, b12, b21, b22, g1c, g2c)
            else:
                y1, y2 = _rk4_jit(x1, x2, h, c1, c2, k1, k2)
            bad = not (math.isfinite(y1) and math.isfinite(y2))
            if bad or abs(y1) > BLOWUP or abs(y2) > BLOWUP or abs(y1 + y2) <= DEGENERATE_SUM:
                stopped[i] = n + 1
                break
            x1 = y1
            x2 = y2
            if (n + 1) % keep_every == 0:
                out[(n + 1) // keep_every - 1, i, 0] = x1
                out[(n + 1) // keep_every - 1, i, 1] = x2
        x[i, 0] = x1
        x[i, 1] = x2


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Retained states of one path; ``truncated_at`` is the failing step or None."""

    steps: np.ndarray
    times: np.ndarray
    states: np.ndarray
    scheme: str
    truncated_at: int = None

    @property
    def x1(self):
        return self.states[:, 0]

    @property
    def x2(self):
        return self.states[:, 1]


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Retained states of many paths, shape (n_kept, n_paths, 2); NaN after truncation."""

    steps: np.ndarray
    times: np.ndarray
    states: np.ndarray
    scheme: str
    truncated_at: np.ndarray

    def final(self):
        return self.states[-1]


def _validate(scheme, h, n_steps, keep_every):
    if scheme not in SCHEMES:
        raise ConfigError(f"scheme must be one of {SCHEMES}")
    if not h > 0:
        raise ConfigError("step h must be positive")
    if n_steps < 1:
        raise ConfigError("n_steps must be at least 1")
    if keep_every < 1:
        raise ConfigError("keep_every must be at least 1")


def _run(game, gamma, x0, scheme, h, increments, keep_every):
    """Integrate paths for a (n_paths, n_steps) increment array."""
    n_paths, n_steps = increments.shape
    x = np.empty((n_paths, 2))
    x[:] = np.asarray(x0, dtype=float).reshape(-1, 2)
    _check_state(x[:, 0], x[:, 1])
    n_keep = n_steps // keep_every
    out = np.full((n_keep + 1, n_paths, 2), np.nan)
    out[0] = x
    stopped = np.full(n_paths, -1, dtype=np.int64)
    _integrate(_SCHEME_ID[scheme], x, np.ascontiguousarray(increments, dtype=float), float(h),
               _params(game, gamma), int(keep_every), out[1:], stopped)
    steps = np.arange(n_keep + 1) * keep_every
    return steps, steps * h, out, stopped


def simulate(game, x0, scheme="euler2", h=DEFAULT_STEP, n_steps=1000, seed=0, keep_every=1, gamma=None, path=None):
    """Single trajectory of the game from ``x0``.

    Noise comes from ``wiener_path(seed, h, n_steps)`` unless an explicit
    ``path`` is given (its step must equal ``h``).  A path that blows up
    (|x| > 1e12) or reaches the demand singularity is truncated at the last
    valid retained state and ``truncated_at`` records the failing step.
    """
    _validate(scheme, h, n_steps, keep_every)
    gamma = gamma_offsets(game) if gamma is None else gamma
    if path is None:
        path = wiener_path(seed, h, n_steps)
    elif not math.isclose(path.step, h) or len(path.increments) < n_steps:
        raise ConfigError("explicit Wiener path does not match h / n_steps")
    steps, times, out, stopped = _run(game, gamma, x0, scheme, h, path.increments[None, :n_steps], keep_every)
    states = out[:, 0, :]
    truncated = None
    if stopped[0] >= 0:
        truncated = int(stopped[0])
        valid = np.all(np.isfinite(states), axis=1)
        last = int(np.nonzero(valid)[0][-1]) + 1
        steps, times, states = steps[:last], times[:last], states[:last]
    return Trajectory(steps, times, states, scheme, truncated)


def ensemble_increments(seed, h, n_steps, n_paths):
    """(n_paths, n_steps) increments; row i uses SeedSequence(seed).spawn(n_paths)[i]."""
    seeds = np.random.SeedSequence(seed).spawn(n_paths)
    sqrt_h = math.sqrt(h)
    return np.stack([np.random.default_rng(s).standard_normal(n_steps) * sqrt_h for s in seeds])


def simulate_ensemble(game, x0, scheme="euler2", h=DEFAULT_STEP, n_steps=1000, n_paths=100, seed=0, keep_every=1, gamma=None, increments=None):
    """Independent paths from a common start; see :func:`simulate`."""
    _validate(scheme, h, n_steps, keep_every)
    gamma = gamma_offsets(game) if gamma is None else gamma
    if increments is None:
        increments = ensemble_increments(seed, h, n_steps, n_paths)
    steps, times, out, stopped = _run(game, gamma, x0, scheme, h, increments, keep_every)
    return Ensemble(steps, times, out, scheme, stopped)


@numba.njit(cache=True)
def _phase_chunk(a, b, theta, dw, h, first_step, burn, counts):
    a11, a12, a21, a22 = a[0, 0], a[0, 1], a[1, 0], a[1, 1]
    b11, b12, b21, b22 = b[0, 0], b[0, 1], b[1, 0], b[1, 1]
    n_bins = counts.shape[0]
    n_paths, n_steps = dw.shape
    for p in range(n_paths):
        t = theta[p]
        for k in range(n_steps):
            c = math.cos(t)
            s = math.sin(t)
            cc, cs, ss = c * c, c * s, s * s
            q2 = b11 * cc + (b12 + b21) * cs + b22 * ss
            q3 = a21 * cc + (a22 - a11) * cs - a12 * ss
            q4 = b21 * cc + (b22 - b11) * cs - b12 * ss
            t += (q3 - q2 * q4) * h + q4 * dw[p, k]
            if first_step + k >= burn:
                u = t % math.pi
                j = int(u / math.pi * n_bins)
                if j >= n_bins:
                    j = n_bins - 1
                counts[j] += 1
        theta[p] = t


def phase_histogram(coeffs, n_bins=64, h=DEFAULT_STEP, horizon=2000.0, n_paths=16, seed=0, theta0=0.0, burn_in=0.1):
    """Histogram of the phase modulo pi from Euler-Maruyama paths.

    Simulates dt = (q3 - q2 q4) dt + q4 dW for each path over ``horizon``,
    discards the first ``burn_in`` fraction and bins every later state of
    every path.  Returns ``(edges, counts)`` with edges on [0, pi].
    """
    if not h > 0 or n_bins < 1 or n_paths < 1:
        raise ConfigError("phase histogram needs h > 0, n_bins >= 1 and n_paths >= 1")
    n_steps = int(round(horizon / h))
    burn = int(round(burn_in * n_steps))
    seeds = np.random.SeedSequence(seed).spawn(n_paths)
    gens = [np.random.default_rng(s) for s in seeds]
    theta = np.full(n_paths, float(theta0))
    counts = np.zeros(n_bins, dtype=np.int64)
    a = np.ascontiguousarray(coeffs.source.a)
    b = np.ascontiguousarray(coeffs.source.b)
    sqrt_h = math.sqrt(h)
    for start in range(0, n_steps, _CHUNK):
        k = min(_CHUNK, n_steps - start)
        dw = np.stack([g.standard_normal(k) for g in gens]) * sqrt_h
        _phase_chunk(a, b, theta, dw, h, start, burn, counts)
    return np.linspace(0.0, math.pi, n_bins + 1), counts
