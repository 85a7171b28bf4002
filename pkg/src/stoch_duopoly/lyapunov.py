"""Top Lyapunov exponent of the linearized game, three ways.

* ``lambda_quadrature`` integrates q1 + (q4**2 - q2**2)/2 against a phase
  density.
* ``lambda_closed_form`` evaluates the rotation-scaling formula for the game
  from the two trigonometric moments of the density.
* ``lambda_monte_carlo`` simulates dX = A X dt + B X dW directly and averages
  the log growth of |X|, independently of any density.

``sweep`` and ``find_sign_changes`` locate the stability boundaries in alpha
or beta.
"""

from dataclasses import dataclass, field
import math

import numba
import numpy as np
from scipy.integrate import trapezoid

from . import phase_density as pd
from ._parallel import ordered_map, worker_count
from .angular_system import AngularCoeffs, is_rotation_scaling
from .duopoly_model import linearize
from .errors import BetaZero, ConfigError, NotRotationScaling, StepTooLarge, StochDuopolyError

METHODS = ("quadrature", "closed_form", "monte_carlo")
DENSITIES = ("rotation", "closed_form", "backward_difference", "printed", "printed_game")
MC_SCHEMES = ("weak2", "euler")

DEFAULT_N_GRID = 4096
DEFAULT_HORIZON = 200.0
DEFAULT_STEP = 1e-3
DEFAULT_PATHS = 256
BURN_IN_FRACTION = 0.1
_CHUNK = 8192


@dataclass(frozen=True)
class LyapunovEstimate:
    value: float
    method: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def standard_error(self):
        return self.diagnostics.get("standard_error")


def lambda_quadrature(coeffs, p):
    """Trapezoid rule for the growth-rate integrand against ``p``.

    The integrand is pi-periodic, so a half-domain density gives the same
    value as the full-domain one.
    """
    value = trapezoid(coeffs.growth_rate(p.theta) * p.values, p.theta)
    return LyapunovEstimate(float(value), "quadrature", {"n_grid": p.n_grid, "domain": p.domain})


def lambda_closed_form(game, moments):
    """Exponent of the game with B = [[alpha, -beta], [beta, alpha]].

    lambda = -(k1 c1 + k2 c2)(c1 + c2) + (beta**2 - alpha**2)/2
             - (k1 c1 - k2 c2)(c1 + c2) D2 + (k2 - k1)(c1**2 - c2**2) E2 / 2

    where (D2, E2) are the cos 2t / sin 2t moments of the phase density.
    """
    ok, alpha, beta = is_rotation_scaling(linearize(game))
    if not ok:
        raise NotRotationScaling("closed form needs b11 = b22 and b12 = -b21")
    if beta == 0:
        raise BetaZero("closed form needs beta != 0")
    c1, c2, k1, k2 = game.c1, game.c2, game.k1, game.k2
    d2, e2 = moments
    value = (
        -(k1 * c1 + k2 * c2) * (c1 + c2)
        + 0.5 * (beta * beta - alpha * alpha)
        - (k1 * c1 - k2 * c2) * (c1 + c2) * d2
        + 0.5 * (k2 - k1) * (c1 * c1 - c2 * c2) * e2
    )
    return LyapunovEstimate(float(value), "closed_form", {"D2": float(d2), "E2": float(e2)})


def lambda_rotation_general(sys, moments):
    """Same exponent written for an arbitrary drift matrix A."""
    ok, alpha, beta = is_rotation_scaling(sys)
    if not ok:
        raise NotRotationScaling("closed form needs b11 = b22 and b12 = -b21")
    (a11, a12), (a21, a22) = sys.a
    c2, s2 = moments
    value = 0.5 * (a11 + a22 + beta * beta - alpha * alpha) + 0.5 * (a11 - a22) * c2 + 0.5 * (a21 + a12) * s2
    return LyapunovEstimate(float(value), "closed_form", {"D2": float(c2), "E2": float(s2)})


@numba.njit(cache=True, nogil=True)
def _linear_chunk(c0, c1, c2, x, acc, dw, first_step, burn):
    n_paths, n_steps = dw.shape
    for p in range(n_paths):
        u = x[p, 0]
        v = x[p, 1]
        total = acc[p]
        for k in range(n_steps):
            w = dw[p, k]
            w2 = w * w
            m00 = c0[0, 0] + w * c1[0, 0] + w2 * c2[0, 0]
            m01 = c0[0, 1] + w * c1[0, 1] + w2 * c2[0, 1]
            m10 = c0[1, 0] + w * c1[1, 0] + w2 * c2[1, 0]
            m11 = c0[1, 1] + w * c1[1, 1] + w2 * c2[1, 1]
            nu = m00 * u + m01 * v
            nv = m10 * u + m11 * v
            r = math.sqrt(nu * nu + nv * nv)
            u = nu / r
            v = nv / r
            if first_step + k >= burn:
                total += math.log(r)
        x[p, 0] = u
        x[p, 1] = v
        acc[p] = total


def _one_step_matrices(a, b, h, scheme):
    """X_{n+1} = (C0 + w C1 + w**2 C2) X_n for a Brownian increment w."""
    eye = np.eye(2)
    if scheme == "euler":
        return eye + h * a, b.copy(), np.zeros((2, 2))
    # weak order 2 Ito-Taylor map for a linear SDE with one noise
    b2 = b @ b
    c0 = eye + h * a + 0.5 * h * h * (a @ a) - 0.5 * h * b2
    c1 = b + 0.5 * h * (a @ b + b @ a)
    return c0, c1, 0.5 * b2


def path_seeds(seed, n_paths):
    """Per-path seed sequences; path i depends only on (seed, i)."""
    return np.random.SeedSequence(seed).spawn(n_paths)


def lambda_monte_carlo(sys, horizon=DEFAULT_HORIZON, step=DEFAULT_STEP, n_paths=DEFAULT_PATHS, seed=0, scheme="weak2", burn_in=BURN_IN_FRACTION):
    """Monte Carlo estimate of the top exponent of dX = A X dt + B X dW.

    Every path starts at X = (1, 0), is advanced with the one-step map of
    ``scheme`` and renormalized to unit length after each step.  The logs of
    the norms are summed after a burn-in of ``burn_in * horizon``.  The
    per-path rates are averaged and the standard error is reported.

    ``scheme="euler"`` is plain Euler-Maruyama.  The default ``"weak2"``
    adds the second-order Ito-Taylor terms
    (h**2 A**2 / 2, (w**2 - h) B**2 / 2, h w (AB + BA) / 2).  Euler's O(h)
    bias in the exponent grows like |B|**4 and is several standard errors at
    beta ~ 4 with h = 1e-3.

    Path i draws from PCG64 seeded by ``SeedSequence(seed).spawn(n)[i]``, so
    results do not depend on how paths are scheduled across threads.
    """
    if not step > 0:
        raise ConfigError("step must be positive")
    if n_paths < 1:
        raise ConfigError("n_paths must be at least 1")
    if horizon < 100 * step:
        raise ConfigError("horizon must be at least 100 steps")
    if scheme not in MC_SCHEMES:
        raise ConfigError(f"scheme must be one of {MC_SCHEMES}")
    a = np.array(sys.a)
    bound = float(np.abs(a).sum(axis=1).max())
    if step * bound > 0.5:
        raise StepTooLarge(f"step {step} too large for |A| row-sum bound {bound:.3g} (need step*bound <= 0.5)")

    n_steps = int(round(horizon / step))
    burn = int(round(burn_in * n_steps))
    c0, c1, c2 = _one_step_matrices(a, np.array(sys.b), step, scheme)
    seeds = path_seeds(seed, n_paths)
    sqrt_h = math.sqrt(step)

    def run(block):
        gens = [np.random.Generator(np.random.PCG64(seeds[i])) for i in block]
        x = np.zeros((len(block), 2))
        x[:, 0] = 1.0
        acc = np.zeros(len(block))
        for start in range(0, n_steps, _CHUNK):
            k = min(_CHUNK, n_steps - start)
            dw = np.empty((len(block), k))
            for j, g in enumerate(gens):
                dw[j] = g.standard_normal(k)
            dw *= sqrt_h
            _linear_chunk(c0, c1, c2, x, acc, dw, start, burn)
        return acc

    n_blocks = min(worker_count(), n_paths)
    blocks = [list(r) for r in np.array_split(np.arange(n_paths), n_blocks)]
    acc = np.concatenate(ordered_map(run, blocks))
    rates = acc / ((n_steps - burn) * step)
    value = float(rates.mean())
    se = float(rates.std(ddof=1) / math.sqrt(n_paths)) if n_paths > 1 else 0.0
    diag = {
        "n_paths": n_paths,
        "standard_error": se,
        "horizon": horizon,
        "step": step,
        "seed": seed,
        "scheme": scheme,
        "path_rates": rates,
    }
    return LyapunovEstimate(value, "monte_carlo", diag)


def game_density(game, n_grid=DEFAULT_N_GRID, density="rotation", coefficients="derived"):
    """Phase density of the linearized game by the chosen solver."""
    sys = linearize(game)
    coeffs = AngularCoeffs(sys)
    if density == "closed_form":
        return pd.density_closed_form(coeffs, n_grid, coefficients)
    if density == "backward_difference":
        return pd.density_backward_difference(coeffs, n_grid, coefficients)
    if density not in DENSITIES:
        raise ConfigError(f"density must be one of {DENSITIES}")
    ok, alpha, beta = is_rotation_scaling(sys)
    if not ok:
        raise NotRotationScaling("rotation-scaling density needs b11 = b22 and b12 = -b21")
    form = "derived" if density == "rotation" else density
    return pd.density_rotation_closed_form(coeffs, alpha, beta, n_grid, form=form)


def game_lambda(game, method="quadrature", n_grid=DEFAULT_N_GRID, density="rotation", coefficients="derived", mc_options=None):
    """Top exponent of the game's stationary state by one method."""
    if method == "monte_carlo":
        return lambda_monte_carlo(linearize(game), **(mc_options or {}))
    if method not in METHODS:
        raise ConfigError(f"method must be one of {METHODS}")
    p = game_density(game, n_grid, density, coefficients)
    if method == "closed_form":
        return lambda_closed_form(game, pd.trig_moments(p))
    return lambda_quadrature(AngularCoeffs(linearize(game)), p)


@dataclass(frozen=True)
class SweepPoint:
    param: float
    value: float
    method: str
    stderr: float = None
    error: str = None

    @property
    def ok(self):
        return self.error is None and math.isfinite(self.value)


@dataclass(frozen=True)
class Sweep:
    """Ordered sweep of lambda over alpha or beta, plus the settings to re-evaluate it."""

    game: object
    param: str
    method: str
    points: tuple
    n_grid: int = DEFAULT_N_GRID
    density: str = "rotation"
    coefficients: str = "derived"
    dead_zone: float = 0.05
    mc_options: dict = None

    def evaluate(self, value):
        """lambda at one parameter value; raises on failure."""
        if self.param == "beta" and self.method != "monte_carlo" and abs(value) < self.dead_zone:
            raise BetaZero(f"beta={value:.6g} inside the dead zone |beta| < {self.dead_zone}")
        alpha = value if self.param == "alpha" else self.game.b11
        beta = value if self.param == "beta" else self.game.b21
        game = self.game.with_noise(alpha, beta)
        return game_lambda(game, self.method, self.n_grid, self.density, self.coefficients, self.mc_options)

    @property
    def params(self):
        return np.array([p.param for p in self.points])

    @property
    def values(self):
        return np.array([p.value for p in self.points])


def sweep(game_template, param, start, stop, steps, method="quadrature", n_grid=DEFAULT_N_GRID, density="rotation", coefficients="derived", dead_zone=0.05, mc_options=None):
    """Evaluate lambda at ``steps`` evenly spaced values of alpha or beta.

    The template's diffusion must be rotation-scaling; the swept parameter
    replaces alpha (= b11 = b22) or beta (= b21 = -b12) and the other one is
    held fixed.  Failed points are kept as gaps with their error message.
    """
    if param not in ("alpha", "beta"):
        raise ConfigError("param must be 'alpha' or 'beta'")
    if method not in METHODS:
        raise ConfigError(f"method must be one of {METHODS}")
    if steps < 2:
        raise ConfigError("a sweep needs at least 2 steps")
    ok, _, _ = is_rotation_scaling(linearize(game_template))
    if not ok:
        raise NotRotationScaling("sweeps vary alpha/beta of a rotation-scaling diffusion")
    lo, hi = sorted((start, stop))
    grid = np.linspace(lo, hi, int(steps))
    template = Sweep(game_template, param, method, (), n_grid, density, coefficients, dead_zone, mc_options)

    def point(x):
        x = float(x)
        try:
            est = template.evaluate(x)
        except StochDuopolyError as exc:
            return SweepPoint(x, math.nan, method, None, str(exc))
        return SweepPoint(x, est.value, method, est.standard_error, None)

    points = tuple(ordered_map(point, grid))
    return Sweep(game_template, param, method, points, n_grid, density, coefficients, dead_zone, mc_options)


@dataclass(frozen=True)
class SignChange:
    param_lo: float
    param_hi: float
    root_estimate: float


def _bisect(fn, lo, hi, f_lo, tol):
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if f_mid == 0:
            return mid, mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return lo, hi


def find_sign_changes(result, tol=1e-3):
    """Brackets where lambda changes sign between neighbouring valid points.

    Brackets from quadrature and closed-form sweeps are refined by bisection
    to width ``tol``.  Monte Carlo brackets are the raw grid intervals.
    """
    valid = [p for p in result.points if p.ok]
    changes = []
    for left, right in zip(valid, valid[1:]):
        if left.value == 0:
            changes.append(SignChange(left.param, left.param, left.param))
        elif right.value != 0 and (left.value < 0) != (right.value < 0):
            lo, hi = left.param, right.param
            if result.method != "monte_carlo":
                lo, hi = _bisect(lambda x: result.evaluate(x).value, lo, hi, left.value, tol)
            changes.append(SignChange(lo, hi, 0.5 * (lo + hi)))
    if valid and valid[-1].value == 0:
        changes.append(SignChange(valid[-1].param, valid[-1].param, valid[-1].param))
    return changes
