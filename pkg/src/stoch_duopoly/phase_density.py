"""Stationary density of the phase process on the circle.

The phase t of a planar linear SDE obeys dt = mu(t) dt + sigma(t) dW with
mu = q3 - q2 q4 and sigma = q4.  Its stationary Fokker-Planck equation
integrates once to

    mu p - (sigma**2 p)' / 2 = J

for a constant probability current J.  Three solvers are provided:

* ``density_closed_form``: quadrature of the integrated equation for any B
  with q4 != 0, using the current-carrying periodic solution.
* ``density_rotation_closed_form``: the same solution with an analytic
  potential when B = [[alpha, -beta], [beta, alpha]] (q2, q4 constant).
* ``density_backward_difference``: the first-order backward-difference
  recurrence on [0, pi], closed by periodicity and normalization.

All q_j are pi-periodic, so the density on [0, 2 pi) is pi-periodic as well
and can be folded onto [0, pi].
"""

from dataclasses import dataclass, field
import math
import warnings

import numpy as np
from scipy import sparse
from scipy.integrate import cumulative_trapezoid, trapezoid
from scipy.sparse import linalg as sparse_linalg

from .errors import (
    BetaZero,
    DiffusionDegenerate,
    GridTooCoarse,
    NonPositiveDensityWarning,
    NormalizationFailure,
    SingularRecurrence,
)

TWO_PI = 2.0 * math.pi
MIN_Q4 = 1e-9
MIN_DENOMINATOR = 1e-12
MIN_BACKWARD_GRID = 16
DEFAULT_REFINE = 4

COEFFICIENT_MODES = ("derived", "printed")
ROTATION_FORMS = ("derived", "printed", "printed_game")


@dataclass(frozen=True, eq=False)
class PhaseDensity:
    """Density values on a uniform grid over [0, pi] ("half") or [0, 2 pi] ("full")."""

    theta: np.ndarray
    values: np.ndarray
    domain: str
    method: str = ""
    flags: tuple = ()
    raw_values: np.ndarray = field(default=None, repr=False)

    @property
    def n_grid(self):
        return len(self.theta) - 1

    @property
    def h(self):
        return self.theta[1] - self.theta[0]

    def integral(self):
        return float(trapezoid(self.values, self.theta))

    def fold(self):
        """Half-domain version: average of p(t) and p(t + pi), renormalized."""
        if self.domain == "half":
            return self
        n = self.n_grid
        if n % 2:
            raise ValueError("folding needs an even number of grid intervals")
        m = n // 2
        vals = 0.5 * (self.values[: m + 1] + self.values[m:])
        theta = self.theta[: m + 1]
        vals = vals / trapezoid(vals, theta)
        return PhaseDensity(theta, vals, "half", self.method, self.flags)

    def unfold(self):
        """Full-domain version of a half-domain density (pi-periodic extension)."""
        if self.domain == "full":
            return self
        theta = np.concatenate([self.theta, self.theta[1:] + math.pi])
        vals = 0.5 * np.concatenate([self.values, self.values[1:]])
        return PhaseDensity(theta, vals, "full", self.method, self.flags)


class TrigMoments(tuple):
    """(c2_moment, s2_moment): integrals of cos 2t p and sin 2t p."""

    __slots__ = ()

    def __new__(cls, c2_moment, s2_moment):
        return super().__new__(cls, (float(c2_moment), float(s2_moment)))

    @property
    def c2_moment(self):
        return self[0]

    @property
    def s2_moment(self):
        return self[1]

    def __repr__(self):
        return f"TrigMoments(c2_moment={self[0]!r}, s2_moment={self[1]!r})"


def _grid(domain, n_grid):
    upper = math.pi if domain == "half" else TWO_PI
    return np.linspace(0.0, upper, n_grid + 1)


def _check_grid(n_grid):
    if int(n_grid) != n_grid or n_grid < 1:
        raise ValueError(f"n_grid must be a positive integer, got {n_grid!r}")
    return int(n_grid)


def _log_current_solution(psi, h):
    """log of u(t) = exp(psi(t)) * integral_{t-L}^{t} exp(-psi(v)) dv.

    ``psi`` is sampled on a uniform grid spanning one period L (both ends
    included) and may grow by psi(L) - psi(0) over the period.  Using
    psi(v - L) = psi(v) - psi(L), the window integral splits into a head
    from 0 and a tail to L, both accumulated in log space so the
    exponentials cannot overflow.  The result satisfies u' - psi' u = const
    and is exactly periodic.
    """
    psi = psi - psi[0]
    total = psi[-1]
    e = -psi
    pieces = np.logaddexp(e[1:], e[:-1]) + math.log(0.5 * h)
    head = np.concatenate([[-np.inf], np.logaddexp.accumulate(pieces)])
    tail = np.concatenate([np.logaddexp.accumulate(pieces[::-1])[::-1], [-np.inf]])
    return psi + np.logaddexp(head, total + tail)


def _normalized(theta, log_values, what):
    if not np.all(np.isfinite(log_values)):
        raise NormalizationFailure(f"{what}: non-finite density values")
    vals = np.exp(log_values - log_values.max())
    mass = trapezoid(vals, theta)
    if not (math.isfinite(mass) and mass > 0):
        raise NormalizationFailure(f"{what}: density mass {mass!r} cannot be normalized")
    vals = vals / mass
    err = abs(trapezoid(vals, theta) - 1.0)
    if err > 1e-6:
        raise NormalizationFailure(f"{what}: normalization off by {err:.3g}")
    return vals


def _check_q4(coeffs, theta):
    q4 = coeffs.q4(theta)
    k = int(np.argmin(np.abs(q4)))
    if abs(q4[k]) <= MIN_Q4:
        raise DiffusionDegenerate(
            f"angular diffusion q4 vanishes at theta={theta[k]:.6g} "
            f"(|q4|={abs(q4[k]):.3g}); the stationary density needs q4 != 0",
            theta=float(theta[k]),
        )
    return q4


def density_closed_form(coeffs, n_grid, coefficients="derived", refine=DEFAULT_REFINE):
    """Current-carrying stationary density on [0, 2 pi].

    With D(t) = exp(-2 int_0^t (q3 - q2 q4) / q4**2) the density is

        p(t) = k / (D(t) q4(t)**2) * (1 + eta * int_0^t D),
        eta  = (D(2 pi) - 1) / int_0^{2 pi} D,

    which is what is evaluated here, rearranged into log space.  With
    ``coefficients="printed"`` the D-integrand gains the extra - q4 q5
    term shown next to the printed first-order equation.

    Inner integrals use the composite trapezoid rule on a grid ``refine``
    times finer than the output grid.
    """
    n_grid = _check_grid(n_grid)
    if coefficients not in COEFFICIENT_MODES:
        raise ValueError(f"coefficients must be one of {COEFFICIENT_MODES}")
    if refine < 4:
        raise ValueError("refine must be at least 4")
    theta = _grid("full", n_grid)
    _check_q4(coeffs, theta)
    fine = _grid("full", n_grid * refine)
    q4 = _check_q4(coeffs, fine)
    num = coeffs.phase_drift(fine)
    if coefficients == "printed":
        num = num - q4 * coeffs.q5(fine)
    rate = 2.0 * num / (q4 * q4)
    psi = cumulative_trapezoid(rate, fine, initial=0.0)
    log_u = _log_current_solution(psi, fine[1] - fine[0])
    log_p = (log_u - np.log(q4 * q4))[::refine]
    vals = _normalized(theta, log_p, "closed-form density")
    return PhaseDensity(theta, vals, "full", f"closed_form[{coefficients}]")


def _rotation_exponent(a, alpha, beta, form):
    """Linear, cos 2t and sin 2t coefficients of the log-density exponent."""
    (a11, a12), (a21, a22) = a
    b2 = beta * beta
    if form == "derived":
        lin = a21 - a12 - 2.0 * alpha * beta
        sin_c = 0.5 * (a21 + a12)
    elif form == "printed":
        lin = a21 - a12 - alpha * beta
        sin_c = 0.5 * (a21 - a12)
    else:
        lin = a21 - a12 + alpha * beta
        sin_c = 0.5 * (a21 - a12)
    cos_c = 0.5 * (a11 - a22)
    return lin / b2, cos_c / b2, sin_c / b2


def density_rotation_closed_form(coeffs, alpha, beta, n_grid, form="derived", refine=DEFAULT_REFINE):
    """Stationary density for the rotation-scaling diffusion B(alpha, beta).

    q2 = alpha and q4 = beta are constant, so the potential is explicit:

        psi(t) = ((a21 - a12 - 2 alpha beta) t + (a21 + a12) sin 2t / 2
                  + (a11 - a22) cos 2t / 2) / beta**2

    When the linear coefficient vanishes, p is proportional to exp(psi).
    Otherwise exp(psi) is not periodic, and the current-carrying
    completion is used with this exact potential.

    ``form="printed"`` evaluates the printed exponential as is, i.e.
    (a21 - a12 - alpha beta) t and (a21 - a12) sin 2t / 2.  ``"printed_game"``
    evaluates the printed game density, which has + alpha beta.  Both printed
    variants are normalized on [0, 2 pi] without periodic completion.  When
    the printed linear term is nonzero the result carries the flag
    ``nonperiodic_printed_form``.
    """
    n_grid = _check_grid(n_grid)
    if beta == 0:
        raise BetaZero("rotation-scaling closed form needs beta != 0")
    if form not in ROTATION_FORMS:
        raise ValueError(f"form must be one of {ROTATION_FORMS}")
    a = coeffs.source.a
    theta = _grid("full", n_grid)
    lin, cos_c, sin_c = _rotation_exponent(a, alpha, beta, form)

    def psi(t):
        return lin * t + cos_c * np.cos(2 * t) + sin_c * np.sin(2 * t)

    if form != "derived":
        flags = ("nonperiodic_printed_form",) if abs(lin) > 1e-12 else ()
        vals = _normalized(theta, psi(theta), "printed rotation density")
        return PhaseDensity(theta, vals, "full", f"rotation[{form}]", flags)

    printed_lin = _rotation_exponent(a, alpha, beta, "printed")[0]
    flags = ("nonperiodic_printed_form",) if abs(printed_lin) > 1e-12 else ()
    if abs(lin) <= 1e-14:
        log_p = psi(theta)
    else:
        fine = _grid("full", n_grid * refine)
        log_p = _log_current_solution(psi(fine), fine[1] - fine[0])[::refine]
        flags = flags + ("current_completed",)
    vals = _normalized(theta, log_p, "rotation closed-form density")
    return PhaseDensity(theta, vals, "full", "rotation[derived]", flags)


def _recurrence_coefficients(coeffs, theta, h, coefficients):
    q4 = coeffs.q4(theta)
    extra = coeffs.q4_prime(theta) if coefficients == "derived" else coeffs.q5(theta)
    c = -coeffs.q3(theta) + coeffs.q2(theta) * q4 + q4 * extra
    denom = 2.0 * h * c + q4 * q4
    k = int(np.argmin(np.abs(denom)))
    if abs(denom[k]) < MIN_DENOMINATOR:
        raise SingularRecurrence(
            f"backward-difference denominator vanishes at theta={theta[k]:.6g}"
        )
    big_f = 2.0 * h / denom
    return big_f, q4 * q4 / (2.0 * h) * big_f


def density_backward_difference(coeffs, n_grid, coefficients="derived"):
    """First-order backward-difference density on [0, pi].

    The recurrence

        p(i) = (p0 + q4(i)**2 p(i-1) / (2h)) F(i),
        F(i) = 2h / (2h (-q3 + q2 q4 + q4 X)(i) + q4(i)**2),   h = pi / N

    uses X = q4' ("derived") or X = q5 ("printed").  p0 is the probability
    current, which is unknown, and so is the starting value p(0).  The
    discrete equations for i = 1..N, closed by p(N) = p(0) and unit
    trapezoid mass on [0, pi], are solved together as one sparse system.
    """
    n_grid = _check_grid(n_grid)
    if n_grid < MIN_BACKWARD_GRID:
        raise GridTooCoarse(f"backward-difference scheme needs N >= {MIN_BACKWARD_GRID}, got {n_grid}")
    if coefficients not in COEFFICIENT_MODES:
        raise ValueError(f"coefficients must be one of {COEFFICIENT_MODES}")
    theta = _grid("half", n_grid)
    h = math.pi / n_grid
    big_f, r = _recurrence_coefficients(coeffs, theta, h, coefficients)

    # Unknowns p(1..N) and the current p0, with p(0) = p(N).  Rows 1..N are
    # the recurrence, the last row is unit trapezoid mass.  Solving the
    # cyclic system directly avoids the cancellation of shooting when the
    # products of r(i) are large.
    n = n_grid
    idx = np.arange(n)
    rows = np.concatenate([idx, idx, idx, np.full(n, n)])
    cols = np.concatenate([idx, (idx - 1) % n, np.full(n, n), idx])
    vals = np.concatenate([np.ones(n), -r[1:], -big_f[1:], np.full(n, h)])
    system = sparse.csc_matrix((vals, (rows, cols)), shape=(n + 1, n + 1))
    rhs = np.zeros(n + 1)
    rhs[n] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", sparse_linalg.MatrixRankWarning)
        try:
            sol = sparse_linalg.spsolve(system, rhs)
        except (sparse_linalg.MatrixRankWarning, RuntimeError) as exc:
            raise SingularRecurrence("periodicity and normalization do not fix the recurrence") from exc
    raw = np.concatenate([sol[n - 1 : n], sol[:n]])
    if not np.all(np.isfinite(raw)):
        raise NormalizationFailure("backward-difference density is not finite")

    flags = ()
    values = raw
    low = float(raw.min())
    if low < 0:
        warnings.warn(
            f"backward-difference density has negative values (min {low:.3g}); clamped to 0",
            NonPositiveDensityWarning,
            stacklevel=2,
        )
        values = np.clip(raw, 0.0, None)
        flags = ("clamped",)
    return PhaseDensity(theta, values, "half", f"backward_difference[{coefficients}]", flags, raw_values=raw)


def trig_moments(p):
    c2 = trapezoid(np.cos(2 * p.theta) * p.values, p.theta)
    s2 = trapezoid(np.sin(2 * p.theta) * p.values, p.theta)
    return TrigMoments(c2, s2)


def bin_probabilities(p, edges):
    """Mass of the (piecewise-linear) density in each bin of ``edges``."""
    cum = cumulative_trapezoid(p.values, p.theta, initial=0.0)
    return np.diff(np.interp(edges, p.theta, cum))


def total_variation(p, edges, counts):
    """Total-variation distance between a histogram and a density.

    ``counts`` are raw bin counts over ``edges`` (which must lie inside the
    density's grid); both sides are converted to bin probabilities.
    """
    counts = np.asarray(counts, dtype=float)
    hist = counts / counts.sum()
    ref = bin_probabilities(p, edges)
    ref = ref / ref.sum()
    return 0.5 * float(np.abs(hist - ref).sum())
