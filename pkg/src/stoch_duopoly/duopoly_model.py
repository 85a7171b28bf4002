"""Cournot duopoly with inverse demand 1/x, linear costs and linear noise.

The state (x1, x2) holds the quantities of the two firms.  Each firm moves
its output at speed k_i along its marginal profit

    f_i = x_j / (x1 + x2)**2 - c_i,

and a single scalar Wiener process w(t) drives both equations through the
affine diffusion g_i = b_i1 x1 + b_i2 x2 + gamma_i.  The offsets gamma_i are
chosen so that the noise switches off at the equilibrium.
"""

from dataclasses import dataclass, replace
import math
import numbers

import numpy as np

from .errors import ConfigError, DegenerateInput


@dataclass(frozen=True)
class GameParams:
    """Constants of the stochastic game.

    c1, c2 are marginal costs, k1, k2 adjustment speeds and b11..b22 the
    entries of the diffusion matrix.  Costs and speeds must be positive.
    """

    c1: float
    c2: float
    k1: float
    k2: float
    b11: float = 0.0
    b12: float = 0.0
    b21: float = 0.0
    b22: float = 0.0

    def __post_init__(self):
        for name in ("c1", "c2", "k1", "k2", "b11", "b12", "b21", "b22"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, numbers.Real) or not math.isfinite(value):
                raise ConfigError(f"{name} must be a finite real number, got {value!r}")
            object.__setattr__(self, name, float(value))
        for name in ("c1", "c2", "k1", "k2"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")

    @classmethod
    def with_rotation_noise(cls, c1, c2, k1, k2, alpha, beta):
        """Game whose diffusion matrix is [[alpha, -beta], [beta, alpha]]."""
        return cls(c1, c2, k1, k2, b11=alpha, b12=-beta, b21=beta, b22=alpha)

    def with_noise(self, alpha, beta):
        return replace(self, b11=alpha, b12=-beta, b21=beta, b22=alpha)

    @property
    def b(self):
        return np.array([[self.b11, self.b12], [self.b21, self.b22]])


@dataclass(frozen=True)
class StationaryState:
    x10: float
    x20: float

    def as_array(self):
        return np.array([self.x10, self.x20])


@dataclass(frozen=True)
class GammaOffsets:
    gamma1: float
    gamma2: float


@dataclass(frozen=True, eq=False)
class LinearSde2:
    """Planar linear SDE dX = A X dt + B X dW."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float).reshape(2, 2)
        b = np.array(self.b, dtype=float).reshape(2, 2)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ConfigError("matrix entries must be finite")
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __eq__(self, other):
        if not isinstance(other, LinearSde2):
            return NotImplemented
        return np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b)

    def __hash__(self):
        return hash((self.a.tobytes(), self.b.tobytes()))

    @classmethod
    def rotation_noise(cls, a, alpha, beta):
        return cls(a, [[alpha, -beta], [beta, alpha]])


def drift(params, x1, x2):
    """Drift k_i * f_i of the game; accepts scalars or arrays."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    s = x1 + x2
    if np.any(s == 0):
        raise DegenerateInput("x1 + x2 = 0: the inverse demand 1/x is undefined there")
    s2 = s * s
    d1 = params.k1 * (x2 / s2 - params.c1)
    d2 = params.k2 * (x1 / s2 - params.c2)
    if d1.ndim == 0:
        return float(d1), float(d2)
    return d1, d2


def diffusion(params, gamma, x1, x2):
    g1 = params.b11 * np.asarray(x1, dtype=float) + params.b12 * np.asarray(x2, dtype=float) + gamma.gamma1
    g2 = params.b21 * np.asarray(x1, dtype=float) + params.b22 * np.asarray(x2, dtype=float) + gamma.gamma2
    if g1.ndim == 0:
        return float(g1), float(g2)
    return g1, g2


def stationary_state(params):
    s2 = (params.c1 + params.c2) ** 2
    return StationaryState(params.c2 / s2, params.c1 / s2)


def gamma_offsets(params):
    s2 = (params.c1 + params.c2) ** 2
    return GammaOffsets(
        -(params.b11 * params.c2 + params.b12 * params.c1) / s2,
        -(params.b21 * params.c2 + params.b22 * params.c1) / s2,
    )


def linearize(params):
    """Linear SDE of the game at its stationary state.

    The drift Jacobian is taken from the closed forms; B is copied from the
    parameters because the diffusion is already linear in the deviation.
    """
    c1, c2, k1, k2 = params.c1, params.c2, params.k1, params.k2
    s = c1 + c2
    a = [
        [-2.0 * k1 * c1 * s, -k1 * (c1 * c1 - c2 * c2)],
        [k2 * (c1 * c1 - c2 * c2), -2.0 * k2 * c2 * s],
    ]
    return LinearSde2(a, params.b)


def characteristic_roots(sys):
    """Roots of mu**2 - tr(A) mu + det(A), top root first.

    Ordered by descending real part, ties broken by descending imaginary part.
    """
    a = sys.a
    tr = a[0, 0] + a[1, 1]
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    half = 0.5 * tr
    disc = half * half - det
    if disc >= 0:
        r = math.sqrt(disc)
        # avoid cancellation in the smaller-magnitude root
        big = half + math.copysign(r, half) if half != 0 else r
        if big != 0:
            roots = [complex(big), complex(det / big)]
        else:
            roots = [0j, 0j]
    else:
        r = math.sqrt(-disc)
        roots = [complex(half, r), complex(half, -r)]
    roots.sort(key=lambda z: (z.real, z.imag), reverse=True)
    return roots[0], roots[1]


def roots_complex(sys):
    """True when the drift matrix has a complex-conjugate eigenvalue pair."""
    a = sys.a
    half = 0.5 * (a[0, 0] + a[1, 1])
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    return half * half - det < 0


def half_trace_identity(params):
    """-(k1 c1 + k2 c2)(c1 + c2), the mean of the two characteristic roots."""
    return -(params.k1 * params.c1 + params.k2 * params.c2) * (params.c1 + params.c2)
