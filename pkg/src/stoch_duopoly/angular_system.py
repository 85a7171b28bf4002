"""Amplitude/phase decomposition of a planar linear SDE.

Writing X = r (cos t, sin t) for dX = A X dt + B X dW gives

    d log r = (q1 + (q4**2 - q2**2) / 2) dt + q2 dW
    d t     = (q3 - q2 q4) dt + q4 dW

with q1..q4 quadratic forms in (cos t, sin t).  q5 is the auxiliary
function printed next to the stationary Fokker-Planck equation; it is kept
for the literal ("printed") variants of the density solvers, while the
derived variants use the true derivative q4'.
"""

from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange
from .duopoly_model import LinearSde2

ROTATION_TOL = 1e-12


@dataclass(frozen=True)
class AngularCoeffs:
    source: LinearSde2

    @classmethod
    def from_matrices(cls, a, b):
        return cls(LinearSde2(a, b))

    def q1(self, theta):
        (a11, a12), (a21, a22) = self.source.a
        c, s = np.cos(theta), np.sin(theta)
        return a11 * c * c + (a12 + a21) * c * s + a22 * s * s

    def q2(self, theta):
        (b11, b12), (b21, b22) = self.source.b
        c, s = np.cos(theta), np.sin(theta)
        return b11 * c * c + (b12 + b21) * c * s + b22 * s * s

    def q3(self, theta):
        (a11, a12), (a21, a22) = self.source.a
        c, s = np.cos(theta), np.sin(theta)
        return a21 * c * c + (a22 - a11) * c * s - a12 * s * s

    def q4(self, theta):
        (b11, b12), (b21, b22) = self.source.b
        c, s = np.cos(theta), np.sin(theta)
        return b21 * c * c + (b22 - b11) * c * s - b12 * s * s

    def q5(self, theta):
        (b11, b12), (b21, b22) = self.source.b
        return -(b12 + b21) * np.sin(2 * theta) - (b22 - b11) * np.cos(2 * theta)

    def q4_prime(self, theta):
        (b11, b12), (b21, b22) = self.source.b
        return -(b12 + b21) * np.sin(2 * theta) + (b22 - b11) * np.cos(2 * theta)

    def q(self, j, theta):
        if j not in (1, 2, 3, 4, 5):
            raise IndexOutOfRange(f"coefficient index must be in 1..5, got {j!r}")
        return getattr(self, f"q{j}")(theta)

    def phase_drift(self, theta):
        """Drift q3 - q2 q4 of the phase process."""
        return self.q3(theta) - self.q2(theta) * self.q4(theta)

    def growth_rate(self, theta):
        """Integrand q1 + (q4**2 - q2**2)/2 of the top Lyapunov exponent."""
        q2 = self.q2(theta)
        q4 = self.q4(theta)
        return self.q1(theta) + 0.5 * (q4 * q4 - q2 * q2)


def q(coeffs, j, theta):
    return coeffs.q(j, theta)


def q4_prime(coeffs, theta):
    return coeffs.q4_prime(theta)


def is_rotation_scaling(sys, tol=ROTATION_TOL):
    """Check for B = [[alpha, -beta], [beta, alpha]].

    Returns ``(True, alpha, beta)`` on a match and ``(False, None, None)``
    otherwise.
    """
    (b11, b12), (b21, b22) = sys.b
    if abs(b11 - b22) <= tol and abs(b12 + b21) <= tol:
        return True, float(b11), float(b21)
    return False, None, None
