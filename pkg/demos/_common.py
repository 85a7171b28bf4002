import os

from stoch_duopoly import GameParams

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "out")
os.makedirs(OUT, exist_ok=True)


def game(alpha=0.0, beta=0.0):
    """Reference game: c1=0.2, c2=2, k1=0.2, k2=0.4."""
    return GameParams.with_rotation_noise(0.2, 2.0, 0.2, 0.4, alpha, beta)


def out(name):
    return os.path.join(OUT, name)
