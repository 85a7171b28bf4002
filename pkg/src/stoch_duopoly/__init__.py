"""Stochastic stability of a Cournot duopoly with noisy output adjustment."""

from .angular_system import AngularCoeffs, is_rotation_scaling
from .duopoly_model import (
    GameParams,
    GammaOffsets,
    LinearSde2,
    StationaryState,
    characteristic_roots,
    diffusion,
    drift,
    gamma_offsets,
    half_trace_identity,
    linearize,
    roots_complex,
    stationary_state,
)
from .errors import (
    BetaZero,
    ConfigError,
    DegenerateInput,
    DiffusionDegenerate,
    GridTooCoarse,
    IndexOutOfRange,
    NonPositiveDensityWarning,
    NormalizationFailure,
    NotRotationScaling,
    NumericalFailure,
    SingularRecurrence,
    StepTooLarge,
    StochDuopolyError,
)
from .lyapunov import (
    LyapunovEstimate,
    SignChange,
    Sweep,
    SweepPoint,
    find_sign_changes,
    game_density,
    game_lambda,
    lambda_closed_form,
    lambda_monte_carlo,
    lambda_quadrature,
    lambda_rotation_general,
    sweep,
)
from .phase_density import (
    PhaseDensity,
    TrigMoments,
    density_backward_difference,
    density_closed_form,
    density_rotation_closed_form,
    total_variation,
    trig_moments,
)
from .sde_sim import Ensemble, Trajectory, WienerPath, phase_histogram, simulate, simulate_ensemble, wiener_path

__version__ = "0.1.0"
