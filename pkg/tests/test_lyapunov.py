import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stoch_duopoly import (
    AngularCoeffs,
    BetaZero,
    ConfigError,
    LinearSde2,
    NotRotationScaling,
    StepTooLarge,
    characteristic_roots,
    density_rotation_closed_form,
    find_sign_changes,
    game_lambda,
    lambda_closed_form,
    lambda_monte_carlo,
    lambda_quadrature,
    lambda_rotation_general,
    linearize,
    sweep,
    trig_moments,
)
from stoch_duopoly.lyapunov import Sweep, SweepPoint

from conftest import random_stable_a, ref_game


def rot(a, alpha, beta):
    return LinearSde2.rotation_noise(a, alpha, beta)


# --- oracles ------------------------------------------------------------------

@pytest.mark.parametrize("a_scale,omega,alpha,beta", [(-1.0, 0.0, 0.5, 1.0), (-0.3, 2.0, -1.0, 2.5), (0.2, -1.0, 2.0, 0.7)])
def test_isotropic_drift_oracle(a_scale, omega, alpha, beta):
    # A = aI + omega J commutes with rotations: lambda = a + (beta**2 - alpha**2)/2
    a = [[a_scale, -omega], [omega, a_scale]]
    s = rot(a, alpha, beta)
    c = AngularCoeffs(s)
    expected = a_scale + 0.5 * (beta**2 - alpha**2)
    p = density_rotation_closed_form(c, alpha, beta, 256)
    assert lambda_quadrature(c, p).value == pytest.approx(expected, abs=1e-12)
    assert lambda_rotation_general(s, trig_moments(p)).value == pytest.approx(expected, abs=1e-12)


def test_reference_value_frozen():
    est = game_lambda(ref_game(2.0, 2.0), "closed_form", 4096)
    assert est.value == pytest.approx(-1.7084773168313454, abs=1e-8)
    q = game_lambda(ref_game(2.0, 2.0), "quadrature", 4096)
    assert q.value == pytest.approx(est.value, abs=1e-9)


def test_game_formula_matches_general_formula():
    g = ref_game(1.3, 2.2)
    p = density_rotation_closed_form(AngularCoeffs(linearize(g)), 1.3, 2.2, 1024)
    m = trig_moments(p)
    assert lambda_closed_form(g, m).value == pytest.approx(lambda_rotation_general(linearize(g), m).value, abs=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(0.5, 4))
def test_quadrature_equals_closed_form(seed, alpha, beta):
    s = rot(random_stable_a(np.random.default_rng(seed)), alpha, beta)
    c = AngularCoeffs(s)
    p = density_rotation_closed_form(c, alpha, beta, 1024)
    assert abs(lambda_quadrature(c, p).value - lambda_rotation_general(s, trig_moments(p)).value) <= 1e-6


def test_quadrature_half_domain_equals_full(coeffs):
    p = density_rotation_closed_form(coeffs, 2.0, 2.0, 1024)
    assert lambda_quadrature(coeffs, p.fold()).value == pytest.approx(lambda_quadrature(coeffs, p).value, abs=1e-12)


# --- Monte Carlo --------------------------------------------------------------

def test_monte_carlo_deterministic_limit():
    s = LinearSde2(linearize(ref_game()).a, np.zeros((2, 2)))
    est = lambda_monte_carlo(s, horizon=100, n_paths=2)
    mu1 = characteristic_roots(s)[0].real
    assert est.value == pytest.approx(mu1, rel=0.02)
    assert est.standard_error == pytest.approx(0, abs=1e-12)


def test_monte_carlo_agrees_with_quadrature():
    g = ref_game(2.0, 2.0)
    mc = lambda_monte_carlo(linearize(g), horizon=100, n_paths=64, seed=3)
    q = game_lambda(g).value
    assert abs(mc.value - q) <= 3 * mc.standard_error
    assert len(mc.diagnostics["path_rates"]) == 64


def test_monte_carlo_reproducible_and_thread_invariant(monkeypatch):
    s = linearize(ref_game(1.0, 1.5))
    monkeypatch.setenv("STOCH_DUOPOLY_THREADS", "1")
    one = lambda_monte_carlo(s, horizon=5, n_paths=6, seed=11)
    monkeypatch.setenv("STOCH_DUOPOLY_THREADS", "3")
    three = lambda_monte_carlo(s, horizon=5, n_paths=6, seed=11)
    np.testing.assert_array_equal(one.diagnostics["path_rates"], three.diagnostics["path_rates"])
    other = lambda_monte_carlo(s, horizon=5, n_paths=6, seed=12)
    assert other.value != one.value


def test_monte_carlo_path_prefix_stable():
    # path i depends only on (seed, i)
    s = linearize(ref_game(1.0, 1.5))
    few = lambda_monte_carlo(s, horizon=5, n_paths=3, seed=4).diagnostics["path_rates"]
    many = lambda_monte_carlo(s, horizon=5, n_paths=5, seed=4).diagnostics["path_rates"]
    np.testing.assert_array_equal(few, many[:3])


def test_monte_carlo_rejects_large_step():
    s = rot([[-50.0, 0.0], [0.0, -50.0]], 0.0, 1.0)
    with pytest.raises(StepTooLarge):
        lambda_monte_carlo(s, horizon=200, step=0.02)
    with pytest.raises(ConfigError):
        lambda_monte_carlo(s, scheme="milstein")


def test_weak2_beats_euler_bias():
    # at large beta Euler's bias is many standard errors; weak2 is not
    s = rot([[-1.0, 0.5], [-0.5, -2.0]], 0.0, 4.0)
    p = density_rotation_closed_form(AngularCoeffs(s), 0.0, 4.0, 2048)
    exact = lambda_quadrature(AngularCoeffs(s), p).value
    w2 = lambda_monte_carlo(s, horizon=50, step=1e-2, n_paths=64, seed=1)
    eu = lambda_monte_carlo(s, horizon=50, step=1e-2, n_paths=64, seed=1, scheme="euler")
    assert abs(w2.value - exact) < abs(eu.value - exact)
    assert abs(eu.value - exact) > 5 * eu.standard_error


# --- errors -------------------------------------------------------------------

def test_closed_form_needs_rotation_scaling():
    from stoch_duopoly import GameParams
    g = GameParams(0.2, 2.0, 0.2, 0.4, b11=1.0, b12=0.0, b21=0.5, b22=2.0)
    with pytest.raises(NotRotationScaling):
        lambda_closed_form(g, (0.0, 0.0))
    with pytest.raises(BetaZero):
        lambda_closed_form(ref_game(1.0, 0.0), (0.0, 0.0))


# --- sweeps -------------------------------------------------------------------

def test_sweep_order_and_gaps(monkeypatch):
    monkeypatch.setenv("STOCH_DUOPOLY_THREADS", "4")
    res = sweep(ref_game(2.0, 2.0), "beta", -1.0, 1.0, 21, n_grid=256)
    np.testing.assert_allclose(res.params, np.linspace(-1, 1, 21))
    gap = res.points[10]
    assert not gap.ok and "dead zone" in gap.error
    assert all(p.ok for i, p in enumerate(res.points) if i != 10)


def test_sweep_validation():
    with pytest.raises(ConfigError):
        sweep(ref_game(2.0, 2.0), "gamma", 0, 1, 5)
    with pytest.raises(ConfigError):
        sweep(ref_game(2.0, 2.0), "alpha", 0, 1, 1)
    from stoch_duopoly import GameParams
    with pytest.raises(NotRotationScaling):
        sweep(GameParams(0.2, 2, 0.2, 0.4, b11=1.0), "alpha", 0, 1, 5)


def _fake(values, method="monte_carlo"):
    pts = tuple(SweepPoint(float(i), v, method) for i, v in enumerate(values))
    return Sweep(None, "alpha", method, pts)


def test_find_sign_changes_synthetic():
    assert find_sign_changes(_fake([-3, -2, -1, -0.5])) == []
    ch = find_sign_changes(_fake([-1, 1, 2, -2]))
    assert [(c.param_lo, c.param_hi) for c in ch] == [(0, 1), (2, 3)]
    ch = find_sign_changes(_fake([-1, 0.0, 1]))
    assert [c.root_estimate for c in ch] == [1.0]
    ch = find_sign_changes(_fake([-1, math.nan, 1]))
    assert [(c.param_lo, c.param_hi) for c in ch] == [(0, 2)]


def test_sign_changes_refined_by_bisection():
    res = sweep(ref_game(0.0, 2.0), "alpha", -3, 3, 13, n_grid=512)
    ch = find_sign_changes(res, tol=1e-6)
    assert len(ch) == 2
    for c in ch:
        assert c.param_hi - c.param_lo <= 1e-6
        assert abs(res.evaluate(c.root_estimate).value) < 1e-5


def test_printed_game_density_reproduces_published_boundaries():
    # the printed game density (exponent with + alpha beta and (a21 - a12)/2)
    # yields the published alpha boundaries near -1.2 and 1.1 and the beta
    # boundary near 2.6, unlike the exact density
    res = sweep(ref_game(0.0, 2.0), "alpha", -3, 3, 61, n_grid=1024, density="printed_game")
    roots = [c.root_estimate for c in find_sign_changes(res)]
    assert len(roots) == 2
    assert abs(roots[0] + 1.2) < 0.05 and abs(roots[1] - 1.1) < 0.1
    res = sweep(ref_game(2.0, 1.0), "beta", 0.5, 4, 36, n_grid=1024, density="printed_game")
    roots = [c.root_estimate for c in find_sign_changes(res)]
    assert len(roots) == 1 and abs(roots[0] - 2.6) < 0.05


def test_monte_carlo_sides_with_exact_density():
    # at alpha = 1, beta = 2 the exact and printed densities disagree in sign
    g = ref_game(1.0, 2.0)
    exact = game_lambda(g, density="rotation").value
    printed = game_lambda(g, density="printed_game").value
    mc = lambda_monte_carlo(linearize(g), horizon=200, n_paths=128, seed=5)
    assert exact < 0 < printed
    assert abs(mc.value - exact) <= 3 * mc.standard_error
    assert abs(mc.value - printed) > 5 * mc.standard_error
