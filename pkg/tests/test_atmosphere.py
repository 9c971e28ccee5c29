import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from tbw_autoland.atmosphere import (
    FT, Turbulence, WindState, add_sensor_noise, body_to_earth, dryden_scales, dryden_step,
    filter_response, generate_gusts, wind_angular_rates, wind_gradients,
)

DT = 0.01


@pytest.fixture(scope="module")
def params():
    return dryden_scales(100.0, 7.7, 160.0)


@pytest.fixture(scope="module")
def long_record(params):
    return generate_gusts(params, 10 ** 6, DT, np.random.default_rng(2024))


def spectral_variance(params, axis):
    """Output variance of a shaping filter driven by unit white noise: the integral of |G|^2."""
    value, _ = quad(lambda w: filter_response(params, w)[axis][0], 0.0, np.inf, limit=500)
    return value


def batch_mean_stderr(x, n_batches=100):
    means = x[: len(x) // n_batches * n_batches].reshape(n_batches, -1).mean(axis=1)
    return means.std(ddof=1) / math.sqrt(n_batches)


# --- scales and intensities ------------------------------------------------------

def test_scale_lengths_in_feet():
    p = dryden_scales(100 * FT, 10.0)
    assert p.L_w / FT == pytest.approx(100.0)
    assert p.L_u / FT == pytest.approx(100 / (0.177 + 0.0823) ** 1.2)
    assert p.sigma_u / p.sigma_w == pytest.approx(1 / (0.177 + 0.0823) ** 0.4)


def test_vertical_intensity():
    assert dryden_scales(30.0, 10.0).sigma_w == pytest.approx(1.0)


@given(st.floats(1.0, 300.0), st.floats(0.0, 30.0))
def test_lateral_equals_longitudinal(z, u20):
    p = dryden_scales(z, u20)
    assert p.L_u == p.L_v and p.sigma_u == p.sigma_v and p.L_w == z


@pytest.mark.parametrize("z", [0.0, -5.0])
def test_nonpositive_altitude(z):
    with pytest.raises(ValueError):
        dryden_scales(z, 7.7)


# --- gust generation ------------------------------------------------------------

def test_spectral_oracle_matches_intensity(params):
    for axis, sigma in enumerate((params.sigma_u, params.sigma_v, params.sigma_w)):
        assert spectral_variance(params, axis) == pytest.approx(sigma ** 2, rel=1e-6)


def test_long_run_standard_deviation(params, long_record):
    for axis in range(3):
        target = math.sqrt(spectral_variance(params, axis))
        assert long_record[:, axis].std() == pytest.approx(target, rel=0.10)


def test_long_run_mean_is_zero(long_record):
    for axis in range(3):
        x = long_record[:, axis]
        assert abs(x.mean()) < 3 * batch_mean_stderr(x)


def test_zero_noise_decays(params):
    w = WindState(filter_state=np.array([1.0, 2.0, -1.0, 0.5, 3.0]))
    for _ in range(20000):
        w = dryden_step(w, params, np.zeros(3), DT)
    assert np.max(np.abs(w.W)) < 1e-10


def test_output_linear_in_intensity(params):
    a = generate_gusts(params, 5000, DT, np.random.default_rng(7))
    b = generate_gusts(params.scaled(2.0), 5000, DT, np.random.default_rng(7))
    np.testing.assert_allclose(b, 2 * a, rtol=1e-12, atol=1e-15)


def test_same_seed_same_gusts(params):
    a = generate_gusts(params, 1000, DT, np.random.default_rng(3))
    b = generate_gusts(params, 1000, DT, np.random.default_rng(3))
    assert np.array_equal(a, b)


def test_step_and_batch_agree(params):
    noise = np.random.default_rng(11).standard_normal((200, 3))
    w = WindState()
    stepped = []
    for n in noise:
        w = dryden_step(w, params, n, DT)
        stepped.append(w.W)

    class Replay:
        def __init__(self, data):
            self.data = data

        def standard_normal(self, shape):
            return self.data

    batch = generate_gusts(params, 200, DT, Replay(noise))
    np.testing.assert_allclose(np.array(stepped), batch, rtol=1e-12, atol=1e-15)


def test_turbulence_warm_up_is_reproducible(params):
    a = Turbulence(params, DT, np.random.default_rng(5))
    b = Turbulence(params, DT, np.random.default_rng(5))
    a.warm_up(5.0)
    b.warm_up(5.0)
    x = np.array([160.0, 0, -2.0, 0, 0, 0, 0, -0.05, 0, 0, 0, 100.0])
    assert np.array_equal(a.step(x).kernel_array(), b.step(x).kernel_array())


# --- gradients and air-mass rotation ------------------------------------------------

def test_steady_wind_has_no_gradient():
    w = WindState(W=np.array([1.0, 2.0, 3.0]), W_prev=np.array([1.0, 2.0, 3.0]))
    g = wind_gradients(w, 160.0, DT, velocity=np.array([160.0, 0.0, 0.0]))
    assert not np.any(g.grad_W) and not np.any(g.omega_w) and not np.any(g.W_dot)


def test_calm_air_is_all_zero():
    g = wind_gradients(WindState(), 160.0, DT, body_to_earth(0.1, -0.05, 0.3), np.ones(3))
    assert not np.any(g.kernel_array()) and not np.any(g.grad_W)


def test_sinusoidal_gust_gradient_amplitude():
    A, omega, u1 = 2.0, 1.5, 160.0
    t = np.arange(0, 2 * math.pi / omega, DT)
    peak = 0.0
    for k in range(1, len(t)):
        w = WindState(W=np.array([0, 0, A * math.sin(omega * t[k])]),
                      W_prev=np.array([0, 0, A * math.sin(omega * t[k - 1])]))
        peak = max(peak, abs(wind_gradients(w, u1, DT).grad_W[2, 0]))
    assert peak == pytest.approx(A * omega / u1, rel=1e-3)


def test_zero_gradient_no_rotation():
    assert not np.any(wind_angular_rates(np.zeros((3, 3))))


def test_antisymmetric_gradient_roll_rate():
    c = 0.02
    G = np.zeros((3, 3))
    G[2, 1] = c   # dWz/dy
    G[1, 2] = -c  # dWy/dz
    np.testing.assert_allclose(wind_angular_rates(G), [c, 0.0, 0.0])


def test_sinusoid_rotation_matches_hand_evaluation():
    A, omega, u1, t = 2.0, 1.5, 160.0, 0.37
    w = WindState(W=np.array([0, 0, A * math.sin(omega * t)]),
                  W_prev=np.array([0, 0, A * math.sin(omega * (t - DT))]))
    g = wind_gradients(w, u1, DT)
    dwz_dx = (w.W[2] - w.W_prev[2]) / DT / u1
    # only dWz/dx is non-zero, so omega_y = (dWx/dz - dWz/dx)/2
    np.testing.assert_allclose(g.omega_w, [0.0, -0.5 * dwz_dx, 0.0], atol=1e-15)


def test_rotation_resolved_in_body_axes():
    G = np.zeros((3, 3))
    G[2, 1] = 0.01
    T = body_to_earth(0.0, 0.2, 0.0)
    np.testing.assert_allclose(wind_angular_rates(G, T.T), T.T @ wind_angular_rates(G))


@settings(max_examples=25)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-3, 3))
def test_direction_cosines_orthonormal(phi, theta, psi):
    T = body_to_earth(phi, theta, psi)
    np.testing.assert_allclose(T @ T.T, np.eye(3), atol=1e-12)


# --- sensor noise --------------------------------------------------------------

def test_zero_sigma_leaves_measurements(rng):
    assert add_sensor_noise(0.1, -0.02, (0.0, 0.0), rng) == (0.1, -0.02)


def test_sensor_noise_level(rng):
    sigma = math.radians(0.05)
    draws = np.array([add_sensor_noise(0.0, 0.0, (sigma, 0.0), rng)[0] for _ in range(10 ** 5)])
    assert draws.std() == pytest.approx(sigma, rel=0.05)


def test_negative_sigma_rejected(rng):
    with pytest.raises(ValueError):
        add_sensor_noise(0.0, 0.0, (-1.0, 0.0), rng)
