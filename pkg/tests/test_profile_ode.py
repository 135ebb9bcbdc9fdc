import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from cubicwave import (
    DomainError,
    ProfileFunction,
    ProfileParams,
    blow_up_time,
    explicit_profile,
    integrate_profile,
    integrate_profile_batch,
    integrate_profile_values,
    modulus_bound,
    phase_theta,
)


def test_zero_seed_is_fixed_point():
    assert explicit_profile(ProfileParams(0.3 + 1j, 0.0), 5.0) == 0j
    assert integrate_profile(ProfileParams(0.3 + 1j, 0.0), 5.0, 1e-2) == 0j


def test_real_damping_worked_value():
    # f_hat = 1, p0 = 1: modulus 1/sqrt(1 + tau), no phase
    p = explicit_profile(ProfileParams(1.0, 1.0), 3.0)
    assert p == pytest.approx(0.5)


def test_conservative_phase_worked_value():
    # Re f_hat = 0 keeps the modulus and winds phase at |p0|^2/2 per unit tau
    p = explicit_profile(ProfileParams(-1j, 1.0), 2.0)
    assert p == pytest.approx(np.exp(1j))


def test_modulus_matches_explicit_for_dissipative_params():
    params = ProfileParams(0.8 + 0.5j, 0.6 - 0.2j)
    for tau in (0.0, 1.0, 7.5, 40.0):
        assert abs(explicit_profile(params, tau)) == pytest.approx(
            modulus_bound(params, tau), abs=1e-13
        )


def test_blow_up_time_and_domain_error():
    params = ProfileParams(-1.0, 1.0)
    t_star = blow_up_time(params)
    assert t_star == pytest.approx(1.0)
    with pytest.raises(DomainError):
        explicit_profile(params, 1.5)
    assert blow_up_time(ProfileParams(1.0, 1.0)) is None
    assert blow_up_time(ProfileParams(-1.0, 0.0)) is None


def test_phase_theta_against_quadrature():
    # Theta(tau) = (Im f/2) int_0^tau |p0|^2 / (1 + Re f |p0|^2 s) ds
    rng = np.random.default_rng(3)
    for _ in range(100):
        re = rng.uniform(0.0, 2.0)
        im = rng.uniform(-2.0, 2.0)
        p0 = (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)) / np.sqrt(2)
        tau = rng.uniform(0.0, 100.0)
        q = abs(p0) ** 2

        def integrand(s):
            return 0.5 * im * q / (1.0 + re * q * s)

        ref, err = quad(integrand, 0.0, tau, limit=200, epsabs=1e-13, epsrel=1e-13)
        assert err < 1e-10  # certify the reference before using it
        assert phase_theta(ProfileParams(re + 1j * im, p0), tau) == pytest.approx(
            ref, abs=1e-9
        )


def test_integrator_matches_explicit_small_battery():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(25):
        re = rng.uniform(0.0, 2.0)
        im = rng.uniform(-1.5, 1.5)
        f = re + 1j * im
        if abs(f) > 2.0:
            f *= 2.0 / abs(f)
        p0 = (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)) / np.sqrt(2)
        tau = rng.uniform(0.0, 20.0)
        params = ProfileParams(f, p0)
        gap = abs(integrate_profile(params, tau, 1e-3) - explicit_profile(params, tau))
        worst = max(worst, gap)
    assert worst <= 1e-9, f"worst integrator gap {worst:.3e}"


def test_integrator_broadcasts_parameters():
    f = np.array([1.0, 1j, 0.5 + 0.5j])
    p0 = np.array([1.0, 1.0, 0.3j])
    vals = integrate_profile_values(f, p0, 2.0, 1e-3)
    for k in range(3):
        assert vals[k] == pytest.approx(
            explicit_profile(ProfileParams(f[k], p0[k]), 2.0), abs=1e-9
        )


def test_integrator_rejects_bad_steps():
    with pytest.raises(DomainError):
        integrate_profile(ProfileParams(1.0, 1.0), 1.0, -1e-3)
    with pytest.raises(DomainError):
        integrate_profile(ProfileParams(1.0, 1.0), -1.0, 1e-3)


def test_batch_matches_scalar_and_explicit():
    # unsorted horizons with a duplicate and a zero; the shared sweep must
    # still peel off every case at its own tau
    f = np.array([1.0, -1.0j, 0.5 + 0.5j, 1.0, 0.2 - 1.5j])
    p0 = np.array([0.5, 0.8j, 0.3 - 0.4j, 0.5, -0.6])
    taus = np.array([2.5, 7.0, 0.0, 2.5, 11.3])
    got = integrate_profile_batch(f, p0, taus, dt=1e-3)
    for k in range(5):
        scalar = integrate_profile(ProfileParams(f[k], p0[k]), float(taus[k]), 1e-3)
        assert abs(got[k] - scalar) < 1e-10
        assert abs(got[k] - explicit_profile(ProfileParams(f[k], p0[k]), float(taus[k]))) < 1e-9
    assert got[0] == got[3]


def test_batch_rejects_mismatched_shapes():
    with pytest.raises(DomainError):
        integrate_profile_batch([1.0, 1.0], [0.5], [1.0, 2.0])
    with pytest.raises(DomainError):
        integrate_profile_batch([1.0], [0.5], [-1.0])
    with pytest.raises(DomainError):
        integrate_profile_batch([1.0], [0.5], [1.0], dt=0.0)


@given(
    re=st.floats(0.0, 2.0),
    im=st.floats(-2.0, 2.0),
    mag=st.floats(0.0, 1.0),
    arg=st.floats(0.0, 6.283),
    tau=st.floats(0.0, 100.0),
)
@settings(max_examples=80, deadline=None)
def test_modulus_never_grows_under_sign_condition(re, im, mag, arg, tau):
    params = ProfileParams(re + 1j * im, mag * np.exp(1j * arg))
    assert abs(explicit_profile(params, tau)) <= mag + 1e-12


@given(tau=st.floats(0.0, 50.0), mag=st.floats(0.01, 1.0))
@settings(max_examples=40, deadline=None)
def test_conservative_line_preserves_modulus(tau, mag):
    params = ProfileParams(1.5j, mag)
    assert abs(explicit_profile(params, tau)) == pytest.approx(mag, rel=1e-12)


# -- profile-on-a-grid container ------------------------------------------------


def _small_grid():
    sigma = np.linspace(-2.0, 2.0, 9)
    omega = np.linspace(0.0, 2 * np.pi, 8, endpoint=False)
    p0 = np.outer(np.exp(-(sigma**2)), np.exp(1j * omega)) * 0.1
    return ProfileFunction(sigma, omega, p0, f_hat_values=np.full(8, 1.0 + 0j))


def test_profile_function_at_zero_is_seed():
    pf = _small_grid()
    assert np.allclose(pf.at(0.0), pf.p0_values)


def test_profile_function_flows_pointwise():
    pf = _small_grid()
    vals = pf.at(3.0)
    assert vals[4, 2] == pytest.approx(
        explicit_profile(ProfileParams(1.0 + 0j, pf.p0_values[4, 2]), 3.0), abs=1e-12
    )


def test_profile_function_envelope_and_csv():
    pf = _small_grid()
    sup = pf.envelope_sup(eps=1.0, mu=0.05)
    assert sup > 0.0
    text = pf.to_csv()
    back = ProfileFunction.from_csv(text, f_hat_values=pf.f_hat_values)
    assert np.allclose(back.p0_values, pf.p0_values)
    assert np.allclose(back.sigma_grid, pf.sigma_grid)
