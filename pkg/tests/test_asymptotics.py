"""Ray fits and decay diagnostics on manufactured rays.

Every ray here is built in closed form from the explicit profile flow, so
each fitter has an exact expected answer: seed recovery is algebraic,
residual checks must either hit the noise floor or flag a planted defect,
and the decay regressions see data that is a line by construction.
"""

import math
from types import SimpleNamespace

import numpy as np
import pytest

from cubicwave import (
    ConfigError,
    DomainError,
    EnergyTrace,
    ProfileParams,
    RangeError,
    RaySample,
    UnwrapError,
    WindowError,
    asymptotic_freeness_diagnostic,
    dissipative_cubic,
    explicit_profile,
    extract_ray,
    fit_energy_decay,
    fit_phase_slope,
    fit_pointwise_decay,
    fit_profile_p0,
    fit_profile_p0_least_squares,
    fit_profile_p0_sensitivity,
    null_form_gradient,
    profile_grid_from_rays,
    ray_route_discrepancy,
    rotational_cubic,
    verify_profile_convergence,
)

TIMES = np.geomspace(25.0, 1.0e4, 160)


def track_ray(p0, f_hat, times=TIMES, sigma=0.0, omega=0.0):
    """Exact ray: U from the closed-form flow, du rebuilt from U."""
    times = np.asarray(times, dtype=float)
    params = ProfileParams(complex(f_hat), complex(p0))
    u = np.array([explicit_profile(params, math.log(t)) for t in times])
    omega_hat = np.array([-1.0, math.cos(omega), math.sin(omega)])
    du = np.outer(u / np.sqrt(times + sigma), omega_hat)
    return RaySample(sigma=sigma, omega=omega, times=times, U_values=u, du_values=du)


def flux_ray(du_sq_fn, times=TIMES):
    """Ray with a prescribed squared-derivative trace, all in one slot."""
    times = np.asarray(times, dtype=float)
    du = np.zeros((times.size, 3), dtype=complex)
    du[:, 0] = np.sqrt(du_sq_fn(times))
    u = np.ones(times.size, dtype=complex)
    return RaySample(sigma=0.0, omega=0.0, times=times, U_values=u, du_values=du)


# -- seed recovery ----------------------------------------------------------


class TestProfileFit:
    def test_worked_inversion_real_trace(self):
        # U = 0.5 at tau = 3 under trace 1 inverts to a unit seed
        t = math.e**3
        ray = track_ray(1.0, 1.0, times=[t])
        assert abs(ray.U_values[0] - 0.5) < 1e-12
        p0 = fit_profile_p0(ray, 1.0, t_match=t)
        assert abs(p0 - 1.0) < 1e-12

    def test_worked_inversion_rotating_trace(self):
        t = math.e**2
        ray = track_ray(1.0, -1.0j, times=[t])
        assert abs(ray.U_values[0] - np.exp(1.0j)) < 1e-12
        p0 = fit_profile_p0(ray, -1.0j, t_match=t)
        assert abs(p0 - 1.0) < 1e-12

    def test_match_value_too_large_is_domain_error(self):
        t = math.e**3
        u = np.array([0.9 + 0.0j])
        du = np.outer(u / math.sqrt(t), [-1.0, 1.0, 0.0])
        ray = RaySample(sigma=0.0, omega=0.0, times=np.array([t]), U_values=u, du_values=du)
        with pytest.raises(DomainError):
            fit_profile_p0(ray, 1.0, t_match=t)

    def test_match_time_outside_window_is_error(self):
        ray = track_ray(0.5, 1.0, times=[40.0, 50.0, 60.0])
        with pytest.raises(WindowError):
            fit_profile_p0(ray, 1.0, t_match=500.0)

    def test_round_trip_random_seeds(self):
        rng = np.random.default_rng(20240817)
        for _ in range(30):
            f_hat = complex(rng.uniform(0.0, 2.0), rng.uniform(-2.0, 2.0))
            p0 = complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
            ray = track_ray(p0, f_hat)
            fit = fit_profile_p0(ray, f_hat, t_match=50.0)
            assert abs(fit - p0) < 1e-9

    def test_sensitivity_spread_vanishes_on_exact_track(self):
        ray = track_ray(0.4 + 0.3j, 1.0 + 0.5j)
        out = fit_profile_p0_sensitivity(ray, 1.0 + 0.5j)
        assert out["spread"] < 1e-9
        assert abs(out["mean"] - (0.4 + 0.3j)) < 1e-9

    def test_least_squares_recovers_complex_seed(self):
        for f_hat, p0 in [(1.0 + 0.5j, 0.3 + 0.2j), (-2.0j, 0.5 - 0.1j)]:
            ray = track_ray(p0, f_hat)
            fit = fit_profile_p0_least_squares(ray, f_hat)
            assert abs(fit - p0) < 1e-6

    def test_least_squares_zero_ray_returns_zero(self):
        ray = track_ray(0.0, 1.0)
        assert fit_profile_p0_least_squares(ray, 1.0) == 0j

    def test_least_squares_needs_four_samples(self):
        ray = track_ray(0.5, 1.0, times=[25.0, 30.0, 35.0])
        with pytest.raises(WindowError):
            fit_profile_p0_least_squares(ray, 1.0)


# -- conformance to the explicit track --------------------------------------


class TestProfileConvergence:
    def test_exact_track_hits_noise_floor(self):
        ray = track_ray(0.6 - 0.2j, 1.0 + 1.0j)
        fit = verify_profile_convergence(ray, 0.6 - 0.2j, 1.0 + 1.0j)
        assert fit.passed
        assert "degenerate" in fit.note
        assert fit.residual_norm <= fit.params["floor"]

    def test_wrong_trace_is_detected(self):
        # rotating data checked against the damping track: modulus mismatch
        # dominates at late times, so the residual cannot be small at the end
        ray = track_ray(0.8, -1.0j)
        fit = verify_profile_convergence(ray, 0.8, 1.0)
        assert not fit.passed

    def test_needs_eight_samples(self):
        ray = track_ray(0.5, 1.0, times=np.geomspace(25.0, 100.0, 5))
        with pytest.raises(WindowError):
            verify_profile_convergence(ray, 0.5, 1.0)

    def test_route_discrepancy_degenerate_on_rebuilt_ray(self):
        ray = track_ray(0.7, 1.0)
        fit = ray_route_discrepancy(ray)
        assert fit.passed
        assert "degenerate" in fit.note

    def test_route_discrepancy_fits_planted_gap(self):
        ray = track_ray(0.7, 1.0)
        ray.du_values[:, 0] += 0.01 / ray.times  # decays one power faster
        fit = ray_route_discrepancy(ray)
        assert fit.passed
        assert abs(fit.params["slope"] + 1.0) < 1e-6
        assert fit.params["r2"] > 0.999

    def test_route_discrepancy_flags_growing_gap(self):
        ray = track_ray(0.7, 1.0)
        ray.du_values[:, 1] += 0.01 * ray.times**0.1  # does not shrink
        fit = ray_route_discrepancy(ray)
        assert not fit.passed
        assert abs(fit.params["slope"] - 0.1) < 1e-6


# -- pointwise and energy decay ---------------------------------------------


class TestPointwiseDecay:
    def test_log_improved_flux_passes(self):
        fit = fit_pointwise_decay(flux_ray(lambda t: 0.4 / (t * np.log(t))))
        assert fit.passed
        assert abs(fit.params["slope"] - 0.4) < 1e-10
        assert abs(fit.params["intercept"]) < 1e-12
        assert fit.params["r2"] > 0.999999
        assert fit.params["relative_drop"] > 0.3

    def test_free_wave_flux_fails(self):
        # |du|^2 t constant: R^2 is vacuously perfect, the drop gate fails it
        fit = fit_pointwise_decay(flux_ray(lambda t: 1.0 / t))
        assert not fit.passed
        assert fit.params["relative_drop"] < 1e-12

    def test_narrow_window_is_error(self):
        with pytest.raises(WindowError):
            fit_pointwise_decay(flux_ray(lambda t: 1.0 / t, times=np.geomspace(25.0, 900.0, 80)))
        with pytest.raises(WindowError):
            fit_pointwise_decay(flux_ray(lambda t: 1.0 / t, times=np.geomspace(150.0, 5000.0, 9)))


class TestEnergyDecay:
    def test_log_power_law_hits_target_slope(self):
        mu = 0.05
        target = -(1.0 - 2.0 * mu) / (2.0 - 2.0 * mu)
        t = np.geomspace(10.0, 1.0e4, 80)
        trace = EnergyTrace(times=t, energy_sq=np.log(t) ** target)
        fit = fit_energy_decay(trace, mu=mu)
        assert fit.passed
        assert abs(fit.params["slope"] - target) < 1e-9
        assert fit.params["non_increasing"]

    def test_bump_fails_monotonicity(self):
        t = np.geomspace(10.0, 1.0e4, 80)
        e = np.log(t) ** -0.5
        e[40] = e[39] * 1.001
        fit = fit_energy_decay(EnergyTrace(times=t, energy_sq=e))
        assert not fit.passed
        assert not fit.params["non_increasing"]

    def test_slow_decay_fails_rate_gate(self):
        t = np.geomspace(10.0, 1.0e4, 80)
        trace = EnergyTrace(times=t, energy_sq=np.log(t) ** -0.05)
        fit = fit_energy_decay(trace, mu=0.05)
        assert not fit.passed

    def test_short_trace_is_error(self):
        t = np.geomspace(10.0, 500.0, 40)
        with pytest.raises(WindowError):
            fit_energy_decay(EnergyTrace(times=t, energy_sq=np.log(t) ** -0.5))


# -- phase winding -----------------------------------------------------------


class TestPhaseSlope:
    def test_rotating_trace_slope_matches_seed(self):
        ray = track_ray(0.8, -1.0j)
        fit = fit_phase_slope(ray, 0.8)
        assert fit.passed
        assert abs(fit.params["ratio"] - 1.0) < 1e-6
        assert fit.params["r2"] > 0.999999

    def test_zero_seed_is_degenerate_pass(self):
        ray = track_ray(0.0, -1.0j)
        fit = fit_phase_slope(ray, 0.0)
        assert fit.passed
        assert "degenerate" in fit.note

    def test_flat_phase_fails_against_nonzero_seed(self):
        # real trace, real seed: no winding at all, so the slope check is sharp
        ray = track_ray(0.8, 1.0)
        fit = fit_phase_slope(ray, 0.8)
        assert not fit.passed

    def test_coarse_cadence_is_unwrap_error(self):
        ray = track_ray(3.0, -1.0j, times=np.geomspace(25.0, 1.0e4, 9))
        with pytest.raises(UnwrapError):
            fit_phase_slope(ray, 3.0)


# -- scattering-data grid and freeness ---------------------------------------


class TestFreenessDiagnostic:
    sigmas = (-1.0, 0.0, 1.0)
    seeds = (0.2, 0.5, 0.3)

    def grid_for(self, f):
        f_hat = f.circle_value(0.0)
        rays = [track_ray(p, f_hat, sigma=s) for s, p in zip(self.sigmas, self.seeds)]
        return profile_grid_from_rays(rays, f)

    def test_grid_recovers_planted_seeds(self):
        grid = self.grid_for(dissipative_cubic())
        assert np.allclose(grid.p0_values[:, 0], self.seeds, atol=1e-9)
        assert np.allclose(grid.sigma_grid, self.sigmas)

    def test_damping_trace_is_not_free(self):
        out = asymptotic_freeness_diagnostic(self.grid_for(dissipative_cubic()), dissipative_cubic())
        assert not out["modulus_tau_independent"]
        assert not out["asymptotically_free"]
        assert out["modulus_decay_max"] == pytest.approx(0.25, rel=1e-6)

    def test_rotating_trace_keeps_modulus_but_winds(self):
        out = asymptotic_freeness_diagnostic(self.grid_for(rotational_cubic()), rotational_cubic())
        assert out["modulus_tau_independent"]
        assert not out["asymptotically_free"]
        assert out["phase_drift_max"] == pytest.approx(0.25, rel=1e-6)

    def test_vanishing_trace_is_free(self):
        out = asymptotic_freeness_diagnostic(self.grid_for(null_form_gradient()), null_form_gradient())
        assert out["asymptotically_free"]
        assert out["phase_drift_max"] == 0.0
        assert out["modulus_decay_max"] == 0.0

    def test_l2_norm_is_the_sigma_trapezoid(self):
        grid = self.grid_for(dissipative_cubic())
        per_sigma = np.array(self.seeds) ** 2
        expected = math.sqrt(np.trapezoid(per_sigma, x=np.array(self.sigmas)) * 2.0 * math.pi)
        out = asymptotic_freeness_diagnostic(grid, dissipative_cubic())
        assert out["p0_l2_norm"] == pytest.approx(expected, rel=1e-9)

    def test_empty_ray_list_rejected(self):
        with pytest.raises(ConfigError):
            profile_grid_from_rays([], dissipative_cubic())


# -- storage and extraction ---------------------------------------------------


class TestStorage:
    def test_ray_sample_csv_round_trip(self):
        ray = track_ray(0.4 + 0.1j, 1.0 - 0.5j, times=np.geomspace(25.0, 400.0, 12), sigma=1.5)
        back = RaySample.from_csv(ray.to_csv(), sigma=1.5, omega=0.0)
        assert np.array_equal(back.times, ray.times)
        assert np.array_equal(back.U_values, ray.U_values)
        assert np.array_equal(back.du_values, ray.du_values)

    def test_energy_trace_csv_header_and_rows(self):
        t = np.geomspace(10.0, 1.0e3, 8)
        trace = EnergyTrace(times=t, energy_sq=1.0 / np.log(t))
        lines = trace.to_csv().strip().split("\n")
        assert lines[0] == "t,energy_sq"
        assert len(lines) == 9
        first = [float(x) for x in lines[1].split(",")]
        assert first == [t[0], 1.0 / math.log(t[0])]

    def test_extract_ray_lookup_and_range_error(self):
        a = track_ray(0.3, 1.0, times=np.geomspace(25.0, 200.0, 6))
        b = track_ray(0.4, 1.0, times=np.geomspace(25.0, 200.0, 6), sigma=2.5)
        run = SimpleNamespace(rays=[a, b])
        assert extract_ray(run, 2.5) is b
        with pytest.raises(RangeError, match="2.5"):
            extract_ray(run, 7.0)

    def test_samples_before_the_cone_are_rejected(self):
        with pytest.raises(ConfigError):
            RaySample(
                sigma=0.0,
                omega=0.0,
                times=np.array([1.0, 30.0]),
                U_values=np.zeros(2, dtype=complex),
                du_values=np.zeros((2, 3), dtype=complex),
            )

    def test_fit_mask_drops_the_pre_asymptotic_knee(self):
        ray = track_ray(0.5, 1.0, times=np.geomspace(2.5, 1.0e3, 60))
        kept = ray.times[ray.fit_mask()]
        assert kept.min() >= 20.0
        assert kept.max() == ray.times.max()
