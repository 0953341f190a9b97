"""Region-flagged SNR expansions against the exact closed form."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ouvoi.approx import (
    ApproxResult,
    turning_noise_var_poisson,
    turning_noise_var_uniform,
    voi_high_snr_poisson,
    voi_high_snr_uniform,
    voi_low_snr_uniform,
)
from ouvoi.gauss_markov import OuParams
from ouvoi.voi_exact import markov_voi, snr_ratio, voi_closed_form
from ouvoi.window import NoiseModel, ObservationWindow

P = OuParams(kappa=0.1, theta=0.0, sigma=1.0)


def noise_for_gamma(p, gamma):
    return NoiseModel(p.sigma**2 / (2.0 * p.kappa * gamma))


def uniform_window(dt, m, last):
    return ObservationWindow(last - dt * np.arange(m - 1, -1, -1))


def test_result_is_frozen():
    r = ApproxResult(1.0, True, 2.0)
    with pytest.raises(Exception):
        r.value = 0.0


class TestHighSnrUniform:
    def test_region_flag_tracks_snr(self):
        high = voi_high_snr_uniform(P, NoiseModel(1e-4), 2.0, 2.0)
        low = voi_high_snr_uniform(P, NoiseModel(50.0), 2.0, 2.0)
        assert high.in_valid_region and not low.in_valid_region
        assert high.region_bound == low.region_bound == pytest.approx(
            2.0 / -math.expm1(-0.4), rel=1e-14
        )

    def test_noiseless_is_markov_bound(self):
        r = voi_high_snr_uniform(P, NoiseModel(0.0), 2.0, 1.5)
        assert r.value == markov_voi(P, 1.5)
        assert r.in_valid_region

    def test_close_to_exact_at_high_snr(self):
        gamma = 1000.0
        noise = noise_for_gamma(P, gamma)
        w = uniform_window(2.0, 5, 0.0)
        exact = voi_closed_form(P, noise, w, 2.0)
        approx = voi_high_snr_uniform(P, noise, 2.0, 2.0)
        assert approx.in_valid_region
        assert approx.value == pytest.approx(exact, abs=1e-7)

    def test_truncation_error_is_cubic_in_inverse_snr(self):
        # halving 1/gamma should shrink the residual by about 8
        w = uniform_window(2.0, 5, 0.0)
        resid = []
        for gamma in (1000.0, 2000.0):
            noise = noise_for_gamma(P, gamma)
            exact = voi_closed_form(P, noise, w, 2.0)
            resid.append(abs(voi_high_snr_uniform(P, noise, 2.0, 2.0).value - exact))
        assert resid[0] / resid[1] == pytest.approx(8.0, rel=0.3)

    def test_nan_only_out_of_region(self):
        r = voi_high_snr_uniform(P, NoiseModel(10.0), 2.0, 2.0)
        assert math.isnan(r.value) and not r.in_valid_region

    @given(st.floats(0.05, 1.0), st.floats(0.1, 4.0))
    def test_flag_flips_at_turning_noise(self, kappa, dt):
        p = OuParams(kappa, 0.0, 1.0)
        star = turning_noise_var_uniform(p, dt)
        below = voi_high_snr_uniform(p, NoiseModel(star * (1 - 1e-9)), dt, 1.0)
        above = voi_high_snr_uniform(p, NoiseModel(star * (1 + 1e-9)), dt, 1.0)
        assert below.in_valid_region and not above.in_valid_region

    def test_validation(self):
        with pytest.raises(ValueError):
            voi_high_snr_uniform(P, NoiseModel(1.0), 0.0, 1.0)
        with pytest.raises(ValueError):
            voi_high_snr_uniform(P, NoiseModel(1.0), 2.0, -1.0)


class TestLowSnrUniform:
    def test_region_flag_tracks_snr(self):
        r = voi_low_snr_uniform(OuParams(0.25, 0.0, 1.0), NoiseModel(400.0), 2.0, 5, 2.0)
        assert r.in_valid_region  # gamma = 0.005, far below the bound
        out = voi_low_snr_uniform(OuParams(0.25, 0.0, 1.0), NoiseModel(0.2), 2.0, 5, 2.0)
        assert not out.in_valid_region

    def test_noiseless_rejected(self):
        with pytest.raises(ValueError):
            voi_low_snr_uniform(P, NoiseModel(0.0), 2.0, 3, 1.0)

    def test_close_to_exact_at_low_snr(self):
        p = OuParams(0.25, 0.0, 1.0)
        gamma = 0.01
        noise = noise_for_gamma(p, gamma)
        w = uniform_window(2.0, 5, 0.0)
        exact = voi_closed_form(p, noise, w, 2.0)
        r = voi_low_snr_uniform(p, noise, 2.0, 5, 2.0)
        assert r.in_valid_region
        assert r.value == pytest.approx(exact, rel=1e-3)

    def test_truncation_error_is_cubic_in_snr(self):
        p = OuParams(0.25, 0.0, 1.0)
        w = uniform_window(2.0, 5, 0.0)
        resid = []
        for gamma in (0.01, 0.005):
            noise = noise_for_gamma(p, gamma)
            exact = voi_closed_form(p, noise, w, 2.0)
            resid.append(abs(voi_low_snr_uniform(p, noise, 2.0, 5, 2.0).value - exact))
        assert resid[0] / resid[1] == pytest.approx(8.0, rel=0.3)

    def test_bound_tends_to_half_m(self):
        # P -> m and Q -> m^2 as dt -> 0, so the region edge is ~ 1/(2m)
        for m in (1, 2, 5):
            r = voi_low_snr_uniform(OuParams(0.3, 0.0, 1.0), NoiseModel(1.0), 1e-4, m, 1.0)
            assert r.region_bound == pytest.approx(1.0 / (2 * m), rel=1e-3)

    def test_out_of_region_value_still_computed(self):
        # breakdown values are reported (possibly negative), only flagged
        p = OuParams(0.25, 0.0, 1.0)
        r = voi_low_snr_uniform(p, noise_for_gamma(p, 10.0), 2.0, 5, 2.0)
        assert not r.in_valid_region
        assert math.isfinite(r.value)

    def test_validation(self):
        with pytest.raises(ValueError):
            voi_low_snr_uniform(P, NoiseModel(1.0), 2.0, 0, 1.0)

    def test_leading_coefficient_grows_and_converges_in_m(self):
        # recoverable from the value at small gamma: v ~ 0.5 u P gamma
        p = OuParams(0.1, 0.0, 1.0)
        gamma = 1e-6
        noise = NoiseModel(p.sigma**2 / (2 * p.kappa * gamma))
        u = math.exp(-2 * p.kappa * 2.0)
        coeffs = [
            2.0 * voi_low_snr_uniform(p, noise, 2.0, m, 2.0).value / (u * gamma)
            for m in (1, 2, 5, 20, 60)
        ]
        assert all(a < b for a, b in zip(coeffs, coeffs[1:]))
        omega = -math.expm1(-2 * p.kappa * 2.0)
        assert coeffs[-1] == pytest.approx(1.0 / omega, rel=1e-4)

    def test_in_region_residual_shrinks_deeper_in(self):
        p = OuParams(0.25, 0.0, 1.0)
        w = uniform_window(2.0, 5, 0.0)
        resid = []
        for gamma in (0.04, 0.02, 0.01, 0.005):
            noise = noise_for_gamma(p, gamma)
            exact = voi_closed_form(p, noise, w, 2.0)
            resid.append(abs(voi_low_snr_uniform(p, noise, 2.0, 5, 2.0).value - exact))
        assert all(a > b for a, b in zip(resid, resid[1:]))


class TestHighSnrPoisson:
    @given(st.floats(0.05, 1.0), st.floats(0.2, 4.0), st.floats(0.1, 3.0))
    def test_matches_uniform_when_intervals_equal(self, kappa, dt, lag):
        p = OuParams(kappa, 0.0, 1.0)
        noise = NoiseModel(0.3)
        uni = voi_high_snr_uniform(p, noise, dt, lag)
        poi = voi_high_snr_poisson(p, noise, dt, lag)
        assert poi.region_bound == pytest.approx(uni.region_bound, rel=1e-15)
        if math.isnan(uni.value):
            assert math.isnan(poi.value)
        else:
            assert poi.value == pytest.approx(uni.value, rel=1e-14)
        assert poi.in_valid_region == uni.in_valid_region

    def test_only_last_interval_matters(self):
        # the expansion is blind to all but the newest interval by design
        p = OuParams(0.1, 0.0, 1.0)
        noise = NoiseModel(0.01)
        a = voi_high_snr_poisson(p, noise, 0.7, 2.0)
        assert a == voi_high_snr_poisson(p, noise, 0.7, 2.0)
        b = voi_high_snr_poisson(p, noise, 2.9, 2.0)
        assert a.value != b.value

    def test_validation(self):
        with pytest.raises(ValueError):
            voi_high_snr_poisson(P, NoiseModel(1.0), -0.1, 1.0)

    def test_huge_interval_limit(self):
        # R -> 1 for a very old previous sample, leaving the m-free form
        noise = NoiseModel(0.01)
        gamma = 1.0 / (2 * 0.1 * 0.01)
        got = voi_high_snr_poisson(P, noise, 500.0, 2.0).value
        c = 1.0 / math.expm1(2 * 0.1 * 2.0)
        want = markov_voi(P, 2.0) - 0.5 * math.log1p(c * (1 / gamma - 1 / gamma**2))
        assert got == pytest.approx(want, rel=1e-12)


class TestTurningNoise:
    @pytest.mark.parametrize(
        "kappa,want",
        [(0.05, 0.906346), (0.1, 0.824200), (0.2, 0.688339)],
    )
    def test_known_values(self, kappa, want):
        p = OuParams(kappa, 0.0, 1.0)
        assert turning_noise_var_uniform(p, 2.0) == pytest.approx(want, abs=1e-6)

    def test_poisson_form_agrees_at_equal_interval(self):
        assert turning_noise_var_poisson(P, 2.0) == turning_noise_var_uniform(P, 2.0)

    def test_hook_minimum_sits_at_turning_noise(self):
        # the truncated value decreases then increases in the noise variance,
        # bottoming out at the region boundary
        star = turning_noise_var_uniform(P, 2.0)
        grid = star * np.linspace(0.9, 1.1, 401)
        vals = [voi_high_snr_uniform(P, NoiseModel(s), 2.0, 2.0).value for s in grid]
        argmin = grid[int(np.argmin(vals))]
        assert abs(argmin - star) / star < 0.01

    @given(st.floats(0.05, 1.0), st.floats(0.1, 4.0))
    def test_snr_at_turning_equals_region_bound(self, kappa, dt):
        p = OuParams(kappa, 0.0, 1.0)
        star = turning_noise_var_uniform(p, dt)
        gamma = snr_ratio(p, NoiseModel(star))
        bound = voi_high_snr_uniform(p, NoiseModel(star), dt, 1.0).region_bound
        assert gamma == pytest.approx(bound, rel=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            turning_noise_var_uniform(P, 0.0)
        with pytest.raises(ValueError):
            turning_noise_var_poisson(P, -1.0)
