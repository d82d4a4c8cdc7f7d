"""Tests of resonance finding and ring-down Q on synthetic probe series."""

import math

import numpy as np
import pytest

from beacon.fdtd import (
    AmbiguousFitError,
    NoResonanceError,
    ProbeSeries,
    ResonanceResult,
    ShortSeriesError,
    find_resonance,
    find_resonances,
    linewidth_q,
    mode_volume,
    read_mode_csv,
)
from beacon.fdtd.resonance import _envelope_energy
from beacon.units import C_NM_PER_S

from . import l3_like_mode, ringdown_series

WINDOW = (850.0, 950.0)


class TestFindResonance:
    def test_single_mode(self):
        fit = find_resonance(ringdown_series([(900.0, 1.0, 1000.0)]), WINDOW)
        assert fit.lambda_nm == pytest.approx(900.0, abs=0.5)
        assert fit.q_factor == pytest.approx(1000.0, rel=0.01)
        assert fit.fit_residual < 0.1

    def test_noisy_mode(self):
        series = ringdown_series([(900.0, 1.0, 1000.0)], noise=1e-3, seed=3)
        assert find_resonance(series, WINDOW).q_factor == pytest.approx(1000.0, rel=0.02)

    def test_low_q_mode(self):
        fit = find_resonance(ringdown_series([(900.0, 1.0, 50.0)]), WINDOW)
        assert fit.q_factor == pytest.approx(50.0, rel=0.02)
        assert fit.q_linewidth == pytest.approx(50.0, rel=0.05)

    def test_window_order_does_not_matter(self):
        series = ringdown_series([(900.0, 1.0, 1000.0)])
        forward = find_resonance(series, WINDOW)
        backward = find_resonance(series, WINDOW[::-1])
        assert forward == backward

    def test_only_post_turn_off_samples_count(self):
        ring = ringdown_series([(900.0, 1.0, 1000.0)])
        # A loud burst before turn-off at another wavelength must be ignored.
        burst = ringdown_series([(870.0, 50.0, None)], periods=100)
        series = ProbeSeries(
            positions=ring.positions,
            samples=np.vstack([burst.samples, ring.samples]),
            dt=ring.dt,
            turn_off_step=burst.steps,
        )
        fit = find_resonance(series, WINDOW)
        assert fit.lambda_nm == pytest.approx(900.0, abs=0.5)
        assert fit.q_factor == pytest.approx(1000.0, rel=0.01)

    def test_undamped_mode_reports_ceiling(self):
        with pytest.warns(UserWarning, match="No measurable decay"):
            fit = find_resonance(ringdown_series([(900.0, 1.0, None)]), WINDOW, q_ceiling=1e6)
        assert fit.q_factor == 1e6


class TestEnvelope:
    def test_band_passed_envelope_follows_the_decay(self):
        q = 200.0
        series = ringdown_series([(900.0, 1.0, q)])
        x = series.samples[:, 0]
        f0 = C_NM_PER_S / 900.0
        energy = _envelope_energy(x, series.dt, f0, f0 / 20)
        t = np.arange(len(x)) * series.dt
        expected = np.exp(-2 * math.pi * f0 * t / q)
        # Away from the ends the filter's ring-up no longer matters.
        middle = slice(len(x) // 4, len(x) // 2)
        assert energy[middle] == pytest.approx(expected[middle], rel=0.02)


class TestResonanceErrors:
    def test_noise_only(self):
        series = ringdown_series([], noise=1.0, seed=1)
        with pytest.raises(NoResonanceError):
            find_resonance(series, WINDOW)

    def test_peak_outside_window(self):
        with pytest.raises(NoResonanceError):
            find_resonance(ringdown_series([(800.0, 1.0, 1000.0)]), WINDOW)

    def test_too_few_cycles(self):
        with pytest.raises(ShortSeriesError):
            find_resonance(ringdown_series([(900.0, 1.0, 1000.0)], periods=5), WINDOW)

    def test_beating_modes(self):
        series = ringdown_series([(900.0, 1.0, None), (903.0, 1.0, None)])
        with pytest.raises(AmbiguousFitError):
            find_resonance(series, WINDOW)

    def test_errors_map_to_numerical_failures(self):
        with pytest.raises(ArithmeticError):
            find_resonance(ringdown_series([], noise=1.0, seed=1), WINDOW)


class TestSpectralPeaks:
    def test_two_modes_strongest_first(self):
        series = ringdown_series([(880.0, 1.0, 1000.0), (920.0, 0.5, 1000.0)])
        peaks = find_resonances(series, WINDOW)
        assert len(peaks) == 2
        assert peaks[0].wavelength_nm == pytest.approx(880.0, abs=1.0)
        assert peaks[1].wavelength_nm == pytest.approx(920.0, abs=1.0)
        assert peaks[0].power > peaks[1].power

    def test_max_modes(self):
        series = ringdown_series([(880.0, 1.0, 1000.0), (920.0, 0.5, 1000.0)])
        assert len(find_resonances(series, WINDOW, max_modes=1)) == 1

    def test_unresolved_line_has_no_linewidth_q(self):
        series = ringdown_series([(900.0, 1.0, 1000.0)])
        peak = find_resonances(series, WINDOW)[0]
        assert linewidth_q(series, peak) is None


class TestModeVolume:
    def test_uniform_field(self):
        field = np.ones((10, 10))
        epsilon = np.full((10, 10), 4.0)
        v = mode_volume(field, epsilon, dx_nm=20.0, wavelength_nm=900.0, n_eff=2.0)
        assert v == pytest.approx(100 * 20.0**2 / (900.0 / 2.0) ** 2)

    def test_concentrated_field_is_smaller(self):
        epsilon = np.full((21, 21), 4.0)
        y, x = np.indices(epsilon.shape) - 10
        wide = np.exp(-(x**2 + y**2) / 50.0)
        narrow = np.exp(-(x**2 + y**2) / 5.0)
        v_wide = mode_volume(wide, epsilon, 20.0, 900.0, 2.0)
        v_narrow = mode_volume(narrow, epsilon, 20.0, 900.0, 2.0)
        assert v_narrow < v_wide


class TestModeFile:
    def test_csv_keeps_phase_and_header(self, tmp_path):
        mode = l3_like_mode(half=10)
        phase = np.linspace(0, 1, mode.mode_field.size).reshape(mode.shape)
        field = mode.mode_field * np.exp(1j * phase)
        mode = mode.model_copy(update={"mode_field": field})
        path = tmp_path / "mode.csv"
        mode.to_csv(path)
        back = read_mode_csv(path)
        assert back["origin"] == mode.origin
        assert back["lambda_cav_nm"] == mode.lambda_cav_nm
        np.testing.assert_allclose(back["mode_field"], field, atol=1e-11)

    def test_unnormalised_field_rejected(self):
        mode = l3_like_mode(half=10)
        with pytest.raises(ValueError, match="max"):
            ResonanceResult(**{**dict(mode), "mode_field": 2 * mode.mode_field})
