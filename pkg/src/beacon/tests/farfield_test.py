"""Tests of the aperture field, its k-space spectrum and the collection figures."""

import math

import numpy as np
import pytest

from beacon.farfield import (
    ApertureField,
    CalibrationError,
    EmptyLightConeError,
    FiberMode,
    GeometryMismatchError,
    KSpectrum,
    ZeroFieldError,
    aligned_coupling,
    calibrate_coupling,
    collect,
    collection_efficiency,
    compose_aperture,
    fiber_coupling,
    fiber_mode_spectrum,
    optimize_waist,
    radiation_q,
    to_kspace,
    total_q,
)

from . import gaussian_field, grid_coordinates, l3_like_mode, small_design, synthetic_mode

WAVELENGTH = 900.0
K0 = 2 * math.pi / WAVELENGTH
# Fills the light cone to its 1/e² power point.
WAIST = 2.0 / K0
DX = 20.0
HALF = 64


def gaussian_spectrum(k_samples=32, **kwargs):
    mode = synthetic_mode(gaussian_field(HALF, DX, WAIST, **kwargs), dx_nm=DX)
    return to_kspace(ApertureField.from_mode(mode), k_samples)


class TestKSpace:
    def test_gaussian_transform(self):
        spec = gaussian_spectrum()
        cone = spec.cone()
        centre = spec.size // 2
        magnitude = np.abs(spec.amplitudes) / abs(spec.amplitudes[centre, centre])
        np.testing.assert_allclose(magnitude[cone], fiber_mode_spectrum(spec, WAIST)[cone], atol=1e-6)

    def test_power_is_preserved(self):
        mode = synthetic_mode(gaussian_field(HALF, DX, WAIST, x0_nm=80.0), dx_nm=DX)
        spec = to_kspace(ApertureField.from_mode(mode))
        assert spec.power.sum() == pytest.approx(mode.mode_power, rel=1e-9)

    def test_grid_resolves_light_cone(self):
        spec = gaussian_spectrum(k_samples=16)
        assert spec.size % 2 == 0
        assert spec.k0 / spec.dk >= 16 - 1e-9
        assert spec.k_axis[spec.size // 2] == 0.0

    def test_csv_crop(self, tmp_path):
        spec = gaussian_spectrum(k_samples=16)
        path = tmp_path / "kspace.csv"
        spec.to_csv(path, na=0.75)
        table = np.loadtxt(path, delimiter=",")
        assert table.shape[0] == table.shape[1]
        assert np.isnan(table[0, 0])
        assert np.abs(table[1:, 0]).max() <= 0.75 + 2 * spec.dk / spec.k0


class TestCollection:
    def test_gaussian_cone_fraction(self):
        na = 0.75
        expected = (1 - math.exp(-((na * K0 * WAIST) ** 2) / 2)) / (1 - math.exp(-((K0 * WAIST) ** 2) / 2))
        assert collection_efficiency(gaussian_spectrum(), na) == pytest.approx(expected, rel=0.01)

    def test_point_source_fills_cone_uniformly(self):
        field = np.zeros((33, 33))
        field[16, 16] = 1.0
        spec = to_kspace(ApertureField.from_mode(synthetic_mode(field, dx_nm=DX)), 32)
        assert collection_efficiency(spec, 0.75) == pytest.approx(0.75**2, rel=0.02)

    def test_full_aperture(self):
        assert collection_efficiency(gaussian_spectrum(), 1.0) == 1.0

    def test_grows_with_na(self):
        spec = gaussian_spectrum()
        values = [collection_efficiency(spec, na) for na in (0.2, 0.4, 0.6, 0.8, 1.0)]
        assert values == sorted(values)

    def test_shift_does_not_change_collection(self):
        centred = collection_efficiency(gaussian_spectrum(), 0.75)
        shifted = collection_efficiency(gaussian_spectrum(x0_nm=3 * DX, y0_nm=-2 * DX), 0.75)
        assert shifted == pytest.approx(centred, rel=1e-7)

    def test_matched_fiber(self):
        spec = gaussian_spectrum()
        assert fiber_coupling(spec, FiberMode(waist_nm=WAIST)) > 1 - 1e-6
        waist, eta = optimize_waist(spec, 0.75)
        assert waist == pytest.approx(WAIST, rel=1e-3)
        assert eta > 1 - 1e-6

    def test_odd_field_does_not_couple(self):
        x, y = grid_coordinates(HALF, DX)
        field = x * np.exp(-(x**2 + y**2) / WAIST**2)
        spec = to_kspace(ApertureField.from_mode(synthetic_mode(field, dx_nm=DX)), 32)
        assert fiber_coupling(spec, FiberMode(waist_nm=WAIST)) < 1e-9

    def test_scale_invariant(self):
        aperture = ApertureField.from_mode(l3_like_mode())
        scaled = aperture.model_copy(update={"field": aperture.field * (3 + 4j)})
        a, b = collect(to_kspace(aperture)), collect(to_kspace(scaled))
        assert b.eta_lens == pytest.approx(a.eta_lens, rel=1e-9)
        assert b.eta_smf == pytest.approx(a.eta_smf, rel=1e-6)

    def test_collect_combines_figures(self):
        result = collect(gaussian_spectrum(), FiberMode(waist_nm=WAIST, na_lens=0.65))
        assert result.na == 0.65
        assert result.eta_smf_total == pytest.approx(result.eta_lens * result.eta_smf)

    def test_empty_light_cone(self):
        spec = KSpectrum(amplitudes=np.zeros((8, 8), dtype=complex), dk=1.0, k0=0.5)
        with pytest.raises(EmptyLightConeError):
            collection_efficiency(spec, 0.75)

    def test_no_power_inside_objective(self):
        amplitudes = np.zeros((64, 64), dtype=complex)
        amplitudes[32, 60] = 1.0
        spec = KSpectrum(amplitudes=amplitudes, dk=1.0, k0=30.0)
        with pytest.raises(ZeroFieldError):
            fiber_coupling(spec, FiberMode(waist_nm=0.1, na_lens=0.5))


class TestAperture:
    def test_unperturbed_aperture_is_the_mode(self):
        mode = l3_like_mode()
        aperture = compose_aperture(mode, small_design(), 0.5)
        assert np.array_equal(aperture.field, mode.mode_field)
        assert aperture.scatterers == ()

    def test_one_scatterer_per_host(self):
        mode = l3_like_mode()
        aperture = compose_aperture(mode, small_design(["L2", "L3"]), 1e-3)
        hosts = {s.host for s in aperture.scatterers}
        assert len(aperture.scatterers) == 6 + 10
        assert (2, 0) in hosts and (0, 2) in hosts

    def test_scatterer_amplitude_follows_local_field(self):
        mode = synthetic_mode(gaussian_field(50, DX, 600.0), dx_nm=DX)
        aperture = compose_aperture(mode, small_design(["L2"]), 0.01)
        end_hole = next(s for s in aperture.scatterers if s.host == (2, 0))
        x, y = end_hole.position_nm
        expected = 0.01 * 5.0 * math.exp(-(x**2 + y**2) / 600.0**2)
        assert abs(end_hole.amplitude) == pytest.approx(expected, rel=0.01)

    def test_lattice_mismatch(self):
        mode = l3_like_mode(a_nm=250.0)
        with pytest.raises(GeometryMismatchError):
            compose_aperture(mode, small_design(["L2"]), 1e-3)

    def test_host_outside_mode_grid(self):
        with pytest.raises(GeometryMismatchError):
            compose_aperture(l3_like_mode(half=10), small_design(["L2"]), 1e-3)

    def test_aligned_phase(self):
        x, y = grid_coordinates(50, DX)
        field = np.exp(-(x**2 + y**2) / 600.0**2 + 1j * (x + 0.5 * y) / 400.0)
        mode = synthetic_mode(field, dx_nm=DX)
        design = small_design(["L2", "L3"])
        coupling = aligned_coupling(mode, design, 2.0)
        assert abs(coupling) == pytest.approx(2.0)
        scattered = compose_aperture(mode, design, coupling, include_mode=False).field.sum()
        reference = mode.mode_field.sum()
        assert abs(np.exp(1j * (np.angle(scattered) - np.angle(reference))) - 1) < 1e-9

    def test_scatterers_share_the_coupling_phase(self):
        x, y = grid_coordinates(50, DX)
        field = np.exp(-(x**2 + y**2) / 600.0**2) * np.cos(math.pi * x / 240.0 + 0.3)
        mode = synthetic_mode(field, dx_nm=DX)
        coupling = 0.02 * np.exp(0.7j)
        aperture = compose_aperture(mode, small_design(["L2", "L3", "L4"]), coupling, include_mode=False)
        phases = np.angle([s.amplitude for s in aperture.scatterers])
        np.testing.assert_allclose(phases, 0.7, atol=1e-12)

    def test_scatterers_can_follow_the_local_phase(self):
        x, y = grid_coordinates(50, DX)
        mode = synthetic_mode(x * np.exp(-(x**2 + y**2) / 600.0**2), dx_nm=DX)
        aperture = compose_aperture(mode, small_design(["L2"]), 0.01, include_mode=False, constructive=False)
        signs = {s.host: np.sign(s.amplitude.real) for s in aperture.scatterers}
        assert signs[(2, 0)] == -signs[(-2, 0)]


class TestVerticalLoss:
    def test_gaussian_radiation_q(self):
        mode = synthetic_mode(gaussian_field(HALF, DX, WAIST), dx_nm=DX)
        spec = to_kspace(ApertureField.from_mode(mode), 32)
        fraction = 1 - math.exp(-((K0 * WAIST) ** 2) / 2)
        expected = 0.5 * K0 * 165.0 * mode.eps_mean / fraction
        assert radiation_q(spec, mode, 165.0) == pytest.approx(expected, rel=0.01)

    def test_total_q(self):
        assert total_q(1000.0, 1000.0) == pytest.approx(500.0)
        assert total_q(None, 800.0) == 800.0
        assert total_q(None, math.inf) == math.inf

    def test_calibrated_q_ratio(self):
        mode = l3_like_mode(q_inplane=1e5)
        design = small_design(["L2", "L3", "L4"])
        coupling = calibrate_coupling(mode, mode, design, 165.0, target_ratio=0.8)
        bare = to_kspace(ApertureField.from_mode(mode))
        q_bare = total_q(mode.q_inplane, radiation_q(bare, mode, 165.0))
        perturbed = to_kspace(compose_aperture(mode, design, coupling))
        q_perturbed = total_q(mode.q_inplane, radiation_q(perturbed, mode, 165.0))
        assert q_perturbed / q_bare == pytest.approx(0.8, rel=1e-6)

    def test_perturbation_lowers_q(self):
        mode = l3_like_mode(q_inplane=1e5)
        design = small_design(["L2", "L3", "L4"])
        coupling = aligned_coupling(mode, design, 1.0)
        bare = radiation_q(to_kspace(ApertureField.from_mode(mode)), mode, 165.0)
        perturbed = radiation_q(to_kspace(compose_aperture(mode, design, coupling)), mode, 165.0)
        assert perturbed < bare

    def test_target_ratio_out_of_range(self):
        mode = l3_like_mode(q_inplane=1e5)
        with pytest.raises(CalibrationError):
            calibrate_coupling(mode, mode, small_design(["L2"]), 165.0, target_ratio=1.2)

    def test_nothing_to_calibrate(self):
        mode = l3_like_mode(q_inplane=1e5)
        with pytest.raises(CalibrationError):
            calibrate_coupling(mode, mode, small_design(), 165.0, target_ratio=0.8)

    def test_leakier_perturbed_mode_cannot_be_calibrated(self):
        bare = l3_like_mode(q_inplane=1e5)
        leaky = l3_like_mode(q_inplane=100.0)
        with pytest.raises(CalibrationError, match="already"):
            calibrate_coupling(bare, leaky, small_design(["L2", "L3", "L4"]), 165.0, target_ratio=0.8)

    def test_perturbation_ladder_lowers_q_step_by_step(self):
        mode = synthetic_mode(gaussian_field(50, DX, 600.0), dx_nm=DX, q_inplane=1e5)
        ladder = [(), ("L2",), ("L2", "L3"), ("L2", "L3", "L4")]
        coupling = calibrate_coupling(mode, mode, small_design(ladder[-1]), 165.0, target_ratio=0.8)
        q = []
        for layers in ladder:
            design = small_design(layers)
            aperture = compose_aperture(mode, design, aligned_coupling(mode, design, abs(coupling)))
            q.append(total_q(mode.q_inplane, radiation_q(to_kspace(aperture), mode, 165.0)))
        assert all(a > b for a, b in zip(q, q[1:])), q
