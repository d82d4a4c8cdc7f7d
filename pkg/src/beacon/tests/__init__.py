"""Helper functions for tests."""

import math

import numpy as np

from beacon.fdtd import ProbeSeries, ResonanceResult
from beacon.geometry import DefectSpec, LatticeSpec, build_cavity_design
from beacon.units import C_NM_PER_S

# Big enough to host every default perturbation layer, small enough to run fast.
SMALL_LATTICE = LatticeSpec(nx=9, ny=7)


def small_design(layers=(), **kwargs):
    return build_cavity_design(SMALL_LATTICE, DefectSpec(), layers, **kwargs)


def ringdown_series(
    modes,
    reference_nm=900.0,
    periods=400,
    samples_per_period=20,
    noise=0.0,
    seed=0,
):
    """A single-probe series of decaying sinusoids.

    :param modes: (wavelength_nm, amplitude, q) triples; q=None means no decay.
    """
    dt = reference_nm / C_NM_PER_S / samples_per_period
    t = np.arange(periods * samples_per_period) * dt
    x = np.zeros_like(t)
    for wavelength, amplitude, q in modes:
        omega = 2 * math.pi * C_NM_PER_S / wavelength
        decay = np.exp(-omega * t / (2 * q)) if q else 1.0
        x += amplitude * decay * np.cos(omega * t)
    if noise:
        x += noise * np.random.default_rng(seed).standard_normal(len(t))
    return ProbeSeries(positions=((0, 0),), samples=x[:, None], dt=dt)


def grid_coordinates(half, dx_nm):
    """x and y (nm) of a (2·half + 1)² grid centred on its middle cell."""
    axis = (np.arange(2 * half + 1) - half) * dx_nm
    return np.meshgrid(axis, axis)


def gaussian_field(half, dx_nm, waist_nm, x0_nm=0.0, y0_nm=0.0):
    x, y = grid_coordinates(half, dx_nm)
    return np.exp(-((x - x0_nm) ** 2 + (y - y0_nm) ** 2) / waist_nm**2).astype(complex)


def synthetic_mode(
    field,
    dx_nm=20.0,
    wavelength_nm=900.0,
    q_inplane=None,
    a_nm=240.0,
    eps_mean=2.8**2,
):
    """Wrap a field array as a mode centred on the middle cell."""
    field = np.asarray(field, dtype=complex)
    field = field / field.flat[np.argmax(np.abs(field))]
    ny, nx = field.shape
    return ResonanceResult(
        lambda_cav_nm=wavelength_nm,
        q_factor=q_inplane or 1e4,
        mode_field=field,
        v_mode_norm=1.0,
        q_inplane=q_inplane,
        eps_mean=eps_mean,
        mode_power=float(np.sum(np.abs(field) ** 2)),
        dx_nm=dx_nm,
        origin=(ny // 2, nx // 2),
        a_nm=a_nm,
        n_eff=2.8,
    )


def l3_like_mode(half=50, dx_nm=20.0, a_nm=240.0, waist_nm=600.0, **kwargs):
    """A Gaussian envelope on a carrier at the band edge, mostly outside the light cone."""
    x, y = grid_coordinates(half, dx_nm)
    field = np.exp(-(x**2 + y**2) / waist_nm**2) * np.cos(math.pi * x / a_nm)
    return synthetic_mode(field, dx_nm=dx_nm, a_nm=a_nm, **kwargs)
