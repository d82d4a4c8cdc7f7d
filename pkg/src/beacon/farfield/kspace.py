"""In-plane spatial spectrum of the aperture field."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from pydantic import Field
from scipy import fft

from ..models import ArrayRecord
from ..units import angular_wavenumber
from .aperture import ApertureField

__all__ = ["KSpectrum", "to_kspace", "DEFAULT_K_SAMPLES"]

# Grid points across the light-cone radius after padding.
DEFAULT_K_SAMPLES = 16


class KSpectrum(ArrayRecord):
    """A centred (k_y, k_x) spectrum; k = 0 sits at index (n // 2, n // 2)."""

    amplitudes: np.ndarray
    dk: float = Field(gt=0, description="Grid pitch in rad/nm.")
    k0: float = Field(gt=0, description="Free-space wavenumber in rad/nm.")

    @property
    def size(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def k_axis(self) -> np.ndarray:
        return (np.arange(self.size) - self.size // 2) * self.dk

    @property
    def k_radius(self) -> np.ndarray:
        k = self.k_axis
        return np.hypot(k[:, None], k[None, :])

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def cone(self, na: float = 1.0) -> np.ndarray:
        """Mask of the points with |k| <= na·k0."""
        return self.k_radius <= na * self.k0

    def to_csv(self, path: str | Path, na: float = 1.0) -> None:
        """Write |A| inside the na·k0 disk (cropped to its bounding box) with k axes in units of k0."""
        half = math.ceil(na * self.k0 / self.dk) + 1
        centre = self.size // 2
        crop = slice(max(centre - half, 0), centre + half + 1)
        magnitude = np.abs(self.amplitudes[crop, crop])
        axis = self.k_axis[crop] / self.k0
        header = f"dk={self.dk!r},k0={self.k0!r},na={na}\nfirst row: kx/k0; first column: ky/k0"
        table = np.block([[np.full((1, 1), np.nan), axis[None, :]], [axis[:, None], magnitude]])
        np.savetxt(path, table, delimiter=",", header=header, fmt="%.8g")


def to_kspace(aperture: ApertureField, k_samples: int = DEFAULT_K_SAMPLES) -> KSpectrum:
    """Centred, unitary 2D DFT of the aperture field.

    The field is zero-padded onto an even square grid at least twice its
    larger side and fine enough in k to put `k_samples` points across the
    light-cone radius, with the cavity centre at the grid centre. The
    transform is orthonormal, so total power is preserved exactly.
    """
    ny, nx = aperture.field.shape
    k0 = angular_wavenumber(aperture.wavelength_nm)
    n = max(2 * max(ny, nx), math.ceil(k_samples * aperture.wavelength_nm / aperture.dx_nm))
    n = fft.next_fast_len(n + n % 2)
    n += n % 2
    padded = np.zeros((n, n), dtype=complex)
    r0 = n // 2 - aperture.origin[0]
    c0 = n // 2 - aperture.origin[1]
    padded[r0 : r0 + ny, c0 : c0 + nx] = aperture.field
    amplitudes = fft.fftshift(fft.fft2(fft.ifftshift(padded), norm="ortho"))
    return KSpectrum(amplitudes=amplitudes, dk=2 * math.pi / (n * aperture.dx_nm), k0=k0)
