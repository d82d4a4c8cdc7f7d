from __future__ import annotations

import math
import warnings

import numpy as np
from pydantic import Field, model_validator

from ..fdtd import ResonanceResult
from ..models import ArrayRecord, Spec
from ..units import lifetime_ps_to_rate_per_ns
from .errors import OutOfDomainError

__all__ = ["EmitterParams", "CavityParams", "LeakyBackground", "BULK_LIFETIME_PS"]

# Bulk InAs dot lifetime; hundreds of ns would contradict the measured 45 ps.
BULK_LIFETIME_PS = 600.0
SUSPICIOUS_LIFETIME_NS = 100.0


class EmitterParams(Spec):
    """A quantum dot: bulk decay rate, position, dipole orientation and line."""

    gamma0_per_ns: float = Field(lifetime_ps_to_rate_per_ns(BULK_LIFETIME_PS), gt=0)
    position_nm: tuple[float, float] = (0.0, 0.0)
    dipole_angle_rad: float = 0.0
    wavelength_nm: float = Field(920.0, gt=0)

    @model_validator(mode="after")
    def _flag_slow_emitter(self) -> EmitterParams:
        if 1.0 / self.gamma0_per_ns >= SUSPICIOUS_LIFETIME_NS:
            warnings.warn(
                f"Bulk lifetime {1 / self.gamma0_per_ns:.0f} ns is far longer than the "
                "~1 ns typical of InAs dots; check the units (ps vs ns).",
                stacklevel=2,
            )
        return self

    @property
    def lifetime_ps(self) -> float:
        return 1e3 / self.gamma0_per_ns

    @property
    def orientation(self) -> float:
        """cos²θ between the dipole and the local cavity field."""
        return math.cos(self.dipole_angle_rad) ** 2


class CavityParams(ArrayRecord):
    """The cavity channel seen by an emitter.

    `psi_map` is the normalised field magnitude |ψ| on a grid of pitch
    `psi_dx_nm` centred on `psi_origin`; without one, every emitter sits at
    the field maximum.
    """

    lambda_cav_nm: float = Field(gt=0)
    q_factor: float = Field(gt=0)
    v_mode_norm: float = Field(gt=0)
    eta_cav: float = Field(1.0, ge=0, le=1)
    psi_map: np.ndarray | None = None
    psi_dx_nm: float | None = None
    psi_origin: tuple[int, int] | None = None

    @model_validator(mode="after")
    def _normalised_map(self) -> CavityParams:
        if self.psi_map is not None:
            if self.psi_dx_nm is None or self.psi_origin is None:
                raise ValueError("psi_map needs psi_dx_nm and psi_origin")
            if not math.isclose(float(np.abs(self.psi_map).max()), 1.0, rel_tol=1e-9):
                raise ValueError("psi_map must be normalised to max |psi| = 1")
        return self

    @classmethod
    def from_resonance(
        cls,
        mode: ResonanceResult,
        eta_cav: float = 1.0,
        q_factor: float | None = None,
    ) -> CavityParams:
        return cls(
            lambda_cav_nm=mode.lambda_cav_nm,
            q_factor=q_factor or mode.q_factor,
            v_mode_norm=mode.v_mode_norm,
            eta_cav=eta_cav,
            psi_map=np.abs(mode.mode_field),
            psi_dx_nm=mode.dx_nm,
            psi_origin=mode.origin,
        )

    def at_wavelength(self, lambda_cav_nm: float) -> CavityParams:
        return self.model_copy(update={"lambda_cav_nm": lambda_cav_nm})

    def psi(self, position_nm: tuple[float, float]) -> float:
        """|ψ| at a point given in nm (x, y) from the cavity centre.

        :raises OutOfDomainError: if the point is off the map.
        """
        if self.psi_map is None:
            return 1.0
        x, y = position_nm
        row = self.psi_origin[0] + y / self.psi_dx_nm
        col = self.psi_origin[1] + x / self.psi_dx_nm
        ny, nx = self.psi_map.shape
        if not (0 <= row <= ny - 1 and 0 <= col <= nx - 1):
            raise OutOfDomainError(
                f"Emitter at ({x:.1f}, {y:.1f}) nm is outside the {ny}x{nx} field map",
            )
        r0, c0 = min(int(row), ny - 2), min(int(col), nx - 2)
        fr, fc = row - r0, col - c0
        patch = np.abs(self.psi_map[r0 : r0 + 2, c0 : c0 + 2])
        weights = np.array([[(1 - fr) * (1 - fc), (1 - fr) * fc], [fr * (1 - fc), fr * fc]])
        return float((patch * weights).sum())

    def cavity_area_nm2(self) -> float:
        """A_cav = ∫|ψ|²dA over the map."""
        if self.psi_map is None:
            raise OutOfDomainError("The cavity area needs a field map")
        return float(np.sum(np.abs(self.psi_map) ** 2) * self.psi_dx_nm**2)


class LeakyBackground(Spec):
    """Emission into the photonic crystal's leaky modes."""

    f_pc: float = Field(0.4, gt=0)
    eta_pc: float = Field(0.3, ge=0, le=1)
