from __future__ import annotations

from pydantic import Field, model_validator

from ..models import Spec
from ..units import fwhm_to_sigma, natural_hwhm_nm, photon_lifetime_ps, rep_period_ps

__all__ = ["PulseTrainSpec", "EmitterDynamics", "DetectorSpec", "SpectralFilter"]


class PulseTrainSpec(Spec):
    """The pulsed excitation laser."""

    rep_rate_hz: float = Field(80e6, gt=0)
    pulse_fwhm_ps: float = Field(3.5, gt=0)
    n_pulses: int = Field(1_000_000, ge=10_000)

    @model_validator(mode="after")
    def _pulses_separated(self) -> PulseTrainSpec:
        if self.rep_period_ps < 100 * self.pulse_fwhm_ps:
            raise ValueError(
                f"Pulses of {self.pulse_fwhm_ps} ps FWHM are not well separated at "
                f"{self.rep_rate_hz:g} Hz",
            )
        return self

    @property
    def rep_period_ps(self) -> float:
        return rep_period_ps(self.rep_rate_hz)


class EmitterDynamics(Spec):
    """A pulsed quantum dot with re-excitation and cavity background.

    The defaults reproduce the measured antibunching near g2(0) = 0.04.
    """

    tau_ps: float = Field(45.0, gt=0)
    p_excite: float = Field(1.0, ge=0, le=1)
    p_reexcite: float = Field(0.1, ge=0, le=1)
    background_mean: float = Field(0.008, ge=0)
    lambda_qd_nm: float = Field(920.0, gt=0)
    lambda_cav_nm: float = Field(920.0, gt=0)
    q_cav: float = Field(8500.0, gt=0)
    cavity_feeding: float = Field(
        0.0,
        ge=0,
        le=1,
        description="Share of dot photons emitted at the cavity wavelength.",
    )

    @property
    def tau_bg_ps(self) -> float:
        """Background decay time, the cavity photon lifetime."""
        return photon_lifetime_ps(self.q_cav, self.lambda_cav_nm)

    @property
    def qd_hwhm_nm(self) -> float:
        return natural_hwhm_nm(self.lambda_qd_nm, self.tau_ps)

    @property
    def cav_hwhm_nm(self) -> float:
        return self.lambda_cav_nm / (2.0 * self.q_cav)


class DetectorSpec(Spec):
    jitter_fwhm_ps: float = Field(300.0, ge=0)
    efficiency: float = Field(1.0, gt=0, le=1)
    dead_time_ns: float = Field(0.0, ge=0)

    @property
    def jitter_sigma_ps(self) -> float:
        return fwhm_to_sigma(self.jitter_fwhm_ps)


class SpectralFilter(Spec):
    """A grating band-pass passing |λ - center| <= width/2."""

    center_nm: float = Field(gt=0)
    width_nm: float = Field(0.2, gt=0)
