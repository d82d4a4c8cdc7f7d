"""Scenario configuration: one JSON document per scenario, one section per stage.

Lengths, times and rates carry their unit in the key name. Unknown keys are
rejected, so a misspelt key is a config error rather than a silent default.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Literal

from pydantic import Field, model_validator

from ..farfield import MEASURED_Q_RATIO, FiberMode
from ..geometry import DefectSpec, LatticeSpec, LayerLabel
from ..models import Spec
from ..photonstats import DetectorSpec, EmitterDynamics, PulseTrainSpec, SpectralFilter
from ..purcell import EmitterParams, LeakyBackground

__all__ = [
    "StageName",
    "PIPELINE",
    "GeometryConfig",
    "FdtdConfig",
    "FarfieldConfig",
    "TuningConfig",
    "EnsembleConfig",
    "PurcellConfig",
    "PhotonStatsConfig",
    "ScenarioConfig",
    "CONFIG_ROOT_ENV",
    "config_root",
]

StageName = Literal["geometry", "fdtd", "farfield", "purcell", "photonstats"]
PIPELINE: tuple[StageName, ...] = ("geometry", "fdtd", "farfield", "purcell", "photonstats")

CONFIG_ROOT_ENV = "BEACON_CONFIG_ROOT"


class GeometryConfig(Spec):
    """The designs to build. The last layer set is the primary design."""

    lattice: LatticeSpec = LatticeSpec()
    defect: DefectSpec = DefectSpec()
    layer_sets: tuple[tuple[LayerLabel, ...], ...] = Field(((),), min_length=1)
    annulus_widths_nm: dict[LayerLabel, float] = {}
    host_holes: dict[LayerLabel, tuple[tuple[int, int], ...]] = {}
    dx_nm: float = Field(20.0, gt=0)
    pml_cells: int = Field(10, ge=0)
    margin_periods: float = Field(1.0, ge=0)
    supersample: int = Field(8, ge=1)

    @model_validator(mode="after")
    def _distinct_sets(self) -> GeometryConfig:
        keys = [frozenset(s) for s in self.layer_sets]
        if len(set(keys)) != len(keys):
            raise ValueError(f"layer_sets repeats a design: {self.layer_sets}")
        return self


class FdtdConfig(Spec):
    center_wavelength_nm: float = Field(880.0, gt=0)
    bandwidth_nm: float = Field(200.0, gt=0)
    amplitude: float = Field(1.0, ge=0)
    search_window_nm: tuple[float, float] = (750.0, 1000.0)
    source_offset_cells: tuple[int, int] = (0, 0)
    ring_cycles: int = Field(300, ge=10, description="Cycles recorded after turn-off to find Q.")
    mode_cycles: int = Field(100, ge=1, description="Cycles accumulated in the mode DFT.")
    prominence: float = Field(100.0, gt=0)
    fit_tolerance: float = Field(0.1, gt=0)
    q_ceiling: float = Field(1e7, gt=0)
    courant: float = 0.99
    pml_order: int = Field(3, ge=1)
    perturbed_modes: Literal["shared", "simulated"] = Field(
        "shared",
        description=(
            "'shared' simulates the unperturbed cavity once and lets every design "
            "scatter from that mode; 'simulated' runs each design's own map."
        ),
    )


class FarfieldConfig(Spec):
    fiber: FiberMode = FiberMode()
    k_samples: int = Field(16, ge=2)
    coupling_magnitude: float | None = Field(
        None,
        ge=0,
        description="Scatterer coupling per nm of annulus width; None calibrates it.",
    )
    target_q_ratio: float = Field(MEASURED_Q_RATIO, gt=0, lt=1)
    scatterer_extent_nm: float | None = Field(None, gt=0)
    constructive_scattering: bool = Field(
        True,
        description="Scatterers share one phase; False gives each the local mode phase.",
    )


class TuningConfig(Spec):
    """Temperature tuning, calibrated to a lifetime ratio unless a slope is given."""

    crossing_k: float = 22.5
    slope_ratio: float = Field(3.0, gt=0)
    slope_cav_nm_per_k: float | None = None
    reference_k: float = 25.0
    lifetime_ratio: float = Field(6.0, gt=1)
    t_start_k: float = 4.0
    t_stop_k: float = 40.0
    t_step_k: float = Field(0.5, gt=0)
    t_min_k: float = 4.0
    t_max_k: float = 60.0

    @model_validator(mode="after")
    def _check(self) -> TuningConfig:
        if self.slope_cav_nm_per_k is None and self.reference_k == self.crossing_k:
            raise ValueError("reference_k must differ from crossing_k to calibrate the slope")
        if self.slope_ratio == 1.0:
            raise ValueError("slope_ratio = 1 keeps the dot and cavity lines parallel")
        if self.t_stop_k < self.t_start_k:
            raise ValueError(f"t_stop_k={self.t_stop_k} is below t_start_k={self.t_start_k}")
        return self


class EnsembleConfig(Spec):
    center_nm: float = Field(920.0, gt=0)
    fwhm_nm: float = Field(30.0, gt=0)
    span_nm: tuple[float, float] | None = Field(
        None,
        description="Spectral window; defaults to 20 nm either side of the cavity line.",
    )
    step_nm: float = Field(0.002, gt=0)
    area_total_nm2: float = Field(1e6, gt=0)
    area_cav_nm2: float | None = Field(
        None,
        gt=0,
        description="Defaults to the integral of |psi|^2 over the mode map.",
    )


class PurcellConfig(Spec):
    """Cavity values left unset are taken from the upstream stages."""

    lambda_cav_nm: float | None = Field(None, gt=0)
    q_factor: float | None = Field(None, gt=0)
    v_mode_norm: float | None = Field(None, gt=0)
    eta_cav: float | None = Field(None, ge=0, le=1)
    emitter: EmitterParams = EmitterParams()
    background: LeakyBackground = LeakyBackground()
    target_lifetime_ps: float | None = Field(
        45.0,
        gt=0,
        description="On-resonance lifetime used to calibrate the dipole overlap.",
    )
    tuning: TuningConfig | None = None
    ensemble: EnsembleConfig | None = None


class PhotonStatsConfig(Spec):
    """Emitter values left unset are taken from the upstream stages."""

    pulses: PulseTrainSpec = PulseTrainSpec()
    emitter: EmitterDynamics = EmitterDynamics()
    detector: DetectorSpec = DetectorSpec()
    correlation: Literal["auto", "cross"] = "auto"
    qd_filter: SpectralFilter | None = None
    cavity_filter: SpectralFilter | None = None
    bin_width_ps: float = Field(32.0, gt=0)
    window_ps: float | None = Field(None, gt=0)
    decay_bin_width_ps: float | None = Field(None, gt=0)
    write_clicks: bool = False


class ScenarioConfig(Spec):
    description: str = ""
    stages: tuple[StageName, ...] = Field(min_length=1)
    seed: int = Field(0, ge=0)
    geometry: GeometryConfig | None = None
    fdtd: FdtdConfig | None = None
    farfield: FarfieldConfig | None = None
    purcell: PurcellConfig | None = None
    photonstats: PhotonStatsConfig | None = None


def config_root() -> Path:
    """The directory scenario names resolve against.

    :return: `$BEACON_CONFIG_ROOT` if set, else the scenarios shipped with beacon.
    """
    override = os.environ.get(CONFIG_ROOT_ENV)
    if override:
        return Path(override)
    return Path(__file__).resolve().parent.parent / "scenarios"
