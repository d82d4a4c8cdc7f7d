"""The pipeline stages and the state they hand on to one another.

Each stage reads its config section and whatever the earlier stages left on
the `PipelineRun`, writes its CSV/JSON outputs into the run's staging
directory, and records its results. Values a stage needs from upstream fall
back to its config section when the upstream stage was not run.
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np

from ..fdtd import Grid2D, ResonanceResult, SourceSpec, extract_mode, find_resonance, run_fdtd
from ..farfield import (
    aligned_coupling,
    calibrate_coupling,
    collect,
    compose_aperture,
    radiation_q,
    to_kspace,
    total_q,
)
from ..geometry import (
    CavityDesign,
    LayerLabel,
    PermittivityMap,
    build_cavity_design,
    dump_design,
    rasterize_epsilon,
)
from ..photonstats import (
    EmitterDynamics,
    SpectralFilter,
    cross_correlate,
    decay_histogram,
    fit_decay,
    g2_zero,
    hbt_correlate,
    simulate_emission,
    spectral_filter,
)
from ..purcell import (
    CavityParams,
    EnsembleSpec,
    OutOfDomainError,
    TuningModel,
    calibrate_overlap,
    crossing_temperature,
    detuning_for_lifetime,
    dipole_angle_for_overlap,
    efficiency_ratio,
    ensemble_spectrum,
    fit_lorentzian,
    lifetime,
    max_purcell,
    purcell_factor,
    sweep_temperature,
    tune,
)
from .config import PurcellConfig
from .errors import ScenarioError
from .scenario import Scenario

__all__ = ["PipelineRun", "design_name", "run_pipeline", "STAGE_RUNNERS"]

logger = logging.getLogger(__name__)

BARE = "unperturbed"


def design_name(labels: tuple[LayerLabel, ...]) -> str:
    """File-name tag of a design: "unperturbed", or its layers joined, e.g. "L2-L3-L4"."""
    if not labels:
        return BARE
    return "-".join(sorted(LayerLabel(label).value for label in labels))


class PipelineRun:
    """Mutable state of one scenario run, shared by its stages."""

    def __init__(self, scenario: Scenario, out_dir: Path):
        self.scenario = scenario
        self.config = scenario.config
        self.out_dir = out_dir
        self.designs: dict[str, CavityDesign] = {}
        self.maps: dict[str, PermittivityMap] = {}
        self.modes: dict[str, ResonanceResult] = {}
        self.bare_mode: ResonanceResult | None = None
        self.cavities: dict[str, CavityParams] = {}
        self.results: dict[str, Any] = {}
        self.summary: dict[str, float] = {}

    @property
    def primary(self) -> str:
        return list(self.designs)[-1]

    @property
    def baseline(self) -> str:
        return list(self.designs)[0]

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def write_json(self, name: str, payload: Any) -> None:
        text = json.dumps(payload, indent=2, sort_keys=True, default=_jsonable)
        self.path(name).write_text(text + "\n", encoding="utf-8")


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if hasattr(value, "model_dump"):
        return value.model_dump(mode="json")
    raise TypeError(f"Cannot write {type(value).__name__} to JSON")


def _rasterize(run: PipelineRun, design: CavityDesign) -> PermittivityMap:
    geometry = run.config.geometry
    return rasterize_epsilon(
        design,
        geometry.dx_nm,
        pml_cells=geometry.pml_cells,
        margin_periods=geometry.margin_periods,
        supersample=geometry.supersample,
    )


def build_designs(run: PipelineRun) -> None:
    """Build and rasterise every design of the geometry section."""
    geometry = run.config.geometry
    for layers in geometry.layer_sets:
        design = build_cavity_design(
            geometry.lattice,
            geometry.defect,
            layers,
            annulus_widths_nm={k.value: v for k, v in geometry.annulus_widths_nm.items()},
            host_holes={k.value: v for k, v in geometry.host_holes.items()},
        )
        name = design_name(layers)
        run.designs[name] = design
        run.maps[name] = _rasterize(run, design)


def run_geometry(run: PipelineRun) -> None:
    build_designs(run)
    results = {}
    for name, design in run.designs.items():
        pmap = run.maps[name]
        dump_design(design, run.path(f"design_{name}.json"))
        pmap.to_csv(run.path(f"epsilon_{name}.csv"))
        results[name] = {
            "layers": [label.value for label in design.labels],
            "holes": len(design.holes()),
            "shape": list(pmap.shape),
            "air_fraction": pmap.air_fraction(),
        }
    run.results["geometry"] = results


def _bare_map(run: PipelineRun) -> PermittivityMap:
    """The unperturbed map, rasterised on the scenario's grid if no design has it."""
    if BARE in run.maps:
        return run.maps[BARE]
    geometry = run.config.geometry
    return _rasterize(run, build_cavity_design(geometry.lattice, geometry.defect, ()))


def _simulate(run: PipelineRun, name: str, pmap: PermittivityMap) -> tuple[ResonanceResult, dict]:
    cfg = run.config.fdtd
    grid = Grid2D.from_permittivity(pmap, courant=cfg.courant, pml_order=cfg.pml_order)
    row, col = grid.centre
    source = SourceSpec(
        position=(row + cfg.source_offset_cells[0], col + cfg.source_offset_cells[1]),
        center_wavelength_nm=cfg.center_wavelength_nm,
        bandwidth_nm=cfg.bandwidth_nm,
        amplitude=cfg.amplitude,
    )
    longest = max(cfg.search_window_nm)
    steps = source.turn_off_step(grid.dt_nm) + math.ceil(cfg.ring_cycles * longest / grid.dt_nm)
    logger.info("FDTD for design %s: %dx%d cells, %d steps", name, *pmap.shape, steps)
    series = run_fdtd(grid, source, steps, record_energy=False)
    fit = find_resonance(
        series,
        cfg.search_window_nm,
        prominence=cfg.prominence,
        fit_tolerance=cfg.fit_tolerance,
        q_ceiling=cfg.q_ceiling,
    )
    mode = extract_mode(
        grid,
        source,
        fit.lambda_nm,
        ring_cycles=cfg.mode_cycles,
        a_nm=run.config.geometry.lattice.a_nm,
        q_ceiling=cfg.q_ceiling,
    )
    series.to_csv(run.path(f"probe_{name}.csv"))
    mode.to_csv(run.path(f"mode_{name}.csv"))
    return mode, {
        "lambda_cav_nm": mode.lambda_cav_nm,
        "q_inplane": mode.q_inplane,
        "q_linewidth": fit.q_linewidth,
        "fit_residual": mode.fit_residual,
        "v_mode_norm": mode.v_mode_norm,
    }


def run_fdtd_stage(run: PipelineRun) -> None:
    """Find the cavity mode of every design.

    In "shared" mode only the unperturbed cavity is simulated, and each
    perturbed design scatters from that mode in the farfield stage.
    """
    if not run.designs:
        build_designs(run)
    results = {}
    if run.config.fdtd.perturbed_modes == "shared":
        mode, results[BARE] = _simulate(run, BARE, _bare_map(run))
        results[BARE]["designs"] = list(run.designs)
        run.modes = dict.fromkeys(run.designs, mode)
        run.bare_mode = mode
    else:
        for name, pmap in run.maps.items():
            run.modes[name], results[name] = _simulate(run, name, pmap)
        run.bare_mode = run.modes.get(BARE)
    run.results["fdtd"] = results
    primary = run.modes[run.primary]
    run.summary.update(
        lambda_cav_nm=primary.lambda_cav_nm,
        q_factor=primary.q_factor,
        q_inplane=primary.q_inplane,
        v_mode_norm=primary.v_mode_norm,
    )


def _coupling_magnitude(run: PipelineRun) -> float:
    cfg = run.config.farfield
    primary = run.primary
    if cfg.coupling_magnitude is not None:
        return cfg.coupling_magnitude
    if not run.designs[primary].perturbation_layers:
        return 0.0
    if run.bare_mode is None:
        raise ScenarioError(
            run.scenario.name,
            "calibrating the coupling needs the unperturbed mode: add the unperturbed "
            "design or set farfield.coupling_magnitude",
        )
    coupling = calibrate_coupling(
        run.bare_mode,
        run.modes[primary],
        run.designs[primary],
        run.config.geometry.lattice.slab_thickness_nm,
        target_ratio=cfg.target_q_ratio,
        k_samples=cfg.k_samples,
        extent_nm=cfg.scatterer_extent_nm,
        constructive=cfg.constructive_scattering,
    )
    return abs(coupling)


def run_farfield(run: PipelineRun) -> None:
    """Collection figures and total Q of every design.

    Each design's mode is replaced by a copy carrying its total Q, in-plane
    and vertical loss combined.
    """
    cfg = run.config.farfield
    slab = run.config.geometry.lattice.slab_thickness_nm
    magnitude = _coupling_magnitude(run)
    results = {}
    for name, mode in list(run.modes.items()):
        design = run.designs[name]
        coupling = aligned_coupling(
            mode,
            design,
            magnitude,
            cfg.scatterer_extent_nm,
            cfg.constructive_scattering,
        )
        aperture = compose_aperture(
            mode,
            design,
            coupling,
            extent_nm=cfg.scatterer_extent_nm,
            constructive=cfg.constructive_scattering,
        )
        spec = to_kspace(aperture, cfg.k_samples)
        collection = collect(spec, cfg.fiber)
        q_rad = radiation_q(spec, mode, slab)
        q_factor = total_q(mode.q_inplane, q_rad)
        spec.to_csv(run.path(f"kspace_{name}.csv"))
        results[name] = {
            **collection.model_dump(),
            "q_rad": q_rad,
            "q_factor": q_factor,
            "lambda_cav_nm": mode.lambda_cav_nm,
            "v_mode_norm": mode.v_mode_norm,
        }
        run.modes[name] = mode.model_copy(update={"q_factor": q_factor})
        run.cavities[name] = _cavity_from_mode(mode, q_factor, collection.eta_lens)
    run.results["farfield"] = {"coupling_magnitude": magnitude, "designs": results}
    run.write_json("collection.json", run.results["farfield"])
    headline = results[run.primary]
    run.summary.update(
        {k: headline[k] for k in ("q_factor", "q_rad", "eta_lens", "eta_smf", "eta_smf_total")},
    )


def _cavity_from_mode(mode: ResonanceResult, q_factor: float, eta_cav: float) -> CavityParams:
    return CavityParams.from_resonance(mode, eta_cav=eta_cav, q_factor=q_factor)


def _pick(cfg: PurcellConfig, run: PipelineRun, field: str, upstream: str) -> float:
    value = getattr(cfg, field)
    if value is None:
        value = run.summary.get(upstream)
    if value is None:
        raise ScenarioError(
            run.scenario.name,
            f"purcell needs {field}: set it in the purcell section or run the stage producing it",
        )
    return float(value)


def _resolve_cavity(run: PipelineRun, cfg: PurcellConfig) -> CavityParams:
    fields = {
        "lambda_cav_nm": _pick(cfg, run, "lambda_cav_nm", "lambda_cav_nm"),
        "q_factor": _pick(cfg, run, "q_factor", "q_factor"),
        "v_mode_norm": _pick(cfg, run, "v_mode_norm", "v_mode_norm"),
        "eta_cav": _pick(cfg, run, "eta_cav", "eta_lens"),
    }
    mode = run.modes.get(run.primary) if run.designs else None
    if mode is not None:
        fields.update(
            psi_map=np.abs(mode.mode_field),
            psi_dx_nm=mode.dx_nm,
            psi_origin=mode.origin,
        )
    return CavityParams(**fields)


def run_purcell(run: PipelineRun) -> None:
    cfg = run.config.purcell
    background = cfg.background
    cavity = _resolve_cavity(run, cfg)
    emitter = cfg.emitter.model_copy(update={"wavelength_nm": cavity.lambda_cav_nm})
    if cfg.target_lifetime_ps is not None:
        overlap = calibrate_overlap(cavity, background, emitter.gamma0_per_ns, cfg.target_lifetime_ps)
        psi = cavity.psi(emitter.position_nm)
        if math.sqrt(overlap) > psi:
            raise OutOfDomainError(
                f"|psi| = {psi:.3f} at the emitter cannot reach the overlap {overlap:.4g}",
            )
        emitter = emitter.model_copy(
            update={"dipole_angle_rad": dipole_angle_for_overlap(overlap, psi)},
        )
    tau_on = lifetime(emitter, cavity, background)
    results: dict[str, Any] = {
        "lambda_cav_nm": cavity.lambda_cav_nm,
        "q_factor": cavity.q_factor,
        "v_mode_norm": cavity.v_mode_norm,
        "eta_cav": cavity.eta_cav,
        "f_c0": max_purcell(cavity.q_factor, cavity.v_mode_norm),
        "f_cav": purcell_factor(emitter, cavity),
        "dipole_angle_rad": emitter.dipole_angle_rad,
        "lifetime_ps": tau_on,
        "bulk_lifetime_ps": emitter.lifetime_ps,
    }
    if cfg.tuning is not None:
        results["tuning"] = _tune(run, cfg, emitter, cavity, tau_on)
    if cfg.ensemble is not None:
        results["spectrum"] = _spectra(run, cfg, cavity)
    run.results["purcell"] = results
    run.write_json("purcell.json", results)
    run.summary.update(lifetime_ps=tau_on, f_c0=results["f_c0"], f_cav=results["f_cav"])


def _tune(run, cfg, emitter, cavity, tau_on) -> dict[str, float]:
    tuning = cfg.tuning
    slope = tuning.slope_cav_nm_per_k
    if slope is None:
        target = tuning.lifetime_ratio * tau_on
        detuning = detuning_for_lifetime(emitter, cavity, cfg.background, target)
        slope = detuning / ((tuning.slope_ratio - 1.0) * (tuning.reference_k - tuning.crossing_k))
    model = TuningModel.calibrated(
        tuning.crossing_k,
        cavity.lambda_cav_nm,
        slope,
        slope_ratio=tuning.slope_ratio,
        t_ref_k=tuning.t_min_k,
        t_min_k=tuning.t_min_k,
        t_max_k=tuning.t_max_k,
    )
    temperatures = np.arange(tuning.t_start_k, tuning.t_stop_k + tuning.t_step_k / 2, tuning.t_step_k)
    sweep_temperature(model, temperatures, emitter, cavity, cfg.background).to_csv(
        run.path("tuning.csv"),
    )
    lam_qd, lam_cav = tune(model, tuning.reference_k)
    reference = lifetime(
        emitter.model_copy(update={"wavelength_nm": lam_qd}),
        cavity.at_wavelength(lam_cav),
        cfg.background,
    )
    return {
        "slope_cav_nm_per_k": slope,
        "slope_qd_nm_per_k": model.slope_qd_nm_per_k,
        "crossing_k": crossing_temperature(model),
        "reference_k": tuning.reference_k,
        "lifetime_reference_ps": reference,
        "lifetime_ratio": reference / tau_on,
    }


def _spectra(run, cfg, cavity) -> dict[str, float]:
    ens = cfg.ensemble
    area_cav = ens.area_cav_nm2
    if area_cav is None:
        if cavity.psi_map is None:
            raise ScenarioError(
                run.scenario.name,
                "ensemble.area_cav_nm2 is required without an FDTD mode map",
            )
        area_cav = cavity.cavity_area_nm2()
    span = ens.span_nm or (cavity.lambda_cav_nm - 20.0, cavity.lambda_cav_nm + 20.0)
    ensemble = EnsembleSpec.gaussian(
        ens.area_total_nm2,
        area_cav,
        center_nm=ens.center_nm,
        fwhm_nm=ens.fwhm_nm,
        span_nm=span,
        step_nm=ens.step_nm,
    )
    spectrum = ensemble_spectrum(cavity, cfg.background, ensemble)
    spectrum.to_csv(run.path("spectrum.csv"))
    fit = fit_lorentzian(spectrum, q_guess=cavity.q_factor)
    results = {"pl_lambda_nm": fit.lambda_cav_nm, "pl_q_factor": fit.q_factor}
    if len(run.cavities) > 1:
        reference = run.cavities[run.baseline]
        reference_spectrum = ensemble_spectrum(reference, cfg.background, ensemble)
        reference_spectrum.to_csv(run.path("spectrum_reference.csv"))
        results["efficiency_ratio"] = efficiency_ratio(
            spectrum,
            reference_spectrum,
            cavity.q_factor,
            reference.q_factor,
            ensemble,
        )
    return results


def _emitter_dynamics(run: PipelineRun, dyn: EmitterDynamics) -> EmitterDynamics:
    upstream = {
        "tau_ps": run.summary.get("lifetime_ps"),
        "lambda_cav_nm": run.summary.get("lambda_cav_nm"),
        "lambda_qd_nm": run.summary.get("lambda_cav_nm"),
        "q_cav": run.summary.get("q_factor"),
    }
    fill = {k: v for k, v in upstream.items() if v is not None and k not in dyn.model_fields_set}
    if not fill:
        return dyn
    logger.info("Emitter dynamics from upstream stages: %s", fill)
    return EmitterDynamics.model_validate({**dyn.model_dump(), **fill})


def run_photonstats(run: PipelineRun) -> None:
    cfg = run.config.photonstats
    dyn = _emitter_dynamics(run, cfg.emitter)
    scenario = run.scenario
    if cfg.correlation == "cross":
        filters = (
            cfg.qd_filter or SpectralFilter(center_nm=dyn.lambda_qd_nm),
            cfg.cavity_filter or SpectralFilter(center_nm=dyn.lambda_cav_nm),
        )
        clicks = simulate_emission(
            cfg.pulses,
            dyn,
            cfg.detector,
            scenario.seed,
            threads=scenario.threads,
            arm_filters=filters,
            labels=("QD", "CAV"),
        )
        qd, cav = clicks.split()
        hist = cross_correlate(qd, cav, cfg.bin_width_ps, cfg.window_ps)
    else:
        clicks = simulate_emission(cfg.pulses, dyn, cfg.detector, scenario.seed, threads=scenario.threads)
        if cfg.qd_filter is not None:
            clicks = spectral_filter(clicks, cfg.qd_filter.center_nm, cfg.qd_filter.width_nm)
        hist = hbt_correlate(clicks, cfg.bin_width_ps, cfg.window_ps)
    g2 = g2_zero(hist)
    hist.to_csv(run.path("correlation.csv"))
    if cfg.write_clicks:
        clicks.to_csv(run.path("clicks.csv"))
    results: dict[str, Any] = {
        "correlation": cfg.correlation,
        "clicks": len(clicks),
        "tau_ps": dyn.tau_ps,
        **g2.model_dump(),
    }
    if cfg.decay_bin_width_ps is not None:
        decay = decay_histogram(clicks, bin_width_ps=cfg.decay_bin_width_ps)
        decay.to_csv(run.path("decay.csv"))
        results["decay"] = fit_decay(decay, cfg.detector).model_dump()
    run.results["photonstats"] = results
    run.write_json("g2.json", results)
    run.summary.update(g2_zero=g2.g2_zero, g2_error=g2.statistical_error)


STAGE_RUNNERS: dict[str, Callable[[PipelineRun], None]] = {
    "geometry": run_geometry,
    "fdtd": run_fdtd_stage,
    "farfield": run_farfield,
    "purcell": run_purcell,
    "photonstats": run_photonstats,
}


def run_pipeline(scenario: Scenario, out_dir: Path) -> PipelineRun:
    """Run the scenario's stages in order, writing into `out_dir`."""
    run = PipelineRun(scenario, out_dir)
    for stage in scenario.stages:
        logger.info("Stage %s", stage)
        STAGE_RUNNERS[stage](run)
    run.results["summary"] = dict(run.summary)
    return run
