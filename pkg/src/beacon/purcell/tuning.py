"""Temperature tuning of the dot and cavity lines.

Both lines red-shift linearly with temperature, the dot `slope_ratio` times
faster than the cavity, so a dot on the blue side of the cavity crosses it
once on warming.
"""

from __future__ import annotations

from collections.abc import Iterable
from pathlib import Path

import numpy as np
from pydantic import Field, model_validator

from ..models import ArrayRecord, Spec
from .errors import TuningRangeError
from .models import CavityParams, EmitterParams, LeakyBackground
from .rates import collected_rate, lifetime, purcell_factor

__all__ = ["TuningModel", "TuningSweep", "tune", "crossing_temperature", "sweep_temperature"]


class TuningModel(Spec):
    t_ref_k: float = 4.0
    lambda_qd_ref_nm: float = Field(gt=0)
    lambda_cav_ref_nm: float = Field(gt=0)
    slope_cav_nm_per_k: float
    slope_ratio: float = Field(3.0, gt=0)
    t_min_k: float = 4.0
    t_max_k: float = 60.0

    @model_validator(mode="after")
    def _ordered_range(self) -> TuningModel:
        if self.t_min_k >= self.t_max_k:
            raise ValueError(f"t_min_k={self.t_min_k} must be below t_max_k={self.t_max_k}")
        return self

    @property
    def slope_qd_nm_per_k(self) -> float:
        return self.slope_ratio * self.slope_cav_nm_per_k

    @classmethod
    def calibrated(
        cls,
        crossing_k: float,
        lambda_cross_nm: float,
        slope_cav_nm_per_k: float,
        slope_ratio: float = 3.0,
        t_ref_k: float = 4.0,
        **kwargs,
    ) -> TuningModel:
        """The model whose lines meet at `lambda_cross_nm` when T = `crossing_k`."""
        offset = crossing_k - t_ref_k
        return cls(
            t_ref_k=t_ref_k,
            lambda_qd_ref_nm=lambda_cross_nm - slope_ratio * slope_cav_nm_per_k * offset,
            lambda_cav_ref_nm=lambda_cross_nm - slope_cav_nm_per_k * offset,
            slope_cav_nm_per_k=slope_cav_nm_per_k,
            slope_ratio=slope_ratio,
            **kwargs,
        )


def tune(model: TuningModel, t_k: float) -> tuple[float, float]:
    """Dot and cavity wavelengths (nm) at temperature `t_k`.

    :raises TuningRangeError: outside the model's validity range.
    """
    if not model.t_min_k <= t_k <= model.t_max_k:
        raise TuningRangeError(t_k, model.t_min_k, model.t_max_k)
    dt = t_k - model.t_ref_k
    return (
        model.lambda_qd_ref_nm + model.slope_qd_nm_per_k * dt,
        model.lambda_cav_ref_nm + model.slope_cav_nm_per_k * dt,
    )


def crossing_temperature(model: TuningModel) -> float:
    """The temperature at which the dot and cavity lines coincide.

    :raises TuningRangeError: if the lines never meet inside the validity range.
    """
    relative = (model.slope_ratio - 1.0) * model.slope_cav_nm_per_k
    if relative == 0:
        raise TuningRangeError(float("inf"), model.t_min_k, model.t_max_k)
    t_cross = model.t_ref_k + (model.lambda_cav_ref_nm - model.lambda_qd_ref_nm) / relative
    if not model.t_min_k <= t_cross <= model.t_max_k:
        raise TuningRangeError(t_cross, model.t_min_k, model.t_max_k)
    return t_cross


class TuningSweep(ArrayRecord):
    temperature_k: np.ndarray
    lambda_qd_nm: np.ndarray
    lambda_cav_nm: np.ndarray
    detuning_nm: np.ndarray
    f_cav: np.ndarray
    lifetime_ps: np.ndarray
    collected_rate_per_ns: np.ndarray

    def to_csv(self, path: str | Path) -> None:
        columns = list(type(self).model_fields)
        table = np.column_stack([getattr(self, name) for name in columns])
        np.savetxt(path, table, delimiter=",", header=",".join(columns), fmt="%.8g")


def sweep_temperature(
    model: TuningModel,
    temperatures_k: Iterable[float],
    emitter: EmitterParams,
    cavity: CavityParams,
    background: LeakyBackground,
) -> TuningSweep:
    """Tabulate the dot's Purcell factor, lifetime and collected rate against temperature."""
    rows = []
    for t in temperatures_k:
        lam_qd, lam_cav = tune(model, t)
        dot = emitter.model_copy(update={"wavelength_nm": lam_qd})
        tuned = cavity.at_wavelength(lam_cav)
        rows.append(
            (
                t,
                lam_qd,
                lam_cav,
                lam_qd - lam_cav,
                purcell_factor(dot, tuned),
                lifetime(dot, tuned, background),
                collected_rate(dot, tuned, background),
            ),
        )
    columns = np.array(rows, dtype=float).reshape(-1, 7).T
    return TuningSweep(**dict(zip(TuningSweep.model_fields, columns)))
