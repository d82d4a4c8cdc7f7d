import numpy as np
from pydantic import BaseModel, ConfigDict

__all__ = ["Spec", "ArrayRecord", "complex_from_parts"]


class Spec(BaseModel):
    """
    Base model for the frozen value types: lattice, defect, emitter and detector
    parameters, and the sections of a scenario config.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")


class ArrayRecord(BaseModel, arbitrary_types_allowed=True):
    """
    Base model for results that carry numpy arrays (permittivity maps, probe
    series, mode fields, k-space spectra, histograms, click streams).

    Arrays are not validated by pydantic beyond their type, so subclasses check
    shapes in a model validator.
    """


def complex_from_parts(re, im) -> np.ndarray:
    """Rebuild a complex array from real and imaginary columns read from CSV."""
    return np.asarray(re, dtype=float) + 1j * np.asarray(im, dtype=float)
