"""Gaussian line model shared by the trace generator and the fitter."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OscillatonError

PARAM_NAMES = ("peak", "center", "width", "baseline")
PARAM_UNITS = {"peak": "V", "center": "GHz", "width": "GHz", "baseline": "V"}


@dataclass(frozen=True)
class GaussianModel:
    """``V(d) = peak * exp(-(d - center)^2 / (2 width^2)) + baseline``.

    ``width`` is the standard deviation in GHz of detuning.
    """

    peak: float
    center: float = 0.0
    width: float = 0.6
    baseline: float = 0.0

    def __post_init__(self):
        vals = (self.peak, self.center, self.width, self.baseline)
        if not all(math.isfinite(v) for v in vals):
            raise OscillatonError("Gaussian model parameters must be finite")
        if not self.width > 0:
            raise OscillatonError(f"Gaussian width must be > 0, got {self.width}")

    def shape(self, detuning) -> np.ndarray:
        """Unit-height profile, without peak or baseline."""
        d = np.asarray(detuning, dtype=float)
        return np.exp(-0.5 * ((d - self.center) / self.width) ** 2)

    def __call__(self, detuning) -> np.ndarray:
        return self.peak * self.shape(detuning) + self.baseline

    def as_dict(self) -> dict[str, float]:
        return {name: float(getattr(self, name)) for name in PARAM_NAMES}

    def replace(self, **changes) -> "GaussianModel":
        return GaussianModel(**{**self.as_dict(), **changes})
