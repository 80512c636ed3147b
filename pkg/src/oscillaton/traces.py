"""Synthetic detector scan traces and their CSV serialization.

Trace file format::

    detuning_ghz,voltage_v
    # optional comment lines
    -2.5,0.00131
    ...

The header must be the first line.  ``#`` lines are ignored, except that a
``# meta: <label>`` comment restores :attr:`ScanTrace.meta`.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Optional, Union

import numpy as np

from .errors import OscillatonError, TraceParseError
from .gaussian import GaussianModel

HEADER = "detuning_ghz,voltage_v"
META_PREFIX = "# meta: "
DEFAULT_SPAN_GHZ = 5.0
DEFAULT_SAMPLES = 501


@dataclass(frozen=True, eq=False)
class ScanTrace:
    detuning: np.ndarray
    voltage: np.ndarray
    meta: Optional[str] = None

    def __post_init__(self):
        d = np.array(self.detuning, dtype=float)
        v = np.array(self.voltage, dtype=float)
        if d.ndim != 1 or d.shape != v.shape:
            raise OscillatonError("detuning and voltage must be 1-d arrays of equal length")
        if d.size < 2:
            raise OscillatonError("a scan trace needs at least 2 samples")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(v))):
            raise OscillatonError("trace values must be finite")
        if not np.all(np.diff(d) > 0):
            raise OscillatonError("detunings must be strictly increasing")
        d.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "detuning", d)
        object.__setattr__(self, "voltage", v)

    def __len__(self):
        return self.detuning.size

    def __eq__(self, other):
        if not isinstance(other, ScanTrace):
            return NotImplemented
        return (
            self.meta == other.meta
            and np.array_equal(self.detuning, other.detuning)
            and np.array_equal(self.voltage, other.voltage)
        )

    __hash__ = None

    @property
    def span(self) -> float:
        return float(self.detuning[-1] - self.detuning[0])

    def scaled(self, factor: float) -> "ScanTrace":
        return ScanTrace(self.detuning, self.voltage * factor, self.meta)


@dataclass(frozen=True)
class TraceSpec:
    model: GaussianModel
    sign: int = 1
    noise_sigma: float = 0.0
    n_samples: int = DEFAULT_SAMPLES
    span: float = DEFAULT_SPAN_GHZ
    seed: int = 0
    meta: Optional[str] = None

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise OscillatonError("sign must be +1 (peak) or -1 (dip)")
        if not self.noise_sigma >= 0:
            raise OscillatonError("noise_sigma must be >= 0")
        if self.n_samples < 2:
            raise OscillatonError("n_samples must be >= 2")
        if not self.span > 0:
            raise OscillatonError("span must be > 0")
        if self.seed < 0:
            raise OscillatonError("seed must be a non-negative integer")

    def detunings(self) -> np.ndarray:
        return np.linspace(-self.span / 2, self.span / 2, self.n_samples)


def standard_normal_stream(seed: int, n: int) -> np.ndarray:
    """``n`` standard normals where sample ``i`` depends only on ``(seed, i)``.

    Philox is keyed directly by the seed; each sample consumes exactly two
    uniforms (Box-Muller), so prefixes of longer streams agree bit for bit.
    """
    gen = np.random.Generator(np.random.Philox(key=int(seed)))
    u = gen.random(2 * n).reshape(n, 2)
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    return radius * np.cos(2.0 * np.pi * u[:, 1])


def generate_trace(spec: TraceSpec) -> ScanTrace:
    d = spec.detunings()
    m = spec.model
    v = m.baseline + spec.sign * m.peak * m.shape(d)
    if spec.noise_sigma > 0:
        v = v + spec.noise_sigma * standard_normal_stream(spec.seed, spec.n_samples)
    return ScanTrace(d, v, spec.meta)


def peak_sigma_per_unit_noise(
    width: float,
    n_samples: int = DEFAULT_SAMPLES,
    span: float = DEFAULT_SPAN_GHZ,
    center: float = 0.0,
) -> float:
    """Peak standard error per volt of white noise for a fit with only peak and baseline free."""
    d = np.linspace(-span / 2, span / 2, n_samples)
    g = np.exp(-0.5 * ((d - center) / width) ** 2)
    design = np.column_stack([g, np.ones_like(g)])
    return float(math.sqrt(np.linalg.inv(design.T @ design)[0, 0]))


def noise_for_peak_sigma(target: float, width: float, n_samples: int = DEFAULT_SAMPLES,
                         span: float = DEFAULT_SPAN_GHZ, center: float = 0.0) -> float:
    """Noise level whose fitted-peak 1-sigma uncertainty is ``target`` volts."""
    return target / peak_sigma_per_unit_noise(width, n_samples, span, center)


def _format(x: float) -> str:
    return format(float(x), ".17g")


def dumps_trace(trace: ScanTrace) -> str:
    lines = [HEADER]
    if trace.meta is not None:
        lines.append(META_PREFIX + trace.meta.replace("\n", " "))
    lines.extend(f"{_format(d)},{_format(v)}" for d, v in zip(trace.detuning, trace.voltage))
    return "\n".join(lines) + "\n"


def loads_trace(text: str) -> ScanTrace:
    lines = text.split("\n")
    if not lines or lines[0].rstrip("\r") != HEADER:
        raise TraceParseError(1, f"expected header {HEADER!r}")
    meta = None
    det: list[float] = []
    volt: list[float] = []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.rstrip("\r")
        if not line.strip():
            continue
        if line.startswith("#"):
            if meta is None and line.startswith(META_PREFIX):
                meta = line[len(META_PREFIX):]
            continue
        fields = line.split(",")
        if len(fields) != 2:
            raise TraceParseError(lineno, f"expected 2 fields, got {len(fields)}")
        try:
            d, v = float(fields[0]), float(fields[1])
        except ValueError:
            raise TraceParseError(lineno, f"non-numeric field in {line!r}") from None
        if not (math.isfinite(d) and math.isfinite(v)):
            raise TraceParseError(lineno, "non-finite value")
        if det and d <= det[-1]:
            raise TraceParseError(lineno, f"detuning {d} does not increase (previous {det[-1]})")
        det.append(d)
        volt.append(v)
    if len(det) < 2:
        raise TraceParseError(len(lines), "a trace needs at least 2 samples")
    return ScanTrace(np.array(det), np.array(volt), meta)


PathOrFile = Union[str, os.PathLike, IO[str]]


def write_trace(trace: ScanTrace, destination: PathOrFile) -> None:
    text = dumps_trace(trace)
    if isinstance(destination, (str, os.PathLike)):
        Path(destination).write_text(text, encoding="utf-8", newline="\n")
    else:
        destination.write(text)


def read_trace(source: PathOrFile) -> ScanTrace:
    if isinstance(source, (str, os.PathLike)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    return loads_trace(text)
