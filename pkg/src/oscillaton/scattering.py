"""Elastic and pair-creating photon channels under oscillaton mixing.

Writing the bare oscillaton operators in terms of the dressed ones,
``c_n = beta (cos g c'_n - sin g c'+_n)``, turns each hop term
``sqrt(n+1) c+_{n+1} c_n`` of the photon creation operator into

* a number-conserving piece, ``beta^2 (cos^2 g c'+_{n+1} c'_n + sin^2 g c'_{n+1} c'+_n)``
* a pair-changing piece, ``-beta^2 cos g sin g (c'+_{n+1} c'+_n + c'_{n+1} c'_n)``

Acting on one oscillaton, the first emits an ordinary photon and the second
emits a photon while creating an oscillaton pair.  The squared amplitude
ratio of the two scales as ``tan^2 g``.  The rate ratio ``R = 4 g^2`` used for
the experimental bound is taken as given; its constant depends on phase-space
factors that this operator picture does not contain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import scipy.constants as const

from .errors import MixingAngleError, ThresholdError, TruncationError, OscillatonError
from .fock import ModeSpace, MixingParams, OperatorMatrix, build_annihilation, build_creation

RATE_CONSTANT = 4.0


@dataclass(frozen=True)
class RatioPrediction:
    gamma: float
    ratio: float


def predicted_ratio(gamma: float) -> RatioPrediction:
    g = float(gamma)
    if not math.isfinite(g) or abs(g) >= math.pi / 4:
        raise MixingAngleError(f"mixing angle outside domain: |gamma| = {abs(g)} >= pi/4")
    return RatioPrediction(gamma=g, ratio=RATE_CONSTANT * g * g)


def gamma_from_ratio(ratio: float) -> float:
    """Non-negative mixing angle whose predicted rate ratio is ``ratio``."""
    r = float(ratio)
    if r < 0 or math.isnan(r):
        raise OscillatonError(f"negative rate ratio: {r}")
    return math.sqrt(r / RATE_CONSTANT)


@dataclass(frozen=True)
class ChannelDecomposition:
    gamma: float
    initial_index: int
    elastic_index: int
    elastic_amplitude: float
    pair_amplitudes: tuple[tuple[int, float], ...]

    def ratios(self) -> dict[int, float]:
        """Squared pair amplitude over squared elastic amplitude, per final state."""
        e2 = self.elastic_amplitude**2
        return {idx: amp * amp / e2 for idx, amp in self.pair_amplitudes}

    def amplitude(self, final_index: int) -> float:
        for idx, amp in self.pair_amplitudes:
            if idx == final_index:
                return amp
        raise KeyError(final_index)


def _channel_operators(space: ModeSpace) -> tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix]:
    """Unit-coefficient hop sums: (raise-conserving, lower-conserving, pair)."""
    ann = [build_annihilation(space, n) for n in range(space.n_levels)]
    cre = [build_creation(space, n) for n in range(space.n_levels)]
    up = OperatorMatrix.zeros(space.dim)
    down = OperatorMatrix.zeros(space.dim)
    pair = OperatorMatrix.zeros(space.dim)
    for n in range(space.level_cutoff):
        w = math.sqrt(n + 1)
        up = up + w * (cre[n + 1] @ ann[n])
        down = down + w * (ann[n + 1] @ cre[n])
        pair = pair + w * (cre[n + 1] @ cre[n] + ann[n + 1] @ ann[n])
    return up, down, pair


def decompose_channels(space: ModeSpace, p: MixingParams, initial_level: int = 0) -> ChannelDecomposition:
    """Matrix elements of the mixed photon creation operator from one oscillaton.

    The elastic amplitude goes to the single oscillaton at ``initial_level + 1``;
    pair amplitudes go to every three-oscillaton state the pair term reaches.
    """
    if initial_level < 0 or initial_level + 1 > space.level_cutoff - 1:
        raise TruncationError(
            f"insufficient truncation headroom: initial level {initial_level} "
            f"with level cutoff {space.level_cutoff}"
        )
    if space.osc_cutoff < 3:
        raise TruncationError(
            f"insufficient truncation headroom: pair states need osc_cutoff >= 3, got {space.osc_cutoff}"
        )
    up, down, pair = _channel_operators(space)
    cg, sg = math.cos(p.gamma), math.sin(p.gamma)
    b2 = p.beta * p.beta
    conserving = b2 * (cg * cg) * up + b2 * (sg * sg) * down
    pair_coeff = -b2 * cg * sg

    start = space.single(initial_level)
    target = space.single(initial_level + 1)
    elastic = conserving.element(target, start).real

    reached = pair.sparse[:, [start]].tocoo()
    channels = sorted(
        (int(row), pair_coeff * float(val.real) + 0.0) for row, val in zip(reached.row, reached.data)
    )
    return ChannelDecomposition(
        gamma=p.gamma,
        initial_index=start,
        elastic_index=target,
        elastic_amplitude=elastic,
        pair_amplitudes=tuple(channels),
    )


@dataclass(frozen=True)
class Kinematics:
    omega_in: float
    mass: float = 0.0
    c_light: float = const.c
    hbar: float = const.hbar

    def __post_init__(self):
        if not self.omega_in > 0:
            raise OscillatonError("incident angular frequency must be > 0")
        if not self.mass >= 0:
            raise OscillatonError("oscillaton mass must be >= 0")
        if not (self.c_light > 0 and self.hbar > 0):
            raise OscillatonError("physical constants must be positive")


def inelastic_frequency(k: Kinematics) -> float:
    """Scattered frequency when one photon turns into a photon plus an oscillaton pair."""
    rest = k.mass * k.c_light**2
    if not k.hbar * k.omega_in > 2.0 * rest:
        raise ThresholdError(
            f"below pair-creation threshold: hbar*omega = {k.hbar * k.omega_in:.6g} J "
            f"<= 2mc^2 = {2.0 * rest:.6g} J"
        )
    return k.omega_in / 2.0 - rest / k.hbar


def omega_from_wavelength(wavelength_m: float) -> float:
    return 2.0 * math.pi * const.c / wavelength_m
