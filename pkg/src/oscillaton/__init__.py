"""Oscillaton operator algebra and the mixing-angle null-result analysis."""

__version__ = "0.1.0"

from .analysis import (
    BoundResult,
    ExperimentParams,
    FitResult,
    Measured,
    default_params,
    error_factor,
    fit_gaussian,
    full_pipeline,
    ratio_bound,
)
from .errors import OscillatonError
from .fock import (
    InteriorProjector,
    MixingParams,
    ModeSpace,
    OperatorMatrix,
    bogoliubov_transform,
    build_annihilation,
    build_creation,
    build_photon_ops,
    commutator,
    field_operator,
    mixing_params,
    oscillator_eigenfunction,
)
from .gaussian import GaussianModel
from .scattering import (
    ChannelDecomposition,
    Kinematics,
    decompose_channels,
    gamma_from_ratio,
    inelastic_frequency,
    predicted_ratio,
)
from .traces import ScanTrace, TraceSpec, generate_trace, read_trace, write_trace
