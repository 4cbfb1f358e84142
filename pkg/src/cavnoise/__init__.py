"""Phase-to-amplitude noise conversion of a bright beam by an optical cavity.

Core package: exact cavity responses, quadrature transfer coefficients,
reflected-noise spectra, rotation angles, critical-detuning analysis and a
Monte Carlo oracle.  An HTTP service (cavnoise.service) and a thin CLI
client (cavnoise.cli) serialize the datasets.
"""

__version__ = "0.1.0"

from .cavity import (
    AIRY,
    LORENTZIAN,
    CavityParams,
    ComplexResponse,
    MirrorPair,
    amplitude_reflectance,
    amplitude_transmittance,
    finesse,
    reflection_phase,
)
from .transfer import (
    NoiseEllipse,
    RotationAngle,
    SidebandState,
    TransferCoefficients,
    apply_sideband_phase,
    homodyne_reference,
    reflected_noise,
    rotation_angle,
    transfer_coefficients,
)
from .analysis import (
    CriticalPoint,
    CriticalSet,
    MatchingRow,
    NoiseSweep,
    ScanEntry,
    bifurcation_scan,
    conversion_threshold,
    detuning_sweep,
    find_critical_detunings,
    matching_study,
)
from .montecarlo import (
    SamplerConfig,
    SpectrumEstimate,
    estimate_noise,
    propagate_sample,
    sample_sideband_pair,
)
from . import errors

__all__ = [
    "__version__",
    "AIRY",
    "LORENTZIAN",
    "CavityParams",
    "ComplexResponse",
    "MirrorPair",
    "amplitude_reflectance",
    "amplitude_transmittance",
    "finesse",
    "reflection_phase",
    "NoiseEllipse",
    "RotationAngle",
    "SidebandState",
    "TransferCoefficients",
    "apply_sideband_phase",
    "homodyne_reference",
    "reflected_noise",
    "rotation_angle",
    "transfer_coefficients",
    "CriticalPoint",
    "CriticalSet",
    "MatchingRow",
    "NoiseSweep",
    "ScanEntry",
    "bifurcation_scan",
    "conversion_threshold",
    "detuning_sweep",
    "find_critical_detunings",
    "matching_study",
    "SamplerConfig",
    "SpectrumEstimate",
    "estimate_noise",
    "propagate_sample",
    "sample_sideband_pair",
    "errors",
]
