"""Toolkit for compactly supported N-band orthogonal wavelet filter banks.

Filter banks, their polyphase loops and spin-vector factorizations, finite
realizations of the associated isometry relations, scaling-function cascades,
exact subband transforms, and reducibility detection.
"""

from .cascade import (
    CascadeResult,
    GramReport,
    SampledFunction,
    build_wavelets,
    cascade_iterate,
    dilate,
    frame_map_apply,
    refinement_apply,
    refinement_residual,
    translate_gram,
)
from .cuntz import (
    CornerReport,
    CuntzSystem,
    ProbeReport,
    SubbandLadder,
    build_operators,
    detect_monomial_corner,
    invariant_subspace_probe,
    stretched_haar_adjusted,
    subband_ladder,
    verify_cuntz,
)
from .filters import (
    FilterBank,
    FilterCoeffs,
    coeffs_from_dense,
    haar_complement,
    normalization_check,
    orthogonality_check,
    preset_bank,
    qmf_identity_check,
    symbol_eval,
    verify_bank,
)
from .loops import (
    NotFactorableError,
    PolyLoop,
    SpinFactorization,
    factor_to_spins,
    filters_to_loop,
    loop_to_filters,
    synthesize_from_spins,
    unitarity_check,
)
from .storage import StorageError, load, save
from .transform import CoeffTree, analyze, energy_report, synthesize

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # filters
    "FilterCoeffs",
    "FilterBank",
    "coeffs_from_dense",
    "normalization_check",
    "orthogonality_check",
    "symbol_eval",
    "qmf_identity_check",
    "haar_complement",
    "preset_bank",
    "verify_bank",
    # loops
    "PolyLoop",
    "SpinFactorization",
    "NotFactorableError",
    "filters_to_loop",
    "loop_to_filters",
    "unitarity_check",
    "synthesize_from_spins",
    "factor_to_spins",
    # cuntz
    "CuntzSystem",
    "SubbandLadder",
    "CornerReport",
    "ProbeReport",
    "build_operators",
    "verify_cuntz",
    "subband_ladder",
    "detect_monomial_corner",
    "invariant_subspace_probe",
    "stretched_haar_adjusted",
    # cascade
    "SampledFunction",
    "CascadeResult",
    "GramReport",
    "cascade_iterate",
    "refinement_apply",
    "refinement_residual",
    "build_wavelets",
    "translate_gram",
    "frame_map_apply",
    "dilate",
    # transform
    "CoeffTree",
    "analyze",
    "synthesize",
    "energy_report",
    # storage
    "StorageError",
    "save",
    "load",
]
