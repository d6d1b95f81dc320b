"""Photocount statistics of microwave quantum states from continuous records.

Reconstructs the discrete photocount moments of narrowband states from
quadrature-sample cumulants, checks them against an exact truncated
number-basis oracle, evaluates classicality conditions, and computes
wideband energy / photon-number functionals of sampled voltage records.
"""

from .classicality import ClassicalityReport, boundary_curve, classify
from .fock import (
    DensityMatrix,
    FockOperator,
    coherent_phase_averaged,
    exact_photon_stats,
    exact_quadrature_moment,
    make_ladder,
    photon_stats_via_quadratures,
    squeezed_vacuum_phase_averaged,
    symmetric_sum_closed,
    symmetric_sum_enumerated,
    thermal_state,
    vacuum_state,
)
from .moments import (
    CumulantSet,
    MomentAccumulator,
    MomentSet,
    PhotonStats,
    accumulate_moments,
    bootstrap_errors,
    cumulants_from_moments,
    photon_stats_from_cumulants,
    subtract_reference,
)
from .sampler import (
    PulseSpec,
    QuadratureBatch,
    StateSpec,
    TimeTrace,
    sample_quadratures,
    sample_timetrace,
)
from .wideband import (
    Spectrum,
    causal_transform,
    energy_of,
    energy_spectral,
    hilbert_pair,
    hilbert_transform,
    photon_number_from_pair,
    photon_number_of,
    photon_number_spectral,
    spectrum_of,
)

__version__ = "0.1.0"

__all__ = [
    "ClassicalityReport",
    "CumulantSet",
    "DensityMatrix",
    "FockOperator",
    "MomentAccumulator",
    "MomentSet",
    "PhotonStats",
    "PulseSpec",
    "QuadratureBatch",
    "Spectrum",
    "StateSpec",
    "TimeTrace",
    "accumulate_moments",
    "bootstrap_errors",
    "boundary_curve",
    "causal_transform",
    "classify",
    "coherent_phase_averaged",
    "cumulants_from_moments",
    "energy_of",
    "energy_spectral",
    "exact_photon_stats",
    "exact_quadrature_moment",
    "hilbert_pair",
    "hilbert_transform",
    "make_ladder",
    "photon_number_from_pair",
    "photon_number_of",
    "photon_number_spectral",
    "photon_stats_from_cumulants",
    "photon_stats_via_quadratures",
    "sample_quadratures",
    "sample_timetrace",
    "spectrum_of",
    "squeezed_vacuum_phase_averaged",
    "subtract_reference",
    "symmetric_sum_closed",
    "symmetric_sum_enumerated",
    "thermal_state",
    "vacuum_state",
]
