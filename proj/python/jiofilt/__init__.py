"""Reduced-rank adaptive filtering toolkit.

Thin Python surface over the C++ core: batch MMSE designs, the jointly
optimized projection/reduced-filter scheme and its baselines, the DS-CDMA
scenario generator, and the complexity accounting.
"""

from ._core import (  # noqa: F401
    DivergenceError,
    ExactStats,
    FadingModel,
    JioFilter,
    MwfFilter,
    NlmsFilter,
    RlsFilter,
    ScenarioConfig,
    ScenarioRealization,
    SecondOrderStats,
    StepMode,
    __version__,
    alternate_fixed_point,
    ber_estimate,
    ber_windowed,
    clarke_fading,
    complexity_table,
    count_verify,
    full_rank_wiener,
    generate,
    hermitian_solve,
    identity_projection,
    krylov_projection,
    optimal_projection,
    orthonormalize,
    pinv,
    range_condition,
    reduced_mmse,
    reduced_wiener,
    sinr_db,
    spectral_radius,
    stability_report,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
