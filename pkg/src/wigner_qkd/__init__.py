"""Ekert key distribution with the Wigner inequality: states, attacks, estimators and simulation."""

__version__ = "0.1.0"

from .polarization import (
    AnalyzerBasis,
    MeasurementSetting,
    OutcomeDistribution,
    PolarizationAngle,
    TwoPhotonState,
    deg,
    make_product_state,
    make_singlet_state,
    outcome_distribution,
)
from .security import (
    CoincidenceCounts,
    MissingSetting,
    WignerResult,
    WignerSettings,
    ZeroTotalCounts,
    estimate_probability,
    estimate_wigner,
    qber,
    wigner_w,
)
from .attacks import (
    InterceptResendBoth,
    InterceptResendOne,
    NoAttack,
    OptimizationReport,
    SourceControlProduct,
    optimize_attack,
    realize_attack,
)
from .montecarlo import NoiseModel, SamplerConfig, run_wigner_experiment, sample_counts
from .protocol import (
    InsufficientStatistics,
    KeyRateComparison,
    PartySettingsPolicy,
    SessionRecord,
    Verdict,
    key_rate_comparison,
    run_session,
    security_verdict,
)
from .figures import GridSpec, SectionSpec, contour_grid, section_curve
