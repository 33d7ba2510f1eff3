"""Transfer-operator numerics for skew products over subshifts of finite type.

The package computes Gibbs measures, twisted transfer-operator spectra,
correlation asymptotics for infinite-measure skew products, and the symbolic
cohomology used to reduce two-sided observables to one-sided ones.
"""

from .cli import emit_csv, run_theorem_a, run_theorem_b
from .cohomology import (
    AnchorChoice,
    approximating_sequence,
    build_vm,
    conjugate_observable,
    reduce_cocycle,
)
from .config import (
    ConfigError,
    ExperimentConfig,
    FIXTURES,
    config_to_json,
    fixture_config,
    load_config,
    parse_config,
    serialize_config,
)
from .correlations import (
    CorrelationEngine,
    CorrelationSeries,
    KrickebergReport,
    QuadratureSpec,
    ScanFailedError,
    expansion_coefficients,
    krickeberg_check,
    smooth_curve_bounds,
    spectral_correlation,
)
from .gibbs import GibbsMeasure, birkhoff_sum
from .oracle import (
    OracleBudget,
    OracleBudgetError,
    mc_correlation,
    oracle_correlation,
)
from .sft import (
    CylinderFunction,
    SubshiftSpec,
    Word,
    admissible_words,
    constant_function,
    d_theta,
    indicator_cylinder,
    preimage_symbols,
    promote,
)
from .twisted import (
    DriftVariance,
    GapCollapseError,
    ScanReport,
    TwistedFamily,
    aperiodicity_scan,
    drift_variance,
)

__version__ = "0.1.0"

__all__ = [
    "AnchorChoice",
    "ConfigError",
    "CorrelationEngine",
    "CorrelationSeries",
    "CylinderFunction",
    "DriftVariance",
    "ExperimentConfig",
    "FIXTURES",
    "GapCollapseError",
    "GibbsMeasure",
    "KrickebergReport",
    "OracleBudget",
    "OracleBudgetError",
    "QuadratureSpec",
    "ScanFailedError",
    "ScanReport",
    "SubshiftSpec",
    "TwistedFamily",
    "Word",
    "admissible_words",
    "aperiodicity_scan",
    "approximating_sequence",
    "birkhoff_sum",
    "build_vm",
    "config_to_json",
    "conjugate_observable",
    "constant_function",
    "d_theta",
    "drift_variance",
    "emit_csv",
    "expansion_coefficients",
    "fixture_config",
    "indicator_cylinder",
    "krickeberg_check",
    "load_config",
    "mc_correlation",
    "oracle_correlation",
    "parse_config",
    "preimage_symbols",
    "promote",
    "reduce_cocycle",
    "run_theorem_a",
    "run_theorem_b",
    "serialize_config",
    "smooth_curve_bounds",
    "spectral_correlation",
    "__version__",
]
