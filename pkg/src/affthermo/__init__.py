"""Thermodynamic formalism and geometry for planar affine iterated function
systems whose linear parts may be non-invertible."""

from .errors import (
    AffThermoError,
    BudgetExceeded,
    InconclusiveBracket,
    ParseError,
    PreconditionError,
    RankError,
)
from .ifs import AffineIFS
from .mat2 import (
    Direction,
    Mat2,
    RankOneForm,
    is_proximal,
    rank_one_factor,
    singular_values,
    svf_phi,
)
from .symbolic import (
    LevelSet,
    SubshiftKind,
    enumerate_level,
    has_infinite_nonzero_word,
    shift,
    word_product,
)
from .classify import (
    DominationCertificate,
    TupleClassification,
    classify,
    find_domination_certificate,
    is_irreducible,
    is_strictly_affine,
    jsr_bounds,
)
from .pressure import (
    CylinderMeasure,
    GapResult,
    MeasureDiagnostics,
    PressureEstimate,
    affinity_dimension,
    gibbs_weights,
    measure_diagnostics,
    pressure_dispatch,
    pressure_estimate,
    pressure_gap,
)
from .geometry import (
    BoxDimEstimate,
    PointCloud,
    attractor_cloud,
    box_dimension,
    canonical_point,
    condensation_decomposition,
    hausdorff_distance,
    project_cloud,
    theorem_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "AffThermoError",
    "AffineIFS",
    "BoxDimEstimate",
    "BudgetExceeded",
    "CylinderMeasure",
    "Direction",
    "DominationCertificate",
    "GapResult",
    "InconclusiveBracket",
    "LevelSet",
    "Mat2",
    "MeasureDiagnostics",
    "ParseError",
    "PointCloud",
    "PreconditionError",
    "PressureEstimate",
    "RankError",
    "RankOneForm",
    "SubshiftKind",
    "TupleClassification",
    "affinity_dimension",
    "attractor_cloud",
    "box_dimension",
    "canonical_point",
    "classify",
    "condensation_decomposition",
    "enumerate_level",
    "find_domination_certificate",
    "gibbs_weights",
    "has_infinite_nonzero_word",
    "hausdorff_distance",
    "is_irreducible",
    "is_proximal",
    "is_strictly_affine",
    "jsr_bounds",
    "measure_diagnostics",
    "pressure_dispatch",
    "pressure_estimate",
    "pressure_gap",
    "project_cloud",
    "rank_one_factor",
    "shift",
    "singular_values",
    "svf_phi",
    "theorem_experiment",
    "word_product",
]
