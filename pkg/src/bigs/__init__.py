"""bigs: biorthogonalizing Gram-Schmidt, sketched projectors, and
nonsymmetric Lanczos eigensolvers.

Deterministic and randomized two-sided Gram-Schmidt build basis pairs
(Q, P) with P^T Q = I — exactly, or in a sketched inner product — plus the
triangular factors of the input pair. On top of them sit oblique projector
utilities with incrementally bordered LU factorizations, a fully
biorthogonalized nonsymmetric Lanczos eigensolver in deterministic and
randomized (sketched) variants, reproducible input generators, and
stability diagnostics. The `bigs` console script reproduces the stability
tables and figure data of the experiment suite.
"""

from .biortho import BiorthConfig, BiorthResult, Status, Variant, two_sided_gs
from .diagnostics import (
    IterationDiagnostics,
    angle_inv_cos,
    biorth_loss,
    cond2,
    decomposition_error,
)
from .errors import ArgumentError, DegenerateInputError, NearBreakdownError
from .lanczos import (
    LanczosResult,
    MatrixOracle,
    RitzTriplet,
    charpoly_optimality_check,
    matrix_oracle,
    nonsym_lanczos,
    projected_matrices,
    rand_nonsym_lanczos,
    ritz_triplets,
)
from .projectors import (
    ObliquePair,
    gram_extend,
    new_pair,
    oblique_apply,
    sketched_oblique_apply,
)
from .rbiortho import (
    PrecisionMode,
    PrecisionPolicy,
    RBiorthConfig,
    RBiorthResult,
    RVariant,
    randomized_two_sided_gs,
    sketch_biorth_error,
)
from .sketching import (
    EmbeddingReport,
    Scaling,
    SketchKind,
    SketchOperator,
    apply,
    default_sketch_size,
    default_zeta,
    embedding_report,
    materialize,
    new_gaussian,
    new_identity,
    new_sparse_sign,
)
from .testmatrices import (
    IpExperimentRow,
    SpectrumSpec,
    gen_gaussian_pair,
    gen_ill_conditioned,
    gen_prescribed_spectrum,
    leading_decay_spectrum,
    sketched_ip_samples,
    sketched_orthogonal_ip_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "ArgumentError",
    "BiorthConfig",
    "BiorthResult",
    "DegenerateInputError",
    "EmbeddingReport",
    "IpExperimentRow",
    "IterationDiagnostics",
    "LanczosResult",
    "MatrixOracle",
    "NearBreakdownError",
    "ObliquePair",
    "PrecisionMode",
    "PrecisionPolicy",
    "RBiorthConfig",
    "RBiorthResult",
    "RVariant",
    "RitzTriplet",
    "Scaling",
    "SketchKind",
    "SketchOperator",
    "SpectrumSpec",
    "Status",
    "Variant",
    "angle_inv_cos",
    "apply",
    "biorth_loss",
    "charpoly_optimality_check",
    "cond2",
    "decomposition_error",
    "default_sketch_size",
    "default_zeta",
    "embedding_report",
    "gen_gaussian_pair",
    "gen_ill_conditioned",
    "gen_prescribed_spectrum",
    "gram_extend",
    "leading_decay_spectrum",
    "materialize",
    "matrix_oracle",
    "new_gaussian",
    "new_identity",
    "new_pair",
    "new_sparse_sign",
    "nonsym_lanczos",
    "oblique_apply",
    "projected_matrices",
    "rand_nonsym_lanczos",
    "randomized_two_sided_gs",
    "ritz_triplets",
    "sketch_biorth_error",
    "sketched_ip_samples",
    "sketched_oblique_apply",
    "sketched_orthogonal_ip_experiment",
    "two_sided_gs",
    "__version__",
]
