"""Separability analysis for bipartite Gaussian states.

The library decides, from the correlation matrix alone, whether a
bipartite Gaussian state is separable or entangled, and backs separable
verdicts with explicit certificates that can be verified independently.
"""

from .certify import (
    CertificateError,
    CertificateReport,
    SeparabilityCertificate,
    reconstruct,
    verify_certificate,
)
from .engine import (
    BracketError,
    EngineError,
    IterationStep,
    IterationTrace,
    MapPreconditionError,
    NumericalError,
    SweepPoint,
    Verdict,
    VerdictKind,
    decide,
    decide_robust,
    find_threshold,
    map_step,
    sweep,
    theorem_checks,
)
from .gaussian import (
    BipartiteCM,
    CMError,
    CovarianceMatrix,
    InvalidCMError,
    assemble,
    momentum_flip,
    partial_transpose,
    random_cm,
    random_covariance,
    random_separable_cm,
    random_symplectic,
    split,
    symplectic_form,
    tmss,
    validate_cm,
)
from .io import (
    SchemaError,
    dump_certificate,
    dump_cm,
    load_certificate,
    load_cm,
    parse_certificate,
    parse_cm,
)
from .matlin import (
    DEFAULT_TOL,
    MatrixInputError,
    PsdReport,
    SchurReport,
    ToleranceConfig,
    hermitian_part,
    hermitian_reduce_psd,
    operator_norm,
    pseudoinverse,
    psd_check,
    schur_psd,
    trace_norm,
)
from .ppt import PptReport, ppt_check

__version__ = "0.1.0"

__all__ = [
    "BipartiteCM",
    "BracketError",
    "CMError",
    "CertificateError",
    "CertificateReport",
    "CovarianceMatrix",
    "DEFAULT_TOL",
    "EngineError",
    "InvalidCMError",
    "IterationStep",
    "IterationTrace",
    "MapPreconditionError",
    "MatrixInputError",
    "NumericalError",
    "PptReport",
    "PsdReport",
    "SchemaError",
    "SchurReport",
    "SeparabilityCertificate",
    "SweepPoint",
    "ToleranceConfig",
    "Verdict",
    "VerdictKind",
    "assemble",
    "decide",
    "decide_robust",
    "dump_certificate",
    "dump_cm",
    "find_threshold",
    "hermitian_part",
    "hermitian_reduce_psd",
    "load_certificate",
    "load_cm",
    "map_step",
    "momentum_flip",
    "operator_norm",
    "parse_certificate",
    "parse_cm",
    "partial_transpose",
    "ppt_check",
    "psd_check",
    "pseudoinverse",
    "random_cm",
    "random_covariance",
    "random_separable_cm",
    "random_symplectic",
    "reconstruct",
    "schur_psd",
    "split",
    "sweep",
    "symplectic_form",
    "theorem_checks",
    "tmss",
    "trace_norm",
    "validate_cm",
    "verify_certificate",
    "__version__",
]
