"""Existence and nonexistence certificates for poly-quadratic Lyapunov
analysis of discrete-time polytopic LPV systems.

The package decides, for a system given by vertex matrices, whether a
poly-quadratic Lyapunov function (or poly-quadratically stabilizing
controller / detecting observer) exists.  It returns either an existence
certificate (a solution of the primal LMI family) or a certificate of
nonexistence (a solution of the dual theorem-of-alternatives
conditions); both are independently re-checkable with ``verify``.
"""

from .conditions import VerifyTolerances, analyze, build
from .engine import (
    Equality,
    FeasibilityProblem,
    LinearMatrixMap,
    MapTerm,
    SolveOptions,
    SolveResult,
    apply_adjoint,
    apply_map,
    solve,
)
from .errors import (
    BudgetExceeded,
    ConeLpvError,
    ContractError,
    InvalidSystemError,
    NumericalFailure,
    StructureMismatch,
)
from .jsr import JsrBounds, bounds, spectral_radius
from .linalg import BlockDiagSym, SymMatrix, eig_sym, inner_product, project_psd
from .model import (
    ANALYSES,
    ExistenceCertificate,
    NonexistenceCertificate,
    Outcome,
    PolytopicSystem,
    Verdict,
    certificate_from_dict,
    certificate_to_dict,
    flat_to_pair,
    load_certificate,
    load_system,
    pair_to_flat,
    save_certificate,
    system_from_dict,
    system_to_dict,
    validate,
)
from .verify import VerificationReport, verify_existence, verify_nonexistence

__version__ = "0.1.0"

__all__ = [
    "ANALYSES",
    "BlockDiagSym",
    "BudgetExceeded",
    "ConeLpvError",
    "ContractError",
    "Equality",
    "ExistenceCertificate",
    "FeasibilityProblem",
    "InvalidSystemError",
    "JsrBounds",
    "LinearMatrixMap",
    "MapTerm",
    "NonexistenceCertificate",
    "NumericalFailure",
    "Outcome",
    "PolytopicSystem",
    "SolveOptions",
    "SolveResult",
    "StructureMismatch",
    "SymMatrix",
    "VerificationReport",
    "Verdict",
    "VerifyTolerances",
    "analyze",
    "apply_adjoint",
    "apply_map",
    "bounds",
    "build",
    "certificate_from_dict",
    "certificate_to_dict",
    "eig_sym",
    "flat_to_pair",
    "inner_product",
    "load_certificate",
    "load_system",
    "pair_to_flat",
    "project_psd",
    "save_certificate",
    "solve",
    "spectral_radius",
    "system_from_dict",
    "system_to_dict",
    "validate",
    "verify_existence",
    "verify_nonexistence",
]
