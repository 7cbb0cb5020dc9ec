"""Independent certificate checker.

Re-evaluates every inequality and equality of a certificate from the raw
system matrices using only the linalg kernel.  This module never imports
the feasibility engine; it is the trusted computing base that gates
every verdict.

Reports are structured per constraint (margin, threshold, pass flag)
rather than a bare boolean, because an inconclusive or failing run has
many possible causes and the margins are what make it diagnosable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError
from .linalg import SymMatrix, eig_sym
from .model import (
    ExistenceCertificate,
    NonexistenceCertificate,
    PolytopicSystem,
)

__all__ = ["ConstraintMargin", "VerificationReport", "verify_existence", "verify_nonexistence"]


@dataclass(frozen=True)
class ConstraintMargin:
    label: str
    value: float  # smallest eigenvalue, or equality residual magnitude
    threshold: float  # pass iff value >= threshold (inequalities) / value <= threshold (equalities)
    kind: str  # "psd" | "eq" | "trace"
    passed: bool


@dataclass
class VerificationReport:
    analysis: str
    kind: str
    constraints: list[ConstraintMargin] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.constraints)

    def worst(self) -> ConstraintMargin | None:
        failing = [c for c in self.constraints if not c.passed]
        pool = failing or self.constraints
        return min(pool, key=lambda c: c.value - c.threshold) if pool else None


def _min_eig(a: np.ndarray, label: str) -> float:
    w, _ = eig_sym(SymMatrix(a), label=label)
    return float(w[0])


def _psd_margin(label: str, a: np.ndarray, tol: float, strict: bool) -> ConstraintMargin:
    lam = _min_eig(a, label)
    scale = 1.0 + float(np.linalg.norm(a, "fro"))
    threshold = tol * scale if strict else -tol * scale
    return ConstraintMargin(label, lam, threshold, "psd", lam >= threshold)


def verify_existence(
    system: PolytopicSystem, cert: ExistenceCertificate, tol: float = 1e-8
) -> VerificationReport:
    """Check a primal certificate: every constraint block must be PD.

    Passes iff every evaluated constraint block and every certificate
    matrix has smallest eigenvalue at least tol*(1 + its Frobenius norm).
    """
    A = [np.asarray(v) for v in system.vertices]
    N, n = system.N, system.n_x
    mats = [m.array for m in cert.matrices]
    for k, m in enumerate(mats):
        if m.shape != (n, n):
            raise ContractError(f"certificate matrix {k+1} has shape {m.shape}, expected ({n},{n})")

    report = VerificationReport(cert.analysis, "existence")
    add = report.constraints.append

    if cert.analysis == "ct_cqlf":
        if len(mats) != 1:
            raise ContractError("ct_cqlf existence certificate must hold a single matrix")
        P = mats[0]
        add(_psd_margin("P", P, tol, strict=True))
        for i in range(N):
            G = -(A[i].T @ P + P @ A[i])
            add(_psd_margin(f"-(A_{i+1}^T P + P A_{i+1})", G, tol, strict=True))
        return report

    if len(mats) != N:
        raise ContractError(f"expected {N} certificate matrices, got {len(mats)}")

    sym = "S" if cert.analysis == "stabilizability" else "P"
    for i in range(N):
        add(_psd_margin(f"{sym}_{i+1}", mats[i], tol, strict=True))
    for i in range(N):
        for j in range(N):
            if cert.analysis == "stability":
                G = mats[i] - A[i].T @ mats[j] @ A[i]
                label = f"P_{i+1} - A_{i+1}^T P_{j+1} A_{i+1}"
            elif cert.analysis == "detectability":
                G = mats[i] - A[i].T @ mats[j] @ A[i] + system.C.T @ system.C
                label = f"P_{i+1} - A_{i+1}^T P_{j+1} A_{i+1} + C^T C"
            else:  # stabilizability
                G = mats[j] - A[i] @ mats[i] @ A[i].T + system.B @ system.B.T
                label = f"S_{j+1} - A_{i+1} S_{i+1} A_{i+1}^T + B B^T"
            add(_psd_margin(label, G, tol, strict=True))
    return report


def verify_nonexistence(
    system: PolytopicSystem,
    cert: NonexistenceCertificate,
    tol_psd: float = 1e-6,
    tol_eq: float = 1e-8,
) -> VerificationReport:
    """Check a dual certificate against the dual condition family.

    Passes iff (a) every stored block is PSD within tol_psd (relative),
    (b) every combined condition block is PSD within tol_psd, (c) the
    analysis' equalities hold within tol_eq, and (d) the trace of the sum
    of all blocks is at least 0.5, which pins nonzero-ness for a
    certificate normalized to unit trace.
    """
    A = [np.asarray(v) for v in system.vertices]
    N, n = system.N, system.n_x
    if cert.analysis == "detectability" and system.C is None:
        raise ContractError("detectability certificate needs a system with C")
    if cert.analysis == "stabilizability" and system.B is None:
        raise ContractError("stabilizability certificate needs a system with B")
    if cert.analysis == "ct_cqlf":
        allowed = {(0, 0)} | {(i, 0) for i in range(1, N + 1)}
    else:
        allowed = {(i, j) for i in range(1, N + 1) for j in range(1, N + 1)}
    for key, m in cert.blocks.items():
        if key not in allowed:
            raise ContractError(f"certificate block index {key} not valid for {cert.analysis}")
        if m.dim != n:
            raise ContractError(f"certificate block {key} has dim {m.dim}, expected {n}")

    report = VerificationReport(cert.analysis, "nonexistence")
    add = report.constraints.append
    zero = np.zeros((n, n))

    if cert.analysis == "ct_cqlf":
        R0 = cert.blocks.get((0, 0), SymMatrix(zero)).array
        Rs = [cert.blocks.get((i, 0), SymMatrix(zero)).array for i in range(1, N + 1)]
        add(_psd_margin("R_0", R0, tol_psd, strict=False))
        for i, R in enumerate(Rs, start=1):
            add(_psd_margin(f"R_{i}", R, tol_psd, strict=False))
        combo = sum((A[i] @ Rs[i] + Rs[i] @ A[i].T for i in range(N)), start=zero.copy())
        resid = float(np.max(np.abs(R0 - combo)))
        scale = 1.0 + float(np.linalg.norm(combo, "fro"))
        add(
            ConstraintMargin(
                "R_0 = sum_i (A_i R_i + R_i A_i^T)",
                resid,
                tol_eq * scale,
                "eq",
                resid <= tol_eq * scale,
            )
        )
        total = R0.trace() + sum(R.trace() for R in Rs)
        add(ConstraintMargin("trace of block sum", float(total), 0.5, "trace", total >= 0.5))
        return report

    Q = {
        (i, j): cert.blocks.get((i, j), SymMatrix(zero)).array
        for i in range(1, N + 1)
        for j in range(1, N + 1)
    }
    for (i, j), m in sorted(Q.items()):
        add(_psd_margin(f"Q_{i},{j}", m, tol_psd, strict=False))

    for i in range(1, N + 1):
        M = zero.copy()
        for j in range(1, N + 1):
            if cert.analysis == "stabilizability":
                M = M + A[i - 1].T @ Q[(i, j)] @ A[i - 1] - Q[(j, i)]
            else:
                M = M + A[j - 1] @ Q[(i, j)] @ A[j - 1].T - Q[(j, i)]
        add(_psd_margin(f"combined block i={i}", M, tol_psd, strict=False))

    Qsum = sum(Q.values(), start=zero.copy())
    if cert.analysis == "detectability":
        resid_mat = system.C @ Qsum @ system.C.T
        label = "C (sum Q) C^T = 0"
    elif cert.analysis == "stabilizability":
        resid_mat = system.B.T @ Qsum @ system.B
        label = "B^T (sum Q) B = 0"
    else:
        resid_mat = None
    if resid_mat is not None:
        resid = float(np.max(np.abs(resid_mat)))
        scale = 1.0 + float(np.linalg.norm(Qsum, "fro"))
        add(ConstraintMargin(label, resid, tol_eq * scale, "eq", resid <= tol_eq * scale))

    total = float(np.trace(Qsum))
    add(ConstraintMargin("trace of block sum", total, 0.5, "trace", total >= 0.5))
    return report
