"""Builders for the eight concrete analyses (four kinds x primal/dual).

Condition families, written with 1-based indices i, j over the vertices:

stability        primal  P_i > 0,  P_i - A_i^T P_j A_i > 0
                 dual    Q_{i,j} >= 0,  for each i:
                         sum_j [A_j Q_{i,j} A_j^T - Q_{j,i}] >= 0
detectability    primal  P_i > 0,  P_i - A_i^T P_j A_i + C^T C > 0
                 dual    stability dual plus  C (sum Q) C^T = 0
stabilizability  primal  S_i > 0,  S_j - A_i S_i A_i^T + B B^T > 0
                 dual    Q_{i,j} >= 0,  for each i:
                         sum_j [A_i^T Q_{i,j} A_i - Q_{j,i}] >= 0
                         (A_i fixed inside the j-sum), B^T (sum Q) B = 0
ct_cqlf          primal  P > 0,  -(A_i^T P + P A_i) > 0
                 dual    R_i >= 0,  sum_i (A_i R_i + R_i A_i^T) >= 0
                         (the evaluated sum is the certificate block R_0)

Every dual also carries the trace normalization (sum of variable-block
traces equals 1), which encodes that the certificate is nonzero.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from . import verify as verify_mod
from .engine import (
    Equality,
    FeasibilityProblem,
    LinearMatrixMap,
    MapTerm,
    SolveOptions,
    solve,
)
from .errors import ContractError, InvalidSystemError
from .linalg import BlockDiagSym, SymMatrix
from .model import (
    ANALYSES,
    ExistenceCertificate,
    NonexistenceCertificate,
    Outcome,
    PolytopicSystem,
    Verdict,
    validate,
)

__all__ = ["build", "analyze", "certificate_from_solution"]


def _require(system: PolytopicSystem, analysis: str) -> None:
    if analysis not in ANALYSES:
        raise ContractError(f"unknown analysis {analysis!r}")
    findings = validate(system)
    if findings:
        raise InvalidSystemError(findings)
    if analysis == "detectability" and system.C is None:
        raise ContractError("detectability analysis requires an output matrix C")
    if analysis == "stabilizability" and system.B is None:
        raise ContractError("stabilizability analysis requires an input matrix B")


def _sym_outer(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return (np.outer(u, v) + np.outer(v, u)) / 2.0


def _pair_equalities(n: int, n_blocks: int, M: np.ndarray) -> list[Equality]:
    """Zero constraints on every entry of M (sum_k Q_k) M^T, M with rows in R^n."""
    eqs = []
    rows = M.shape[0]
    for a in range(rows):
        for b in range(a, rows):
            F = _sym_outer(M[a], M[b])
            coeffs = BlockDiagSym([F] * n_blocks)
            eqs.append(Equality(coeffs, 0.0))
    return eqs


def _dual_lift(system: PolytopicSystem, analysis: str) -> np.ndarray | None:
    """Facial reduction basis for the dual variables.

    PSD blocks whose sum satisfies M^T (sum Q) M = 0 must each annihilate
    range(M), so every solution has the form Q_k = U Y_k U^T with U an
    orthonormal basis of range(M)'s orthogonal complement.  Building the
    dual directly in Y removes the equality, whose tangential interplay
    with the PSD cone otherwise ruins the projection geometry.  Returns
    None when no reduction applies (no constraint, or nothing left).
    """
    if analysis == "detectability":
        directions = np.asarray(system.C).T
    elif analysis == "stabilizability":
        directions = np.asarray(system.B)
    else:
        return None
    U = null_space(directions.T)
    if U.shape[1] in (0, system.n_x):
        # nothing left (dual structurally infeasible) or nothing removed;
        # fall back to the unreduced formulation either way
        return None
    return U


def _trace_equality(dims: tuple[int, ...]) -> Equality:
    return Equality(BlockDiagSym([np.eye(d) for d in dims]), 1.0)


def build(system: PolytopicSystem, analysis: str, side: str) -> FeasibilityProblem:
    """Assemble the feasibility problem for one analysis and one side."""
    _require(system, analysis)
    if side not in ("primal", "dual"):
        raise ContractError(f"side must be 'primal' or 'dual', got {side!r}")
    A = [np.asarray(v) for v in system.vertices]
    n = system.n_x
    N = system.N
    eye = np.eye(n)

    if analysis == "ct_cqlf":
        if side == "primal":
            # outputs: -(A_i^T P + P A_i) for each i, then P itself
            terms = [MapTerm(i, 0, -1.0, A[i].T, eye) for i in range(N)]
            terms.append(MapTerm(N, 0, 0.5, eye, eye))
            m = LinearMatrixMap((n,), (n,) * (N + 1), tuple(terms))
            return FeasibilityProblem("primal", m)
        terms = [MapTerm(0, i, 1.0, A[i], eye) for i in range(N)]
        m = LinearMatrixMap((n,) * N, (n,), tuple(terms))
        return FeasibilityProblem("dual", m, (_trace_equality(m.var_dims),), True)

    if side == "primal":
        # N^2 pair blocks laid out column-major (pair (i,j) at N*j0+i0), then
        # the N positivity blocks
        terms = []
        for j0 in range(N):
            for i0 in range(N):
                k0 = N * j0 + i0
                if analysis == "stabilizability":
                    terms.append(MapTerm(k0, j0, 0.5, eye, eye))  # S_j
                    terms.append(MapTerm(k0, i0, -0.5, A[i0], A[i0].T))  # -A_i S_i A_i^T
                else:
                    terms.append(MapTerm(k0, i0, 0.5, eye, eye))  # P_i
                    terms.append(MapTerm(k0, j0, -0.5, A[i0].T, A[i0]))  # -A_i^T P_j A_i
        for i0 in range(N):
            terms.append(MapTerm(N * N + i0, i0, 0.5, eye, eye))
        A0 = None
        if analysis == "detectability":
            CtC = system.C.T @ system.C
            A0 = BlockDiagSym([CtC] * (N * N) + [np.zeros((n, n))] * N)
        elif analysis == "stabilizability":
            BBt = system.B @ system.B.T
            A0 = BlockDiagSym([BBt] * (N * N) + [np.zeros((n, n))] * N)
        m = LinearMatrixMap((n,) * N, (n,) * (N * N + N), tuple(terms), A0)
        return FeasibilityProblem("primal", m)

    # dual side: variables Q_{i,j} stored row-major (block i0*N + j0),
    # possibly facially reduced to Q = U Y U^T
    def v(i0, j0):
        return i0 * N + j0

    lift = _dual_lift(system, analysis)
    U = lift if lift is not None else eye
    d = U.shape[1]
    terms = []
    for i0 in range(N):
        for j0 in range(N):
            if analysis == "stabilizability":
                terms.append(MapTerm(i0, v(i0, j0), 0.5, A[i0].T @ U, U.T @ A[i0]))
            else:
                terms.append(MapTerm(i0, v(i0, j0), 0.5, A[j0] @ U, U.T @ A[j0].T))
            terms.append(MapTerm(i0, v(j0, i0), -0.5, U, U.T))
    m = LinearMatrixMap((d,) * (N * N), (n,) * N, tuple(terms))
    eqs = [_trace_equality(m.var_dims)]
    if lift is None:
        if analysis == "detectability":
            eqs.extend(_pair_equalities(n, N * N, np.asarray(system.C)))
        elif analysis == "stabilizability":
            eqs.extend(_pair_equalities(n, N * N, np.asarray(system.B).T))
    return FeasibilityProblem("dual", m, tuple(eqs), True)


def certificate_from_solution(system: PolytopicSystem, analysis: str, side: str, result):
    """Package solver blocks into the certificate type for this analysis."""
    N = system.N
    if side == "primal":
        return ExistenceCertificate(analysis, tuple(result.blocks.blocks))
    arrays = result.blocks.arrays()
    if analysis == "ct_cqlf":
        blocks = {(i + 1, 0): SymMatrix(arrays[i]) for i in range(N)}
        blocks[(0, 0)] = result.outputs.blocks[0]
        return NonexistenceCertificate(analysis, blocks)
    lift = _dual_lift(system, analysis)
    if lift is not None:
        arrays = [lift @ a @ lift.T for a in arrays]
    blocks = {
        (i0 + 1, j0 + 1): SymMatrix(arrays[i0 * N + j0])
        for i0 in range(N)
        for j0 in range(N)
    }
    return NonexistenceCertificate(analysis, blocks)


@dataclass(frozen=True)
class VerifyTolerances:
    existence: float = 1e-8
    psd: float = 1e-6
    eq: float = 1e-8


def analyze(
    system: PolytopicSystem,
    analysis: str,
    opts: SolveOptions | None = None,
    verify_tols: VerifyTolerances | None = None,
) -> Verdict:
    """Run primal then dual, gate any candidate through the verifier.

    Outcomes: ExistenceProven / NonexistenceProven / Inconclusive, except
    that a feasible stabilizability primal is reported as
    NecessaryConditionFeasible (the stabilizability LMIs are necessary
    only, so their feasibility must not be read as proof of
    stabilizability).
    """
    opts = opts or SolveOptions()
    tols = verify_tols or VerifyTolerances()
    t0 = time.perf_counter()
    diagnostics: dict = {"analysis": analysis}

    primal = build(system, analysis, "primal")
    res_p = solve(primal, opts)
    diagnostics["primal"] = {"iterations": res_p.iterations, **res_p.residuals}
    if res_p.feasible:
        cert = certificate_from_solution(system, analysis, "primal", res_p)
        report = verify_mod.verify_existence(system, cert, tol=tols.existence)
        diagnostics["primal"]["verified"] = report.passed
        if report.passed:
            outcome = (
                Outcome.NECESSARY_CONDITION_FEASIBLE
                if analysis == "stabilizability"
                else Outcome.EXISTENCE_PROVEN
            )
            diagnostics["wall_time"] = time.perf_counter() - t0
            return Verdict(analysis, outcome, cert, diagnostics)

    dual = build(system, analysis, "dual")
    res_d = solve(dual, opts)
    diagnostics["dual"] = {"iterations": res_d.iterations, **res_d.residuals}
    if res_d.feasible:
        cert = certificate_from_solution(system, analysis, "dual", res_d)
        report = verify_mod.verify_nonexistence(system, cert, tol_psd=tols.psd, tol_eq=tols.eq)
        diagnostics["dual"]["verified"] = report.passed
        if report.passed:
            diagnostics["wall_time"] = time.perf_counter() - t0
            return Verdict(analysis, Outcome.NONEXISTENCE_PROVEN, cert, diagnostics)

    diagnostics["wall_time"] = time.perf_counter() - t0
    return Verdict(analysis, Outcome.INCONCLUSIVE, None, diagnostics)
