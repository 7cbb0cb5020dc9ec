"""Data model: polytopic systems, certificates, verdicts, serialization.

Index conventions
-----------------
Dual (nonexistence) certificates are stored doubly indexed as Q[(i, j)]
with 1-based i, j.  Flat indices appear only at the I/O boundary through
``flat_to_pair`` / ``pair_to_flat``, which realize the column-major
flattening k = N*(j-1) + i (block k of a flat list {M_11, M_21, M_12,
M_22, ...}).

For the continuous-time common-quadratic analysis (``ct_cqlf``) the dual
certificate consists of N blocks R_1..R_N plus the combination block R_0;
these are stored under keys (i, 0) for i = 1..N and (0, 0) for R_0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np

from .errors import ContractError
from .linalg import SymMatrix

ANALYSES = ("stability", "detectability", "stabilizability", "ct_cqlf")

__all__ = [
    "ANALYSES",
    "PolytopicSystem",
    "ExistenceCertificate",
    "NonexistenceCertificate",
    "Outcome",
    "Verdict",
    "flat_to_pair",
    "pair_to_flat",
    "validate",
    "system_to_dict",
    "system_from_dict",
    "certificate_to_dict",
    "certificate_from_dict",
    "load_system",
    "load_certificate",
    "save_certificate",
]


def _as_matrix(value, name):
    a = np.array(value, dtype=float)
    if a.ndim != 2:
        raise ContractError(f"{name} must be a 2-D matrix, got ndim={a.ndim}")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PolytopicSystem:
    """Discrete-time polytopic system given by its vertex matrices.

    ``vertices`` holds the N square state matrices A_i; ``B`` and ``C``
    are the optional constant input and output matrices.  The scheduling
    functions and parameter set are not represented: the analyses assume
    the vertex representation is strict (every vertex attainable), which
    is a modelling assumption, not something checkable from the data.
    """

    vertices: tuple[np.ndarray, ...]
    B: np.ndarray | None = None
    C: np.ndarray | None = None

    def __post_init__(self):
        verts = tuple(_as_matrix(v, f"vertex {k+1}") for k, v in enumerate(self.vertices))
        if not verts:
            raise ContractError("a polytopic system needs at least one vertex")
        object.__setattr__(self, "vertices", verts)
        if self.B is not None:
            object.__setattr__(self, "B", _as_matrix(self.B, "B"))
        if self.C is not None:
            object.__setattr__(self, "C", _as_matrix(self.C, "C"))

    @property
    def n_x(self) -> int:
        return self.vertices[0].shape[0]

    @property
    def N(self) -> int:
        return len(self.vertices)


def validate(system: PolytopicSystem) -> list[str]:
    """Check well-formedness; returns findings (empty list means valid)."""
    findings = []
    n = system.vertices[0].shape[0]
    for k, A in enumerate(system.vertices):
        if A.shape != (n, n):
            findings.append(f"vertex {k+1} has shape {A.shape}, expected ({n}, {n})")
        if not np.all(np.isfinite(A)):
            findings.append(f"vertex {k+1} has non-finite entries")
    if system.B is not None:
        if system.B.shape[0] != n:
            findings.append(f"B has {system.B.shape[0]} rows, expected {n}")
        if not np.all(np.isfinite(system.B)):
            findings.append("B has non-finite entries")
    if system.C is not None:
        if system.C.shape[1] != n:
            findings.append(f"C has {system.C.shape[1]} columns, expected {n}")
        if not np.all(np.isfinite(system.C)):
            findings.append("C has non-finite entries")
    return findings


def flat_to_pair(k: int, N: int) -> tuple[int, int]:
    """Flat dual-block index k in 1..N^2 -> pair (i, j), column-major."""
    if not (1 <= k <= N * N):
        raise ContractError(f"flat index {k} outside 1..{N*N}")
    i = (k - 1) % N + 1
    j = (k - 1) // N + 1
    return i, j


def pair_to_flat(i: int, j: int, N: int) -> int:
    """Pair (i, j) in {1..N}^2 -> flat index N*(j-1) + i."""
    if not (1 <= i <= N and 1 <= j <= N):
        raise ContractError(f"pair ({i}, {j}) outside {{1..{N}}}^2")
    return N * (j - 1) + i


@dataclass(frozen=True)
class ExistenceCertificate:
    """Matrices claimed to satisfy a primal LMI family.

    One matrix per vertex (P_i, or S_i for stabilizability); a single P
    for the ct_cqlf analysis.
    """

    analysis: str
    matrices: tuple[SymMatrix, ...]

    def __post_init__(self):
        if self.analysis not in ANALYSES:
            raise ContractError(f"unknown analysis {self.analysis!r}")
        object.__setattr__(
            self,
            "matrices",
            tuple(m if isinstance(m, SymMatrix) else SymMatrix(m) for m in self.matrices),
        )
        if not self.matrices:
            raise ContractError("existence certificate has no matrices")


@dataclass(frozen=True)
class NonexistenceCertificate:
    """Doubly indexed PSD blocks claimed to satisfy a dual condition family.

    Keys are (i, j) pairs as described in the module docstring.  Blocks
    not stored are treated as zero by the verifier.
    """

    analysis: str
    blocks: Mapping[tuple[int, int], SymMatrix]

    def __post_init__(self):
        if self.analysis not in ANALYSES:
            raise ContractError(f"unknown analysis {self.analysis!r}")
        items = {}
        for key, m in dict(self.blocks).items():
            i, j = int(key[0]), int(key[1])
            items[(i, j)] = m if isinstance(m, SymMatrix) else SymMatrix(m)
        if not items:
            raise ContractError("nonexistence certificate has no blocks")
        dims = {m.dim for m in items.values()}
        if len(dims) != 1:
            raise ContractError(f"certificate blocks have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "blocks", items)

    @property
    def normalization(self) -> float:
        """Trace of the sum of all stored blocks."""
        return float(sum(np.trace(m.array) for m in self.blocks.values()))


class Outcome(str, Enum):
    EXISTENCE_PROVEN = "ExistenceProven"
    NONEXISTENCE_PROVEN = "NonexistenceProven"
    NECESSARY_CONDITION_FEASIBLE = "NecessaryConditionFeasible"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class Verdict:
    analysis: str
    outcome: Outcome
    certificate: ExistenceCertificate | NonexistenceCertificate | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.outcome is not Outcome.INCONCLUSIVE and self.certificate is None:
            raise ContractError(f"{self.outcome.value} verdict requires a certificate")


# ---------------------------------------------------------------------------
# JSON serialization.  Matrices are arrays of rows of doubles.

def system_to_dict(system: PolytopicSystem) -> dict:
    d = {
        "n_x": system.n_x,
        "N": system.N,
        "vertices": [v.tolist() for v in system.vertices],
    }
    if system.B is not None:
        d["B"] = system.B.tolist()
    if system.C is not None:
        d["C"] = system.C.tolist()
    return d


def system_from_dict(d: dict) -> PolytopicSystem:
    try:
        vertices = [np.array(v, dtype=float) for v in d["vertices"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ContractError(f"bad system payload: {exc}") from exc
    B = np.array(d["B"], dtype=float) if d.get("B") is not None else None
    C = np.array(d["C"], dtype=float) if d.get("C") is not None else None
    system = PolytopicSystem(tuple(vertices), B=B, C=C)
    declared_n = d.get("n_x")
    if declared_n is not None and declared_n != system.n_x:
        raise ContractError(f"declared n_x={declared_n} but vertices are {system.n_x}-dimensional")
    declared_N = d.get("N")
    if declared_N is not None and declared_N != system.N:
        raise ContractError(f"declared N={declared_N} but {system.N} vertices given")
    return system


def certificate_to_dict(cert: ExistenceCertificate | NonexistenceCertificate) -> dict:
    if isinstance(cert, ExistenceCertificate):
        return {
            "schema_version": 1,
            "analysis": cert.analysis,
            "kind": "existence",
            "blocks": [m.array.tolist() for m in cert.matrices],
        }
    blocks = [
        {"i": i, "j": j, "matrix": m.array.tolist()}
        for (i, j), m in sorted(cert.blocks.items())
    ]
    return {
        "schema_version": 1,
        "analysis": cert.analysis,
        "kind": "nonexistence",
        "blocks": blocks,
        "normalization": cert.normalization,
    }


def certificate_from_dict(d: dict):
    try:
        analysis = d["analysis"]
        kind = d["kind"]
        raw = d["blocks"]
    except KeyError as exc:
        raise ContractError(f"certificate payload missing field {exc}") from exc
    if kind == "existence":
        return ExistenceCertificate(analysis, tuple(SymMatrix(m) for m in raw))
    if kind == "nonexistence":
        blocks = {}
        for entry in raw:
            try:
                key = (int(entry["i"]), int(entry["j"]))
                blocks[key] = SymMatrix(entry["matrix"])
            except (KeyError, TypeError) as exc:
                raise ContractError(f"bad nonexistence block entry: {exc}") from exc
        return NonexistenceCertificate(analysis, blocks)
    raise ContractError(f"unknown certificate kind {kind!r}")


def load_system(path) -> PolytopicSystem:
    with open(path, "r", encoding="utf-8") as fh:
        return system_from_dict(json.load(fh))


def load_certificate(path):
    with open(path, "r", encoding="utf-8") as fh:
        return certificate_from_dict(json.load(fh))


def save_certificate(cert, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(certificate_to_dict(cert), fh, indent=2)
        fh.write("\n")
