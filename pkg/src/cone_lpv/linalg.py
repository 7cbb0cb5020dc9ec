"""Dense symmetric-matrix kernel.

Everything the feasibility engine and the certificate verifier need:
eigendecomposition, projection onto the shifted PSD cone, and the trace
inner product on block-diagonal symmetric values.  All values are
immutable after construction and all operations are pure.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractError, NumericalFailure, StructureMismatch

__all__ = [
    "SymMatrix",
    "BlockDiagSym",
    "eig_sym",
    "project_psd",
    "inner_product",
]


class SymMatrix:
    """Immutable real symmetric matrix.

    The input is symmetrized as (M + M^T)/2 at construction so that later
    floating-point arithmetic cannot accumulate asymmetry drift.  Entries
    must be finite.
    """

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=float)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ContractError(f"symmetric matrix must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ContractError("symmetric matrix entries must be finite")
        a = (a + a.T) / 2.0
        a.setflags(write=False)
        self._a = a

    @property
    def dim(self) -> int:
        return self._a.shape[0]

    @property
    def array(self) -> np.ndarray:
        """Read-only ndarray view of the entries."""
        return self._a

    def frobenius(self) -> float:
        return float(np.linalg.norm(self._a, "fro"))

    def min_eig(self) -> float:
        return float(np.linalg.eigvalsh(self._a)[0])

    def __repr__(self):
        return f"SymMatrix({self._a.tolist()!r})"


class BlockDiagSym:
    """Ordered list of symmetric blocks, possibly of different dimensions."""

    __slots__ = ("_blocks",)

    def __init__(self, blocks):
        blocks = tuple(b if isinstance(b, SymMatrix) else SymMatrix(b) for b in blocks)
        if not blocks:
            raise ContractError("BlockDiagSym needs at least one block")
        self._blocks = blocks

    @property
    def blocks(self) -> tuple[SymMatrix, ...]:
        return self._blocks

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(b.dim for b in self._blocks)

    def arrays(self) -> list[np.ndarray]:
        return [b.array for b in self._blocks]

    def frobenius(self) -> float:
        return float(np.sqrt(sum(b.frobenius() ** 2 for b in self._blocks)))

    def min_eig(self) -> float:
        return min(b.min_eig() for b in self._blocks)

    def __len__(self):
        return len(self._blocks)

    def __iter__(self):
        return iter(self._blocks)

    def __repr__(self):
        return f"BlockDiagSym(dims={self.dims})"


def eig_sym(M: SymMatrix, label: str | None = None):
    """Eigendecomposition of a symmetric matrix.

    Returns (eigenvalues ascending, orthonormal eigenvector matrix V) with
    M = V diag(w) V^T up to a reconstruction error of 1e-10*(1+||M||_F).

    Raises NumericalFailure if the eigensolver does not converge; `label`
    identifies the offending block in the error message.
    """
    try:
        w, V = np.linalg.eigh(M.array)
    except np.linalg.LinAlgError as exc:
        where = f" in block {label}" if label else ""
        raise NumericalFailure(f"symmetric eigendecomposition failed{where}: {exc}") from exc
    return w, V


def project_psd(M: SymMatrix, floor: float = 0.0) -> SymMatrix:
    """Frobenius-nearest point of {X symmetric : X >= floor*I}.

    Eigenvalues below `floor` are clipped to it and the matrix is
    reassembled; a matrix already above the floor is returned unchanged up
    to roundoff.
    """
    w, V = eig_sym(M)
    if w[0] >= floor:
        return M
    w = np.maximum(w, floor)
    return SymMatrix((V * w) @ V.T)


def inner_product(X: BlockDiagSym, Y: BlockDiagSym) -> float:
    """Trace inner product sum_k Tr(X_k Y_k) of two conformant values."""
    if X.dims != Y.dims:
        raise StructureMismatch(f"block structures differ: {X.dims} vs {Y.dims}")
    return float(sum(np.sum(a * b) for a, b in zip(X.arrays(), Y.arrays())))
