"""Generic theorem-of-alternatives feasibility engine.

A ``LinearMatrixMap`` sends block-diagonal symmetric variables to
block-diagonal symmetric outputs through symmetrized congruence terms.
Both questions the package answers reduce to one internal form
(``FeasibilityProblem``):

* primal side: find unconstrained symmetric variable blocks x with every
  output block of map(x) + A0 positive definite;
* dual side: find PSD variable blocks satisfying affine equalities
  (trace normalization, structural zero constraints) with every output
  block of map(x) positive semidefinite.

``solve`` runs alternating projections between the product of PSD cones
and the affine graph set {(x, t) : t = map(x) + A0, equalities hold},
with Dykstra's correction on the cone step.  The affine projection is an
equality-constrained least-squares solve, prefactorized per problem.
Everything is deterministic: fixed starting point, fixed iteration
order, no randomized restarts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve, null_space

from .errors import ContractError, NumericalFailure, StructureMismatch
from .linalg import BlockDiagSym, SymMatrix

__all__ = [
    "MapTerm",
    "LinearMatrixMap",
    "Equality",
    "FeasibilityProblem",
    "SolveOptions",
    "SolveResult",
    "apply_map",
    "apply_adjoint",
    "solve",
]

_SQRT2 = float(np.sqrt(2.0))


@dataclass(frozen=True)
class MapTerm:
    """One contribution s*(L @ X_var @ R + R.T @ X_var @ L.T) to an output block."""

    out_block: int
    var_block: int
    scale: float
    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "left", np.array(self.left, dtype=float))
        object.__setattr__(self, "right", np.array(self.right, dtype=float))


@dataclass(frozen=True)
class LinearMatrixMap:
    """Block-diagonal linear matrix map plus constant offset A0."""

    var_dims: tuple[int, ...]
    out_dims: tuple[int, ...]
    terms: tuple[MapTerm, ...]
    A0: BlockDiagSym | None = None

    def __post_init__(self):
        object.__setattr__(self, "var_dims", tuple(int(d) for d in self.var_dims))
        object.__setattr__(self, "out_dims", tuple(int(d) for d in self.out_dims))
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if not (0 <= t.out_block < len(self.out_dims)):
                raise ContractError(f"term output block {t.out_block} out of range")
            if not (0 <= t.var_block < len(self.var_dims)):
                raise ContractError(f"term variable block {t.var_block} out of range")
            dv = self.var_dims[t.var_block]
            do = self.out_dims[t.out_block]
            if t.left.shape != (do, dv) or t.right.shape != (dv, do):
                raise ContractError(
                    f"term on (out={t.out_block}, var={t.var_block}) has L{t.left.shape}, "
                    f"R{t.right.shape}; expected L({do},{dv}), R({dv},{do})"
                )
        if self.A0 is not None and self.A0.dims != self.out_dims:
            raise StructureMismatch(f"A0 dims {self.A0.dims} != output dims {self.out_dims}")


def apply_map(m: LinearMatrixMap, x: BlockDiagSym) -> BlockDiagSym:
    """Evaluate the linear part of the map (A0 is not added here)."""
    if x.dims != m.var_dims:
        raise StructureMismatch(f"variable dims {x.dims} != map input dims {m.var_dims}")
    xs = x.arrays()
    outs = [np.zeros((d, d)) for d in m.out_dims]
    for t in m.terms:
        W = t.left @ xs[t.var_block] @ t.right
        outs[t.out_block] += t.scale * (W + W.T)
    return BlockDiagSym(outs)


def apply_adjoint(m: LinearMatrixMap, r: BlockDiagSym) -> BlockDiagSym:
    """Adjoint under the block trace inner product: <map(x), r> = <x, adjoint(r)>."""
    if r.dims != m.out_dims:
        raise StructureMismatch(f"output dims {r.dims} != map output dims {m.out_dims}")
    rs = r.arrays()
    outs = [np.zeros((d, d)) for d in m.var_dims]
    for t in m.terms:
        W = t.right @ rs[t.out_block] @ t.left
        outs[t.var_block] += t.scale * (W + W.T)
    return BlockDiagSym(outs)


@dataclass(frozen=True)
class Equality:
    """Affine constraint <coeffs, x> = target on the variable blocks."""

    coeffs: BlockDiagSym
    target: float


@dataclass(frozen=True)
class FeasibilityProblem:
    side: str  # "primal" | "dual"
    map: LinearMatrixMap
    equalities: tuple[Equality, ...] = ()
    psd_on_variables: bool = False

    def __post_init__(self):
        if self.side not in ("primal", "dual"):
            raise ContractError(f"side must be 'primal' or 'dual', got {self.side!r}")
        if self.side == "primal" and self.psd_on_variables:
            raise ContractError("primal side has no PSD requirement on the variables")
        object.__setattr__(self, "equalities", tuple(self.equalities))
        for eq in self.equalities:
            if eq.coeffs.dims != self.map.var_dims:
                raise StructureMismatch("equality coefficients do not match variable structure")


@dataclass(frozen=True)
class SolveOptions:
    max_iters: int = 200_000
    tol_feas: float = 1e-9
    epsilon: float = 1e-6  # strictness of primal "> 0", relative to 1+||A0||_F
    check_every: int = 20
    move_tol: float = 1e-12
    min_stage_iters: int = 400


@dataclass
class SolveResult:
    feasible: bool
    blocks: BlockDiagSym | None
    outputs: BlockDiagSym | None
    residuals: dict = field(default_factory=dict)
    iterations: int = 0
    wall_time: float = 0.0


# ---------------------------------------------------------------------------
# svec packing: orthonormal coordinates on block-diagonal symmetric values
# (off-diagonal entries scaled by sqrt(2) so the Euclidean and Frobenius
# inner products agree).

class _SymStructure:
    def __init__(self, dims):
        self.dims = tuple(int(d) for d in dims)
        self.block_sizes = [d * (d + 1) // 2 for d in self.dims]
        self.offsets = np.concatenate(([0], np.cumsum(self.block_sizes))).astype(int)
        self.total = int(self.offsets[-1])
        # per-dim groups allow one batched eigh call per distinct dimension
        self.groups = {}
        for k, d in enumerate(self.dims):
            self.groups.setdefault(d, []).append(k)
        self._layout = {}
        for d, members in self.groups.items():
            r, c = np.triu_indices(d)
            scale = np.where(r == c, 1.0, 1.0 / _SQRT2)
            seg = np.stack([np.arange(self.offsets[k], self.offsets[k + 1]) for k in members])
            self._layout[d] = (np.array(members), r, c, scale, seg)

    def svec_blocks(self, arrays) -> np.ndarray:
        v = np.empty(self.total)
        for d, (members, r, c, scale, seg) in self._layout.items():
            for row, k in enumerate(members):
                a = arrays[k]
                v[seg[row]] = a[r, c] / scale
        return v

    def smat_stacks(self, v: np.ndarray) -> dict[int, np.ndarray]:
        stacks = {}
        for d, (members, r, c, scale, seg) in self._layout.items():
            vals = v[seg] * scale
            X = np.zeros((len(members), d, d))
            X[:, r, c] = vals
            X[:, c, r] = vals
            stacks[d] = X
        return stacks

    def from_stacks(self, stacks) -> np.ndarray:
        v = np.empty(self.total)
        for d, (members, r, c, scale, seg) in self._layout.items():
            X = stacks[d]
            v[seg] = X[:, r, c] / scale
        return v

    def arrays(self, v: np.ndarray) -> list[np.ndarray]:
        out = [None] * len(self.dims)
        for d, (members, r, c, scale, seg) in self._layout.items():
            X = self.smat_stacks_single(d, v, members, r, c, scale, seg)
            for row, k in enumerate(members):
                out[k] = X[row]
        return out

    def smat_stacks_single(self, d, v, members, r, c, scale, seg):
        vals = v[seg] * scale
        X = np.zeros((len(members), d, d))
        X[:, r, c] = vals
        X[:, c, r] = vals
        return X

    def clip(self, v: np.ndarray, floors: np.ndarray) -> np.ndarray:
        """Project each block onto {X >= floor_k * I} (Frobenius-nearest)."""
        out = np.empty_like(v)
        for d, (members, r, c, scale, seg) in self._layout.items():
            X = self.smat_stacks_single(d, v, members, r, c, scale, seg)
            try:
                w, V = np.linalg.eigh(X)
            except np.linalg.LinAlgError as exc:
                raise NumericalFailure(f"eigendecomposition failed in {d}x{d} group: {exc}") from exc
            w = np.maximum(w, floors[members][:, None])
            Y = np.einsum("kij,kj,klj->kil", V, w, V)
            vals = (Y[:, r, c] + Y[:, c, r]) / (2.0 * scale)
            out[seg.reshape(-1)] = vals.reshape(-1)
        return out

    def min_eigs(self, v: np.ndarray) -> np.ndarray:
        mins = np.empty(len(self.dims))
        for d, (members, r, c, scale, seg) in self._layout.items():
            X = self.smat_stacks_single(d, v, members, r, c, scale, seg)
            try:
                w = np.linalg.eigvalsh(X)
            except np.linalg.LinAlgError as exc:
                raise NumericalFailure(f"eigendecomposition failed in {d}x{d} group: {exc}") from exc
            mins[members] = w[:, 0]
        return mins

    def block_norms(self, v: np.ndarray) -> np.ndarray:
        norms = np.empty(len(self.dims))
        for k in range(len(self.dims)):
            norms[k] = np.linalg.norm(v[self.offsets[k]:self.offsets[k + 1]])
        return norms

    def identity_vec(self, scale_per_block=None) -> np.ndarray:
        arrays = []
        for k, d in enumerate(self.dims):
            s = 1.0 if scale_per_block is None else scale_per_block[k]
            arrays.append(s * np.eye(d))
        return self.svec_blocks(arrays)


class _ProblemData:
    """Prefactorized affine geometry of one feasibility problem."""

    def __init__(self, problem: FeasibilityProblem):
        self.problem = problem
        m = problem.map
        self.vs = _SymStructure(m.var_dims)
        self.os = _SymStructure(m.out_dims)
        self.M = self._map_matrix(m)
        self.a0 = (
            self.os.svec_blocks(m.A0.arrays()) if m.A0 is not None else np.zeros(self.os.total)
        )
        if problem.equalities:
            E = np.stack([self.vs.svec_blocks(eq.coeffs.arrays()) for eq in problem.equalities])
            e = np.array([eq.target for eq in problem.equalities])
            keep = np.linalg.norm(E, axis=1) > 1e-14
            if np.any(~keep & (np.abs(e) > 1e-12)):
                raise ContractError("equality with zero functional but nonzero target")
            E, e = E[keep], e[keep]
        else:
            E = np.zeros((0, self.vs.total))
            e = np.zeros(0)
        if E.shape[0]:
            self.q_part, *_ = np.linalg.lstsq(E, e, rcond=None)
            self.Z = null_space(E)
        else:
            self.q_part = np.zeros(self.vs.total)
            self.Z = np.eye(self.vs.total)
        self.G = self.M @ self.Z
        H = np.eye(self.Z.shape[1]) + self.G.T @ self.G
        self.H_factor = cho_factor(H)
        self.c0 = self.M @ self.q_part + self.a0

    def _map_matrix(self, m: LinearMatrixMap) -> np.ndarray:
        vs, os_ = _SymStructure(m.var_dims), _SymStructure(m.out_dims)
        cols = []
        for t in range(vs.total):
            basis = np.zeros(vs.total)
            basis[t] = 1.0
            x = BlockDiagSym(vs.arrays(basis))
            y = apply_map(m, x)
            cols.append(os_.svec_blocks(y.arrays()))
        return np.column_stack(cols) if cols else np.zeros((os_.total, 0))

    def affine_project(self, q_in: np.ndarray, t_in: np.ndarray):
        rhs = self.Z.T @ (q_in - self.q_part) + self.G.T @ (t_in - self.c0)
        u = cho_solve(self.H_factor, rhs)
        q = self.q_part + self.Z @ u
        t = self.G @ u + self.c0
        return q, t


def _dykstra_stage(
    data: _ProblemData,
    q: np.ndarray,
    t: np.ndarray,
    floor: float,
    opts: SolveOptions,
    stage_iters: int,
    success_check,
):
    """One alternating-projection run at a fixed output floor.

    Returns (success, q, t, iterations_used, gap).  The returned (q, t)
    always lies on the affine set.
    """
    vs, os_ = data.vs, data.os
    psd_vars = data.problem.psd_on_variables
    var_floors = np.zeros(len(vs.dims))
    out_floors = np.full(len(os_.dims), floor)

    p_q = np.zeros_like(q)
    p_t = np.zeros_like(t)
    gap = np.inf
    gap_marks = []  # (iteration, gap) history for progress extrapolation
    it = 0
    while it < stage_iters:
        it += 1
        # cone step with Dykstra correction
        cq_in = q + p_q
        ct_in = t + p_t
        cq = vs.clip(cq_in, var_floors) if psd_vars else cq_in
        ct = os_.clip(ct_in, out_floors)
        p_q = cq_in - cq
        p_t = ct_in - ct
        # plain projection onto the affine set (affine sets need no correction)
        q_new, t_new = data.affine_project(cq, ct)
        gap = float(np.sqrt(np.sum((cq - q_new) ** 2) + np.sum((ct - t_new) ** 2)))
        move = float(np.sqrt(np.sum((q_new - q) ** 2) + np.sum((t_new - t) ** 2)))
        q, t = q_new, t_new

        if it % opts.check_every == 0 or gap <= opts.tol_feas:
            if not np.all(np.isfinite(q)) or not np.all(np.isfinite(t)):
                raise NumericalFailure("iterate became non-finite during solve")
            if success_check(q, t):
                return True, q, t, it, gap
            scale = 1.0 + float(np.sqrt(np.sum(q**2) + np.sum(t**2)))
            if move <= opts.move_tol * scale:
                return False, q, t, it, gap  # converged to a non-feasible limit
            gap_marks.append((it, gap))
            if len(gap_marks) >= 8 and it >= opts.min_stage_iters:
                it0, g0 = gap_marks[-8]
                if gap >= g0 * (1.0 - 1e-9):
                    return False, q, t, it, gap  # no measurable progress
                # optimistic linear-rate extrapolation of iterations still needed
                rate = (gap / g0) ** (1.0 / (it - it0))
                needed = np.log(max(opts.tol_feas, 1e-300) / gap) / np.log(rate)
                if needed > 4 * (stage_iters - it):
                    return False, q, t, it, gap
    return False, q, t, it, gap


def solve(problem: FeasibilityProblem, opts: SolveOptions | None = None) -> SolveResult:
    """Decide feasibility of one side of a theorem of alternatives.

    Primal: seeks x with lambda_min(map(x) + A0) >= epsilon*(1 + ||map(x)+A0||_F),
    scanning a decreasing schedule of positive-definiteness floors.
    Dual: seeks PSD variable blocks meeting the equalities with all output
    blocks PSD within tol_feas.

    Success is always re-audited on the returned blocks through
    ``apply_map`` and fresh eigendecompositions; the projection iteration
    itself is never trusted.
    """
    opts = opts or SolveOptions()
    t_start = time.perf_counter()
    data = _ProblemData(problem)
    vs, os_ = data.vs, data.os

    if problem.side == "primal":
        a0_norm = float(np.linalg.norm(data.a0))
        s_ref = 1.0 + a0_norm
        eps_abs = opts.epsilon * s_ref

        def success(qv, tv):
            lam = float(np.min(os_.min_eigs(tv)))
            return lam >= opts.epsilon * (1.0 + float(np.linalg.norm(tv)))

        floors = [f * s_ref for f in (0.3, 0.03, 3e-3, 3e-4, 3e-5)]
        floors = [f for f in floors if f > 4 * eps_abs] + [4 * eps_abs]
        q = vs.identity_vec()
    else:

        def success(qv, tv):
            vmins = vs.min_eigs(qv)
            vnorms = vs.block_norms(qv)
            if np.any(vmins < -opts.tol_feas * (1.0 + vnorms)):
                return False
            omins = os_.min_eigs(tv)
            onorms = os_.block_norms(tv)
            return bool(np.all(omins >= -opts.tol_feas * (1.0 + onorms)))

        floors = [0.0]
        total_dim = sum(vs.dims)
        q = vs.identity_vec([1.0 / total_dim] * len(vs.dims))

    q, t = data.affine_project(q, data.M @ q + data.a0)

    budget = opts.max_iters
    used = 0
    feasible = False
    gap = np.inf
    for idx, floor in enumerate(floors):
        remaining_stages = len(floors) - idx
        stage_iters = max(opts.min_stage_iters, (budget - used) // remaining_stages)
        stage_iters = min(stage_iters, budget - used)
        if stage_iters <= 0:
            break
        feasible, q, t, it, gap = _dykstra_stage(
            data, q, t, floor, opts, stage_iters, success
        )
        used += it
        if feasible:
            break

    # independent re-audit of the final affine point through apply_map
    blocks = BlockDiagSym(vs.arrays(q))
    evaluated = apply_map(problem.map, blocks)
    out_arrays = evaluated.arrays()
    if problem.map.A0 is not None:
        out_arrays = [o + a for o, a in zip(out_arrays, problem.map.A0.arrays())]
    outputs = BlockDiagSym(out_arrays)

    out_min = outputs.min_eig()
    out_norm = outputs.frobenius()
    var_min = blocks.min_eig()
    eq_resid = 0.0
    for eqc in problem.equalities:
        val = sum(
            float(np.sum(c.array * b.array)) for c, b in zip(eqc.coeffs.blocks, blocks.blocks)
        )
        eq_resid = max(eq_resid, abs(val - eqc.target))

    if problem.side == "primal":
        audited = out_min >= opts.epsilon * (1.0 + out_norm)
    else:
        var_ok = all(
            b.min_eig() >= -opts.tol_feas * (1.0 + b.frobenius()) for b in blocks.blocks
        )
        out_ok = all(
            o.min_eig() >= -opts.tol_feas * (1.0 + o.frobenius()) for o in outputs.blocks
        )
        audited = var_ok and out_ok and eq_resid <= 10 * opts.tol_feas

    feasible = feasible and audited
    residuals = {
        "min_output_eig": out_min,
        "min_variable_eig": var_min,
        "equality_residual": eq_resid,
        "gap": float(gap),
    }
    return SolveResult(
        feasible=feasible,
        blocks=blocks if feasible else None,
        outputs=outputs if feasible else None,
        residuals=residuals,
        iterations=used,
        wall_time=time.perf_counter() - t_start,
    )
