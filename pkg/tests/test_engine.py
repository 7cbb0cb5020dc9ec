import numpy as np
import pytest

from cone_lpv import (
    BlockDiagSym,
    ContractError,
    Equality,
    FeasibilityProblem,
    LinearMatrixMap,
    MapTerm,
    SolveOptions,
    StructureMismatch,
    apply_adjoint,
    apply_map,
    inner_product,
    solve,
)
from conftest import random_symmetric


def identity_map(n):
    return LinearMatrixMap((n,), (n,), (MapTerm(0, 0, 0.5, np.eye(n), np.eye(n)),))


def random_map(rng, max_blocks=3, max_dim=3, n_terms=6):
    var_dims = tuple(rng.randint(1, max_dim + 1) for _ in range(rng.randint(1, max_blocks + 1)))
    out_dims = tuple(rng.randint(1, max_dim + 1) for _ in range(rng.randint(1, max_blocks + 1)))
    terms = []
    for _ in range(n_terms):
        ob = rng.randint(len(out_dims))
        vb = rng.randint(len(var_dims))
        L = rng.standard_normal((out_dims[ob], var_dims[vb]))
        R = rng.standard_normal((var_dims[vb], out_dims[ob]))
        terms.append(MapTerm(ob, vb, rng.uniform(-2, 2), L, R))
    return LinearMatrixMap(var_dims, out_dims, tuple(terms))


def random_blocks(rng, dims):
    return BlockDiagSym([random_symmetric(rng, d) for d in dims])


class TestApplyMap:
    def test_identity_term(self, rng):
        m = identity_map(3)
        x = BlockDiagSym([random_symmetric(rng, 3)])
        y = apply_map(m, x)
        assert np.allclose(y.blocks[0].array, x.blocks[0].array, atol=1e-14)

    def test_congruence_term(self, rng):
        A = rng.standard_normal((3, 3))
        m = LinearMatrixMap((3,), (3,), (MapTerm(0, 0, 0.5, A.T, A),))
        X = random_symmetric(rng, 3)
        y = apply_map(m, BlockDiagSym([X]))
        assert np.allclose(y.blocks[0].array, A.T @ X @ A, atol=1e-12)

    def test_one_sided_term_symmetrizes(self, rng):
        # s=1, L=A^T, R=I contributes A^T P + P A
        A = rng.standard_normal((2, 2))
        m = LinearMatrixMap((2,), (2,), (MapTerm(0, 0, 1.0, A.T, np.eye(2)),))
        P = random_symmetric(rng, 2)
        y = apply_map(m, BlockDiagSym([P]))
        assert np.allclose(y.blocks[0].array, A.T @ P + P @ A, atol=1e-12)

    def test_structure_mismatch(self):
        m = identity_map(2)
        with pytest.raises(StructureMismatch):
            apply_map(m, BlockDiagSym([np.eye(3)]))

    def test_term_conformance_checked(self):
        with pytest.raises(ContractError):
            LinearMatrixMap((2,), (2,), (MapTerm(0, 0, 1.0, np.eye(3), np.eye(2)),))

    def test_a0_structure_checked(self):
        with pytest.raises(StructureMismatch):
            LinearMatrixMap(
                (2,), (2,),
                (MapTerm(0, 0, 0.5, np.eye(2), np.eye(2)),),
                BlockDiagSym([np.eye(3)]),
            )


class TestApplyAdjoint:
    def test_identity_map_self_adjoint(self, rng):
        m = identity_map(3)
        r = BlockDiagSym([random_symmetric(rng, 3)])
        back = apply_adjoint(m, r)
        assert np.allclose(back.blocks[0].array, r.blocks[0].array, atol=1e-14)

    def test_scalar_single_vertex_expansion(self):
        # map P -> ((1-a^2) P, P): adjoint of (R1, R2) is R1 - a^2 R1 + R2
        a = 0.7
        one = np.eye(1)
        m = LinearMatrixMap(
            (1,), (1, 1),
            (
                MapTerm(0, 0, 0.5, one, one),
                MapTerm(0, 0, -0.5, a * one, a * one),
                MapTerm(1, 0, 0.5, one, one),
            ),
        )
        r1, r2 = 1.3, -0.4
        back = apply_adjoint(m, BlockDiagSym([r1 * one, r2 * one]))
        assert back.blocks[0].array[0, 0] == pytest.approx(r1 - a * a * r1 + r2, rel=1e-14)

    def test_defining_identity_random_triples(self, rng):
        for _ in range(200):
            m = random_map(rng)
            x = random_blocks(rng, m.var_dims)
            r = random_blocks(rng, m.out_dims)
            lhs = inner_product(apply_map(m, x), r)
            rhs = inner_product(x, apply_adjoint(m, r))
            scale = 1.0 + x.frobenius() * r.frobenius()
            assert abs(lhs - rhs) <= 1e-10 * scale

    def test_structure_mismatch(self):
        m = identity_map(2)
        with pytest.raises(StructureMismatch):
            apply_adjoint(m, BlockDiagSym([np.eye(3)]))


def scalar_stability_primal(a):
    one = np.eye(1)
    m = LinearMatrixMap(
        (1,), (1, 1),
        (
            MapTerm(0, 0, 0.5, one, one),
            MapTerm(0, 0, -0.5, a * one, a * one),
            MapTerm(1, 0, 0.5, one, one),
        ),
    )
    return FeasibilityProblem("primal", m)


def scalar_stability_dual(a):
    one = np.eye(1)
    m = LinearMatrixMap(
        (1,), (1,),
        (MapTerm(0, 0, 0.5, a * one, a * one), MapTerm(0, 0, -0.5, one, one)),
    )
    eq = Equality(BlockDiagSym([one]), 1.0)
    return FeasibilityProblem("dual", m, (eq,), psd_on_variables=True)


class TestSolve:
    def test_trivial_primal_feasible(self):
        res = solve(scalar_stability_primal(0.5))
        assert res.feasible
        P = res.blocks.blocks[0].array[0, 0]
        assert P > 0
        assert (1 - 0.25) * P > 0

    def test_trivial_primal_infeasible(self):
        res = solve(scalar_stability_primal(1.1), SolveOptions(max_iters=20_000))
        assert not res.feasible

    def test_trivial_dual_feasible(self):
        res = solve(scalar_stability_dual(1.1))
        assert res.feasible
        Q = res.blocks.blocks[0].array[0, 0]
        assert Q == pytest.approx(1.0, abs=1e-9)  # trace normalization
        assert res.outputs.blocks[0].array[0, 0] == pytest.approx(0.21, abs=1e-8)

    def test_trivial_dual_infeasible(self):
        res = solve(scalar_stability_dual(0.5), SolveOptions(max_iters=20_000))
        assert not res.feasible

    def test_dual_equalities_hold_exactly(self):
        res = solve(scalar_stability_dual(1.3))
        assert res.residuals["equality_residual"] <= 1e-12

    def test_deterministic_bitwise(self):
        first = solve(scalar_stability_dual(1.1))
        second = solve(scalar_stability_dual(1.1))
        for a, b in zip(first.blocks.blocks, second.blocks.blocks):
            assert np.array_equal(a.array, b.array)

    def test_primal_rejects_psd_on_variables(self):
        m = identity_map(2)
        with pytest.raises(ContractError):
            FeasibilityProblem("primal", m, psd_on_variables=True)

    def test_equality_structure_checked(self):
        m = identity_map(2)
        eq = Equality(BlockDiagSym([np.eye(3)]), 1.0)
        with pytest.raises(StructureMismatch):
            FeasibilityProblem("dual", m, (eq,), psd_on_variables=True)

    def test_mixed_block_dims(self, rng):
        # one 2x2 and one 1x1 variable block feeding a 2x2 and a 1x1 output
        L1 = rng.standard_normal((2, 2))
        m = LinearMatrixMap(
            (2, 1), (2, 1),
            (
                MapTerm(0, 0, 0.5, L1, L1.T),
                MapTerm(1, 1, 0.5, np.eye(1), np.eye(1)),
                MapTerm(0, 0, 0.25, np.eye(2), np.eye(2)),
            ),
        )
        eq = Equality(BlockDiagSym([np.eye(2), np.eye(1)]), 1.0)
        problem = FeasibilityProblem("dual", m, (eq,), psd_on_variables=True)
        res = solve(problem)
        assert res.feasible  # PSD image of PSD blocks, easily feasible
        total = sum(np.trace(b.array) for b in res.blocks.blocks)
        assert total == pytest.approx(1.0, abs=1e-9)
