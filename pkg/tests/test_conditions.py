import numpy as np
import pytest

from cone_lpv import (
    ContractError,
    Outcome,
    PolytopicSystem,
    SolveOptions,
    analyze,
    build,
    solve,
    spectral_radius,
    verify_existence,
    verify_nonexistence,
)
from cone_lpv.conditions import certificate_from_solution
from cone_lpv.data import scalar_system


FAST = SolveOptions(max_iters=60_000)


class TestBuild:
    def test_scalar_stability_primal_shape(self):
        problem = build(scalar_system(0.7), "stability", "primal")
        assert problem.side == "primal"
        assert problem.map.var_dims == (1,)
        assert problem.map.out_dims == (1, 1)  # Stein block plus positivity block
        assert not problem.psd_on_variables

    def test_two_vertex_dual_shape(self, scaled_pair):
        problem = build(scaled_pair, "stability", "dual")
        assert problem.map.var_dims == (2, 2, 2, 2)  # Q_11, Q_12, Q_21, Q_22
        assert problem.map.out_dims == (2, 2)  # one combined block per i
        assert problem.psd_on_variables
        assert len(problem.equalities) == 1  # trace normalization only

    def test_cascade_dual_certificate_kills_input_directions(self, cascade):
        problem = build(cascade, "stabilizability", "dual")
        res = solve(problem, FAST)
        assert res.feasible
        cert = certificate_from_solution(cascade, "stabilizability", "dual", res)
        Qsum = sum(m.array for m in cert.blocks.values())
        B = cascade.B
        assert float(B.T @ Qsum @ B) <= 1e-12  # structural zero on the input direction

    def test_missing_C_rejected(self):
        with pytest.raises(ContractError):
            build(scalar_system(0.5), "detectability", "primal")

    def test_missing_B_rejected(self):
        with pytest.raises(ContractError):
            build(scalar_system(0.5), "stabilizability", "dual")

    def test_unknown_analysis_rejected(self, scaled_pair):
        with pytest.raises(ContractError):
            build(scaled_pair, "chaos", "primal")

    def test_invalid_system_rejected(self):
        bad = PolytopicSystem((np.eye(2), np.zeros((3, 3))))
        with pytest.raises(ContractError):
            build(bad, "stability", "primal")


class TestScalarOracles:
    @pytest.mark.parametrize("a", [0.0, 0.5, -0.5, 0.99])
    def test_stable_scalars(self, a):
        verdict = analyze(scalar_system(a), "stability", FAST)
        assert verdict.outcome is Outcome.EXISTENCE_PROVEN

    @pytest.mark.parametrize("a", [1.0, 1.1, -1.2])
    def test_unstable_scalars(self, a):
        verdict = analyze(scalar_system(a), "stability", FAST)
        assert verdict.outcome is Outcome.NONEXISTENCE_PROVEN


class TestSingleVertexMatchesSpectralRadius:
    def test_hundred_random_instances(self, rng):
        decided = 0
        for k in range(100):
            if k % 2 == 0:
                A = np.array([[rng.uniform(-1.6, 1.6)]])
            else:
                A = rng.uniform(-1.2, 1.2, (2, 2))
            rho = spectral_radius(A)
            if abs(rho - 1.0) < 1e-2:
                continue  # strictness margin makes the boundary undecidable
            verdict = analyze(PolytopicSystem((A,)), "stability", FAST)
            if rho < 1.0:
                assert verdict.outcome is Outcome.EXISTENCE_PROVEN, (k, rho)
            else:
                assert verdict.outcome is Outcome.NONEXISTENCE_PROVEN, (k, rho)
            decided += 1
        assert decided >= 80


class TestCtCqlf:
    def test_single_hurwitz_mode_feasible(self):
        A = np.array([[-1.0, 0.3], [0.0, -0.7]])
        verdict = analyze(PolytopicSystem((A,)), "ct_cqlf", FAST)
        assert verdict.outcome is Outcome.EXISTENCE_PROVEN

    def test_rotation_mode_has_cone(self):
        A = np.array([[0.0, 1.0], [-1.0, 0.0]])
        system = PolytopicSystem((A,))
        verdict = analyze(system, "ct_cqlf", FAST)
        assert verdict.outcome is Outcome.NONEXISTENCE_PROVEN
        # the handcrafted certificate R_1 = I, R_0 = 0 is admissible too
        from cone_lpv import NonexistenceCertificate, SymMatrix

        handmade = NonexistenceCertificate(
            "ct_cqlf", {(1, 0): SymMatrix(np.eye(2)), (0, 0): SymMatrix(np.zeros((2, 2)))}
        )
        assert verify_nonexistence(system, handmade).passed


class TestAnalyzeInvariants:
    def test_vertex_permutation_keeps_outcome(self, rng):
        for _ in range(6):
            verts = (rng.uniform(-1.2, 1.2, (2, 2)), rng.uniform(-1.2, 1.2, (2, 2)))
            v1 = analyze(PolytopicSystem(verts), "stability", FAST)
            v2 = analyze(PolytopicSystem(verts[::-1]), "stability", FAST)
            assert v1.outcome is v2.outcome

    def test_contraction_scaling_keeps_existence(self, rng):
        found = 0
        for _ in range(20):
            verts = (rng.uniform(-0.6, 0.6, (2, 2)), rng.uniform(-0.6, 0.6, (2, 2)))
            system = PolytopicSystem(verts)
            v1 = analyze(system, "stability", FAST)
            if v1.outcome is not Outcome.EXISTENCE_PROVEN:
                continue
            shrunk = PolytopicSystem(tuple(0.8 * A for A in verts))
            v2 = analyze(shrunk, "stability", FAST)
            assert v2.outcome is Outcome.EXISTENCE_PROVEN
            found += 1
            if found >= 5:
                break
        assert found >= 3

    def test_certificates_always_reverified(self, scaled_pair):
        verdict = analyze(scaled_pair, "stability", FAST)
        assert verdict.outcome is Outcome.NONEXISTENCE_PROVEN
        assert verify_nonexistence(scaled_pair, verdict.certificate).passed

    def test_analyze_deterministic(self):
        system = scalar_system(1.1)
        v1 = analyze(system, "stability", FAST)
        v2 = analyze(system, "stability", FAST)
        q1 = v1.certificate.blocks[(1, 1)].array
        q2 = v2.certificate.blocks[(1, 1)].array
        assert np.array_equal(q1, q2)


class TestDetectability:
    def test_zero_C_unstable_scalar(self):
        verdict = analyze(scalar_system(1.1, C=np.zeros((1, 1))), "detectability", FAST)
        assert verdict.outcome is Outcome.NONEXISTENCE_PROVEN

    @pytest.mark.parametrize("a", [0.5, 1.1, 3.0])
    def test_identity_C_always_detectable(self, a):
        verdict = analyze(scalar_system(a, C=np.eye(1)), "detectability", FAST)
        assert verdict.outcome is Outcome.EXISTENCE_PROVEN


class TestStabilizability:
    def test_outcome_name_is_guarded(self, rng):
        # a feasible stabilizability primal must not claim ExistenceProven
        system = PolytopicSystem(
            (np.array([[0.5, 0.1], [0.0, 0.4]]), np.array([[0.3, 0.0], [0.2, 0.6]])),
            B=np.array([[1.0], [0.0]]),
        )
        verdict = analyze(system, "stabilizability", FAST)
        assert verdict.outcome is Outcome.NECESSARY_CONDITION_FEASIBLE

    def test_cascade_nonexistence(self, cascade):
        verdict = analyze(cascade, "stabilizability")
        assert verdict.outcome is Outcome.NONEXISTENCE_PROVEN
        assert verify_nonexistence(cascade, verdict.certificate).passed
