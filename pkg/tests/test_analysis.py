"""Tests for scenario construction, robustness reports, and scaling studies."""

import numpy as np
import pytest

from eulerdd.analysis import (SIGMA, builtin_scenarios, carr_purcell_scenario,
                              collective, fault_fidelity_comparison,
                              get_scenario, heisenberg,
                              noise_suppression_check, pauli_on,
                              pauli_scenario, random_hermitian,
                              robustness_report, scaling_study, spin_flip_scenario,
                              symmetric_s3_scenario, verify_theorem)
from eulerdd.cayley import validate_path
from eulerdd.group_theory import pi_G
from eulerdd.pulses import FaultModel, piecewise_profile

SX, SY, SZ = SIGMA["x"], SIGMA["y"], SIGMA["z"]


class TestBuiltinScenarios:
    def test_catalog(self):
        scs = builtin_scenarios()
        assert [s.name for s in scs] == ["carr-purcell", "pauli", "spin-flip",
                                         "symmetric-s3"]
        assert [s.expected_cycle_length for s in scs] == [2, 8, 8, 12]

    def test_pauli_multi_qubit_lengths(self):
        for n in (1, 2):
            sc = pauli_scenario(n)
            assert len(sc.path) == n * 2 ** (2 * n + 1)

    def test_pauli_cap(self):
        with pytest.raises(ValueError):
            pauli_scenario(4)

    def test_spin_flip_odd_n_projective(self):
        sc = spin_flip_scenario(3)
        assert sc.group.order == 4
        assert len(sc.path) == 8
        sc.rep.validate()

    def test_reference_paths_validate(self):
        for sc in builtin_scenarios():
            if sc.reference_path is not None:
                ok, diag = validate_path(sc.graph, sc.reference_path)
                assert ok, f"{sc.name}: {diag}"

    def test_get_scenario(self):
        assert get_scenario("pauli", 2).n_qubits == 2
        with pytest.raises(KeyError):
            get_scenario("nope")

    def test_all_profiles_in_algebra(self):
        for sc in builtin_scenarios():
            assert all(p.in_algebra for p in sc.profiles.values())

    def test_generic_drift_unit_norm(self):
        for sc in builtin_scenarios():
            drift = sc.generic_drift(env_dim=2, seed=1)
            drift.validate()
            assert np.linalg.norm(drift.total(), 2) == pytest.approx(1.0)


class TestVerifyTheorem:
    def test_all_builtins_pass(self):
        for sc in builtin_scenarios():
            rep = verify_theorem(sc, trials=20, tol=1e-7, seed=0)
            assert rep.hypothesis_ok and rep.passed, sc.name

    def test_out_of_algebra_profile_skips(self):
        sc = carr_purcell_scenario()
        bad = piecewise_profile(sc.group.generators[0], sc.rep,
                                [(0.5, np.pi * SZ), (0.5, np.pi * SY)])
        sc.profiles[0] = bad
        rep = verify_theorem(sc, trials=5)
        assert rep.skipped and not rep.hypothesis_ok


class TestRobustnessReport:
    def test_carr_purcell_transverse_faults_safe(self):
        sc = carr_purcell_scenario()
        for u in (SY, SZ):
            rob = robustness_report(sc, FaultModel.constant([0], [0.1 * u], sc.rep))
            assert rob.residual_norm <= 1e-9
            assert all(b.classification == "noiseless" for b in rob.blocks)

    def test_carr_purcell_x_fault_central_nonzero(self):
        sc = carr_purcell_scenario()
        rob = robustness_report(sc, FaultModel.constant([0], [0.1 * SX], sc.rep))
        assert rob.residual_norm > 1e-3
        assert rob.center_residual <= 1e-9
        assert rob.commutant_residual <= 1e-9

    def test_pauli_any_fault_eliminated(self):
        sc = pauli_scenario(1)
        rng = np.random.default_rng(8)
        for _ in range(5):
            rates = []
            for _ in range(2):
                m = random_hermitian(2, rng)
                rates.append(m - np.trace(m) / 2 * np.eye(2))
            rob = robustness_report(sc, FaultModel.constant([0, 1], rates, sc.rep))
            assert rob.residual_norm <= 1e-8

    def test_s3_blocks_protected_dimension_factor(self):
        sc = symmetric_s3_scenario()
        rng = np.random.default_rng(9)
        # arbitrary (not in-algebra) fault: residual stays in the commutant,
        # so the dimension factors remain clean
        rates = [random_hermitian(8, rng), random_hermitian(8, rng)]
        rob = robustness_report(sc, FaultModel.constant([0, 1], rates, sc.rep))
        assert rob.commutant_residual <= 1e-8
        for b in rob.blocks:
            assert b.classification in ("noiseless", "protected subspace",
                                        "protected dimension factor")


class TestNoiseSuppression:
    def test_spin_flip_full_suppression(self):
        sc = spin_flip_scenario(2)
        rep = noise_suppression_check(sc)
        assert rep.full_suppression
        assert all(e.projected_norm <= 1e-12 for e in rep.entries)

    def test_s3_collective_noise_on_dimension_factor(self):
        sc = symmetric_s3_scenario()
        rep = noise_suppression_check(sc)
        # collective noise survives symmetrization but never touches the
        # dimension factor of the two-dimensional block
        assert not rep.full_suppression
        from eulerdd.group_theory import decompose_irreps
        decomp = decompose_irreps(sc.rep, seed=0)
        blk = next(b for b in decomp.blocks if b.dimension == 2)
        for _, S in sc.noise_generators:
            avg = pi_G(sc.rep, S)
            B = decomp.block_of(avg, blk)
            n_J, d_J = blk.multiplicity, blk.dimension
            N = B.reshape(n_J, d_J, n_J, d_J).trace(axis1=1, axis2=3) / d_J
            assert np.linalg.norm(B - np.kron(N, np.eye(d_J))) <= 1e-8

    def test_spin_flip_n2_abelian_algebra(self):
        sc = spin_flip_scenario(2)
        mats = sc.rep.matrices
        worst = max(np.linalg.norm(a @ b - b @ a) for a in mats for b in mats)
        assert worst <= 1e-12


class TestScalingStudy:
    def test_carr_purcell_slope_two(self):
        sc = carr_purcell_scenario()
        study = scaling_study(sc, [0.02, 0.01, 0.005], cycles=4, seed=3)
        assert study.monotonic
        assert study.slope == pytest.approx(2.0, abs=0.2)

    def test_zero_drift_flagged(self):
        from eulerdd.dynamics import DriftModel
        sc = carr_purcell_scenario()
        drift = DriftModel(H_S=np.zeros((2, 2)), H_E=np.zeros((1, 1)),
                           couplings=())
        study = scaling_study(sc, [0.02, 0.01], drift=drift)
        assert not np.isfinite(study.slope) or study.notice

    def test_bangbang_also_slope_two(self):
        sc = carr_purcell_scenario()
        study = scaling_study(sc, [0.02, 0.01, 0.005], cycles=4, seed=3,
                              kind="bangbang")
        assert study.slope == pytest.approx(2.0, abs=0.3)


class TestFidelityComparison:
    def test_decoupling_beats_free_evolution(self):
        sc = pauli_scenario(1)
        fault = FaultModel.constant([0, 1], [0.3 * SY, 0.2 * SX], sc.rep)
        err_dd, err_free = fault_fidelity_comparison(sc, fault, 0.01, 10, seed=5)
        assert err_free >= 10 * err_dd


def test_operator_helpers():
    np.testing.assert_allclose(pauli_on(2, 0, "x"), np.kron(SX, np.eye(2)))
    np.testing.assert_allclose(collective(2, "z"), np.kron(SZ, SZ))
    # exchange coupling has the swap spectrum {+1 triplet, -3 singlet}
    evals = np.linalg.eigvalsh(heisenberg(2, 0, 1))
    np.testing.assert_allclose(sorted(evals), [-3, 1, 1, 1], atol=1e-12)
