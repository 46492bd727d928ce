"""Tests for groups, representations, projectors, and block structure."""

import numpy as np
import pytest

from eulerdd.group_theory import (GroupClosureError, InvalidGeneratorError,
                                  NotNormalSubgroupError, ShapeError,
                                  center_basis, close_group, commutant_basis,
                                  decompose_irreps, equal_up_to_phase, pi_G,
                                  quotient_check)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def random_hermitian(d, rng):
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (m + m.conj().T) / 2


def span_dimension(mats, tol=1e-10):
    stack = np.array([m.ravel() for m in mats])
    s = np.linalg.svd(stack, compute_uv=False)
    return int(np.sum(s > tol * s[0]))


class TestCloseGroup:
    def test_z2_from_sigma_x(self):
        group, rep = close_group([SX], max_order=8)
        assert group.order == 2
        assert equal_up_to_phase(rep.matrices[0], I2)
        assert equal_up_to_phase(rep.matrices[1], SX)
        group.validate()
        rep.validate()

    def test_trivial_group(self):
        group, rep = close_group([I2])
        assert group.order == 1
        group.validate()

    def test_pauli_group_up_to_phase(self):
        group, rep = close_group([SX, SZ])
        assert group.order == 4
        group.validate()
        rep.validate()

    def test_s3_order(self):
        # permutation matrices for (1 2) and (1 2 3)
        t = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)
        c = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)
        group, rep = close_group([t, c])
        assert group.order == 6
        group.validate()

    def test_non_unitary_rejected(self):
        with pytest.raises(InvalidGeneratorError):
            close_group([np.array([[1, 1], [0, 1]], dtype=complex)])

    def test_closure_cap(self):
        theta = 2 * np.pi / 97
        rot = np.array([[np.exp(1j * theta), 0], [0, 1]], dtype=complex)
        with pytest.raises(GroupClosureError):
            close_group([rot], max_order=16)


class TestPiG:
    def setup_method(self):
        self.z2_group, self.z2 = close_group([SX])
        self.pauli_group, self.pauli = close_group([SX, SZ])

    def test_sigma_z_killed_by_spin_flip(self):
        np.testing.assert_allclose(pi_G(self.z2, SZ), np.zeros((2, 2)), atol=1e-12)

    def test_pauli_maximal_averaging(self):
        for u in (SX, SY, SZ):
            np.testing.assert_allclose(pi_G(self.pauli, u), np.zeros((2, 2)),
                                       atol=1e-12)

    def test_identity_invariant(self):
        np.testing.assert_allclose(pi_G(self.pauli, I2), I2, atol=1e-12)

    def test_shape_error(self):
        with pytest.raises(ShapeError):
            pi_G(self.pauli, np.eye(3))

    def test_idempotent_and_commutant_valued(self):
        rng = np.random.default_rng(0)
        for rep in (self.z2, self.pauli):
            for _ in range(100):
                X = random_hermitian(2, rng)
                p = pi_G(rep, X)
                assert np.linalg.norm(pi_G(rep, p) - p) <= 1e-10
                for g in rep.matrices:
                    assert np.linalg.norm(p @ g - g @ p) <= 1e-10

    def test_trace_and_hermiticity_preserved(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            X = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            p = pi_G(self.pauli, X)
            assert abs(np.trace(p) - np.trace(X)) <= 1e-12
            h = random_hermitian(2, rng)
            ph = pi_G(self.pauli, h)
            assert np.linalg.norm(ph - ph.conj().T) <= 1e-12


class TestCommutantAndCenter:
    def test_pauli_commutant_is_scalar(self):
        _, rep = close_group([SX, SZ])
        basis = commutant_basis(rep)
        assert len(basis) == 1
        assert equal_up_to_phase(basis[0] * np.sqrt(2), I2)

    def test_trivial_group_full_space(self):
        _, rep = close_group([I2])
        assert len(commutant_basis(rep)) == 4

    def test_z2_commutant(self):
        _, rep = close_group([SX])
        basis = commutant_basis(rep)
        assert len(basis) == 2
        # span must contain I and sigma_x
        stack = np.array([b.ravel() for b in basis])
        for m in (I2, SX):
            v = m.ravel()
            resid = v - stack.T @ (stack.conj() @ v)
            assert np.linalg.norm(resid) <= 1e-10

    def test_pauli_center_scalar(self):
        _, rep = close_group([SX, SZ])
        assert len(center_basis(rep)) == 1

    def test_abelian_center_equals_algebra(self):
        _, rep = close_group([SX])
        assert len(center_basis(rep)) == 2

    def test_trivial_group_center(self):
        # algebra of the trivial group is span{I}, so the center is too
        _, rep = close_group([np.eye(3, dtype=complex)])
        cen = center_basis(rep)
        assert len(cen) == 1
        assert equal_up_to_phase(cen[0] * np.sqrt(3), np.eye(3))

    def test_basis_orthonormal(self):
        _, rep = close_group([SX])
        basis = commutant_basis(rep)
        gram = np.array([[np.vdot(a.ravel(), b.ravel()) for b in basis]
                         for a in basis])
        np.testing.assert_allclose(gram, np.eye(len(basis)), atol=1e-10)


class TestDecomposeIrreps:
    def test_pauli_irreducible(self):
        _, rep = close_group([SX, SZ])
        dec = decompose_irreps(rep)
        assert len(dec.blocks) == 1
        blk = dec.blocks[0]
        assert (blk.multiplicity, blk.dimension) == (1, 2)

    def test_basis_change_unitary_and_block_structure(self):
        from eulerdd.analysis import swap_gate
        g1 = swap_gate(3, 0, 1)
        g2 = swap_gate(3, 0, 1) @ swap_gate(3, 1, 2)
        _, rep = close_group([g1, g2])
        dec = decompose_irreps(rep)
        V = dec.basis_change
        np.testing.assert_allclose(V.conj().T @ V, np.eye(8), atol=1e-10)
        dims = sorted((b.dimension, b.multiplicity) for b in dec.blocks)
        assert dims == [(1, 4), (2, 2)]
        assert sum(b.multiplicity * b.dimension for b in dec.blocks) == 8
        # every group element is block-diagonal as I(n) ⊗ Mat(d)
        for g in rep.matrices:
            rot = V.conj().T @ g @ V
            pos = 0
            for blk in dec.blocks:
                n, d = blk.multiplicity, blk.dimension
                size = n * d
                B = rot[pos:pos + size, pos:pos + size]
                # off-block entries vanish
                assert np.linalg.norm(rot[pos:pos + size, pos + size:]) <= 1e-9
                assert np.linalg.norm(rot[pos + size:, pos:pos + size]) <= 1e-9
                # I ⊗ M structure: all diagonal d x d sub-blocks equal,
                # off-diagonal sub-blocks vanish
                B4 = B.reshape(n, d, n, d)
                for i in range(n):
                    for j in range(n):
                        if i == j:
                            assert np.linalg.norm(B4[i, :, i, :] - B4[0, :, 0, :]) <= 1e-8
                        else:
                            assert np.linalg.norm(B4[i, :, j, :]) <= 1e-8
                pos += size

    def test_double_commutant_dimensions(self):
        from eulerdd.analysis import collective
        for gens in ([SX], [SX, SZ], [collective(2, "x"), collective(2, "z")]):
            _, rep = close_group(gens)
            dec = decompose_irreps(rep)
            com_dim = len(commutant_basis(rep))
            alg_dim = span_dimension(rep.matrices)
            assert com_dim == sum(b.multiplicity ** 2 for b in dec.blocks)
            assert alg_dim == sum(b.dimension ** 2 for b in dec.blocks)

    def test_spin_flip_n2_four_one_dim_blocks(self):
        from eulerdd.analysis import collective
        _, rep = close_group([collective(2, "x"), collective(2, "z")])
        dec = decompose_irreps(rep)
        assert [(b.multiplicity, b.dimension) for b in dec.blocks] == [(1, 1)] * 4


class TestQuotientCheck:
    def test_pauli_mod_x(self):
        group, rep = close_group([SX, SZ])
        xi = group.generators[0]
        assert quotient_check(rep, {0, xi}, SX)

    def test_trivial_subgroup(self):
        group, rep = close_group([SX, SZ])
        rng = np.random.default_rng(2)
        assert quotient_check(rep, {0}, random_hermitian(2, rng))

    def test_z2xz2_factor(self):
        from eulerdd.analysis import collective
        group, rep = close_group([collective(2, "x"), collective(2, "z")])
        xi = group.generators[0]
        # X-invariant operator
        X = collective(2, "x")
        assert quotient_check(rep, {0, xi}, X + 2 * np.eye(4))

    def test_not_normal_rejected(self):
        from eulerdd.analysis import swap_gate
        g1 = swap_gate(3, 0, 1)
        g2 = swap_gate(3, 0, 1) @ swap_gate(3, 1, 2)
        group, rep = close_group([g1, g2])
        # the subgroup generated by a transposition is not normal in S3
        t = group.generators[0]
        sub = {0, t}
        with pytest.raises(NotNormalSubgroupError):
            quotient_check(rep, sub, np.eye(8))

    def test_non_invariant_operator_rejected(self):
        group, rep = close_group([SX, SZ])
        xi = group.generators[0]
        with pytest.raises(ValueError):
            quotient_check(rep, {0, xi}, SZ)
