"""Adapted rational basis, its factorization, and the Cuntz isometry family."""

import numpy as np
import pytest

from blaschkeops import (
    CircleGrid,
    TMBasis,
    cons_residual,
    cuntz_family,
    factor_parts,
    factorization_residual,
    fourier_coefficients,
    gram_residual,
    inner_product_residual,
    l2_inner,
    module_isometry,
    operator_norm,
    quotient_generators,
    sample,
    tail_compactness_profile,
    tm_element,
)
from blaschkeops.hardy import _matrix_norm, composition_matrix


class TestElements:
    def test_first_element_is_constant_one(self, half, spiral):
        for product in (half, spiral):
            basis = TMBasis(product)
            z = np.array([0.2 + 0.1j, 1j, -1.0])
            np.testing.assert_allclose(tm_element(basis, 0, z), 1.0)

    def test_monomial_basis_is_monomials(self, cube):
        basis = TMBasis(cube)
        z = np.exp(1j * np.linspace(0, 2, 9))
        for l in (0, 1, 4, 7):
            np.testing.assert_allclose(tm_element(basis, l, z), z**l, atol=1e-13)

    def test_half_second_element_formula(self, half):
        # alpha_1 = 1, beta_1 = 0.5: e_1 = sqrt(0.75) z / (1 - 0.5 z)
        basis = TMBasis(half)
        z = np.array([0.3, 1j, np.exp(2.1j)])
        expected = np.sqrt(0.75) * z / (1 - 0.5 * z)
        np.testing.assert_allclose(tm_element(basis, 1, z), expected, atol=1e-14)

    def test_negative_index_rejected(self, half):
        with pytest.raises(ValueError):
            tm_element(TMBasis(half), -1, 0.0)


class TestFactorParts:
    def test_l_zero(self, half):
        q, r = factor_parts(TMBasis(half), 0, 0.7j)
        assert q == pytest.approx(1.0)
        assert r == pytest.approx(1.0)

    def test_half_at_one(self, half):
        # Q_1(1) = sqrt(0.75)/0.5 = sqrt(3), R_1(1) = 1
        q, r = factor_parts(TMBasis(half), 1, 1.0 + 0j)
        assert q == pytest.approx(np.sqrt(3.0))
        assert r == pytest.approx(1.0)

    def test_monomial_parts(self, cube):
        basis = TMBasis(cube)
        z = np.exp(0.8j)
        for l in range(3):
            q, r = factor_parts(basis, l, z)
            assert q == pytest.approx(1.0)
            assert r == pytest.approx(z**l)

    def test_index_range_enforced(self, half):
        with pytest.raises(ValueError):
            factor_parts(TMBasis(half), 2, 0.0)


class TestFactorization:
    def test_monomial_exact(self, cube, grid_small):
        basis = TMBasis(cube, count=40)
        for k, l in [(0, 0), (2, 1), (5, 2)]:
            assert factorization_residual(basis, k, l, grid_small) <= 1e-13

    @pytest.mark.parametrize("k,l", [(0, 0), (1, 1), (4, 0), (8, 1)])
    def test_half_identity(self, half, grid_small, k, l):
        basis = TMBasis(half, count=32)
        assert factorization_residual(basis, k, l, grid_small) <= 1e-10

    def test_spiral_identity(self, spiral, grid_small):
        basis = TMBasis(spiral, count=32)
        worst = max(
            factorization_residual(basis, k, l, grid_small) for k in range(9) for l in range(2)
        )
        assert worst <= 1e-10


class TestGram:
    def test_monomial_orthonormality(self, cube, grid_big):
        assert gram_residual(TMBasis(cube), 16, grid_big) <= 1e-12

    def test_half_orthonormality(self, half, grid_big):
        assert gram_residual(TMBasis(half), 32, grid_big) <= 1e-8

    def test_single_element(self, half, grid_big):
        assert gram_residual(TMBasis(half), 1, grid_big) <= 1e-12

    def test_count_cap(self, half, grid_big):
        with pytest.raises(ValueError):
            gram_residual(TMBasis(half), 65, grid_big)


class TestCuntzFamily:
    def test_square_shift_split(self, square):
        w1, w2 = cuntz_family(square, 64, CircleGrid(1024))
        for m in range(16):
            col1 = np.zeros(64)
            col1[2 * m] = 1.0
            col2 = np.zeros(64)
            col2[2 * m + 1] = 1.0
            np.testing.assert_allclose(w1.entries[:, m], col1, atol=1e-12)
            np.testing.assert_allclose(w2.entries[:, m], col2, atol=1e-12)

    def test_columns_match_basis_elements(self, half, grid_big):
        # column l of W_k holds the coefficients of e_(2l + k - 1)
        basis = TMBasis(half)
        family = cuntz_family(half, 256, grid_big)
        for k, w in enumerate(family, start=1):
            for l in (0, 3, 10):
                element = fourier_coefficients(sample(lambda z: tm_element(basis, 2 * l + k - 1, z), grid_big))
                expected = np.array([element.coefficient(i) for i in range(256)])
                np.testing.assert_allclose(w.entries[:, l], expected, atol=1e-8)

    def test_relations_monomial_exact(self, cube, grid_big):
        family = cuntz_family(cube, 256, grid_big)
        result = cons_residual(family, 32)
        assert result.worst <= 1e-12

    def test_relations_half(self, half, grid_big):
        family = cuntz_family(half, 256, grid_big)
        result = cons_residual(family, 32)
        assert result.completeness <= 1e-6
        assert result.isometry <= 1e-6
        assert result.orthogonality <= 1e-6

    def test_corner_guard(self, half, grid_big):
        family = cuntz_family(half, 256, grid_big)
        with pytest.raises(ValueError):
            cons_residual(family, 100)


class TestRangeSplit:
    def test_complement_of_composition_range(self, half, grid_big):
        # elements e_(kn+l) with l >= 1 are orthogonal to every column R^j
        basis = TMBasis(half)
        powers = [sample(lambda z, j=j: half.evaluate(z) ** j, grid_big) for j in range(8)]
        worst = 0.0
        for k in range(4):
            element = sample(lambda z: tm_element(basis, 2 * k + 1, z), grid_big)
            worst = max(worst, max(abs(l2_inner(element, p)) for p in powers))
        assert worst <= 1e-8


class TestQuotientGenerators:
    def test_generators_are_shift_and_composition(self, half, grid_big):
        u, v = quotient_generators(half, 64, grid_big)
        np.testing.assert_allclose(u.entries, np.eye(64, k=-1))
        np.testing.assert_allclose(v.entries, composition_matrix(half, 64, grid_big).entries)

    def test_monomial_shift_relations_exact(self, cube, grid_big):
        u, _ = quotient_generators(cube, 256, grid_big)
        family = cuntz_family(cube, 256, grid_big)
        for k in range(2):
            diff = (u @ family[k]) - family[k + 1]
            assert _matrix_norm(diff.entries) <= 1e-12
        wrap = (u @ family[-1]) - (family[0] @ u)
        assert _matrix_norm(wrap.entries) <= 1e-12

    def test_unit_module_isometry_is_scaled_composition(self, cube, grid_big):
        # p = 1: V_1 = sqrt(n) C, so V_1* V_1 = n I on the guarded corner
        v1 = module_isometry(cube, lambda z: np.ones_like(z), 256, grid_big)
        gram = (v1.adjoint() @ v1).corner(32)
        np.testing.assert_allclose(gram, 3.0 * np.eye(32), atol=1e-12)


class TestInnerProductResidual:
    def _frame_function(self, product, k):
        basis = TMBasis(product)

        def func(z):
            q, r = factor_parts(basis, k, z)
            return q * r

        return func

    def test_half_frame_pairs_have_tiny_tails(self, half, grid_big):
        cuts = [8, 16, 32, 64]
        for i in range(2):
            for j in range(2):
                residual = inner_product_residual(
                    half, self._frame_function(half, i), self._frame_function(half, j), 256, grid_big
                )
                profile = tail_compactness_profile(residual, cuts)
                assert profile[-1] <= 1e-6
                assert all(b <= a + 1e-11 for a, b in zip(profile, profile[1:]))

    def test_unit_pair_recovers_isometry_identity(self, square, grid_big):
        # p = q = 1: V* V = n C* C and <1,1> = n, so the residual is ~ 0
        one = lambda z: np.ones_like(z)
        residual = inner_product_residual(square, one, one, 256, grid_big)
        assert operator_norm(residual) <= 1e-10

    def test_pairing_symbol_route_is_independent(self, half, grid_big):
        # cross-check the Toeplitz side against a direct pointwise evaluation
        # of the weighted pairing: <v_k, v_k> = n (the isometry normalisation)
        from blaschkeops import TransferOperator, bimodule_inner

        func = self._frame_function(half, 1)
        op = TransferOperator(half)
        value = bimodule_inner(op, func, func, 1.0 + 0j)
        assert value == pytest.approx(half.degree, abs=1e-10)
