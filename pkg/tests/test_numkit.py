"""Primitive layer: tensor products, Fourier matrices, modular sums."""

import cmath

import numpy as np
import pytest

from paritygames.numkit import (
    DitString,
    Permutation,
    dagger,
    fourier_matrix,
    is_hermitian,
    is_prime,
    is_psd,
    is_unitary,
    permute_kron_factors,
    tensor_product,
    weighted_mod_sum,
)

from oracles import kron_loop, matmul_loop, trace_loop

PRIMES_UP_TO_13 = [2, 3, 5, 7, 11, 13]


class TestPrimality:
    def test_small_values(self):
        assert is_prime(2)
        assert not is_prime(4)
        assert is_prime(7)
        assert not is_prime(9)
        assert is_prime(13)

    def test_below_two_rejected(self):
        with pytest.raises(ValueError):
            is_prime(1)


class TestTensorProduct:
    def test_identity_case(self):
        assert np.array_equal(tensor_product(np.eye(2), np.eye(2)), np.eye(4))

    def test_projector_product(self):
        a = np.diag([1.0, 0.0])
        b = np.diag([0.0, 1.0])
        assert np.array_equal(tensor_product(a, b), np.diag([0, 1, 0, 0.0]))

    def test_against_index_expansion_oracle(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        expected = np.array(kron_loop(a.tolist(), b.tolist()))
        assert np.allclose(tensor_product(a, b), expected, atol=1e-14)

    def test_trace_multiplies(self):
        rng = np.random.default_rng(4)
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        lhs = trace_loop(tensor_product(a, b).tolist())
        rhs = trace_loop(a.tolist()) * trace_loop(b.tolist())
        assert abs(lhs - rhs) < 1e-12

    def test_associative_on_dims_up_to_64(self):
        rng = np.random.default_rng(5)
        for dims in [(2, 3, 4), (4, 4, 4), (2, 2, 8)]:
            mats = [rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
                    for n in dims]
            left = tensor_product(tensor_product(mats[0], mats[1]), mats[2])
            right = tensor_product(mats[0], tensor_product(mats[1], mats[2]))
            assert np.max(np.abs(left - right)) < 1e-12


class TestFourierMatrix:
    def test_hadamard_for_d2(self):
        expected = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        assert np.allclose(fourier_matrix(2), expected, atol=1e-15)

    def test_d3_rows_from_cube_root_of_unity(self):
        omega = cmath.exp(2j * cmath.pi / 3)
        f = fourier_matrix(3)
        for l in range(3):
            for k in range(3):
                assert abs(f[l, k] - omega ** (l * k) / np.sqrt(3)) < 1e-14

    @pytest.mark.parametrize("d", PRIMES_UP_TO_13)
    def test_unitary_by_matmul_oracle(self, d):
        f = fourier_matrix(d)
        product = np.array(matmul_loop(dagger(f).tolist(), f.tolist()))
        assert np.max(np.abs(product - np.eye(d))) < 1e-12

    def test_non_prime_rejected(self):
        with pytest.raises(ValueError):
            fourier_matrix(4)


class TestWeightedModSum:
    def test_parity_of_two_ones(self):
        assert weighted_mod_sum(DitString(2, (1, 1)), DitString(2, (1, 1))) == 0

    def test_hand_arithmetic_d3(self):
        # (1*1 + 2*2) mod 3 = 5 mod 3 = 2
        assert weighted_mod_sum(DitString(3, (1, 2)), DitString(3, (1, 2))) == 2

    def test_zero_input(self):
        for d in (2, 5):
            x = DitString.zeros(3, d)
            nu = DitString(d, (1, d - 1, 1))
            assert weighted_mod_sum(x, nu) == 0

    def test_invariant_under_paired_permutation(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            d = int(rng.choice([2, 3, 5, 7]))
            m = int(rng.integers(1, 6))
            xs = rng.integers(0, d, size=m)
            ws = rng.integers(0, d, size=m)
            base = weighted_mod_sum(xs, ws, d=d)
            order = rng.permutation(m)
            assert weighted_mod_sum(xs[order], ws[order], d=d) == base

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            weighted_mod_sum(DitString(2, (1,)), DitString(2, (1, 1)))

    def test_modulus_mismatch(self):
        with pytest.raises(ValueError):
            weighted_mod_sum(DitString(2, (1, 1)), DitString(3, (1, 1)))


class TestValueTypes:
    def test_ditstring_rejects_out_of_range_digit(self):
        with pytest.raises(ValueError):
            DitString(3, (0, 3))

    def test_ditstring_rejects_composite_modulus(self):
        with pytest.raises(ValueError):
            DitString(6, (1, 2))

    def test_ditstring_weight(self):
        assert DitString(3, (0, 2, 1, 0)).weight == 2

    def test_permutation_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            Permutation((0, 0, 1))

    def test_permutation_inverse(self):
        p = Permutation((2, 0, 1))
        inv = p.inverse()
        assert all(inv(p(s)) == s for s in range(3))


class TestMatrixPredicates:
    def test_hermitian_and_psd(self):
        rng = np.random.default_rng(8)
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = g @ dagger(g)
        assert is_hermitian(rho, 1e-12)
        assert is_psd(rho, 1e-9)
        assert not is_psd(-rho, 1e-9)
        assert not is_hermitian(g, 1e-9)

    def test_unitary(self):
        assert is_unitary(fourier_matrix(5), 1e-12)
        assert not is_unitary(2 * np.eye(3), 1e-9)


class TestPermuteKronFactors:
    def test_swapping_two_factors(self):
        rng = np.random.default_rng(9)
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        swapped = permute_kron_factors(np.kron(a, b), [2, 3], [1, 0])
        assert np.allclose(swapped, np.kron(b, a), atol=1e-14)

    def test_interleaving_four_factors(self):
        rng = np.random.default_rng(10)
        mats = [rng.normal(size=(n, n)) for n in (2, 3, 2, 2)]
        joined = mats[0]
        for mat in mats[1:]:
            joined = np.kron(joined, mat)
        # (a b c d) -> (a c b d)
        out = permute_kron_factors(joined, [2, 3, 2, 2], [0, 2, 1, 3])
        expected = np.kron(np.kron(mats[0], mats[2]), np.kron(mats[1], mats[3]))
        assert np.allclose(out, expected, atol=1e-12)
