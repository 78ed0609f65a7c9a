import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from qdt.errors import DimensionError
from qdt.linalg import (
    MAX_DIMENSION,
    HilbertSpace,
    adjoint,
    hermitian_eigh,
    hs_inner_product,
    hs_norm,
    identity,
    is_hermitian,
    is_positive_semidefinite,
    ket,
    outer,
    partial_trace,
    tensor_product,
    trace,
)

from conftest import kron_oracle, partial_trace_oracle, random_density, random_hermitian

finite = st.floats(-10, 10, allow_nan=False)
complex_entries = st.builds(complex, finite, finite)


def matrices(rows, cols):
    return st.lists(complex_entries, min_size=rows * cols, max_size=rows * cols).map(
        lambda xs: np.array(xs, dtype=complex).reshape(rows, cols)
    )


class TestHilbertSpace:
    def test_default_labels(self):
        assert HilbertSpace(3).basis_labels == ("0", "1", "2")

    def test_duplicate_labels(self):
        with pytest.raises(DimensionError):
            HilbertSpace.labelled("x", "x")

    def test_label_count_mismatch(self):
        with pytest.raises(DimensionError):
            HilbertSpace(3, ("a", "b"))


class TestTensorProduct:
    def test_identity(self):
        assert_allclose(tensor_product(identity(2), identity(2)), identity(4), atol=0)

    def test_projector_product(self):
        m = tensor_product(outer(ket(2, 0)), outer(ket(2, 1)))
        expected = np.zeros((4, 4))
        expected[1, 1] = 1
        assert_allclose(m, expected, atol=0)

    def test_block_entry(self):
        a = np.array([[1, 2], [3, 4]])
        m = tensor_product(a, identity(2))
        assert m[2, 0] == 3
        assert_allclose(m, kron_oracle(a.astype(complex), identity(2)))

    def test_against_loop_oracle(self, rng):
        for _ in range(20):
            a = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
            b = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
            assert_allclose(tensor_product(a, b), kron_oracle(a, b), atol=1e-14)

    def test_dimension_guard(self):
        big = identity(MAX_DIMENSION // 2)
        with pytest.raises(DimensionError):
            tensor_product(big, identity(3))

    def test_guard_edge_is_allowed(self):
        assert tensor_product(np.ones((1, 1)), np.ones((MAX_DIMENSION, 1))).shape == (MAX_DIMENSION, 1)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            tensor_product(np.array([[np.nan]]), identity(2))

    @settings(max_examples=50, deadline=None)
    @given(matrices(2, 2), matrices(2, 2), matrices(2, 2))
    def test_associative(self, a, b, c):
        lhs = tensor_product(tensor_product(a, b), c)
        rhs = tensor_product(a, tensor_product(b, c))
        assert hs_norm(lhs - rhs) <= 1e-12

    @settings(max_examples=50, deadline=None)
    @given(matrices(2, 2), matrices(3, 3))
    def test_trace_multiplicative(self, a, b):
        scale = max(1.0, abs(trace(a) * trace(b)))
        assert abs(trace(tensor_product(a, b)) - trace(a) * trace(b)) <= 1e-12 * scale


class TestTrace:
    def test_identity(self):
        assert trace(identity(4)) == 4

    def test_projector(self):
        assert trace(outer(ket(5, 3))) == 1

    def test_eigenvalue_sum(self, rng):
        h = random_hermitian(rng, 3)
        assert abs(trace(h) - np.linalg.eigvalsh(h).sum()) <= 1e-12

    def test_non_square(self):
        with pytest.raises(DimensionError):
            trace(np.ones((2, 3)))


class TestPartialTrace:
    def test_product_factorization(self, rng):
        ra, rb = random_density(rng, 3), random_density(rng, 2)
        assert_allclose(partial_trace(np.kron(ra, rb), (3, 2), "B"), ra, atol=1e-14)
        assert_allclose(partial_trace(np.kron(ra, rb), (3, 2), "A"), rb, atol=1e-14)

    def test_identity(self):
        assert_allclose(partial_trace(identity(4), (2, 2), "B"), 2 * identity(2))

    def test_bell(self):
        psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
        bell = np.outer(psi, psi)
        assert_allclose(partial_trace(bell, (2, 2), "B"), partial_trace_oracle(bell, 2, 2, "B"))
        assert_allclose(partial_trace(bell, (2, 2), "B"), identity(2) / 2, atol=1e-15)

    def test_against_oracle(self, rng):
        for d_a, d_b in [(2, 3), (3, 2), (4, 4), (1, 3)]:
            m = rng.normal(size=(d_a * d_b,) * 2) + 1j * rng.normal(size=(d_a * d_b,) * 2)
            for which in "AB":
                assert_allclose(
                    partial_trace(m, (d_a, d_b), which), partial_trace_oracle(m, d_a, d_b, which), atol=1e-13
                )

    def test_trace_preserved(self, rng):
        m = random_hermitian(rng, 6)
        for which in "AB":
            assert abs(trace(partial_trace(m, (2, 3), which)) - trace(m)) <= 1e-12

    @settings(max_examples=50, deadline=None)
    @given(matrices(2, 2), matrices(3, 3))
    def test_reduces_to_scaled_factor(self, a, b):
        got = partial_trace(tensor_product(a, b), (2, 3), "B")
        assert hs_norm(got - trace(b) * a) <= 1e-12 * max(1.0, hs_norm(a) * hs_norm(b))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            partial_trace(identity(5), (2, 2))


class TestHilbertSchmidt:
    def test_projector_norm(self):
        p = outer(ket(3, 1))
        assert hs_inner_product(p, p) == 1

    def test_orthogonal_projectors(self):
        assert hs_inner_product(outer(ket(3, 0)), outer(ket(3, 2))) == 0

    def test_all_ones(self):
        x = np.ones((2, 2))
        assert hs_inner_product(x, x) == sum(abs(v) ** 2 for v in x.ravel()) == 4

    def test_matches_trace_definition(self, rng):
        a = random_hermitian(rng, 3) + 1j * random_hermitian(rng, 3)
        b = random_hermitian(rng, 3)
        assert abs(hs_inner_product(a, b) - np.trace(a.conj().T @ b)) <= 1e-12

    @settings(max_examples=100, deadline=None)
    @given(matrices(3, 3))
    def test_self_product_real_nonnegative(self, a):
        z = hs_inner_product(a, a)
        assert abs(z.imag) <= 1e-12 and z.real >= -1e-12

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            hs_inner_product(identity(2), identity(3))


@settings(max_examples=100, deadline=None)
@given(matrices(2, 3))
def test_adjoint_involution(a):
    assert np.array_equal(adjoint(adjoint(a)), a)


class TestPredicates:
    def test_identity_hermitian_at_zero_tol(self):
        assert is_hermitian(identity(3), 0.0)

    def test_imaginary_offdiagonal(self):
        # i and -i across the diagonal is Hermitian; i and i is not
        assert is_hermitian(np.array([[0, 1j], [-1j, 0]]), 1e-12)
        assert not is_hermitian(np.array([[0, 1j], [1j, 0]]), 1e-12)

    def test_perturbed_hermitian(self, rng):
        h = random_hermitian(rng, 4)
        h[0, 1] += 1e-9
        assert is_hermitian(h, 1e-8)
        assert not is_hermitian(h, 1e-10)

    def test_rank_one_psd(self, rng):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        assert is_positive_semidefinite(outer(v), 1e-10)

    def test_negative_eigenvalue(self):
        assert not is_positive_semidefinite(np.diag([1.0, -0.1]), 1e-12)

    def test_product_of_states(self, rng):
        m = np.kron(random_density(rng, 2), random_density(rng, 3))
        assert is_positive_semidefinite(m, 1e-12)
        w = np.linalg.eigvalsh(m)
        assert w.min() >= -1e-15

    def test_psd_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            is_positive_semidefinite(np.array([[1, 1], [0, 1]]))

    def test_eigh_residual(self, rng):
        h = random_hermitian(rng, 5)
        w, v = hermitian_eigh(h)
        for k in range(5):
            assert np.linalg.norm(h @ v[:, k] - w[k] * v[:, k]) <= 1e-9 * hs_norm(h)
