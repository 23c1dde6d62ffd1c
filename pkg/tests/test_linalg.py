import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from icmkit.errors import DecompositionError, ValidationError
from icmkit.linalg import (Tolerance, common_eigenbasis, complete_to_unitary, eig_hermitian, gram_schmidt,
                           haar_random_unitary, kron, numerical_rank, psd_sqrt)
from icmkit.measurement import canonical_ic_set, build_effect_matrix

seeds = st.integers(min_value=0, max_value=2**31 - 1)

X = np.array([[0, 1], [1, 0]], complex)
Z = np.diag([1, -1]).astype(complex)


def test_kron_hand_expansion():
    out = kron(X, 2 * np.eye(2))
    want = np.array([[0, 0, 2, 0], [0, 0, 0, 2], [2, 0, 0, 0], [0, 2, 0, 0]])
    np.testing.assert_array_equal(out, want)
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    e0, e1 = np.diag([1, 0]), np.diag([0, 1])
    assert np.array_equal(kron(e0, e1), np.diag([0, 1, 0, 0]))


def test_kron_index_convention():
    a = np.arange(6).reshape(2, 3) + 1j
    b = np.arange(4).reshape(2, 2) - 2j
    out = kron(a, b)
    for i1 in range(2):
        for i2 in range(2):
            for j1 in range(3):
                for j2 in range(2):
                    assert out[i1 * 2 + i2, j1 * 2 + j2] == a[i1, j1] * b[i2, j2]


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_kron_associative_and_mixed_product(seed):
    rng = np.random.default_rng(seed)
    a, b, c, d = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(4))
    np.testing.assert_allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-12)
    np.testing.assert_allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d), atol=1e-12)


def test_kron_rejects_non_matrix():
    with pytest.raises(ValidationError):
        kron(np.ones(3), np.eye(2))


def test_numerical_rank_examples():
    assert numerical_rank(np.eye(5)) == 5
    assert numerical_rank(np.ones((4, 4))) == 1
    assert numerical_rank(np.zeros((3, 3))) == 0
    assert numerical_rank(build_effect_matrix(canonical_ic_set(3))) == 9


def test_numerical_rank_cutoff_is_relative():
    a = np.diag([1.0, 1e-3, 1e-14])
    assert numerical_rank(a) == 2
    assert numerical_rank(1e6 * a) == 2
    assert numerical_rank(a, Tolerance(rel_rank_eps=1e-2)) == 1


def test_numerical_rank_empty():
    with pytest.raises(ValidationError):
        numerical_rank(np.zeros((0, 3)))


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 6))
def test_numerical_rank_of_product(seed, r):
    # rank of B C with inner dimension r is r for generic factors
    rng = np.random.default_rng(seed)
    b = rng.standard_normal((9, r)) + 1j * rng.standard_normal((9, r))
    c = rng.standard_normal((r, 7)) + 1j * rng.standard_normal((r, 7))
    assert numerical_rank(b @ c) == min(r, 7)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_numerical_rank_unitarily_invariant(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((6, 3)) @ rng.standard_normal((3, 6))
    u = haar_random_unitary(6, seed)
    v = haar_random_unitary(6, seed + 1)
    assert numerical_rank(u @ a @ v) == numerical_rank(a) == 3


def test_gram_schmidt_examples():
    out = gram_schmidt([[1, 1, 0], [1, 0, 0], [2, 1, 0], [0, 0, 5]])
    assert out.shape == (3, 3)
    np.testing.assert_allclose(out[0], np.array([1, 1, 0]) / np.sqrt(2))
    np.testing.assert_allclose(out @ out.conj().T, np.eye(3), atol=1e-14)
    assert gram_schmidt(np.zeros((2, 4))).shape == (0, 4)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 8))
def test_gram_schmidt_span_and_orthonormality(seed, k):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((k, 8)) + 1j * rng.standard_normal((k, 8))
    q = gram_schmidt(v)
    assert q.shape == (k, 8)
    np.testing.assert_allclose(q @ q.conj().T, np.eye(k), atol=1e-12)
    # every input lies in the span of the output
    resid = v - (v @ q.conj().T) @ q
    assert np.abs(resid).max() < 1e-10


def test_complete_to_unitary_keeps_columns():
    c = np.array([[1, 1], [1, -1], [0, 0]]) / np.sqrt(2)
    u = complete_to_unitary(c)
    assert u.shape == (3, 3)
    np.testing.assert_allclose(u[:, :2], c)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(3), atol=1e-14)
    np.testing.assert_allclose(np.abs(u[:, 2]), [0, 0, 1], atol=1e-14)


def test_complete_to_unitary_rejects_bad_input():
    with pytest.raises(ValidationError):
        complete_to_unitary(np.array([[1, 1], [0, 1.0]]))
    with pytest.raises(ValidationError):
        complete_to_unitary(np.ones((2, 3)) / 2)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 7), st.integers(0, 7))
def test_complete_to_unitary_property(seed, m, n):
    n = min(n, m)
    u0 = haar_random_unitary(m, seed)
    u = complete_to_unitary(u0[:, :n])
    np.testing.assert_allclose(u.conj().T @ u, np.eye(m), atol=1e-12)
    np.testing.assert_allclose(u[:, :n], u0[:, :n])


def test_eig_hermitian_examples():
    w, v = eig_hermitian(X)
    np.testing.assert_allclose(w, [-1, 1])
    np.testing.assert_allclose(v @ np.diag(w) @ v.conj().T, X, atol=1e-15)
    with pytest.raises(ValidationError):
        eig_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValidationError):
        eig_hermitian(np.ones((2, 3)))


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(1, 50))
def test_eig_hermitian_reconstructs(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = a + a.conj().T
    w, v = eig_hermitian(h)
    assert np.all(np.diff(w) >= -1e-12)
    np.testing.assert_allclose(v @ np.diag(w) @ v.conj().T, h, atol=1e-10 * max(1, np.abs(h).max()))
    np.testing.assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-12)


def test_psd_sqrt_squares_back():
    a = np.array([[2, 1j], [-1j, 2]])
    r = psd_sqrt(a)
    np.testing.assert_allclose(r @ r, a, atol=1e-14)


def test_haar_unitary_basics():
    u = haar_random_unitary(1, 3)
    assert u.shape == (1, 1) and abs(abs(u[0, 0]) - 1) < 1e-15
    a, b = haar_random_unitary(5, 42), haar_random_unitary(5, 42)
    assert np.array_equal(a, b)
    assert not np.allclose(a, haar_random_unitary(5, 43))
    np.testing.assert_allclose(a.conj().T @ a, np.eye(5), atol=1e-14)
    with pytest.raises(ValidationError):
        haar_random_unitary(0, 1)


def test_haar_first_moment():
    # E|U_00|^2 = 1/n under the Haar measure
    n = 4
    vals = [abs(haar_random_unitary(n, s)[0, 0]) ** 2 for s in range(2000)]
    assert abs(np.mean(vals) - 1 / n) < 0.02


def test_common_eigenbasis_examples():
    kets = common_eigenbasis([Z, np.diag([1, 1]).astype(complex)])
    # Z is non-degenerate, so the kets are the standard basis up to order and phase
    mags = np.abs(kets)
    assert np.allclose(np.sort(mags, axis=1), [[0, 1], [0, 1]], atol=1e-12)
    with pytest.raises(ValidationError):
        common_eigenbasis([X, Z])
    with pytest.raises(ValidationError):
        common_eigenbasis([])


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(2, 6))
def test_common_eigenbasis_diagonalizes(seed, n):
    rng = np.random.default_rng(seed)
    u = haar_random_unitary(n, seed)
    # commuting normal operators with a degenerate member
    ops = [u @ np.diag(rng.standard_normal(n) + 1j * rng.standard_normal(n)) @ u.conj().T,
           u @ np.diag(np.r_[np.ones(n - 1), -1]) @ u.conj().T]
    kets = common_eigenbasis(ops)
    np.testing.assert_allclose(kets.conj() @ kets.T, np.eye(n), atol=1e-12)
    for a in ops:
        d = kets.conj() @ a @ kets.T
        assert np.abs(d - np.diag(np.diag(d))).max() < 1e-9


def test_decomposition_error_type():
    assert DecompositionError("x").exit_code == 7
