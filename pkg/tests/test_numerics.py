import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cogbeam.errors import InvalidInputError, NotPSDError
from cogbeam.numerics import (
    hermitian_evd,
    pseudo_inverse,
    psd_sqrt,
    random_unitary,
    subspace_distance,
)

from conftest import cscg, random_hermitian
from oracles import eig_2x2_hermitian


class TestHermitianEvd:
    def test_diagonal(self):
        res = hermitian_evd(np.diag([3.0, 1.0, 0.0]))
        np.testing.assert_allclose(res.eigenvalues, [3, 1, 0])
        # a permutation of identity columns, up to phase
        np.testing.assert_allclose(np.abs(res.eigenvectors), np.eye(3), atol=1e-12)

    def test_identity(self):
        np.testing.assert_allclose(hermitian_evd(np.eye(4)).eigenvalues, np.ones(4))

    def test_two_by_two_against_characteristic_polynomial(self):
        np.testing.assert_allclose(
            hermitian_evd([[2, 1], [1, 2]]).eigenvalues, eig_2x2_hermitian(2, 1, 2), atol=1e-13
        )

    def test_complex_two_by_two(self):
        b = 0.3 - 1.2j
        m = np.array([[1.5, b], [np.conj(b), -0.5]])
        np.testing.assert_allclose(hermitian_evd(m).eigenvalues, eig_2x2_hermitian(1.5, b, -0.5), atol=1e-13)

    def test_rejects_non_square(self):
        with pytest.raises(InvalidInputError):
            hermitian_evd(np.ones((2, 3)))

    def test_rejects_non_hermitian(self):
        with pytest.raises(InvalidInputError):
            hermitian_evd([[1, 2], [0, 1]])

    def test_random_reconstruction_and_ordering(self, rng):
        for _ in range(1000):
            n = int(rng.integers(1, 9))
            m = random_hermitian(rng, n)
            res = hermitian_evd(m)
            v, lam = res.eigenvectors, res.eigenvalues
            assert np.all(np.diff(lam) <= 0)
            assert np.linalg.norm(v.conj().T @ v - np.eye(n)) <= 1e-10
            assert np.linalg.norm(m - (v * lam) @ v.conj().T) <= 1e-9 * np.linalg.norm(m)


class TestPsdSqrt:
    def test_identity(self):
        np.testing.assert_allclose(psd_sqrt(np.eye(3)), np.eye(3), atol=1e-14)

    def test_zero_matrix_gives_empty_factor(self):
        assert psd_sqrt(np.zeros((3, 3))).shape == (3, 0)

    def test_rank_deficient_round_trip(self, rng):
        x = cscg(rng, 4, 2)
        s = x @ x.conj().T
        r = psd_sqrt(s)
        assert r.shape == (4, 2)
        assert np.linalg.norm(r @ r.conj().T - s) <= 1e-10 * np.linalg.norm(s)

    def test_small_negative_eigenvalue_clamped(self):
        r = psd_sqrt(np.diag([1.0, -1e-13]))
        assert r.shape == (2, 1)

    def test_not_psd(self):
        with pytest.raises(NotPSDError):
            psd_sqrt(np.diag([1.0, -0.1]))

    def test_round_trip_random(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 9))
            k = int(rng.integers(1, n + 1))
            x = cscg(rng, n, k)
            s = x @ x.conj().T
            r = psd_sqrt(s)
            assert np.linalg.norm(r @ r.conj().T - s) <= 1e-9 * np.linalg.norm(s)


class TestPseudoInverse:
    def test_identity(self):
        np.testing.assert_allclose(pseudo_inverse(np.eye(3)), np.eye(3))

    def test_zero(self):
        out = pseudo_inverse(np.zeros((3, 2)))
        assert out.shape == (2, 3) and not np.any(out)

    def test_tall_full_rank_left_inverse(self, rng):
        m = cscg(rng, 6, 3)
        np.testing.assert_allclose(pseudo_inverse(m) @ m, np.eye(3), atol=1e-8)

    def test_moore_penrose_conditions(self, rng):
        m = cscg(rng, 5, 2) @ cscg(rng, 2, 4)  # rank 2
        p = pseudo_inverse(m)
        tol = 1e-8 * np.linalg.norm(m)
        assert np.linalg.norm(m @ p @ m - m) <= tol
        assert np.linalg.norm(p @ m @ p - p) <= 1e-8 * np.linalg.norm(p)
        assert np.linalg.norm((m @ p).conj().T - m @ p) <= 1e-8
        assert np.linalg.norm((p @ m).conj().T - p @ m) <= 1e-8

    def test_rel_tol_range(self):
        with pytest.raises(InvalidInputError):
            pseudo_inverse(np.eye(2), rel_tol=0.0)


class TestSubspaceDistance:
    def test_identical(self, rng):
        u = np.linalg.qr(cscg(rng, 5, 2))[0]
        assert subspace_distance(u, u) == pytest.approx(0.0, abs=1e-14)

    def test_rotation_invariant(self, rng):
        u = np.linalg.qr(cscg(rng, 5, 3))[0]
        r = random_unitary(3, rng)
        assert subspace_distance(u, u @ r) <= 1e-10

    def test_orthogonal_axes(self):
        # projectors diag(1,0) and diag(0,1) differ by diag(1,-1)
        assert subspace_distance([[1], [0]], [[0], [1]]) == pytest.approx(np.sqrt(2))

    def test_mismatched_rows(self):
        with pytest.raises(InvalidInputError):
            subspace_distance(np.eye(3)[:, :1], np.eye(2)[:, :1])

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 6))
    def test_symmetry_and_triangle(self, seed, n):
        r = np.random.default_rng(seed)
        bases = [np.linalg.qr(cscg(r, n, int(r.integers(1, n + 1))))[0] for _ in range(3)]
        a, b, c = bases
        assert subspace_distance(a, b) == pytest.approx(subspace_distance(b, a), abs=1e-12)
        assert subspace_distance(a, c) <= subspace_distance(a, b) + subspace_distance(b, c) + 1e-9
