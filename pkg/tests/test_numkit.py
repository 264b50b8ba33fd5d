import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import unitary_group

from diagcalc.errors import NoConvergence
from diagcalc.numkit import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_matrix,
    charpoly,
    cond,
    eig,
    mat_poly_eval,
    nilpotency_order,
    numerical_rank,
    op_norm,
)

SWAP = np.array([[0, 1], [1, 0]], dtype=complex)


def rand_matrix(rng, k, scale=1.0):
    return scale * (rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k)))


def jordan(k, lam=0.0):
    return lam * np.eye(k) + np.eye(k, k=-1)


class TestToleranceConfig:
    def test_defaults(self):
        t = ToleranceConfig()
        assert (t.cluster_tol, t.zero_tol, t.cond_max, t.rel_tol) == (1e-8, 1e-10, 1e8, 1e-9)

    @pytest.mark.parametrize("kw", [{"cluster_tol": 0}, {"zero_tol": -1}, {"cond_max": float("inf")}, {"rel_tol": float("nan")}])
    def test_rejects_non_positive(self, kw):
        with pytest.raises(ValueError):
            ToleranceConfig(**kw)

    def test_cluster_at_least_zero_tol(self):
        with pytest.raises(ValueError):
            ToleranceConfig(cluster_tol=1e-12, zero_tol=1e-10)


class TestAsMatrix:
    def test_scalar_becomes_1x1(self):
        assert as_matrix(3).shape == (1, 1)

    @pytest.mark.parametrize("bad", [np.zeros((2, 3)), np.full((2, 2), np.nan), np.zeros((65, 65)), np.zeros((0, 0))])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            as_matrix(bad)


class TestOpNorm:
    def test_examples(self):
        assert op_norm(np.diag([1, 2])) == pytest.approx(2)
        assert op_norm(np.zeros((3, 3))) == 0
        assert op_norm(SWAP) == pytest.approx(1)

    def test_scalar_multiple_of_identity(self):
        c = 3 - 4j
        assert op_norm(c * np.eye(4)) == pytest.approx(5)
        assert op_norm([[c]]) == 5

    def test_submultiplicative(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            k = rng.integers(1, 7)
            A, B = rand_matrix(rng, k), rand_matrix(rng, k)
            assert op_norm(A @ B) <= op_norm(A) * op_norm(B) * (1 + DEFAULT_TOL.rel_tol)

    def test_unitary_invariance(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            k = int(rng.integers(2, 7))
            A = rand_matrix(rng, k)
            U = unitary_group.rvs(k, random_state=rng)
            assert abs(op_norm(U @ A @ U.conj().T) - op_norm(A)) <= DEFAULT_TOL.rel_tol * op_norm(A)


class TestEig:
    def test_swap(self):
        ed = eig(SWAP)
        np.testing.assert_allclose(ed.values, [-1, 1], atol=1e-14)
        assert ed.has_basis
        assert ed.cond_estimate == pytest.approx(1)

    def test_repeated(self):
        ed = eig(np.diag([3, 3, 7]))
        np.testing.assert_allclose(ed.values, [3, 3, 7])
        assert ed.has_basis

    def test_jordan_has_no_basis(self):
        ed = eig(jordan(2))
        np.testing.assert_allclose(ed.values, [0, 0])
        assert not ed.has_basis

    def test_residual_random(self):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            k = int(rng.integers(1, 9))
            A = rand_matrix(rng, k)
            ed = eig(A)
            if ed.has_basis:
                P = ed.vectors
                res = op_norm(A @ P - P @ np.diag(ed.values))
                assert res <= DEFAULT_TOL.rel_tol * op_norm(A) * ed.cond_estimate

    def test_deterministic_order(self):
        A = rand_matrix(np.random.default_rng(4), 5)
        a, b = eig(A), eig(A.copy())
        assert np.array_equal(a.values, b.values)
        assert list(a.values) == sorted(a.values, key=lambda z: (z.real, z.imag))

    def test_lapack_failure_maps_to_no_convergence(self, monkeypatch):
        def boom(_):
            raise np.linalg.LinAlgError("did not converge")

        monkeypatch.setattr(np.linalg, "eig", boom)
        with pytest.raises(NoConvergence):
            eig(np.eye(2))


class TestPolynomials:
    def test_identity_polynomial_is_exact(self):
        A = rand_matrix(np.random.default_rng(5), 4)
        assert np.array_equal(mat_poly_eval([0, 1], A), A)

    def test_constant(self):
        np.testing.assert_array_equal(mat_poly_eval([5], np.ones((2, 2))), 5 * np.eye(2))

    def test_swap_squared(self):
        np.testing.assert_array_equal(mat_poly_eval([1, 0, 1], SWAP), 2 * np.eye(2))

    def test_empty_coeffs(self):
        with pytest.raises(ValueError):
            mat_poly_eval([], np.eye(2))

    def test_cayley_hamilton(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            k = int(rng.integers(1, 7))
            A = rand_matrix(rng, k)
            R = mat_poly_eval(charpoly(A), A)
            assert op_norm(R) <= 1e-9 * max(1.0, op_norm(A)) ** k * 10


class TestNilpotency:
    def test_examples(self):
        assert nilpotency_order(jordan(3), 0) == 3
        assert nilpotency_order(2.5 * np.eye(2), 2.5) == 1
        assert nilpotency_order(np.diag([1, 2]), 1) is None

    def test_scale_aware(self):
        # a large nilpotent block is still recognized
        assert nilpotency_order(1e6 * jordan(3), 0) == 3


def test_cond_of_orthonormal_is_one():
    assert cond(np.eye(3)) == pytest.approx(1)
    assert cond(np.array([[1, 1], [0, 0]])) == np.inf


@given(st.integers(1, 6), st.integers(0, 6))
def test_numerical_rank_of_diag(k, r):
    r = min(r, k)
    d = np.r_[np.ones(r), np.zeros(k - r)]
    assert numerical_rank(np.diag(d), 1e-10) == r
