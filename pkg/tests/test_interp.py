import math

import numpy as np
import pytest

from diagcalc.divdiff import dd_table
from diagcalc.funcspec import FunctionSpec
from diagcalc.interp import (
    HermiteData,
    NewtonForm,
    PolynomialC,
    hermite_form,
    hermite_poly,
    newton_form,
    newton_poly,
    poly_derivative_check,
)

from .conftest import corpus_functions, separated_points

EXP = FunctionSpec.from_expression("exp(z)")


class TestPolynomialC:
    def test_trims_trailing_zeros(self):
        assert PolynomialC([1, 2, 0, 0]).degree == 1
        assert PolynomialC([0, 0]).degree == 0

    def test_eval_and_derivative(self):
        p = PolynomialC([1, 0, 3])
        assert p(2) == 13
        np.testing.assert_array_equal(p.derivative().coeffs, [0, 6])
        assert p.derivative(5).degree == 0


class TestNewtonPoly:
    def test_quadratic_reproduced(self):
        P = newton_poly(dd_table(FunctionSpec.from_expression("z^2"), (0, 1, 2)))
        np.testing.assert_allclose(P.coeffs, [0, 0, 1], atol=1e-15)

    def test_constant(self):
        P = newton_poly(dd_table(FunctionSpec.from_expression("5"), (1, 9)))
        np.testing.assert_array_equal(P.coeffs, [5])

    def test_single_node(self):
        np.testing.assert_array_equal(newton_poly(dd_table(EXP, (0,))).coeffs, [1])

    def test_interpolates_random(self):
        rng = np.random.default_rng(20)
        funcs = corpus_functions()
        for _ in range(200):
            f = funcs[rng.integers(len(funcs))]
            n = int(rng.integers(1, 8))
            nodes = separated_points(rng, n, 0.9, 1e-3)
            nf = newton_form(dd_table(f, nodes))
            P = nf.to_monomial()
            vals = np.array([f.value(z) for z in nodes])
            scale = 1 + np.max(np.abs(vals))
            assert np.max(np.abs(np.array([nf(z) for z in nodes]) - vals)) <= 1e-8 * scale
            assert P.degree <= n - 1

    def test_eval_matrix_matches_monomial(self):
        rng = np.random.default_rng(21)
        X = rng.normal(size=(4, 4)) * 0.5
        nf = newton_form(dd_table(EXP, (0, 0.5, -0.5j, 0.3)))
        from diagcalc.numkit import mat_poly_eval

        np.testing.assert_allclose(nf.eval_matrix(X), mat_poly_eval(nf.to_monomial().coeffs, X), atol=1e-12)

    def test_degree_cap(self):
        nodes = [np.exp(2j * np.pi * m / 33) for m in range(33)]
        with pytest.raises(ValueError):
            newton_poly(dd_table(EXP, nodes))


class TestHermite:
    def test_exp_at_zero(self):
        P = hermite_poly(HermiteData.of([(0, (1, 1))]))
        np.testing.assert_array_equal(P.coeffs, [1, 1])

    def test_constant(self):
        P = hermite_poly(HermiteData.of([(2 + 1j, (7,))]))
        np.testing.assert_array_equal(P.coeffs, [7])

    def test_identity(self):
        P = hermite_poly(HermiteData.of([(0, (0,)), (1, (1,))]))
        np.testing.assert_allclose(P.coeffs, [0, 1])

    def test_residual_examples(self):
        assert poly_derivative_check(PolynomialC([0, 1]), HermiteData.of([(0, (5,))])) == 5
        assert poly_derivative_check(PolynomialC([1, 1]), HermiteData.of([(0, (1, 1))])) == 0

    def test_invalid_data(self):
        with pytest.raises(ValueError):
            HermiteData.of([(0, (1,)), (0, (2,))])
        with pytest.raises(ValueError):
            HermiteData.of([(0, ())])

    def _random_data(self, rng):
        while True:
            m = int(rng.integers(1, 5))
            ps = rng.integers(1, 4, size=m)
            if ps.sum() <= 8:
                break
        nodes = separated_points(rng, m, 1.0, 1e-2)
        pts = []
        for z, p in zip(nodes, ps):
            # values of exp and its derivatives
            pts.append((z, tuple([np.exp(z)] * int(p))))
        return HermiteData.of(pts)

    def test_residual_random(self):
        rng = np.random.default_rng(22)
        for _ in range(200):
            data = self._random_data(rng)
            P = hermite_poly(data)
            assert P.degree <= data.n_conditions - 1
            scale = 1 + max(abs(v) for _, vals in data.points for v in vals)
            assert poly_derivative_check(P, data) <= 1e-8 * scale

    def test_permutation_uniqueness(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            data = self._random_data(rng)
            perm = HermiteData(tuple(data.points[i] for i in rng.permutation(len(data.points))))
            a, b = hermite_poly(data).coeffs, hermite_poly(perm).coeffs
            n = max(len(a), len(b))
            a, b = np.pad(a, (0, n - len(a))), np.pad(b, (0, n - len(b)))
            assert np.max(np.abs(a - b)) <= 1e-9 * (1 + np.max(np.abs(a)))

    def test_matches_confluent_table(self):
        data = HermiteData.of([(0, (1, 1, 1)), (1, (math.e, math.e))])
        nf = hermite_form(data)
        t = dd_table(EXP, (0, 0, 0, 1, 1))
        np.testing.assert_allclose(nf.coeffs, t.newton_coefficients, atol=1e-14)


def test_newton_form_call_matches_monomial():
    nf = NewtonForm((0j, 1 + 0j), np.array([1, 2, 3], dtype=complex))
    # 1 + 2 z + 3 z (z - 1)
    for z in (0.3, -2, 1j):
        assert nf(z) == pytest.approx(1 + 2 * z + 3 * z * (z - 1))
        assert nf.to_monomial()(z) == pytest.approx(nf(z))
