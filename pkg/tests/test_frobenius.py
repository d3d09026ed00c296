import math

import numpy as np
import pytest

from starweyl import (
    CollaredPolynomial,
    EdgeModel,
    basis_at_collar,
    build_indicial,
    classical_edge,
    edge_exponents,
    eval_C,
    series_coefficients,
)


def singular_edge():
    zero = CollaredPolynomial(0.05, ())
    return EdgeModel(1, 1.0, 2, (-2.0,), (zero,), 0.05)


class TestSeriesCoefficients:
    def test_recurrence_exact_rationals(self):
        # xi = 2, delta(xi) = xi^2 - xi - 2: c_1 = c_0/delta(4) = c_0/10,
        # c_2 = c_1/delta(6) = c_0/280; the k = 2 solution has c_0 = 1.
        e = singular_edge()
        p = build_indicial(e)
        exps = edge_exponents(e)
        c = series_coefficients(p, exps, 2, 4)
        assert abs(c[0] - 1.0) < 1e-15
        assert abs(c[1] - 1.0 / 10.0) < 1e-15 * abs(c[1])
        assert abs(c[2] - 1.0 / 280.0) < 1e-15 * abs(c[2])

    def test_leading_of_first_solution(self):
        # c_{10} = 1/vandermonde = 1/(xi_2 - xi_1) = 1/3
        e = singular_edge()
        exps = edge_exponents(e)
        c = series_coefficients(build_indicial(e), exps, 1, 2)
        assert c[0] == pytest.approx(1.0 / 3.0)


class TestClassicalClosedForm:
    """For nu = 0, n = 2: S_1 = cosh(rho x), S_2 = sinh(rho x)/rho."""

    def test_values_on_collar(self):
        e = classical_edge(1, 1.0, 2, collar=0.05)
        exps = edge_exponents(e)
        lam = 1.0 + 0.0j  # rho = 1
        x = 0.05
        assert eval_C(e, exps, 1, 0, x, lam).value == pytest.approx(math.cosh(x), rel=1e-13)
        assert eval_C(e, exps, 1, 1, x, lam).value == pytest.approx(math.sinh(x), rel=1e-13)
        assert eval_C(e, exps, 2, 0, x, lam).value == pytest.approx(math.sinh(x), rel=1e-13)
        assert eval_C(e, exps, 2, 1, x, lam).value == pytest.approx(math.cosh(x), rel=1e-13)

    def test_negative_lambda(self):
        # rho^2 = -4: S_1 = cos(2x)
        e = classical_edge(1, 1.0, 2, collar=0.05)
        exps = edge_exponents(e)
        v = eval_C(e, exps, 1, 0, 0.05, -4.0 + 0.0j).value
        assert v == pytest.approx(math.cos(0.1), rel=1e-13)


class TestSingularClosedForm:
    """For nu_0 = -2, n = 2 the exact solutions are
    S_1 = (rho/6)(u_- - u_+), S_2 = (3/rho^2) E(rho x) with
    u_+- = exp(+-t)(1 -+ 1/t), E(t) = cosh t - sinh t / t, t = rho x."""

    def test_second_solution(self):
        e = singular_edge()
        exps = edge_exponents(e)
        rho = 2.0
        x = 0.04
        t = rho * x
        expected = (3.0 / rho**2) * (math.cosh(t) - math.sinh(t) / t)
        assert eval_C(e, exps, 2, 0, x, rho**2).value == pytest.approx(expected, rel=1e-12)

    def test_first_solution(self):
        e = singular_edge()
        exps = edge_exponents(e)
        rho = 2.0
        x = 0.04
        t = rho * x
        expected = (rho / 6.0) * (
            math.exp(-t) * (1 + 1 / t) - math.exp(t) * (1 - 1 / t)
        )
        assert eval_C(e, exps, 1, 0, x, rho**2).value == pytest.approx(expected, rel=1e-12)


class TestCollarWronskian:
    @pytest.mark.parametrize("lam", [1.0, -25.0, 3.0 + 4.0j, 100.0j])
    def test_unit_wronskian_classical(self, lam):
        e = classical_edge(1, 1.0, 2, collar=0.05)
        W = basis_at_collar(e, edge_exponents(e), lam)
        assert abs(np.linalg.det(W) - 1.0) < 1e-9

    @pytest.mark.parametrize("lam", [1.0, -25.0, 3.0 + 4.0j])
    def test_unit_wronskian_singular(self, lam):
        e = singular_edge()
        W = basis_at_collar(e, edge_exponents(e), lam)
        assert abs(np.linalg.det(W) - 1.0) < 1e-9

    def test_unit_wronskian_cubic(self):
        zero = CollaredPolynomial(0.05, ())
        e = EdgeModel(1, 1.0, 3, (3.0, -3.0), (zero, zero), 0.05)
        W = basis_at_collar(e, edge_exponents(e), 7.0 - 2.0j)
        assert abs(np.linalg.det(W) - 1.0) < 1e-9

    def test_x_must_be_positive(self):
        e = classical_edge(1)
        with pytest.raises(ValueError):
            eval_C(e, edge_exponents(e), 1, 0, 0.0, 1.0)
