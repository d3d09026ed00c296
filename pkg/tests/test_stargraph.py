import math

import numpy as np
import pytest

from starweyl import (
    char_function,
    direct_internal_weyl,
    eigen_scan,
    eval_Uform,
    graph_basis,
    invert_Uchain,
    psi_boundary_values,
    solve_weyl,
    star_graph,
    weyl_matrix,
    weyl_record,
)
from starweyl.presets import classical_star, cubic_star_e2, potential_star, singular_star_e1
from starweyl.stargraph import matching_residual


class TestUForms:
    def test_identity_forms_pick_derivatives(self):
        g = np.eye(3)
        vals = np.array([1.0, 2.0, 3.0], dtype=complex)
        for nu in range(3):
            assert eval_Uform(g, vals, nu) == pytest.approx(vals[nu])

    def test_triangular_chain_inversion(self):
        g = np.array([[2.0, 0.0], [1.0, 3.0]])
        vals = np.array([1.5, -0.5], dtype=complex)
        u = np.array([eval_Uform(g, vals, nu) for nu in range(2)])
        back = invert_Uchain(g, u)
        assert np.allclose(back, vals)


class TestForwardWeyl:
    def test_closed_form_M112(self):
        # classical star, lambda = 1 (rho = 1):
        # M_{112} = -(sinh^2 1 + 2 cosh^2 1) / (3 sinh 1 cosh 1)
        m = classical_star()
        M = weyl_matrix(m, 1, 1.0)
        s, c = math.sinh(1.0), math.cosh(1.0)
        expected = -(s * s + 2 * c * c) / (3 * s * c)
        assert M[0, 1] == pytest.approx(expected, abs=1e-10)

    def test_unit_triangular_shape(self):
        m = cubic_star_e2()
        M = weyl_matrix(m, 2, 3.0 + 1.0j)
        n = 3
        for k in range(n):
            assert M[k, k] == 1.0
            for j in range(k):
                assert M[k, j] == 0.0

    def test_matching_residual_small(self):
        m = singular_star_e1()
        lam = 4.0 + 0.5j
        basis = graph_basis(m, lam)
        for k in (1,):
            row = solve_weyl(m, 1, k, lam, basis)
            assert matching_residual(m, row, basis) < 1e-9

    def test_near_pole_flag_at_eigenvalue(self):
        m = classical_star()
        lam = -(math.pi**2) / 4  # Dirichlet-type eigenvalue, Delta_11 = 0
        row = solve_weyl(m, 1, 1, lam)
        assert row.near_pole

    def test_psi_continuity_across_vertex(self):
        # the order-k Weyl solution is continuous at the internal vertex:
        # its U-forms of order < k agree between edges (identity forms here)
        m = classical_star()
        lam = 2.5
        basis = graph_basis(m, lam)
        row = solve_weyl(m, 1, 1, lam, basis)
        v1 = psi_boundary_values(m, row, basis, 1)
        v2 = psi_boundary_values(m, row, basis, 2)
        assert v1[0] == pytest.approx(v2[0], rel=1e-9)


class TestCharFunction:
    def test_zero_at_eigenvalue(self):
        m = classical_star()
        onpi = char_function(m, 1, 1, -(math.pi**2) / 4)
        off = char_function(m, 1, 1, -2.0)
        assert abs(onpi) < 1e-8 * abs(off)

    def test_classical_closed_form_factorization(self):
        # with the S-basis (S_2 = sinh(rho x)/rho) and the fixed orderings:
        # Delta_11(rho^2) = 3 sinh^2(rho) cosh(rho) / rho^2, entire in lambda
        m = classical_star()
        for rho in (1.0, 2.0, 0.5j + 1.0):
            lam = rho**2
            import cmath

            expected = 3 * cmath.sinh(rho) ** 2 * cmath.cosh(rho) / rho**2
            assert char_function(m, 1, 1, lam) == pytest.approx(expected, rel=1e-8)

    def test_value_at_lambda_zero(self):
        # the rho^-2 normalization of S_2 removes the sinh-zero at lambda = 0:
        # Delta_11(0) = 3, not 0
        m = classical_star()
        assert char_function(m, 1, 1, 0.0) == pytest.approx(3.0, rel=1e-9)

    def test_conjugation_symmetry(self):
        m = singular_star_e1()
        lam = 2.0 + 1.5j
        a = char_function(m, 1, 1, lam)
        b = char_function(m, 1, 1, lam.conjugate())
        assert a == pytest.approx(b.conjugate(), rel=1e-9)


class TestDirectInternalWeyl:
    def test_closed_form_coth(self):
        # classical edge: m_{N,12}(rho^2) = rho coth(rho l)
        m = classical_star()
        rho = 1.0
        mv = direct_internal_weyl(m, 3, rho**2)
        assert mv.matrix[0, 1] == pytest.approx(rho / math.tanh(rho), rel=1e-10)

    def test_independent_of_other_edges(self):
        # m_3 only sees edge 3, which is classical in both models
        lam = 2.0
        a = direct_internal_weyl(classical_star(), 3, lam).matrix
        b = direct_internal_weyl(singular_star_e1(), 3, lam).matrix
        assert np.allclose(a, b, rtol=1e-10)


class TestEigenScan:
    def test_classical_dirichlet_neumann_spectrum(self):
        m = classical_star()
        zeros = eigen_scan(m, 1, 1, -12.0, -0.5, grid_size=120)
        found = [z.lam.real for z in zeros if z.converged]
        assert len(found) == 2
        assert abs(found[0] - (-(math.pi**2))) < 1e-6
        assert abs(found[1] - (-(math.pi**2) / 4)) < 1e-6

    def test_no_spurious_zeros(self):
        m = classical_star()
        zeros = eigen_scan(m, 1, 1, -2.0, -0.5, grid_size=60)
        assert zeros == []


class TestPotentialModel:
    def test_forward_weyl_runs_with_potential(self):
        m = potential_star()
        rec = weyl_record(m, 1, 3.0)
        assert len(rec.rows) == 1
        assert not rec.rows[0].near_pole
