import math

import numpy as np
import pytest

from starweyl import complex_power, omega_constants, root_power, sector_frame
from starweyl.errors import BoundaryArgument


class TestSectorFrame:
    def test_n2_first_quadrant(self):
        f = sector_frame(2, math.pi / 4)
        assert f.roots[0] == pytest.approx(-1.0)
        assert f.roots[1] == pytest.approx(1.0)
        assert f.eta == (1, 0)

    def test_n2_real_axis_is_interior(self):
        # Re(rho*(-1)) = -1 < 1 = Re(rho*1): strict, no tie at arg = 0
        f = sector_frame(2, 0.0)
        assert f.roots[0] == pytest.approx(-1.0)
        assert f.roots[1] == pytest.approx(1.0)

    def test_n2_boundary_raises(self):
        with pytest.raises(BoundaryArgument):
            sector_frame(2, math.pi / 2)

    def test_ordering_strictly_increasing(self):
        for n in (2, 3, 4):
            for arg in (0.3, -0.7, 1.1):
                f = sector_frame(n, arg)
                rho = np.exp(1j * arg)
                re = [(rho * r).real for r in f.roots]
                assert all(re[i] < re[i + 1] - 1e-9 for i in range(n - 1))

    def test_eta_is_permutation(self):
        for n in (2, 3, 5):
            f = sector_frame(n, 0.3)
            assert sorted(f.eta) == list(range(n))


class TestPowers:
    def test_complex_power_principal(self):
        assert complex_power(1j, 2.0) == pytest.approx(-1.0)
        # arg in (-pi, pi]: (-1)^0.5 uses arg = +pi
        assert complex_power(-1.0, 0.5) == pytest.approx(1j)

    def test_root_power_branch(self):
        f = sector_frame(2, 0.3)
        # R_1 = -1 with eta_1 = 1: R_1^xi = exp(2 pi i xi * 1/2) = exp(i pi xi)
        assert root_power(f, 1, -1.0) == pytest.approx(np.exp(-1j * math.pi))
        assert root_power(f, 1, 2.0) == pytest.approx(1.0)
        assert root_power(f, 2, -1.0) == pytest.approx(1.0)  # eta_2 = 0


class TestOmega:
    @staticmethod
    def _omegas(roots):
        from types import SimpleNamespace

        f = sector_frame(2, 0.3)
        return omega_constants(f, SimpleNamespace(roots=roots))

    def test_classical_n2(self):
        big, small = self._omegas((0.0, 1.0))
        # Omega_1 = R_1^0 = 1, Omega_2 = det [[1, -1], [1, 1]] = 2
        assert big[1] == pytest.approx(1.0)
        assert big[2] == pytest.approx(2.0)
        assert small[0] == pytest.approx(1.0)
        assert small[1] == pytest.approx(0.5)

    def test_singular_n2(self):
        # xi = (-1, 2): Omega_1 = R_1^{-1} = exp(-i pi) = -1,
        # Omega_2 = det [[-1, 1], [1, 1]] = -2
        big, small = self._omegas((-1.0, 2.0))
        assert big[1] == pytest.approx(-1.0)
        assert big[2] == pytest.approx(-2.0)
        assert small[0] == pytest.approx(-1.0)
        assert small[1] == pytest.approx(0.5)
