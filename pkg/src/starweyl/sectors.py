"""Branch conventions for complex powers and sector-wise root ordering.

lambda = rho^n; inside each open sector of angle pi/n the n-th roots of unity
can be numbered so that Re(rho R_1) < ... < Re(rho R_n).  The numbering (a
permutation eta of 0..n-1) and the agreed branch rules

    rho^mu = exp(mu (ln|rho| + i arg rho)),  arg rho in (-pi, pi],
    R_k^mu = exp(2 pi i mu eta_k / n)

are what downstream asymptotic checks depend on.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryArgument, DegenerateOmega, ZeroBase

TIE_TOL = 1e-9
OMEGA_TOL = 1e-12


@dataclass(frozen=True)
class SectorFrame:
    """Ordering data of the n-th roots of unity for one value of arg rho."""

    order: int
    sector_index: int
    eta: tuple          # permutation of 0..n-1
    roots: tuple        # R_k = exp(2 pi i eta_k / n)
    arg_rho: float


def sector_frame(n: int, arg_rho: float) -> SectorFrame:
    """Number the roots of unity so Re(rho R_k) is strictly increasing.

    Raises BoundaryArgument when two Re(rho R_k) values tie to within 1e-9 --
    the failure mode of the ordering, rather than a test against the angular
    grid itself.
    """
    if not (-math.pi < arg_rho <= math.pi):
        raise BoundaryArgument(f"arg rho = {arg_rho} outside (-pi, pi]")
    rho = cmath.exp(1j * arg_rho)
    eps = [cmath.exp(2j * math.pi * k / n) for k in range(n)]
    keys = [(rho * e).real for e in eps]
    eta = sorted(range(n), key=lambda k: keys[k])
    for a, b in zip(eta, eta[1:]):
        if keys[b] - keys[a] < TIE_TOL:
            raise BoundaryArgument(
                f"Re(rho R) tie within {TIE_TOL} at arg rho = {arg_rho}"
            )
    roots = tuple(eps[k] for k in eta)
    k0 = math.floor(arg_rho * n / math.pi)
    return SectorFrame(n, k0, tuple(eta), roots, arg_rho)


def complex_power(rho: complex, mu: complex) -> complex:
    """Principal-argument power: exp(mu (ln|rho| + i arg rho))."""
    if rho == 0:
        raise ZeroBase("rho = 0 has no principal power")
    return cmath.exp(mu * (math.log(abs(rho)) + 1j * cmath.phase(rho)))


def root_power(frame: SectorFrame, k: int, mu: complex) -> complex:
    """R_k^mu := exp(2 pi i mu eta_k / n).  1-based k.

    This is a branch *definition*, not the principal power of the complex
    number R_k; additivity in mu is exact.
    """
    eta_k = frame.eta[k - 1]
    return cmath.exp(2j * math.pi * mu * eta_k / frame.order)


def omega_constants(frame: SectorFrame, exps):
    """The determinants Omega_0..Omega_n and ratios omega_k = Omega_{k-1}/Omega_k.

    Omega_k = det[R_l^{xi_mu}] over l, mu = 1..k with the frame's root-power
    branch.  Raises DegenerateOmega when any |Omega_k| falls below 1e-12.
    """
    n = frame.order
    xi = exps.roots
    big = [1.0 + 0.0j]
    for k in range(1, n + 1):
        mat = np.array(
            [[root_power(frame, l, xi[m]) for m in range(k)] for l in range(1, k + 1)]
        )
        val = complex(np.linalg.det(mat))
        if abs(val) < OMEGA_TOL:
            raise DegenerateOmega(f"|Omega_{k}| = {abs(val)} below {OMEGA_TOL}")
        big.append(val)
    small = [big[k - 1] / big[k] for k in range(1, n + 1)]
    return tuple(big), tuple(small)
