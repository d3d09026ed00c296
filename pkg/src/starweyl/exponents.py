"""Indicial polynomials, Frobenius exponents and the leading-coefficient normalization.

Each edge of the graph carries an n-th order equation with a regular
singularity at x = 0.  The local solution structure there is governed by a
degree-n "indicial" polynomial in the exponent variable; its roots (sorted by
real part) are the Frobenius exponents of the edge, and the leading series
coefficients are normalized so that their product equals the inverse of the
Vandermonde determinant of the exponents.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AdmissibilityViolation, NonConvergence

ADMISSIBILITY_TOL = 1e-8


@dataclass(frozen=True)
class CollaredPolynomial:
    """Piecewise polynomial that is identically 0 on [0, x0].

    For x > x0 the value is sum_i a_i (x - x0)^i.  The collar makes every
    smoothness/integrability hypothesis on the potential hold trivially and
    keeps the power-series fundamental system exact on (0, x0].
    """

    x0: float
    coeffs: tuple = ()

    def __post_init__(self):
        if self.x0 <= 0:
            raise ValueError("collar end x0 must be positive")
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))

    def __call__(self, x):
        if x <= self.x0:
            return 0.0 + 0.0j
        t = x - self.x0
        acc = 0.0 + 0.0j
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    @property
    def is_zero(self):
        return all(c == 0 for c in self.coeffs)


@dataclass(frozen=True)
class EdgeModel:
    """One edge of the star: length, singular coefficients and potential.

    ``nu`` holds the singular coefficients for mu = 0..n-2; ``potentials``
    holds one CollaredPolynomial per mu = 0..n-2 (q identically 0 is the empty
    polynomial).  ``collar`` is the common collar end x0 with 0 < x0 < length.
    """

    index: int
    length: float
    order: int
    nu: tuple
    potentials: tuple
    collar: float

    def __post_init__(self):
        n = self.order
        if n < 2:
            raise ValueError("order must be at least 2")
        if not (0 < self.collar < self.length):
            raise ValueError(f"edge {self.index}: need 0 < collar < length")
        object.__setattr__(self, "nu", tuple(complex(v) for v in self.nu))
        if len(self.nu) != n - 1:
            raise ValueError(f"edge {self.index}: expected {n - 1} nu coefficients")
        pots = tuple(self.potentials)
        if len(pots) != n - 1:
            raise ValueError(f"edge {self.index}: expected {n - 1} potential components")
        for q in pots:
            if q.x0 < self.collar - 1e-15:
                raise ValueError(
                    f"edge {self.index}: potential collar {q.x0} shorter than edge collar"
                )
        object.__setattr__(self, "potentials", pots)


def classical_edge(index, length=1.0, order=2, collar=0.05):
    """Edge with no singular coefficients and no potential."""
    zero = CollaredPolynomial(collar, ())
    return EdgeModel(index, length, order, (0.0,) * (order - 1), (zero,) * (order - 1), collar)


@dataclass(frozen=True)
class IndicialPolynomial:
    """delta(xi) in both the falling-factorial and the monomial basis.

    ``nu`` are the falling-factorial coefficients nu_0..nu_n (nu_n = 1,
    nu_{n-1} = 0 forced); ``mono`` are the expanded monomial coefficients
    d_0..d_n.
    """

    order: int
    nu: tuple
    mono: tuple


def build_indicial(edge: EdgeModel) -> IndicialPolynomial:
    """Expand delta(xi) = sum_mu nu_mu * prod_{k<mu}(xi - k) into monomials."""
    n = edge.order
    nu_full = tuple(edge.nu) + (0.0 + 0.0j, 1.0 + 0.0j)
    mono = np.zeros(n + 1, dtype=complex)
    # falling factorial prod_{k=0}^{mu-1}(xi - k), built up by convolution
    ff = np.array([1.0 + 0.0j])
    for mu in range(n + 1):
        mono[: len(ff)] += nu_full[mu] * ff
        ff = np.convolve(ff, np.array([-mu, 1.0 + 0.0j]))
    return IndicialPolynomial(n, nu_full, tuple(mono))


def indicial_eval(p: IndicialPolynomial, xi: complex) -> complex:
    """Horner evaluation of delta(xi) via the monomial expansion."""
    acc = 0.0 + 0.0j
    for d in reversed(p.mono):
        acc = acc * xi + d
    return acc


def durand_kerner(mono, tol=1e-13, max_iter=500):
    """All roots of a monic polynomial by simultaneous iteration.

    ``mono`` are monomial coefficients d_0..d_n with d_n = 1.  Returns an
    unordered array of the n roots.
    """
    d = np.asarray(mono, dtype=complex)
    n = len(d) - 1
    radius = 1.0 + max(abs(c) for c in d[:-1]) if n else 1.0
    # offset angle breaks symmetry with real-coefficient polynomials
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))

    def val(x):
        acc = np.zeros_like(x)
        for c in reversed(d):
            acc = acc * x + c
        return acc

    for _ in range(max_iter):
        f = val(z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        denom = diff.prod(axis=1)
        step = f / denom
        z = z - step
        if np.max(np.abs(step)) < tol * max(1.0, np.max(np.abs(z))):
            return z
    raise NonConvergence(f"Durand-Kerner did not converge in {max_iter} iterations")


@dataclass(frozen=True)
class ExponentSet:
    """Frobenius exponents of one edge with the shared normalization.

    roots are sorted ascending by real part; ``leading`` are the c_{k0} with
    prod_k c_{k0} = 1 / vandermonde.
    """

    roots: tuple
    leading: tuple
    theta: float
    vandermonde: complex
    order: int = field(default=0)


def solve_exponents(p: IndicialPolynomial, tol=ADMISSIBILITY_TOL) -> ExponentSet:
    """Roots of the indicial polynomial plus admissibility checks.

    Raises AdmissibilityViolation when the exponent configuration falls into
    one of the excluded (logarithmic / degenerate) cases.
    """
    n = p.order
    roots = durand_kerner(p.mono)
    # polish with a couple of plain Newton steps; derivative from mono
    dmono = np.array([i * p.mono[i] for i in range(1, n + 1)], dtype=complex)
    for _ in range(3):
        f = np.array([indicial_eval(p, z) for z in roots])
        df = np.array([_horner(dmono, z) for z in roots])
        mask = np.abs(df) > 1e-300
        roots[mask] -= f[mask] / df[mask]
    for z in roots:
        if abs(indicial_eval(p, z)) > 1e-10 * max(1.0, abs(z) ** n):
            raise NonConvergence(f"residual too large at root {z}")

    order = np.argsort([z.real for z in roots], kind="stable")
    roots = roots[order]

    for k in range(n - 1):
        if roots[k + 1].real - roots[k].real < tol:
            raise AdmissibilityViolation(
                "RealPartCollision",
                f"Re xi_{k + 1} and Re xi_{k + 2} within {tol}",
            )
    for k in range(n):
        for m in range(n):
            if k == m:
                continue
            diff = roots[k] - roots[m]
            s = round(diff.real / n)
            if abs(diff - n * s) < tol:
                raise AdmissibilityViolation(
                    "DifferenceMultipleOfN",
                    f"xi_{k + 1} - xi_{m + 1} = {diff} is within {tol} of {n * s}",
                )
    for k in range(n):
        for m in range(0, n - 2):
            if abs(roots[k] - m) < tol:
                raise AdmissibilityViolation(
                    "ForbiddenIntegerExponent",
                    f"xi_{k + 1} = {roots[k]} within {tol} of integer {m}",
                )

    vdm = 1.0 + 0.0j
    for k in range(n):
        for m in range(k + 1, n):
            vdm *= roots[m] - roots[k]
    leading = (1.0 / vdm,) + (1.0 + 0.0j,) * (n - 1)
    theta = n - 1 - (roots[-1].real - roots[0].real)
    return ExponentSet(tuple(roots), leading, theta, vdm, n)


def _horner(coeffs_ascending, x):
    acc = 0.0 + 0.0j
    for c in reversed(coeffs_ascending):
        acc = acc * x + c
    return acc


def edge_exponents(edge: EdgeModel) -> ExponentSet:
    """Convenience: indicial polynomial and exponent set of an edge."""
    return solve_exponents(build_indicial(edge))
