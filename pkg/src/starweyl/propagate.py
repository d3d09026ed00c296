"""Numerical fundamental system on [x0, l] from exact collar data.

The potential vanishes on [0, x0], so the collar series gives *exact* initial
data at x0; from there the equation is integrated as a first-order companion
system.  The companion matrix is trace free (no y^{(n-1)} coefficient), so the
Wronskian of the basis is conserved and |det W - 1| is a free accuracy
diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import StepLimitExceeded, WronskianDrift
from .exponents import EdgeModel, ExponentSet, edge_exponents
from .frobenius import basis_at_collar

DRIFT_TOL = 1e-7


@dataclass(frozen=True)
class IntegrationSettings:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_steps: int = 100_000
    initial_step_fraction: float = 1e-3

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be positive")


DEFAULT_SETTINGS = IntegrationSettings()


@dataclass(frozen=True)
class BasisValues:
    """S-basis values at one point: W[k-1][nu] = S_k^{(nu)}(x, lambda)."""

    edge: int
    lam: complex
    x: float
    matrix: np.ndarray
    wronskian_drift: float


def companion_apply(edge: EdgeModel, lam: complex, x: float, v: np.ndarray) -> np.ndarray:
    """Derivative of the state (y, y', ..., y^{(n-1)}) at x."""
    n = edge.order
    out = np.empty(n, dtype=complex)
    out[:-1] = v[1:]
    acc = lam * v[0]
    for mu in range(n - 1):
        coef = edge.nu[mu] / x ** (n - mu) + edge.potentials[mu](x)
        acc -= coef * v[mu]
    out[-1] = acc
    return out


def _rhs(edge: EdgeModel, lam: complex):
    n = edge.order
    nu = np.array(edge.nu)
    pots = edge.potentials

    def fun(x, y):
        W = y.reshape(n, n)          # rows = solutions, columns = derivatives
        dW = np.empty_like(W)
        dW[:, :-1] = W[:, 1:]
        coef = nu / x ** (n - np.arange(n - 1)) + np.array([q(x) for q in pots])
        dW[:, -1] = lam * W[:, 0] - W[:, : n - 1] @ coef
        return dW.reshape(-1)

    return fun


def integrate_basis(
    edge: EdgeModel,
    lam: complex,
    settings: IntegrationSettings = DEFAULT_SETTINGS,
    exps: ExponentSet | None = None,
) -> BasisValues:
    """Propagate the collar basis to x = l and record the Wronskian drift."""
    return integrate_dense(edge, lam, [edge.length], settings, exps=exps)[0]


def integrate_dense(
    edge: EdgeModel,
    lam: complex,
    mesh,
    settings: IntegrationSettings = DEFAULT_SETTINGS,
    exps: ExponentSet | None = None,
):
    """BasisValues at each mesh point (strictly increasing, within [x0, l])."""
    mesh = list(mesh)
    if not mesh:
        return []
    if any(b <= a for a, b in zip(mesh, mesh[1:])):
        raise ValueError("mesh must be strictly increasing")
    if mesh[0] < edge.collar - 1e-15 or mesh[-1] > edge.length + 1e-12:
        raise ValueError("mesh must lie within [x0, l]")
    if exps is None:
        exps = edge_exponents(edge)

    W0 = basis_at_collar(edge, exps, lam)
    if abs(mesh[-1] - edge.collar) < 1e-15:
        # degenerate span: everything sits at the collar itself
        return [_record(edge, lam, x, W0) for x in mesh]

    sol = solve_ivp(
        _rhs(edge, lam),
        (edge.collar, mesh[-1]),
        W0.reshape(-1),
        method="RK45",
        t_eval=mesh,
        rtol=settings.rtol,
        atol=settings.atol,
        first_step=settings.initial_step_fraction * (edge.length - edge.collar),
    )
    if not sol.success:
        raise StepLimitExceeded(f"edge {edge.index}: integrator failed: {sol.message}")
    if sol.nfev > 8 * settings.max_steps:
        raise StepLimitExceeded(f"edge {edge.index}: step budget {settings.max_steps} exceeded")

    out = []
    for i, x in enumerate(mesh):
        W = sol.y[:, i].reshape(edge.order, edge.order).copy()
        out.append(_record(edge, lam, x, W))
    return out


def _record(edge, lam, x, W):
    drift = abs(complex(np.linalg.det(W)) - 1.0)
    if drift > DRIFT_TOL:
        raise WronskianDrift(
            f"edge {edge.index}: |det W - 1| = {drift:.3e} at x = {x}, lambda = {lam}"
        )
    return BasisValues(edge.index, lam, x, W, drift)
