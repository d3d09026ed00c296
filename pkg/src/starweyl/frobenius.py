"""Power-series fundamental system on the potential-free collar.

On (0, x0] the potential vanishes, so the series

    C_k(x, lambda) = x^{xi_k} sum_mu c_{k mu} (rho x)^{n mu},
    c_{k mu} = c_{k, mu-1} / delta(xi_k + mu n),

solves the equation exactly.  The series is entire in lambda x^n with
super-factorial coefficient decay, so plain term accumulation with a
three-term lookahead stop is adequate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ResonantExponent, TruncationFailure, WronskianDeviation
from .exponents import EdgeModel, ExponentSet, IndicialPolynomial, indicial_eval

MAX_TERMS = 300
TERM_EPS = 1e-16


@dataclass(frozen=True)
class SeriesEvaluation:
    edge: int
    k: int
    deriv: int
    x: float
    lam: complex
    value: complex
    terms_used: int
    truncation: float


def series_coefficients(p: IndicialPolynomial, exps: ExponentSet, k: int, M: int):
    """Coefficients c_{k,0}..c_{k,M} of the k-th series solution (1-based k)."""
    n = p.order
    xi = exps.roots[k - 1]
    c = np.empty(M + 1, dtype=complex)
    c[0] = exps.leading[k - 1]
    for mu in range(1, M + 1):
        d = indicial_eval(p, xi + mu * n)
        if abs(d) < 1e-13 * max(1.0, abs(xi + mu * n) ** n):
            raise ResonantExponent(
                f"delta(xi_{k} + {mu}n) ~ 0; exponent set inconsistent with admissibility"
            )
        c[mu] = c[mu - 1] / d
    return c


def eval_C(
    edge: EdgeModel,
    exps: ExponentSet,
    k: int,
    deriv: int,
    x: float,
    lam: complex,
    p: IndicialPolynomial | None = None,
) -> SeriesEvaluation:
    """The k-th collar solution (or a derivative) at a point.

    value = sum_mu c_{k mu} lambda^mu [prod_{i<deriv}(xi + n mu - i)] x^{xi + n mu - deriv}
    with x real positive, x^a := exp(a ln x).
    """
    if x <= 0:
        raise ValueError("series evaluation requires x > 0")
    from .exponents import build_indicial  # local to avoid import cycle at module load

    if p is None:
        p = build_indicial(edge)
    n = edge.order
    xi = exps.roots[k - 1]
    lnx = math.log(x)

    c = exps.leading[k - 1]
    zpow = 1.0 + 0.0j                      # lambda^mu; x^{n mu} lives in the exp factor
    z = complex(lam)
    total = 0.0 + 0.0j
    smallest = math.inf
    tiny_run = 0
    mu = 0
    while mu <= MAX_TERMS:
        a = xi + n * mu
        fact = 1.0 + 0.0j
        for i in range(deriv):
            fact *= a - i
        term = c * zpow * fact * np.exp((a - deriv) * lnx)
        total += term
        t = abs(term)
        if t > 0:
            smallest = min(smallest, t)
        thresh = TERM_EPS * (abs(total) + (smallest if smallest < math.inf else 0.0))
        if t < thresh or t == 0.0:
            tiny_run += 1
            if tiny_run >= 3:
                return SeriesEvaluation(edge.index, k, deriv, x, lam, total, mu + 1, t)
        else:
            tiny_run = 0
        mu += 1
        d = indicial_eval(p, xi + mu * n)
        if abs(d) < 1e-13 * max(1.0, abs(xi + mu * n) ** n):
            raise ResonantExponent(f"delta(xi_{k} + {mu}n) ~ 0 during evaluation")
        c = c / d
        zpow *= z
    raise TruncationFailure(
        f"series for edge {edge.index}, k={k} did not settle in {MAX_TERMS} terms"
    )


def basis_at_collar(edge: EdgeModel, exps: ExponentSet, lam: complex) -> np.ndarray:
    """n x n matrix W[k-1][nu] of collar-series values at x = x0.

    Rows are the n solutions, columns derivative orders 0..n-1; the exact
    unit-Wronskian property is checked and a deviation beyond 1e-6 raises.
    """
    from .exponents import build_indicial

    n = edge.order
    p = build_indicial(edge)
    W = np.empty((n, n), dtype=complex)
    for k in range(1, n + 1):
        for nu in range(n):
            W[k - 1, nu] = eval_C(edge, exps, k, nu, edge.collar, lam, p=p).value
    det = complex(np.linalg.det(W))
    if abs(det - 1.0) > 1e-6:
        raise WronskianDeviation(
            f"edge {edge.index}: |det - 1| = {abs(det - 1.0):.3e} at lambda = {lam}"
        )
    return W
