"""Large-|rho| deviation check for the seeded Weyl solution.

The order-k Weyl solution at its own vertex behaves like

    psi_{sks}(x, rho^n) = (omega_k / rho^{xi_k}) exp(rho R_k x) (1 + o(1)),

with the sector's root ordering and the agreed power branches.  Verifying the
o(1) numerically is a connection problem across the whole edge: the target is
exponentially small against basis entries of size exp(+|Re rho R_n| l), so
the computation is done in adaptive-precision arithmetic.  Only models whose
potentials vanish identically are supported -- then the collar series is the
exact fundamental system on the full edge and no integration is needed.
"""

from __future__ import annotations

import math

import mpmath as mp

from .errors import DegenerateOmega
from .sectors import sector_frame
from .stargraph import GraphModel

_MAX_TERMS = 4000


def _mp_indicial(edge):
    """Monomial coefficients of delta(xi) in mp arithmetic."""
    n = edge.order
    nu_full = list(edge.nu) + [0.0, 1.0]
    mono = [mp.mpc(0)] * (n + 1)
    ff = [mp.mpc(1)]
    for mu in range(n + 1):
        c = mp.mpc(nu_full[mu])
        for i, f in enumerate(ff):
            mono[i] += c * f
        # multiply ff by (xi - mu)
        new = [mp.mpc(0)] * (len(ff) + 1)
        for i, f in enumerate(ff):
            new[i] += -mu * f
            new[i + 1] += f
        ff = new
    return mono


def _horner(coeffs, x):
    acc = mp.mpc(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _mp_exponents(edge, exps):
    """Refine the double-precision exponents to working precision."""
    mono = _mp_indicial(edge)
    dmono = [i * mono[i] for i in range(1, len(mono))]
    roots = []
    for xi0 in exps.roots:
        z = mp.mpc(xi0)
        for _ in range(60):
            fz = _horner(mono, z)
            dz = _horner(dmono, z)
            step = fz / dz
            z = z - step
            if abs(step) < mp.mpf(10) ** (-mp.mp.dps + 4) * max(1, abs(z)):
                break
        roots.append(z)
    n = edge.order
    vdm = mp.mpc(1)
    for a in range(n):
        for b in range(a + 1, n):
            vdm *= roots[b] - roots[a]
    leading = [1 / vdm] + [mp.mpc(1)] * (n - 1)
    return mono, roots, leading


def _series_value(mono, xi, c0, order_n, deriv, x, lam):
    """S_k^{(deriv)}(x, lambda) by exact-series summation in mp arithmetic."""
    x = mp.mpf(x)
    lnx = mp.log(x)
    z = mp.mpc(lam)       # lambda^mu; x^{n mu} lives in the exp factor
    c = c0
    zpow = mp.mpc(1)
    total = mp.mpc(0)
    eps = mp.mpf(10) ** (-mp.mp.dps + 3)
    tiny_run = 0
    mu = 0
    while mu <= _MAX_TERMS:
        a = xi + order_n * mu
        fact = mp.mpc(1)
        for i in range(deriv):
            fact *= a - i
        term = c * zpow * fact * mp.exp((a - deriv) * lnx)
        total += term
        if abs(term) < eps * (abs(total) + abs(term) + mp.mpf(10) ** (-mp.mp.dps)):
            tiny_run += 1
            if tiny_run >= 3:
                return total
        else:
            tiny_run = 0
        mu += 1
        c = c / _horner(mono, xi + order_n * mu)
        zpow *= z
    raise RuntimeError("mp series did not settle")


def _edge_data(edge, exps):
    return _mp_exponents(edge, exps)


def asymptotic_check(model: GraphModel, s: int, k: int, arg_rho: float,
                     rho_mags, x_probe: float):
    """Deviation |psi * rho^{xi_k} * exp(-rho R_k x) / omega_k - 1| per |rho|.

    Requires every potential on the graph to vanish identically (the series
    is then the exact fundamental system on each full edge).
    """
    n = model.order
    for e in model.edges:
        if any(not q.is_zero for q in e.potentials):
            raise ValueError("asymptotic check supports potential-free models only")
    if not (0 < x_probe < model.edges[s - 1].length):
        raise ValueError("probe point must be interior to edge s")

    frame = sector_frame(n, arg_rho)
    max_rho = max(rho_mags)
    max_l = max(e.length for e in model.edges)
    dps = 40 + int(1.2 * n * max_rho * max_l / math.log(10))

    devs = []
    with mp.workdps(dps):
        data = {e.index: _edge_data(e, x) for e, x in zip(model.edges, model.exponent_sets)}

        # omega_k of edge s under the frame's root-power branch
        mono_s, xi_s, c_s = data[s]
        omegas = _mp_omegas(frame, xi_s, n)

        for mag in rho_mags:
            rho = mp.mpf(mag) * mp.exp(1j * mp.mpf(arg_rho))
            lam = rho ** n

            def S(j, kk, nu, x):
                mono, xi, c0 = data[j]
                return _series_value(mono, xi[kk - 1], c0[kk - 1], n, nu, x, lam)

            if k < n:
                coeffs = _mp_solve_matching(model, s, k, lam, S)
                psi = S(s, k, 0, x_probe)
                for mu in range(k + 1, n + 1):
                    psi += coeffs[mu] * S(s, mu, 0, x_probe)
            else:
                psi = S(s, n, 0, x_probe)

            eta_k = frame.eta[k - 1]
            Rk = mp.exp(2j * mp.pi * eta_k / n)
            rho_pow = mp.exp(xi_s[k - 1] * (mp.log(abs(rho)) + 1j * mp.mpf(arg_rho)))
            dev = abs(psi * rho_pow * mp.exp(-rho * Rk * x_probe) / omegas[k - 1] - 1)
            devs.append(float(dev))
    return devs


def _mp_omegas(frame, xi, n):
    big = [mp.mpc(1)]
    for kk in range(1, n + 1):
        mat = mp.matrix(kk, kk)
        for l in range(1, kk + 1):
            for m in range(kk):
                mat[l - 1, m] = mp.exp(2j * mp.pi * xi[m] * frame.eta[l - 1] / n)
        val = mp.det(mat)
        if abs(val) < mp.mpf("1e-12"):
            raise DegenerateOmega(f"|Omega_{kk}| below 1e-12 in mp path")
        big.append(val)
    return [big[kk - 1] / big[kk] for kk in range(1, n + 1)]


def _mp_solve_matching(model, s, k, lam, S):
    """Solve the matching system in mp arithmetic; returns {mu: M_{sk mu}}."""
    n, p = model.order, model.p
    unknowns = [(s, mu) for mu in range(k + 1, n + 1)]
    for j in range(1, p + 1):
        if j != s:
            unknowns += [(j, mu) for mu in range(n - k + 1, n + 1)]
    col = {key: i for i, key in enumerate(unknowns)}
    dim = len(unknowns)
    A = mp.matrix(dim, dim)
    b = mp.matrix(dim, 1)

    svals = {}

    def sval(j, mu, nu):
        key = (j, mu, nu)
        if key not in svals:
            svals[key] = S(j, mu, nu, model.edges[j - 1].length)
        return svals[key]

    def uform(j, mu, nu):
        g = model.gamma[j - 1]
        return sum(
            (mp.mpc(complex(g[nu, m])) * sval(j, mu, m) for m in range(nu + 1)),
            start=mp.mpc(0),
        )

    def edge_terms(j):
        if j == s:
            return [(mu, col[(s, mu)]) for mu in range(k + 1, n + 1)]
        return [(mu, col[(j, mu)]) for mu in range(n - k + 1, n + 1)]

    row = 0
    for j in range(2, p + 1):
        for nu in range(k):
            for mu, c in edge_terms(1):
                A[row, c] += uform(1, mu, nu)
            for mu, c in edge_terms(j):
                A[row, c] -= uform(j, mu, nu)
            if s == 1:
                b[row] -= uform(1, k, nu)
            if s == j:
                b[row] += uform(j, k, nu)
            row += 1
    for nu in range(k, n):
        for j in range(1, p + 1):
            for mu, c in edge_terms(j):
                A[row, c] += uform(j, mu, nu)
        b[row] -= uform(s, k, nu)
        row += 1

    x = mp.lu_solve(A, b)
    return {mu: x[i] for i, (j, mu) in enumerate(unknowns) if j == s}
