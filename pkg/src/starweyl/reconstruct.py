"""Recover the internal Weyl matrix of one unmeasured edge from boundary data.

Given the boundary Weyl matrices M_s(lambda) for every edge except N and the
potentials on those edges, the boundary derivatives of the Weyl-type
solutions on edge N follow by pure linear algebra: expand on the source edge,
carry the continuity forms across the vertex, resolve each measured off-edge
by a small linear system, close the remaining derivatives with the Kirchhoff
sums, and take determinant ratios for m_N(lambda).  Nothing on edge N beyond
its length and matching forms is used, so the pipeline is genuinely inverse.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DenominatorSingular, GridMismatch, SigmaSingular
from .propagate import DEFAULT_SETTINGS, integrate_basis
from .stargraph import (
    GraphModel,
    direct_internal_weyl,
    eval_Uform,
    graph_basis,
    invert_Uchain,
    weyl_record,
)

SIGMA_COND = 1e10
DENOM_TOL = 1e-12


@dataclass
class PsiBoundaryData:
    """psi_{skj}^{(nu)}(l_j) with a mask of which nu are filled so far."""

    s: int
    k: int
    j: int
    lam: complex
    values: np.ndarray
    mask: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.mask is None:
            self.mask = np.ones(len(self.values), dtype=bool)


def step_edge_s(m_row: np.ndarray, basis_s: np.ndarray, s: int, k: int, lam) -> PsiBoundaryData:
    """psi on the source edge from its Weyl row: S_k + sum_{mu>k} M_{k mu} S_mu.

    ``m_row`` is row k of the unit upper-triangular M_s (1-based k, full
    length n); ``basis_s`` the S-basis value matrix at l_s.
    """
    n = basis_s.shape[0]
    vals = basis_s[k - 1].copy()
    for mu in range(k + 1, n + 1):
        vals += m_row[mu - 1] * basis_s[mu - 1]
    return PsiBoundaryData(s, k, s, complex(lam), vals)


def propagate_matching(model: GraphModel, psi_s: PsiBoundaryData):
    """Derivative values nu = 0..k-1 on every other edge via the continuity forms.

    U_{j nu}(psi_j) = U_{s nu}(psi_s) for nu < k; the triangular forms are
    back-substituted edge by edge.
    """
    s, k = psi_s.s, psi_s.k
    gam_s = model.gamma[s - 1]
    rhs = [eval_Uform(gam_s, psi_s.values, nu) for nu in range(k)]
    out = {}
    n = model.order
    for j in range(1, model.p + 1):
        if j == s:
            continue
        y = invert_Uchain(model.gamma[j - 1], rhs)
        vals = np.full(n, np.nan, dtype=complex)
        vals[:k] = y
        mask = np.zeros(n, dtype=bool)
        mask[:k] = True
        out[j] = PsiBoundaryData(s, k, j, psi_s.lam, vals, mask)
    return out


def solve_sigma(model: GraphModel, psi_j: PsiBoundaryData, basis_j: np.ndarray) -> PsiBoundaryData:
    """Complete psi on a measured off-edge from its first k derivative values.

    The k admissible basis coefficients solve the k x k system restricted to
    nu < k; the full derivative vector is then the same combination at all nu.
    """
    k, j = psi_j.k, psi_j.j
    n = model.order
    rows = list(range(n - k, n))                     # S_{n-k+1..n}, 0-based
    A = basis_j[np.ix_(rows, list(range(k)))].T      # A[nu, i]
    rhs = psi_j.values[:k]
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > SIGMA_COND:
        raise SigmaSingular(
            f"sigma system ill-conditioned (cond={cond:.2e}) on edge {j} at lambda={psi_j.lam}"
        )
    try:
        coef = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise SigmaSingular(f"sigma system singular on edge {j} at lambda={psi_j.lam}") from exc
    vals = coef @ basis_j[rows, :]
    return PsiBoundaryData(psi_j.s, k, j, psi_j.lam, np.asarray(vals, dtype=complex))


def kirchhoff_complete(model: GraphModel, psi_all: dict, psi_N: PsiBoundaryData) -> PsiBoundaryData:
    """Fill nu = k..n-1 on edge N from the Kirchhoff sums plus back-substitution."""
    k, N = psi_N.k, psi_N.j
    n = model.order
    gam_N = model.gamma[N - 1]
    vals = psi_N.values.copy()
    for nu in range(k, n):
        u = -sum(
            eval_Uform(model.gamma[j - 1], psi_all[j].values, nu)
            for j in psi_all
            if j != N
        )
        acc = u - complex(gam_N[nu, :nu] @ vals[:nu])
        vals[nu] = acc / gam_N[nu, nu]
    return PsiBoundaryData(psi_N.s, k, N, psi_N.lam, vals)


def internal_weyl_from_psi(psi_vectors: dict, n: int) -> np.ndarray:
    """m-matrix entries as determinant ratios of psi boundary derivatives.

    ``psi_vectors[k]`` is the full derivative vector of the order-k Weyl
    solution at l (k = 1..n-1).  Row 1 is a plain ratio; higher rows are
    ratios of k x k determinants.
    """
    m = np.eye(n, dtype=complex)
    scale = max(np.max(np.abs(v)) for v in psi_vectors.values()) or 1.0
    if abs(psi_vectors[1][0]) < DENOM_TOL * scale:
        raise DenominatorSingular("psi_{s1}(l) vanished")
    for nu in range(2, n + 1):
        m[0, nu - 1] = psi_vectors[1][nu - 1] / psi_vectors[1][0]
    for k in range(2, n):
        den_rows = np.array([[psi_vectors[mu][xi] for mu in range(1, k + 1)] for xi in range(k)])
        den = complex(np.linalg.det(den_rows))
        if abs(den) < DENOM_TOL * scale ** k:
            raise DenominatorSingular(f"order-{k} denominator determinant vanished")
        for nu in range(k + 1, n + 1):
            num_rows = den_rows.copy()
            num_rows[k - 1] = [psi_vectors[mu][nu - 1] for mu in range(1, k + 1)]
            m[k - 1, nu - 1] = complex(np.linalg.det(num_rows)) / den
    return m


def assemble_mN(psi_N_vectors: dict, N: int, lam, n: int):
    """InternalWeylMatrix for edge N from completed psi data."""
    from .stargraph import InternalWeylMatrix

    return InternalWeylMatrix(N, complex(lam), internal_weyl_from_psi(psi_N_vectors, n))


@dataclass
class ReconstructionReport:
    """Per-lambda m_N values with flags; every grid point is valued xor flagged."""

    grid: np.ndarray
    entries: np.ndarray          # (G, n, n), NaN-filled where flagged
    flags: list                  # str reason or None per grid point
    source: int
    N: int

    @property
    def flagged_fraction(self):
        return sum(f is not None for f in self.flags) / len(self.flags)

    def ok_indices(self):
        return [i for i, f in enumerate(self.flags) if f is None]


def _reconstruct_point(model, m_matrices, N, s, lam, settings):
    """One grid point of the inverse pipeline; returns the n x n m_N matrix."""
    n = model.order
    basis = {}
    for e, exps in zip(model.edges, model.exponent_sets):
        if e.index != N:
            basis[e.index] = integrate_basis(e, lam, settings, exps=exps).matrix

    psi_N_vectors = {}
    for k in range(1, n):
        psi_s = step_edge_s(m_matrices[s][k - 1], basis[s], s, k, lam)
        partial = propagate_matching(model, psi_s)
        psi_all = {s: psi_s}
        for j in range(1, model.p + 1):
            if j in (s, N):
                continue
            psi_all[j] = solve_sigma(model, partial[j], basis[j])
        psi_N = kirchhoff_complete(model, psi_all, partial[N])
        psi_N_vectors[k] = psi_N.values
    return internal_weyl_from_psi(psi_N_vectors, n)


def reconstruct_mN(model: GraphModel, weyl_grids: dict, N: int, source: int,
                   grid, settings=DEFAULT_SETTINGS) -> ReconstructionReport:
    """Run the inverse pipeline over a lambda grid.

    ``weyl_grids[s]`` is an array of shape (len(grid), n, n) of sampled
    boundary Weyl matrices.  Points where any stage reports a singularity are
    flagged and skipped, never silently dropped.
    """
    grid = np.asarray(grid, dtype=complex)
    n = model.order
    if source == N or source not in weyl_grids:
        raise ValueError("source vertex must be a measured edge != N")
    for s, arr in weyl_grids.items():
        if arr.shape != (len(grid), n, n):
            raise GridMismatch(
                f"grid for s={s} has shape {arr.shape}, expected {(len(grid), n, n)}"
            )

    entries = np.full((len(grid), n, n), np.nan, dtype=complex)
    flags = [None] * len(grid)
    m_grid = {source: weyl_grids[source]}
    for i, lam in enumerate(grid):
        try:
            entries[i] = _reconstruct_point(
                model, {source: m_grid[source][i]}, N, source, lam, settings
            )
        except (SigmaSingular, DenominatorSingular) as exc:
            flags[i] = f"{type(exc).__name__}: {exc}"
        except Exception as exc:  # integration/propagation failures are data too
            flags[i] = f"{type(exc).__name__}: {exc}"
    return ReconstructionReport(grid, entries, flags, source, N)


def forward_weyl_grids(model: GraphModel, N: int, grid, settings=DEFAULT_SETTINGS):
    """Sampled M_s(lambda) for every s != N (the forward side of the round trip).

    Grid points where any matching solve sits near a pole are flagged.
    """
    grid = np.asarray(grid, dtype=complex)
    n = model.order
    sources = [j for j in range(1, model.p + 1) if j != N]
    grids = {s: np.full((len(grid), n, n), np.nan, dtype=complex) for s in sources}
    flags = [None] * len(grid)
    for i, lam in enumerate(grid):
        try:
            basis = graph_basis(model, lam, settings)
            for s in sources:
                rec = weyl_record(model, s, lam, basis)
                if any(r.near_pole for r in rec.rows):
                    flags[i] = f"near_pole in M_{s}"
                grids[s][i] = rec.matrix(n)
        except Exception as exc:
            flags[i] = f"{type(exc).__name__}: {exc}"
    return grids, flags


def cross_validate(model: GraphModel, N: int, grid, sources=None,
                   settings=DEFAULT_SETTINGS):
    """Round trip: forward Weyl data -> reconstruction -> compare with direct m_N.

    Returns a dict with the per-source reports, the direct m_N grid, the max
    relative discrepancy over unflagged points and the cross-source spread.
    """
    grid = np.asarray(grid, dtype=complex)
    n = model.order
    if sources is None:
        sources = [j for j in range(1, model.p + 1) if j != N]
    weyl_grids, fwd_flags = forward_weyl_grids(model, N, grid, settings)

    direct = np.full((len(grid), n, n), np.nan, dtype=complex)
    for i, lam in enumerate(grid):
        if fwd_flags[i] is None:
            try:
                direct[i] = direct_internal_weyl(model, N, lam, settings=settings).matrix
            except Exception as exc:
                fwd_flags[i] = f"{type(exc).__name__}: {exc}"

    reports = {}
    max_disc = 0.0
    for s in sources:
        rep = reconstruct_mN(model, weyl_grids, N, s, grid, settings)
        for i in rep.ok_indices():
            if fwd_flags[i] is not None:
                rep.flags[i] = fwd_flags[i]
        reports[s] = rep
        for i in rep.ok_indices():
            d = _rel_diff(rep.entries[i], direct[i])
            max_disc = max(max_disc, d)

    spread = 0.0
    if len(sources) > 1:
        a, b = reports[sources[0]], reports[sources[1]]
        for i in range(len(grid)):
            if a.flags[i] is None and b.flags[i] is None:
                spread = max(spread, _rel_diff(a.entries[i], b.entries[i]))

    return {
        "reports": reports,
        "direct": direct,
        "forward_flags": fwd_flags,
        "max_discrepancy": max_disc,
        "source_spread": spread,
    }


def _rel_diff(A, B):
    return float(np.linalg.norm(A - B) / max(1.0, np.linalg.norm(B)))
