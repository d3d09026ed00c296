"""Star-graph model: matching systems, Weyl matrices and characteristic functions.

A Weyl-type solution of order k seeded at boundary vertex s is expanded in the
S-basis of each edge; substituting the expansions into the continuity
conditions (against edge 1) and the generalized Kirchhoff sums at the internal
vertex yields a square linear system.  Its determinant under a fixed unknown
and equation ordering is the characteristic function Delta_{sk}; its solution
gives the Weyl coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import SingularSystem
from .exponents import EdgeModel, edge_exponents
from .propagate import DEFAULT_SETTINGS, IntegrationSettings, integrate_basis

COND_POLE = 1e10
DET_POLE = 1e-10


@dataclass(eq=False)
class GraphModel:
    """Compact star: p edges of shared order n plus matching-form coefficients.

    ``gamma[j-1]`` is the lower-triangular n x n coefficient array of the
    linear forms at the internal vertex of edge j: U_{j nu}(y) =
    sum_{mu<=nu} gamma[j-1][nu, mu] y^{(mu)}(l_j).  Treat instances as
    immutable after construction.
    """

    order: int
    edges: tuple
    gamma: tuple

    def __post_init__(self):
        if len(self.edges) < 2:
            raise ValueError("a star needs at least two edges")
        self.edges = tuple(self.edges)
        for e in self.edges:
            if e.order != self.order:
                raise ValueError("all edges must share the graph order")
        g = []
        for j, gj in enumerate(self.gamma, start=1):
            arr = np.array(gj, dtype=complex)
            if arr.shape != (self.order, self.order):
                raise ValueError(f"gamma[{j}] must be {self.order}x{self.order}")
            if np.any(np.triu(arr, 1) != 0):
                raise ValueError(f"gamma[{j}] must be lower triangular")
            for nu in range(self.order):
                if arr[nu, nu] == 0:
                    raise ValueError(f"gamma[{j}][{nu}][{nu}] must be nonzero")
            g.append(arr)
        self.gamma = tuple(g)
        if len(self.gamma) != len(self.edges):
            raise ValueError("need one gamma block per edge")

    @property
    def p(self):
        return len(self.edges)

    @cached_property
    def exponent_sets(self):
        return tuple(edge_exponents(e) for e in self.edges)


def identity_gamma(n: int):
    return np.eye(n, dtype=complex)


def star_graph(edges, gamma=None):
    """GraphModel with identity matching forms unless gamma is given."""
    n = edges[0].order
    if gamma is None:
        gamma = tuple(identity_gamma(n) for _ in edges)
    return GraphModel(n, tuple(edges), tuple(gamma))


# --- linear forms -----------------------------------------------------------

def eval_Uform(gamma_j: np.ndarray, values, nu: int) -> complex:
    """U_nu(y) = sum_{mu<=nu} gamma[nu, mu] y^{(mu)}(l)."""
    v = np.asarray(values, dtype=complex)
    return complex(gamma_j[nu, : nu + 1] @ v[: nu + 1])


def invert_Uchain(gamma_j: np.ndarray, u_values) -> np.ndarray:
    """Back-substitute y^{(0..r)} from U_0..U_r; the diagonal is nonzero."""
    r = len(u_values)
    y = np.empty(r, dtype=complex)
    for nu in range(r):
        acc = complex(u_values[nu])
        if nu:
            acc -= complex(gamma_j[nu, :nu] @ y[:nu])
        y[nu] = acc / gamma_j[nu, nu]
    return y


# --- matching system --------------------------------------------------------

def graph_basis(model: GraphModel, lam, settings: IntegrationSettings = DEFAULT_SETTINGS):
    """S-basis value matrices at l_j for every edge, keyed by edge index."""
    out = {}
    for e, exps in zip(model.edges, model.exponent_sets):
        out[e.index] = integrate_basis(e, lam, settings, exps=exps).matrix
    return out


def _u_of_basis(model, basis, j, mu, nu):
    # U_{j nu}(S_{mu j}) with 1-based j, mu
    return complex(model.gamma[j - 1][nu, : nu + 1] @ basis[j][mu - 1, : nu + 1])


def _matching_system(model: GraphModel, s: int, k: int, basis):
    """Coefficient matrix, right-hand side and the unknown ordering.

    Unknowns: [M_{sk,k+1..n} on edge s] then [j ascending, j != s, each with
    mu = n-k+1..n].  Equations: continuity against edge 1 for j = 2..p,
    nu = 0..k-1, then Kirchhoff sums for nu = k..n-1.
    """
    n, p = model.order, model.p
    unknowns = [(s, mu) for mu in range(k + 1, n + 1)]
    for j in range(1, p + 1):
        if j != s:
            unknowns += [(j, mu) for mu in range(n - k + 1, n + 1)]
    col = {key: i for i, key in enumerate(unknowns)}
    dim = len(unknowns)

    A = np.zeros((dim, dim), dtype=complex)
    b = np.zeros(dim, dtype=complex)

    def edge_terms(j):
        if j == s:
            return [(mu, col[(s, mu)]) for mu in range(k + 1, n + 1)]
        return [(mu, col[(j, mu)]) for mu in range(n - k + 1, n + 1)]

    row = 0
    for j in range(2, p + 1):
        for nu in range(k):
            for mu, c in edge_terms(1):
                A[row, c] += _u_of_basis(model, basis, 1, mu, nu)
            for mu, c in edge_terms(j):
                A[row, c] -= _u_of_basis(model, basis, j, mu, nu)
            # the seeded edge carries the S_{ks} inhomogeneity
            if s == 1:
                b[row] -= _u_of_basis(model, basis, 1, k, nu)
            if s == j:
                b[row] += _u_of_basis(model, basis, j, k, nu)
            row += 1
    for nu in range(k, n):
        for j in range(1, p + 1):
            for mu, c in edge_terms(j):
                A[row, c] += _u_of_basis(model, basis, j, mu, nu)
        b[row] -= _u_of_basis(model, basis, s, k, nu)
        row += 1
    assert row == dim == (p - 1) * k + (n - k)
    return A, b, unknowns


@dataclass(frozen=True)
class WeylRow:
    """Solved coefficients of the order-k Weyl solution seeded at vertex s."""

    s: int
    k: int
    lam: complex
    m_edge: dict      # mu -> M_{sk mu}, mu = k+1..n (edge-s coefficients)
    m_off: dict       # j -> {mu -> M_{skj mu}}, j != s, mu = n-k+1..n
    delta: complex
    cond: float
    near_pole: bool


@dataclass(frozen=True)
class WeylRecord:
    s: int
    lam: complex
    rows: tuple

    def matrix(self, n):
        M = np.eye(n, dtype=complex)
        for r in self.rows:
            for mu, v in r.m_edge.items():
                M[r.k - 1, mu - 1] = v
        return M


def solve_weyl(model: GraphModel, s: int, k: int, lam, basis=None,
               settings: IntegrationSettings = DEFAULT_SETTINGS) -> WeylRow:
    """Solve the matching system for the order-k Weyl coefficients at vertex s."""
    if basis is None:
        basis = graph_basis(model, lam, settings)
    A, b, unknowns = _matching_system(model, s, k, basis)
    delta = complex(np.linalg.det(A))
    row_norms = np.linalg.norm(A, axis=1)
    scale = float(np.exp(np.mean(np.log(np.maximum(row_norms, 1e-300)))))
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(
            f"matching system singular at lambda = {lam} (s={s}, k={k})"
        ) from exc
    cond = float(np.linalg.cond(A))
    near_pole = cond > COND_POLE or abs(delta) < DET_POLE * scale
    n = model.order
    m_edge = {mu: complex(x[i]) for i, (j, mu) in enumerate(unknowns) if j == s}
    m_off = {}
    for i, (j, mu) in enumerate(unknowns):
        if j != s:
            m_off.setdefault(j, {})[mu] = complex(x[i])
    return WeylRow(s, k, complex(lam), m_edge, m_off, delta, cond, near_pole)


def weyl_record(model, s, lam, basis=None, settings=DEFAULT_SETTINGS) -> WeylRecord:
    if basis is None:
        basis = graph_basis(model, lam, settings)
    rows = tuple(solve_weyl(model, s, k, lam, basis) for k in range(1, model.order))
    return WeylRecord(s, complex(lam), rows)


def weyl_matrix(model: GraphModel, s: int, lam, basis=None,
                settings: IntegrationSettings = DEFAULT_SETTINGS) -> np.ndarray:
    """Unit upper-triangular M_s(lambda); row k holds M_{sk,k+1..n}."""
    return weyl_record(model, s, lam, basis, settings).matrix(model.order)


def char_function(model: GraphModel, s: int, k: int, lam, basis=None,
                  settings: IntegrationSettings = DEFAULT_SETTINGS) -> complex:
    """Determinant of the matching matrix under the fixed orderings."""
    if basis is None:
        basis = graph_basis(model, lam, settings)
    A, _, _ = _matching_system(model, s, k, basis)
    return complex(np.linalg.det(A))


def psi_boundary_values(model, row: WeylRow, basis, j: int) -> np.ndarray:
    """psi_{skj}^{(nu)}(l_j) for nu = 0..n-1 from solved Weyl coefficients."""
    n = model.order
    W = basis[j]
    vals = np.zeros(n, dtype=complex)
    if j == row.s:
        vals += W[row.k - 1]
        for mu, c in row.m_edge.items():
            vals += c * W[mu - 1]
    else:
        for mu, c in row.m_off[j].items():
            vals += c * W[mu - 1]
    return vals


def matching_residual(model, row: WeylRow, basis) -> float:
    """Max residual of conditions (continuity and Kirchhoff) for a solved row."""
    n, p, k, s = model.order, model.p, row.k, row.s
    psis = {j: psi_boundary_values(model, row, basis, j) for j in range(1, p + 1)}
    res = 0.0
    scale = max(max(abs(v) for v in psis[j]) for j in psis) or 1.0
    for j in range(2, p + 1):
        for nu in range(k):
            r = eval_Uform(model.gamma[0], psis[1], nu) - eval_Uform(
                model.gamma[j - 1], psis[j], nu
            )
            res = max(res, abs(r))
    for nu in range(k, n):
        r = sum(eval_Uform(model.gamma[j - 1], psis[j], nu) for j in range(1, p + 1))
        res = max(res, abs(r))
    return res / scale


# --- interior Weyl matrix ---------------------------------------------------

@dataclass(frozen=True)
class InternalWeylMatrix:
    """m_j(lambda): unit upper-triangular matrix at the internal vertex."""

    j: int
    lam: complex
    matrix: np.ndarray


def direct_internal_weyl(model: GraphModel, j: int, lam, basis=None,
                         settings: IntegrationSettings = DEFAULT_SETTINGS) -> InternalWeylMatrix:
    """m_j(lambda) computed on edge j alone from the S-basis at l_j.

    For each k, the interior solution with unit k-th derivative data at l_j
    and O(x^{xi_{n-k+1}}) decay is a combination of the last k basis
    solutions; the k x k system comes from the derivative data.
    """
    n = model.order
    if basis is None:
        basis = graph_basis(model, lam, settings)
    W = basis[j]
    m = np.eye(n, dtype=complex)
    for k in range(1, n):
        rows = list(range(n - k, n))          # 0-based indices of S_{n-k+1..n}
        A = W[np.ix_(rows, list(range(k)))].T  # A[nu-1, i] = S^{(nu-1)} of candidate i
        rhs = np.zeros(k, dtype=complex)
        rhs[k - 1] = 1.0
        try:
            a = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(
                f"interior system singular at lambda = {lam} (edge {j}, k={k})"
            ) from exc
        for nu in range(k + 1, n + 1):
            m[k - 1, nu - 1] = complex(a @ W[rows, nu - 1])
    return InternalWeylMatrix(j, complex(lam), m)


# --- eigenvalue scan --------------------------------------------------------

@dataclass(frozen=True)
class RefinedZero:
    lam: complex
    residual: float
    converged: bool


def eigen_scan(model: GraphModel, s: int, k: int, lam_a: float, lam_b: float,
               grid_size: int = 200, refine_tol: float = 1e-9,
               settings: IntegrationSettings = DEFAULT_SETTINGS):
    """Locate zeros of Delta_{sk} on a real interval and Newton-refine them.

    Grid minima of |Delta| seed a complex Newton iteration with
    central-difference derivatives; multiple zeros (the matching determinant
    factors, so eigenvalue multiplicity produces them) get a quadratic-vertex
    polish.  Returns RefinedZero entries; non-converged candidates are kept
    with converged=False.
    """

    def f(lam):
        return char_function(model, s, k, lam, settings=settings)

    grid = np.linspace(lam_a, lam_b, grid_size)
    vals = np.array([abs(f(x)) for x in grid])
    cands = [
        grid[i]
        for i in range(1, grid_size - 1)
        if vals[i] < vals[i - 1] and vals[i] < vals[i + 1]
    ]

    results = []
    span = abs(lam_b - lam_a)
    for lam0 in cands:
        z = _refine_zero(f, complex(lam0), refine_tol)
        if not z.converged:
            results.append(z)
            continue
        if not (lam_a - 0.01 * span <= z.lam.real <= lam_b + 0.01 * span):
            continue
        if any(abs(z.lam - r.lam) < 1e-6 * max(1.0, abs(z.lam)) for r in results):
            continue
        results.append(z)
    return sorted(results, key=lambda r: r.lam.real)


def _num_diff(f, lam, h):
    return (f(lam + h) - f(lam - h)) / (2 * h)


def _refine_zero(f, lam, tol, max_iter=80):
    best = lam
    best_val = abs(f(lam))
    for _ in range(max_iter):
        scale = max(1.0, abs(lam))
        h = 1e-6 * scale
        df = _num_diff(f, lam, h)
        if df == 0:
            break
        step = f(lam) / df
        lam = lam - step
        v = abs(f(lam))
        if v < best_val:
            best, best_val = lam, v
        if abs(step) < 1e-11 * scale:
            break

    # multiple-zero polish: when the slope at the best point is tiny compared
    # with the curvature, the zero is (numerically) multiple and a quadratic
    # vertex fit beats Newton's noise floor
    scale = max(1.0, abs(best))
    h2 = 1e-3 * scale
    fp = _num_diff(f, best, 1e-6 * scale)
    fpp = (f(best + h2) - 2 * f(best) + f(best - h2)) / h2 ** 2
    if abs(fp) < abs(fpp) * h2:
        for _ in range(2):
            w = 1e-4 * scale
            offs = np.linspace(-1.0, 1.0, 11) * w
            ys = np.array([f(best + o) for o in offs])
            coeff = np.polyfit(offs.astype(complex), ys, 2)
            if coeff[0] != 0:
                vertex = -coeff[1] / (2 * coeff[0])
                if abs(vertex) < 2 * w:
                    cand = best + vertex
                    best = cand
        best_val = abs(f(best))

    if best_val <= tol:
        return RefinedZero(best, best_val, True)
    return RefinedZero(best, best_val, False)
