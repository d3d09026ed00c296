"""Shipped reference configurations used by the test suite and the examples."""

from .exponents import CollaredPolynomial, EdgeModel, classical_edge
from .stargraph import star_graph


def classical_star(p=3, length=1.0, collar=0.05):
    """Second order, no singular coefficients, no potentials, identity forms."""
    return star_graph(tuple(classical_edge(j, length, 2, collar) for j in range(1, p + 1)))


def singular_star_e1(collar=0.05):
    """Second order, edge 1 carries nu_0 = -2 (exponents -1 and 2), q = 0."""
    zero = CollaredPolynomial(collar, ())
    e1 = EdgeModel(1, 1.0, 2, (-2.0,), (zero,), collar)
    edges = (e1, classical_edge(2, 1.0, 2, collar), classical_edge(3, 1.0, 2, collar))
    return star_graph(edges)


def cubic_star_e2(collar=0.05):
    """Third order, every edge with nu = (3, -3) (exponents -1, 1, 3), q = 0."""
    zero = CollaredPolynomial(collar, ())
    edges = tuple(
        EdgeModel(j, 1.0, 3, (3.0, -3.0), (zero, zero), collar) for j in range(1, 4)
    )
    return star_graph(edges)


def potential_star(collar=0.1):
    """Second order star with a collared polynomial potential on edge 2.

    Not part of the acceptance configurations; exercises the q != 0 paths.
    """
    zero = CollaredPolynomial(collar, ())
    q2 = CollaredPolynomial(collar, (0.6, -0.4, 0.25))
    edges = (
        classical_edge(1, 1.0, 2, collar),
        EdgeModel(2, 1.0, 2, (0.0,), (q2,), collar),
        classical_edge(3, 1.0, 2, collar),
    )
    return star_graph(edges)


SHIPPED = {
    "classical": classical_star,
    "e1": singular_star_e1,
    "e2": cubic_star_e2,
}
