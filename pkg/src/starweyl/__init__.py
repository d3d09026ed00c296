"""Numerical toolkit for higher-order differential operators with regular
singularities on compact star graphs: fundamental systems, Weyl-type matrices,
characteristic functions and the constructive inverse pipeline recovering the
internal Weyl matrix of an unmeasured edge."""

from . import errors
from .exponents import (
    CollaredPolynomial,
    EdgeModel,
    ExponentSet,
    IndicialPolynomial,
    build_indicial,
    classical_edge,
    edge_exponents,
    indicial_eval,
    solve_exponents,
)
from .frobenius import SeriesEvaluation, basis_at_collar, eval_C, series_coefficients
from .propagate import (
    BasisValues,
    IntegrationSettings,
    companion_apply,
    integrate_basis,
    integrate_dense,
)
from .sectors import SectorFrame, complex_power, omega_constants, root_power, sector_frame
from .stargraph import (
    GraphModel,
    InternalWeylMatrix,
    WeylRecord,
    WeylRow,
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
from .asymptotics import asymptotic_check
from .reconstruct import (
    PsiBoundaryData,
    ReconstructionReport,
    assemble_mN,
    cross_validate,
    forward_weyl_grids,
    internal_weyl_from_psi,
    kirchhoff_complete,
    propagate_matching,
    reconstruct_mN,
    solve_sigma,
    step_edge_s,
)

__version__ = "0.1.0"
