"""W-system on the reference triangle: basis, differentiation matrices, fast products."""

from .basis import GeneralTriangle, LevelIndex, ParamTriple, TrianglePoint, dimension, \
    koornwinder_eval, r_norm, weight, wfun_eval
from .coupling import ItildeTable, build_itilde, oracle_integral, recurrence_ladders
from .diffmat import DiffOperator, assemble_x, assemble_y, oracle_assemble
from .fast_apply import CoeffVector, OpCounter, apply_e, apply_f, apply_x, apply_y, build_factors
from .approx import ExpansionResult, convergence_table, duffy_quadrature, error_report, evaluate_series, expand
from .boundary_lift import BoundaryTrace, lift_mu, zero_bc_reduction

__version__ = "0.1.0"
