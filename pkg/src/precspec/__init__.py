"""Spectra of preconditioned elliptic operators B^{-1}A discretized with P1 elements."""

from .errors import EvaluationError, NumericalError, ParseError, ValidationError
from .mesh import (Mesh, MeshHierarchy, boundary_nodes, build_structured_mesh, node_support,
                   read_mesh, refine_uniform, write_mesh)
from .expr import diff, evaluate, parse_expression, to_string
from .coeff import AnalyticField, Interval, PerTriangleConstant, RatioField, evaluate_field, ratio_range
from .assembly import (AssembledPencil, QuadratureRule, apply_dirichlet, assemble_pencil,
                       assemble_stiffness, element_stiffness)
from .eigensolve import (Pencil, Spectrum, deflate_constants, generalized_eigs, make_pencil,
                         rayleigh_quotient, resolvent_norm)
from .localization import (find_matching, nodal_pairing_report, node_intervals, node_taylor_bound,
                           taylor_bound)
from .problem import BUMP_G, BUMP_K, BUMP_R, ProblemConfig, bump_problem
from .analysis import (cea_check, convergence_study, fill_distance, perturbation_experiment,
                       pointwise_convergence_study, refinement_study, solve_eigs,
                       weyl_sequence_demo)

__version__ = "0.1.0"
