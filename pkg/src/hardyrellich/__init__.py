"""Hardy and Rellich inequalities on weighted graphs: weights, constants, sweeps and solvers."""

__version__ = "0.1.0"

from .eikonal import (AdmissibleFamily, admissibility_check, corollary_constants, eikonal_margin,
                      gamma_log, gamma_power, vartheta_log, vartheta_power, x_epsilon)
from .errors import (AssemblyError, ConfigError, DomainError, HardyRellichError, PositivityError,
                     WindowError)
from .functions import FiniteFunction, LazyFunction
from .graphs import FiniteGraph, LatticeGraph, LineGraph, WeightedGraph, make_graph
from .hardy import (HardyWeight, hardy_margin, hardy_sweep, line_weight, quadrant_weight,
                    supersolution_weight)
from .operators import (SchrodingerOperator, energy_form, grad_norm_sq, greens_formula_residual,
                        laplacian_apply, main_identity_residual, restrict_to_domain,
                        schrodinger_apply, weighted_norm_sq)
from .poisson import Exhaustion, bound_report, exhaustion_solve, finite_solve
from .rellich import RellichInstance, extremal_test_function, rellich_margin, rellich_sweep
from .reports import InequalityReport

__all__ = [
    "AdmissibleFamily", "AssemblyError", "ConfigError", "DomainError", "Exhaustion",
    "FiniteFunction", "FiniteGraph", "HardyRellichError", "HardyWeight", "InequalityReport",
    "LatticeGraph", "LazyFunction", "LineGraph", "PositivityError", "RellichInstance",
    "SchrodingerOperator", "WeightedGraph", "WindowError", "admissibility_check",
    "bound_report", "corollary_constants", "eikonal_margin", "energy_form", "exhaustion_solve",
    "extremal_test_function", "finite_solve", "gamma_log", "gamma_power", "grad_norm_sq",
    "greens_formula_residual", "hardy_margin", "hardy_sweep", "laplacian_apply", "line_weight",
    "main_identity_residual", "make_graph", "quadrant_weight", "rellich_margin", "rellich_sweep",
    "restrict_to_domain", "schrodinger_apply", "supersolution_weight", "vartheta_log",
    "vartheta_power", "weighted_norm_sq", "x_epsilon",
]
