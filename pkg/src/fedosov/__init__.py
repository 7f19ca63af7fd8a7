"""Exact Fedosov star products on a Darboux chart, with quantized symplectic
vector fields and deformed cross product algebras.

All arithmetic is over exact rationals; every computation is exact modulo
the ideal of total degree above the chart's truncation order, so the
structural identities of the construction can be checked bit for bit.
"""

from .liecross import (
    ActionError,
    CrossAlgebra,
    CrossElement,
    CrossPairElement,
    LieAction,
    LieAlgebra,
    LieStructureError,
    classical_cross_mul,
)
from .parsing import ParseError, parse_cross, parse_poly, parse_star
from .poly import Poly
from .problem import Problem, load_problem, parse_problem
from .starprod import (
    ConvergenceError,
    FedosovSolution,
    FlatnessError,
    StarFunction,
    SymplecticConnection,
    curvature_form,
    partial,
    poisson,
    star,
    to_star_function,
)
from .vectorfield import (
    IdentityCheckError,
    NotSymplecticError,
    QuantizedDerivation,
    SymplecticVectorField,
    eta_form,
    lie_derivative,
    solve_u,
    tau,
    tau_trust_order,
)
from .verify import Report, run_verification
from .weyl import (
    AdmissibilityError,
    ChartContext,
    ContextMismatchError,
    WeylForm,
    commutator,
    d,
    delta,
    delta_inv,
    delta_star,
    is_central,
    moyal,
    sigma,
)

__version__ = "0.1.0"

__all__ = [
    "ActionError",
    "AdmissibilityError",
    "ChartContext",
    "ContextMismatchError",
    "ConvergenceError",
    "CrossAlgebra",
    "CrossElement",
    "CrossPairElement",
    "FedosovSolution",
    "FlatnessError",
    "IdentityCheckError",
    "LieAction",
    "LieAlgebra",
    "LieStructureError",
    "NotSymplecticError",
    "ParseError",
    "Poly",
    "Problem",
    "QuantizedDerivation",
    "Report",
    "StarFunction",
    "SymplecticConnection",
    "SymplecticVectorField",
    "WeylForm",
    "classical_cross_mul",
    "commutator",
    "curvature_form",
    "d",
    "delta",
    "delta_inv",
    "delta_star",
    "eta_form",
    "is_central",
    "lie_derivative",
    "load_problem",
    "moyal",
    "parse_cross",
    "parse_poly",
    "parse_problem",
    "parse_star",
    "partial",
    "poisson",
    "run_verification",
    "sigma",
    "solve_u",
    "star",
    "to_star_function",
    "tau",
    "tau_trust_order",
]
