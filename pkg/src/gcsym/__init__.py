"""Generalized conditional symmetries of (1+1)-dimensional evolution equations.

The package decides whether an evolutionary vector field is a generalized
conditional symmetry of u_t = H(t, x, u, ..., u_r), converts between the
operator, ansatz, and reduced-ODE-system views of such a symmetry, and
cross-checks every verdict with independent code paths plus a seeded
numeric oracle.
"""

from .expr import (
    DerivKey, Expr, Fun, Jet, Param, ParseError, Pow, Prod, Rat, Sum, Var,
    T, X, ZERO, ONE,
    add, free_atoms, fun_, jet, jet_keys, max_x_order, mul, normalize, param,
    parse, partial_derivative, pow_, rat, sort_key, substitute, to_text,
)
from .jet import (
    ConstraintFrame, DerivClass, apply_frechet, classify_derivative,
    eliminate_t_derivatives, frechet, leading_derivative, rank_compare,
    reduced_dt_on_solutions, total_derivative_t, total_derivative_x,
    weight, weight_of_key,
)
from .oracle import (
    DEFAULT_SEED, EvalDomainError, IntegrationError, IntegrationPlan,
    SamplePlan, ZeroStatus, ZeroVerdict, evaluate, evaluate_scaled,
    integrate_reduced, is_zero, pde_residual, probabilistic_zero_test,
    sample_point,
)
from .matrix import SingularMatrixError, SymbolicMatrix
from .symmetry import (
    CanonicalOperator, CheckResult, EvolutionEquation, GcsOperator,
    NonQuasilinearError, ReducedOperator, SymmetryStatus, TrivialOperatorError,
    UsualOperator, as_canonical, build_hhat, canonical_equal, check_gcs,
    check_involutivity, constraint_frame, integrability_probe, to_canonical,
    to_reduced_form, usual_to_generalized,
)
from .reduction import (
    Ansatz, InessentialFamilyError, NonAffineError, NotReducible,
    NotSolutionError, ReducedSystem, SingularAnsatzError, SolutionCheck,
    SolutionFamily, ansatz_to_operator, essentiality_det, family_to_ansatz,
    inversion_identities, phi_matrix, reduce, verify_solution,
)
from .corpus import DemoCase, UsualStage, demo_case, demo_names
from .problem import Problem, ProblemError, load_problem, load_problem_file

__version__ = "0.1.0"
