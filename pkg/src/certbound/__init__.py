"""certbound: certified bounding constants for nonlinear dynamic systems.

Validated interval arithmetic, a derivative-free interval branch-and-bound
global maximizer, and certified parameterizations (Jacobian bounds,
Lipschitz, one-sided Lipschitz, quadratic inner-boundedness, quadratic
boundedness) for models given as expression vectors over a box domain.
"""

from .bnb import BnBConfig, BnBResult, Cover, Subproblem, maximize, minimize
from .errors import (
    CertboundError,
    DegenerateSplit,
    DimensionMismatch,
    DivisionByZeroInterval,
    DomainError,
    EvaluationError,
    InvalidDimension,
    MissingBounds,
    NecessaryConditionViolated,
    NonDifferentiable,
    ParseError,
    PreconditionViolated,
    UnboundVariable,
)
from .expr import (
    Expr,
    Program,
    compile_expr,
    differentiate,
    eval_interval,
    eval_real,
    free_vars,
    parse,
    simplify,
    structural_key,
    to_text,
)
from .intervals import Box, Interval, iv_cos, iv_sin, refined_eval
from .model import (
    ModelDef,
    grad_sq_norm,
    load_model,
    model_to_text,
    parse_model_text,
    reduced_domain,
)
from .params import (
    JacobianBounds,
    LipschitzResult,
    OSLResult,
    QBResult,
    QIBResult,
    build_psi,
    build_xi,
    jacobian_bounds,
    lipschitz_case1,
    lipschitz_case2,
    osl_frobenius,
    osl_gershgorin,
    osl_zeta,
    qb,
    qib,
    qib_to_lipschitz,
    zeta,
)
from .baselines import SampleReport, halton, jacobian_norm_sampled, sample_max
from .models import (
    GeneratorConfig,
    MovingObjectConfig,
    TrafficConfig,
    build_generator,
    build_moving_object,
    build_traffic,
)

__version__ = "0.1.0"

__all__ = [
    "BnBConfig",
    "BnBResult",
    "Box",
    "CertboundError",
    "Cover",
    "DegenerateSplit",
    "DimensionMismatch",
    "DivisionByZeroInterval",
    "DomainError",
    "EvaluationError",
    "Expr",
    "GeneratorConfig",
    "Interval",
    "InvalidDimension",
    "JacobianBounds",
    "LipschitzResult",
    "MissingBounds",
    "ModelDef",
    "MovingObjectConfig",
    "NecessaryConditionViolated",
    "NonDifferentiable",
    "OSLResult",
    "ParseError",
    "PreconditionViolated",
    "Program",
    "QBResult",
    "QIBResult",
    "SampleReport",
    "Subproblem",
    "TrafficConfig",
    "UnboundVariable",
    "build_generator",
    "build_moving_object",
    "build_psi",
    "build_traffic",
    "build_xi",
    "compile_expr",
    "differentiate",
    "eval_interval",
    "eval_real",
    "free_vars",
    "grad_sq_norm",
    "halton",
    "iv_cos",
    "iv_sin",
    "jacobian_bounds",
    "jacobian_norm_sampled",
    "lipschitz_case1",
    "lipschitz_case2",
    "load_model",
    "maximize",
    "minimize",
    "model_to_text",
    "osl_frobenius",
    "osl_gershgorin",
    "osl_zeta",
    "parse",
    "parse_model_text",
    "qb",
    "qib",
    "qib_to_lipschitz",
    "reduced_domain",
    "refined_eval",
    "sample_max",
    "simplify",
    "structural_key",
    "to_text",
    "zeta",
]
