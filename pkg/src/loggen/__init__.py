"""Operator logarithms, logarithmic generators, and operator-topology checkers."""

__version__ = "0.1.0"

from .dunford import (  # noqa: E402
    AltGenerator,
    Contour,
    KappaCertificate,
    choose_kappa,
    dunford_apply,
    fit_certificate,
    operator_exp,
    operator_log,
)
from .evolution import EvolutionFamily, Forcing, Profile, evolution_operator, semigroup_defect, solve_cauchy  # noqa: E402
from .logrep import (  # noqa: E402
    alt_generator,
    dt_alt_generator,
    pre_infinitesimal,
    proof_chain_check,
    reconstruct_generator,
    regularized_trajectory,
    window_certificate,
)
from .operators import ActionOperator, Functional, dual_product, operator_norm, resolvent_apply, spectrum  # noqa: E402
from .topology import (  # noqa: E402
    check_locally_strong,
    check_strong,
    check_uniform,
    check_weak,
    dual_residual,
    separation_suite,
)
