"""Modified Jain operators: generalized Poisson weights, moments, weighted
norms, error bounds and an experiment runner."""

from .abel import AbelParams, TruncationPolicy, normalization_defect, s_closed, s_series, truncation_index, weight
from .bounds import (
    check_m1_bound,
    compare_schemes,
    estimate_constant,
    m1_constant,
    modulus_bound,
    smooth_bound,
    uniform_modulus_bound,
)
from .errors import JainError, NumericError
from .experiment import ExperimentSpec, ReportRow, emit_report, read_report, run_experiment
from .functions import TestFunction, builtin, from_expr
from .moments import (
    central_moment_closed,
    extract_lambda,
    raw_moment_closed,
    raw_moment_series,
    scaled_limit_residuals,
    stirling2,
    xi,
)
from .operators import OperatorConfig, batch_evaluate, evaluate_J, evaluate_jain, evaluate_K
from .sequences import BetaRule, SequenceScheme, validate_scheme
from .spaces import GridSpec, modulus1, modulus2, steklov, weighted_norm
from .verify import verify_suite

__version__ = "0.1.0"
