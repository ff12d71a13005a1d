"""Inference for many moment inequalities with Lasso, SN and bootstrap first steps."""
from .bootstrap import bootstrap_critical_value, bootstrap_first_step_set, bootstrap_quantile
from .errors import DegeneratePenaltyError, ParameterError, SampleTooSmallError, ShapeError
from .lasso_select import PenaltySpec, SelectionSet, lambda_penalty, select_lasso, soft_threshold
from .methods import METHOD_IDS, MethodSpec, TestOutcome, confidence_set, run_method, run_methods
from .moments import SampleMatrix, estimate_moments, read_sample_csv, test_statistic
from .sn_critical import SNContext, sn_critical_value, sn_first_step_set, sn_quantile

__version__ = "0.1.0"

__all__ = [
    "METHOD_IDS",
    "DegeneratePenaltyError",
    "MethodSpec",
    "ParameterError",
    "PenaltySpec",
    "SNContext",
    "SampleMatrix",
    "SampleTooSmallError",
    "SelectionSet",
    "ShapeError",
    "TestOutcome",
    "bootstrap_critical_value",
    "bootstrap_first_step_set",
    "bootstrap_quantile",
    "confidence_set",
    "estimate_moments",
    "lambda_penalty",
    "read_sample_csv",
    "run_method",
    "run_methods",
    "select_lasso",
    "sn_critical_value",
    "sn_first_step_set",
    "sn_quantile",
    "soft_threshold",
    "test_statistic",
]
