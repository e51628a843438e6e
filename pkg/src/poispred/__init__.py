"""Predictive distributions and exact K-L risk for independent Poisson counts.

The package provides four predictive families (root-rate, fixed gamma,
moment/MLE/unbiased-estimate plug-in, and a total-rate-coupled prior built
for dimension at least two), certified series evaluation of their
Kullback-Leibler risks and risk differences, and a verification suite that
checks every inequality the risk bounds rest on.
"""

from .errors import (
    DominanceWarning,
    EstimatorUndefinedError,
    QuadratureError,
    TruncationError,
)
from .hyper import (
    MLE,
    URE,
    Moment,
    alpha_for_rule,
    alpha_mle,
    alpha_moment,
    dominance_guaranteed,
    ure_argmin,
    ure_argmin_numeric,
    ure_value,
)
from .model import Counts, ModelConfig
from .predictive import (
    EmpiricalBayes,
    FixedGamma,
    Jeffreys,
    Shrinkage,
    eb_log_pred,
    gamma_log_pred,
    jeffreys_log_pred,
    log_pred,
    log_pred_batch,
    pred_pmf_table,
    shrink_log_ratio,
    shrinkage_log_pred,
)
from .quadrature import QuadraturePolicy, adaptive_simpson
from .risk import (
    BayesRiskGap,
    L_truncated,
    RiskPoint,
    bayes_risk_gap,
    f_shrink,
    f_shrink_with_err,
    g_deriv,
    g_deriv_with_err,
    risk_diff_eb,
    risk_diff_eb_unreduced,
    risk_diff_shrinkage,
    risk_eb,
    risk_jeffreys_direct,
    risk_jeffreys_integral,
)
from .special import SeriesPolicy, log_gamma, poisson_expectation, poisson_log_pmf
from .verify import (
    CheckResult,
    VerificationReport,
    check_lemma1_bounds,
    check_lemma2,
    check_lemma21,
    check_lemma22,
    check_lemma23,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    run_all,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BayesRiskGap",
    "CheckResult",
    "Counts",
    "DominanceWarning",
    "EmpiricalBayes",
    "EstimatorUndefinedError",
    "FixedGamma",
    "Jeffreys",
    "L_truncated",
    "MLE",
    "ModelConfig",
    "Moment",
    "QuadratureError",
    "QuadraturePolicy",
    "RiskPoint",
    "SeriesPolicy",
    "Shrinkage",
    "TruncationError",
    "URE",
    "VerificationReport",
    "adaptive_simpson",
    "alpha_for_rule",
    "alpha_mle",
    "alpha_moment",
    "bayes_risk_gap",
    "check_lemma1_bounds",
    "check_lemma2",
    "check_lemma21",
    "check_lemma22",
    "check_lemma23",
    "check_theorem1",
    "check_theorem2",
    "check_theorem3",
    "dominance_guaranteed",
    "eb_log_pred",
    "f_shrink",
    "f_shrink_with_err",
    "g_deriv",
    "g_deriv_with_err",
    "gamma_log_pred",
    "jeffreys_log_pred",
    "log_gamma",
    "log_pred",
    "log_pred_batch",
    "poisson_expectation",
    "poisson_log_pmf",
    "pred_pmf_table",
    "risk_diff_eb",
    "risk_diff_eb_unreduced",
    "risk_diff_shrinkage",
    "risk_eb",
    "risk_jeffreys_direct",
    "risk_jeffreys_integral",
    "run_all",
    "shrink_log_ratio",
    "shrinkage_log_pred",
    "ure_argmin",
    "ure_argmin_numeric",
    "ure_value",
]
