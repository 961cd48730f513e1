from .c45 import C45Params, TreeNode, fit_c45, predict_tree, prune, rule_count
from .logistic import (
    ConvergenceError,
    LogisticConfig,
    LogisticModel,
    PerfectSeparationWarning,
    fit_logistic,
    predict_logistic,
)
