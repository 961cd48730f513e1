"""Binary logistic regression fitted by maximum likelihood.

Predictors enter as the schema's integer codes, so with 1/2-coded binary
attributes each coefficient is the log odds ratio for moving from the first
level to the second.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..table import DecisionTable

# With categorical predictors a finite maximum-likelihood fit keeps every
# fitted probability roughly 1/n away from 0 and 1; logits this large only
# arise when the estimates are drifting off along a separating direction.
SEPARATION_LOGIT = 15.0


class ConvergenceError(RuntimeError):
    pass


class PerfectSeparationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class LogisticConfig:
    max_iterations: int = 100
    tolerance: float = 1e-8
    threshold: float = 0.5


@dataclass(frozen=True)
class LogisticModel:
    intercept: float
    coefficients: dict[str, float]
    encoding: dict[str, dict[str, int]]
    positive_class: str
    negative_class: str
    threshold: float = 0.5
    log_likelihood: float = float("nan")
    iterations: int = 0
    converged: bool = True
    separated: bool = False
    history: tuple[float, ...] = ()

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        if set(self.coefficients) != set(self.encoding):
            raise ValueError("one coefficient per predictor")

    def to_text(self) -> str:
        lines = [f"intercept:{self.intercept!r}"]
        lines += [f"{name}:{b!r}" for name, b in self.coefficients.items()]
        return "\n".join(lines) + "\n"


def design_matrix(table: DecisionTable) -> tuple[np.ndarray, np.ndarray]:
    """Code matrix with a leading column of ones, and 0/1 outcome vector."""
    schema = table.schema
    if len(schema.classes) != 2:
        raise ValueError("logistic regression needs a binary decision attribute")
    positive = schema.classes[-1]
    X = np.array(
        [[1.0] + [float(a.code_of(v)) for a, v in zip(schema.conditions, row)] for row in table.rows]
    )
    y = np.array([1.0 if d == positive else 0.0 for d in table.decisions])
    return X, y


def log_likelihood(beta: np.ndarray, X: np.ndarray, y: np.ndarray) -> float:
    eta = X @ beta
    # log(1 + e^eta) computed stably
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def score(beta: np.ndarray, X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Gradient of the log-likelihood."""
    p = 1.0 / (1.0 + np.exp(-(X @ beta)))
    return X.T @ (y - p)


def _hessian(beta: np.ndarray, X: np.ndarray) -> np.ndarray:
    p = 1.0 / (1.0 + np.exp(-(X @ beta)))
    w = p * (1.0 - p)
    return -(X.T * w) @ X


def fit_logistic(table: DecisionTable, config: LogisticConfig = LogisticConfig()) -> LogisticModel:
    """Newton-Raphson with step halving, so the log-likelihood never decreases.

    Stops when the log-likelihood changes by less than ``config.tolerance``.
    If a fitted logit exceeds ``SEPARATION_LOGIT`` in magnitude the data are
    treated as (quasi-)separated: a :class:`PerfectSeparationWarning` is
    issued and the last coefficients before divergence are returned.
    """
    X, y = design_matrix(table)
    n, k = X.shape
    if n < k - 1:
        raise ValueError(f"need at least {k - 1} objects for {k - 1} predictors, got {n}")

    beta = np.zeros(k)
    ll = log_likelihood(beta, X, y)
    history = [ll]
    converged = separated = False
    it = 0
    for it in range(1, config.max_iterations + 1):
        step = np.linalg.lstsq(-_hessian(beta, X), score(beta, X, y), rcond=None)[0]
        t = 1.0
        while True:
            candidate = beta + t * step
            cand_ll = log_likelihood(candidate, X, y)
            if cand_ll >= ll or t < 1e-10:
                break
            t *= 0.5
        if cand_ll < ll:
            converged = True
            break
        if np.max(np.abs(X @ candidate)) > SEPARATION_LOGIT:
            separated = True
            break
        change = cand_ll - ll
        beta, ll = candidate, cand_ll
        history.append(ll)
        if change < config.tolerance:
            converged = True
            break

    if separated:
        warnings.warn("perfect or quasi-complete separation; returning last stable coefficients",
                      PerfectSeparationWarning, stacklevel=2)
    elif not converged:
        raise ConvergenceError(f"no convergence within {config.max_iterations} iterations")

    schema = table.schema
    return LogisticModel(
        intercept=float(beta[0]),
        coefficients={a.name: float(b) for a, b in zip(schema.conditions, beta[1:])},
        encoding={a.name: dict(zip(a.values, a.codes)) for a in schema.conditions},
        positive_class=schema.classes[-1],
        negative_class=schema.classes[0],
        threshold=config.threshold,
        log_likelihood=ll,
        iterations=it,
        converged=converged,
        separated=separated,
        history=tuple(history),
    )


def predict_logistic(model: LogisticModel, record) -> tuple[str, float]:
    """Class and probability of the positive class for one record."""
    if hasattr(record, "as_record"):
        record = record.as_record()
    eta = model.intercept
    for name, b in model.coefficients.items():
        if name not in record:
            raise KeyError(f"record lacks predictor {name!r}")
        value = record[name]
        x = model.encoding[name][value] if isinstance(value, str) else float(value)
        eta += b * x
    p = 1.0 / (1.0 + math.exp(-eta)) if eta >= 0 else math.exp(eta) / (1.0 + math.exp(eta))
    return (model.positive_class if p >= model.threshold else model.negative_class), p
