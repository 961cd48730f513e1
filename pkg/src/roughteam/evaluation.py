"""Fold splitting, cross-validation, confusion-matrix metrics and
technique selection.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Literal, Sequence

import numpy as np

from .baselines import C45Params, LogisticConfig, fit_c45, fit_logistic, predict_logistic, predict_tree, rule_count
from .roughset import GAParams, induce_rules
from .rules import classify, model_from_induction
from .table import DecisionTable

Technique = Literal["ja_rules", "ga_rules", "c45", "logistic"]
TECHNIQUES: tuple[str, ...] = ("ja_rules", "ga_rules", "c45", "logistic")
TECHNIQUE_LABELS = {
    "ja_rules": "RST Johnson",
    "ga_rules": "RST genetic",
    "c45": "C4.5",
    "logistic": "Logistic regression",
}


class FoldError(RuntimeError):
    def __init__(self, fold: int, cause: Exception):
        super().__init__(f"fold {fold}: {cause}")
        self.fold = fold
        self.cause = cause


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.tp + other.tp, self.tn + other.tn, self.fp + other.fp, self.fn + other.fn)

    @classmethod
    def from_predictions(cls, truth: Iterable[str], predicted: Iterable[str | None], positive: str) -> "ConfusionMatrix":
        """Tally predictions; an abstention (None) always counts as an error."""
        tp = tn = fp = fn = 0
        for t, p in zip(truth, predicted):
            if t == positive:
                if p == positive:
                    tp += 1
                else:
                    fn += 1
            else:
                if p is None or p == positive:
                    fp += 1
                else:
                    tn += 1
        return cls(tp, tn, fp, fn)


def _pct(num: int, den: int) -> float | None:
    return None if den == 0 else 100.0 * num / den


@dataclass(frozen=True)
class EvalReport:
    """Metrics as percentages; ``None`` marks an undefined ratio."""

    matrix: ConfusionMatrix
    accuracy: float | None
    precision: float | None
    recall: float | None
    npv: float | None
    f1: float | None
    per_fold: tuple[float, ...] = ()
    technique: str = ""
    complexity: int | None = None
    meta: dict[str, str] = field(default_factory=dict)


def metrics(matrix: ConfusionMatrix) -> EvalReport:
    m = matrix
    if m.total < 1:
        raise ValueError("empty confusion matrix")
    precision = _pct(m.tp, m.tp + m.fp)
    recall = _pct(m.tp, m.tp + m.fn)
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return EvalReport(
        matrix=m,
        accuracy=_pct(m.tp + m.tn, m.total),
        precision=precision,
        recall=recall,
        npv=_pct(m.tn, m.tn + m.fn),
        f1=f1,
    )


def kfold_split(table: DecisionTable, k: int, seed: int, stratified: bool = True) -> list[tuple[int, ...]]:
    """Partition object ids into ``k`` folds whose sizes differ by at most one.

    Ids are shuffled (within each class when stratified), laid end to end
    class after class, and dealt round-robin, so every class is spread over
    the folds within one object of proportionality.
    """
    n = len(table)
    if not 2 <= k <= n:
        raise ValueError(f"k must satisfy 2 <= k <= n={n}, got {k}")
    rng = np.random.default_rng(seed)
    if stratified:
        order: list[int] = []
        for cls in table.schema.classes:
            members = [o for o in table.object_ids if table.decision(o) == cls]
            order += [members[i] for i in rng.permutation(len(members))]
    else:
        order = [int(i) + 1 for i in rng.permutation(n)]
    folds: list[list[int]] = [[] for _ in range(k)]
    for pos, obj in enumerate(order):
        folds[pos % k].append(obj)
    return [tuple(sorted(f)) for f in folds]


@dataclass(frozen=True)
class TechniqueConfig:
    ga: GAParams = GAParams()
    c45: C45Params = C45Params()
    logistic: LogisticConfig = LogisticConfig()
    default_policy: str = "abstain"
    conflict_policy: str = "support_voting"


Predictor = Callable[[dict], "str | None"]


def train(technique: str, table: DecisionTable, config: TechniqueConfig = TechniqueConfig()) -> tuple[Predictor, int | None]:
    """Fit one technique; returns a record -> class predictor and its complexity."""
    policies = {"default_policy": config.default_policy, "conflict_policy": config.conflict_policy}
    if technique in ("ja_rules", "ga_rules"):
        algorithm = "johnson" if technique == "ja_rules" else "genetic"
        model = model_from_induction(table, induce_rules(table, algorithm=algorithm, ga_params=config.ga), **policies)
        return (lambda rec: classify(rec, model).decision), len(model.rules)
    if technique == "c45":
        tree = fit_c45(table, config.c45)
        return (lambda rec: predict_tree(tree, rec)), rule_count(tree)
    if technique == "logistic":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            lr = fit_logistic(table, config.logistic)
        return (lambda rec: predict_logistic(lr, rec)[0]), None
    raise ValueError(f"unknown technique {technique!r}")


def cross_validate(
    technique: str,
    table: DecisionTable,
    k: int = 10,
    seed: int = 1729,
    stratified: bool = True,
    config: TechniqueConfig = TechniqueConfig(),
) -> EvalReport:
    """k-fold cross-validation with one pooled confusion matrix.

    The positive class is the last class of the (binary) schema.  Complexity
    is that of the technique trained on the whole table.
    """
    classes = table.schema.classes
    if len(classes) != 2:
        raise ValueError("cross-validation reports need a binary decision attribute")
    positive = classes[-1]
    pooled = ConfusionMatrix()
    per_fold = []
    for fold_no, test_ids in enumerate(kfold_split(table, k, seed, stratified), start=1):
        train_ids = [o for o in table.object_ids if o not in set(test_ids)]
        try:
            predict, _ = train(technique, table.subset(train_ids), config)
        except Exception as exc:
            raise FoldError(fold_no, exc) from exc
        predicted = [predict(table.record(o)) for o in test_ids]
        fold_matrix = ConfusionMatrix.from_predictions((table.decision(o) for o in test_ids), predicted, positive)
        per_fold.append(metrics(fold_matrix).accuracy)
        pooled = pooled + fold_matrix
    _, complexity = train(technique, table, config)
    return replace(metrics(pooled), per_fold=tuple(per_fold), technique=technique, complexity=complexity)


def holdout_on_self(predict: Predictor, table: DecisionTable, technique: str = "", complexity: int | None = None) -> EvalReport:
    positive = table.schema.classes[-1]
    predicted = [predict(table.record(o)) for o in table.object_ids]
    matrix = ConfusionMatrix.from_predictions(table.decisions, predicted, positive)
    return replace(metrics(matrix), technique=technique, complexity=complexity)


@dataclass(frozen=True)
class TechniqueCandidate:
    name: str
    accuracy: float
    complexity: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.accuracy <= 100.0:
            raise ValueError("accuracy must be a percentage in [0, 100]")


@dataclass(frozen=True)
class Assessment:
    candidate: TechniqueCandidate
    accepted: bool
    reason: str


def select_technique(candidates: Sequence[TechniqueCandidate], benchmark: float = 70.0) -> tuple[str | None, list[Assessment]]:
    """Pick the most accurate candidate meeting ``benchmark``.

    Accuracy ties go to the candidate with fewer rules (a missing rule count
    loses), then to the alphabetically first name.  The ranking lists the
    accepted candidate first, then the rest by accuracy.
    """
    if not candidates:
        raise ValueError("need at least one candidate")

    def key(c: TechniqueCandidate):
        return (-c.accuracy, c.complexity is None, c.complexity or 0, c.name)

    ordered = sorted(candidates, key=key)
    survivors = [c for c in ordered if c.accuracy >= benchmark]
    winner = survivors[0] if survivors else None

    ranking = []
    for c in ordered:
        if c is winner:
            reason = f"highest accuracy meeting the {benchmark:g}% benchmark"
            if any(o.accuracy == c.accuracy for o in survivors if o is not c):
                reason += "; fewer rules on an accuracy tie"
            ranking.append(Assessment(c, True, reason))
        elif c.accuracy < benchmark:
            ranking.append(Assessment(c, False, f"below benchmark: {c.accuracy:g}% < {benchmark:g}%"))
        elif c.accuracy == winner.accuracy:
            ranking.append(Assessment(c, False, f"accuracy tie with {winner.name} but more complex"))
        else:
            ranking.append(Assessment(c, False, f"lower accuracy than {winner.name} ({c.accuracy:g}% < {winner.accuracy:g}%)"))
    return (winner.name if winner else None), ranking


def _fmt(v: float | None) -> str:
    return "undefined" if v is None else f"{v:.4f}"


_METRIC_KEYS = ("accuracy", "precision", "recall", "npv", "f1")


def format_report(report: EvalReport, fmt: Literal["text", "kv"] = "text") -> str:
    m = report.matrix
    if fmt == "kv":
        lines = [f"{k}={v}" for k, v in report.meta.items()]
        if report.technique:
            lines.append(f"technique={report.technique}")
        lines += [f"tp={m.tp}", f"tn={m.tn}", f"fp={m.fp}", f"fn={m.fn}"]
        lines += [f"{k}={_fmt(getattr(report, k))}" for k in _METRIC_KEYS]
        lines.append(f"complexity={'none' if report.complexity is None else report.complexity}")
        if report.per_fold:
            lines.append("per_fold=" + ",".join(repr(a) for a in report.per_fold))
        return "\n".join(lines) + "\n"
    title = TECHNIQUE_LABELS.get(report.technique, report.technique) or "evaluation"
    lines = [
        f"{title}",
        f"  confusion: TP={m.tp} TN={m.tn} FP={m.fp} FN={m.fn} (total {m.total})",
        f"  accuracy  {_fmt(report.accuracy)}%",
        f"  precision {_fmt(report.precision)}%",
        f"  recall    {_fmt(report.recall)}%",
        f"  npv       {_fmt(report.npv)}%",
        f"  f1        {_fmt(report.f1)}%",
    ]
    if report.complexity is not None:
        lines.append(f"  complexity {report.complexity} rules")
    if report.per_fold:
        lines.append("  per-fold accuracy " + " ".join(_fmt(a) for a in report.per_fold))
    for k, v in report.meta.items():
        lines.append(f"  {k}: {v}")
    return "\n".join(lines) + "\n"


def parse_kv_report(text: str) -> EvalReport:
    """Inverse of ``format_report(..., "kv")``; metrics are recomputed from the counts."""
    values: dict[str, str] = {}
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    matrix = ConfusionMatrix(*(int(values[k]) for k in ("tp", "tn", "fp", "fn")))
    report = metrics(matrix)
    for k in _METRIC_KEYS:
        if k in values and values[k] != _fmt(getattr(report, k)):
            raise ValueError(f"{k}={values[k]} disagrees with the confusion counts")
    complexity = values.get("complexity", "none")
    reserved = {"technique", "tp", "tn", "fp", "fn", "complexity", "per_fold", *_METRIC_KEYS}
    return replace(
        report,
        technique=values.get("technique", ""),
        complexity=None if complexity == "none" else int(complexity),
        per_fold=tuple(float(a) for a in values["per_fold"].split(",")) if values.get("per_fold") else (),
        meta={k: v for k, v in values.items() if k not in reserved},
    )
