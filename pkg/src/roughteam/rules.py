"""Decision rules, coverage statistics, rule-based classification and the
published 24-rule team-composition model.

Rule text format, one rule per line::

    role=team_leader AND sn=sensing AND gender=female => effective [1; 1]
    role=programmer AND tf=thinking AND jp=judging => effective OR ineffective [32; 13,19]

The bracket holds the LHS support followed by the RHS support of each class
named after ``=>``, in the order named.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Literal, Mapping, Sequence

from .roughset import InducedRule
from .table import STUDY_SCHEMA, Attribute, AttributeSchema, DecisionTable, class_counts

DefaultPolicy = Literal["abstain", "majority_class"]
ConflictPolicy = Literal["support_voting", "first_match"]

ABSTAIN = None


@dataclass(frozen=True)
class DecisionRule:
    """Conjunctive rule with per-class RHS supports in schema class order.

    ``listing`` remembers the order in which consequent classes are written
    (Table-style "effective OR ineffective"); it defaults to schema order.
    """

    antecedent: tuple[tuple[str, str], ...]
    supports: tuple[int, ...]
    classes: tuple[str, ...]
    final_decision: str | None = None
    listing: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "antecedent", tuple(tuple(c) for c in self.antecedent))
        object.__setattr__(self, "supports", tuple(int(s) for s in self.supports))
        attrs = [a for a, _ in self.antecedent]
        if len(set(attrs)) != len(attrs):
            raise ValueError("antecedent attributes must be distinct")
        if len(self.supports) != len(self.classes):
            raise ValueError("one support per class required")
        if any(s < 0 for s in self.supports):
            raise ValueError("supports must be non-negative")
        if not self.listing:
            object.__setattr__(self, "listing", tuple(c for c, s in zip(self.classes, self.supports) if s > 0))
        elif set(self.listing) != {c for c, s in zip(self.classes, self.supports) if s > 0}:
            raise ValueError("listing must name exactly the classes with positive support")

    @property
    def lhs_support(self) -> int:
        return sum(self.supports)

    def support_of(self, cls: str) -> int:
        return self.supports[self.classes.index(cls)]

    @property
    def positive_classes(self) -> tuple[str, ...]:
        return tuple(c for c, s in zip(self.classes, self.supports) if s > 0)

    @property
    def is_bidimensional(self) -> bool:
        return len(self.positive_classes) >= 2

    @property
    def attributes(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.antecedent)

    def to_text(self) -> str:
        lhs = " AND ".join(f"{a}={v}" for a, v in self.antecedent) or "TRUE"
        rhs = " OR ".join(self.listing)
        counts = ",".join(str(self.support_of(c)) for c in self.listing)
        return f"{lhs} => {rhs} [{self.lhs_support}; {counts}]"

    def phrase(self) -> str:
        """Value-only reading, e.g. ``team leader AND sensing AND female => effective``."""
        lhs = " AND ".join(v.replace("_", " ") for _, v in self.antecedent) or "TRUE"
        return f"{lhs} => {' OR '.join(self.listing)}"


_RULE_RE = re.compile(r"^(?P<lhs>.*?)\s*=>\s*(?P<rhs>.*?)\s*\[\s*(?P<lhs_n>\d+)\s*;\s*(?P<counts>[\d,\s]*)\]\s*$")


def parse_rule(line: str, schema: AttributeSchema) -> DecisionRule:
    m = _RULE_RE.match(line.strip())
    if not m:
        raise ValueError(f"malformed rule line: {line!r}")
    antecedent = []
    lhs = m["lhs"].strip()
    if lhs != "TRUE":
        for conj in lhs.split(" AND "):
            attr, _, value = conj.strip().partition("=")
            if attr not in schema.attribute_names:
                raise ValueError(f"unknown attribute {attr!r} in rule {line!r}")
            if value not in schema.attribute(attr).values:
                raise ValueError(f"value {value!r} not allowed for {attr!r}")
            antecedent.append((attr, value))
    listing = tuple(c.strip() for c in m["rhs"].split(" OR "))
    counts = [int(c) for c in m["counts"].split(",") if c.strip()]
    if len(counts) != len(listing):
        raise ValueError(f"support count mismatch in rule {line!r}")
    for c in listing:
        if c not in schema.classes:
            raise ValueError(f"unknown class {c!r} in rule {line!r}")
    by_class = dict(zip(listing, counts))
    supports = tuple(by_class.get(c, 0) for c in schema.classes)
    rule = DecisionRule(tuple(antecedent), supports, schema.classes, listing=listing)
    if rule.lhs_support != int(m["lhs_n"]):
        raise ValueError(f"LHS support {m['lhs_n']} != sum of RHS supports in {line!r}")
    return rule


@dataclass(frozen=True)
class RuleModel:
    """A rule set plus the training statistics needed for coverage and voting."""

    schema: AttributeSchema
    rules: tuple[DecisionRule, ...]
    n_train: int
    class_sizes: Mapping[str, int]
    default_policy: DefaultPolicy = "abstain"
    conflict_policy: ConflictPolicy = "support_voting"
    tie_class: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "class_sizes", {c: int(self.class_sizes.get(c, 0)) for c in self.schema.classes})
        if sum(self.class_sizes.values()) != self.n_train:
            raise ValueError("class sizes must sum to n_train")
        if self.tie_class is None:
            object.__setattr__(self, "tie_class", self.schema.classes[0])
        elif self.tie_class not in self.schema.classes:
            raise ValueError(f"unknown tie class {self.tie_class!r}")
        if self.default_policy not in ("abstain", "majority_class"):
            raise ValueError(f"unknown default policy {self.default_policy!r}")
        if self.conflict_policy not in ("support_voting", "first_match"):
            raise ValueError(f"unknown conflict policy {self.conflict_policy!r}")
        for rule in self.rules:
            for a, v in rule.antecedent:
                if v not in self.schema.attribute(a).values:
                    raise ValueError(f"rule uses value {v!r} not allowed for {a!r}")
            if rule.classes != self.schema.classes:
                raise ValueError("rule class order differs from schema")

    def rule(self, rule_id: int) -> DecisionRule:
        return self.rules[rule_id - 1]

    def with_policies(self, **kwargs) -> "RuleModel":
        return replace(self, **kwargs)


def lhs_coverage(rule: DecisionRule, model: RuleModel) -> float:
    if model.n_train <= 0:
        raise ValueError("n_train must be positive")
    return rule.lhs_support / model.n_train


def _rhs_fractions(rule: DecisionRule, model: RuleModel) -> dict[str, Fraction]:
    out = {}
    for c in model.schema.classes:
        size, support = model.class_sizes[c], rule.support_of(c)
        if size <= 0:
            # a class absent from training cannot be covered
            if support:
                raise ZeroDivisionError(f"class {c!r} has zero size but support {support}")
            out[c] = Fraction(0)
            continue
        out[c] = Fraction(support, size)
    return out


def rhs_coverage(rule: DecisionRule, model: RuleModel) -> dict[str, float]:
    """RHS support of each class divided by that class's training size."""
    return {c: float(f) for c, f in _rhs_fractions(rule, model).items()}


def _argmax(scores: Mapping[str, Fraction | int], order: Sequence[str], tie_class: str) -> str:
    best = max(scores.values())
    tied = [c for c in order if scores[c] == best]
    if tie_class in tied:
        return tie_class
    return tied[0]


def resolve_final_decision(rule: DecisionRule, model: RuleModel) -> str:
    """Sole class for a uni-dimensional rule; larger RHS coverage otherwise.

    Coverages are compared as exact fractions so ties such as 6/45 vs 8/60
    are detected; an exact tie goes to the model's tie class.
    """
    if rule.lhs_support <= 0:
        raise ValueError("rule has no support")
    positive = rule.positive_classes
    if len(positive) == 1:
        return positive[0]
    return _argmax(_rhs_fractions(rule, model), model.schema.classes, model.tie_class)


def match(rule: DecisionRule, record: Mapping[str, str]) -> bool:
    for attr, value in rule.antecedent:
        if attr not in record:
            raise KeyError(f"record lacks attribute {attr!r}")
        if record[attr] != value:
            return False
    return True


@dataclass(frozen=True)
class Verdict:
    decision: str | None
    fired: tuple[int, ...]
    tally: dict[str, int] = field(default_factory=dict)

    @property
    def abstained(self) -> bool:
        return self.decision is None


def classify(record, model: RuleModel) -> Verdict:
    """Classify one record (mapping or :class:`CandidateProfile`).

    Under ``support_voting`` every fired rule adds its per-class RHS supports
    to the tally and the top class wins (ties to the model's tie class).
    Under ``first_match`` the lowest-numbered fired rule decides through its
    final decision.  With nothing fired the default policy applies.
    """
    if hasattr(record, "as_record"):
        record = record.as_record()
    classes = model.schema.classes
    fired = tuple(i for i, r in enumerate(model.rules, start=1) if match(r, record))
    tally = dict.fromkeys(classes, 0)
    for i in fired:
        for c, s in zip(classes, model.rules[i - 1].supports):
            tally[c] += s
    if not fired:
        if model.default_policy == "majority_class":
            return Verdict(_argmax(model.class_sizes, classes, model.tie_class), fired, tally)
        return Verdict(ABSTAIN, fired, tally)
    if model.conflict_policy == "first_match":
        first = model.rules[fired[0] - 1]
        decision = first.final_decision or resolve_final_decision(first, model)
        return Verdict(decision, fired, tally)
    return Verdict(_argmax(tally, classes, model.tie_class), fired, tally)


def build_model(
    schema: AttributeSchema,
    rules: Iterable[DecisionRule],
    n_train: int,
    class_sizes: Mapping[str, int],
    **policies,
) -> RuleModel:
    """Assemble a model and attach resolved final decisions to every rule."""
    draft = RuleModel(schema, tuple(rules), n_train, class_sizes, **policies)
    resolved = tuple(replace(r, final_decision=resolve_final_decision(r, draft)) for r in draft.rules)
    return replace(draft, rules=resolved)


def model_from_induction(table: DecisionTable, induced: Sequence[InducedRule], **policies) -> RuleModel:
    classes = table.schema.classes
    rules = [DecisionRule(r.antecedent, tuple(r.supports[c] for c in classes), classes) for r in induced]
    return build_model(table.schema, rules, len(table), class_counts(table), **policies)


# Published Johnson-algorithm rule set: (antecedent values, [(class, RHS support), ...])
_TABLE5 = [
    (("team_leader", "sensing", "female"), [("effective", 1)]),
    (("team_leader", "perceiving", "male"), [("ineffective", 4)]),
    (("team_leader", "intuiting", "feeling", "perceiving"), [("ineffective", 1)]),
    (("team_leader", "introvert", "thinking"), [("ineffective", 7)]),
    (("team_leader", "introvert", "sensing"), [("ineffective", 2)]),
    (("team_leader", "introvert", "feeling"), [("ineffective", 1)]),
    (("team_leader", "feeling", "male"), [("ineffective", 3)]),
    (("team_leader", "extrovert", "thinking", "judging"), [("effective", 4)]),
    (("team_leader", "extrovert", "intuiting", "thinking", "perceiving"), [("effective", 1), ("ineffective", 1)]),
    (("team_leader", "extrovert", "intuiting", "judging"), [("effective", 4)]),
    (("programmer", "thinking", "judging"), [("effective", 13), ("ineffective", 19)]),
    (("programmer", "introvert", "sensing", "judging"), [("ineffective", 9), ("effective", 5)]),
    (("programmer", "introvert", "perceiving", "male"), [("effective", 8)]),
    (("programmer", "introvert", "judging", "male"), [("effective", 5), ("ineffective", 9)]),
    (("programmer", "introvert", "intuiting", "perceiving", "female"), [("effective", 1), ("ineffective", 1)]),
    (("programmer", "introvert", "intuiting", "feeling", "judging", "female"), [("ineffective", 2)]),
    (("programmer", "extrovert", "sensing", "thinking"), [("effective", 6), ("ineffective", 8)]),
    (("programmer", "extrovert", "intuiting", "perceiving"), [("effective", 6)]),
    (("programmer", "extrovert", "intuiting", "judging"), [("ineffective", 9), ("effective", 6)]),
    (("programmer", "extrovert", "feeling", "perceiving"), [("effective", 5)]),
    (("intuiting", "perceiving", "male"), [("effective", 10)]),
    (("introvert", "sensing", "perceiving", "female"), [("ineffective", 2)]),
    (("introvert", "sensing", "feeling", "perceiving"), [("ineffective", 1)]),
    (("extrovert", "sensing", "feeling", "judging"), [("ineffective", 7)]),
]

EMBEDDED_MODEL_NAME = "table5-ja-v1"
_VALUE_TO_ATTR = {v: a.name for a in STUDY_SCHEMA.conditions for v in a.values}


def embedded_model() -> RuleModel:
    """The published 24-rule model (n=105: 45 effective, 60 ineffective)."""
    classes = STUDY_SCHEMA.classes
    rules = []
    for values, consequents in _TABLE5:
        antecedent = tuple((_VALUE_TO_ATTR[v], v) for v in values)
        by_class = dict(consequents)
        supports = tuple(by_class.get(c, 0) for c in classes)
        rules.append(DecisionRule(antecedent, supports, classes, listing=tuple(c for c, _ in consequents)))
    return build_model(STUDY_SCHEMA, rules, 105, {"effective": 45, "ineffective": 60})


BUILTIN_MODELS = {EMBEDDED_MODEL_NAME: embedded_model}


# Model files: "key=value" header lines, a blank line, then one rule per line.

def _attr_line(a: Attribute) -> str:
    return f"{a.name}:" + "|".join(f"{v}={c}" for v, c in zip(a.values, a.codes))


def _parse_attr_line(text: str) -> Attribute:
    name, _, rest = text.partition(":")
    pairs = [p.rpartition("=") for p in rest.split("|")]
    return Attribute(name, tuple(v for v, _, _ in pairs), tuple(int(c) for _, _, c in pairs))


def write_model(model: RuleModel) -> str:
    s = model.schema
    lines = [
        "# roughteam rule model",
        f"schema={s.name}",
        *(f"condition={_attr_line(a)}" for a in s.conditions),
        f"decision={_attr_line(s.decision)}",
        f"n_train={model.n_train}",
        "class_sizes=" + ",".join(f"{c}:{model.class_sizes[c]}" for c in s.classes),
        f"policy=conflict:{model.conflict_policy},default:{model.default_policy},tie:{model.tie_class}",
        "",
    ]
    lines += [r.to_text() for r in model.rules]
    return "\n".join(lines) + "\n"


def read_model(text: str) -> RuleModel:
    header: dict[str, list[str]] = {}
    rule_lines = []
    in_rules = False
    for line in text.splitlines():
        if line.startswith("#"):
            continue
        if not in_rules:
            if not line.strip():
                in_rules = True
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"malformed header line {line!r}")
            header.setdefault(key.strip(), []).append(value.strip())
        elif line.strip():
            rule_lines.append(line)
    try:
        schema = AttributeSchema(
            tuple(_parse_attr_line(t) for t in header["condition"]),
            _parse_attr_line(header["decision"][0]),
            header.get("schema", ["custom"])[0],
        )
        n_train = int(header["n_train"][0])
        sizes = {k: int(v) for k, v in (p.split(":") for p in header["class_sizes"][0].split(","))}
    except KeyError as exc:
        raise ValueError(f"model header lacks {exc.args[0]!r}") from None
    policy = dict(p.split(":") for p in header.get("policy", ["conflict:support_voting,default:abstain"])[0].split(","))
    rules = [parse_rule(line, schema) for line in rule_lines]
    return build_model(
        schema,
        rules,
        n_train,
        sizes,
        default_policy=policy.get("default", "abstain"),
        conflict_policy=policy.get("conflict", "support_voting"),
        tie_class=policy.get("tie"),
    )


def resolve_model(ref: str) -> RuleModel:
    """A built-in model name or the path of a model file."""
    from pathlib import Path

    if ref in BUILTIN_MODELS:
        return BUILTIN_MODELS[ref]()
    return read_model(Path(ref).read_text(encoding="utf-8"))


def schema_compatible(model_schema: AttributeSchema, other: AttributeSchema) -> bool:
    if model_schema.classes != other.classes:
        return False
    mine = {a.name: set(a.values) for a in model_schema.conditions}
    theirs = {a.name: set(a.values) for a in other.conditions}
    return mine == theirs


def listing(model: RuleModel) -> list[dict]:
    """Per-rule supports, coverages and final decisions for reports."""
    out = []
    for i, r in enumerate(model.rules, start=1):
        cov = rhs_coverage(r, model)
        out.append(
            {
                "id": i,
                "rule": r.to_text(),
                "phrase": r.phrase(),
                "lhs_support": r.lhs_support,
                "rhs_support": {c: r.support_of(c) for c in r.listing},
                "lhs_coverage": lhs_coverage(r, model),
                "rhs_coverage": {c: cov[c] for c in r.listing},
                "bidimensional": r.is_bidimensional,
                "final_decision": r.final_decision,
            }
        )
    return out


def format_listing(model: RuleModel) -> str:
    lines = [f"# {len(model.rules)} rules; n_train={model.n_train}; "
             + ", ".join(f"{c}={model.class_sizes[c]}" for c in model.schema.classes)]
    for row in listing(model):
        rhs = ", ".join(str(v) for v in row["rhs_support"].values())
        cov = ", ".join(f"{v:.6f}" for v in row["rhs_coverage"].values())
        lines.append(
            f"{row['id']:>3}  {row['phrase']}  | LHS {row['lhs_support']} | RHS {rhs}"
            f" | LHS cov {row['lhs_coverage']:.6f} | RHS cov {cov} | final {row['final_decision']}"
        )
    return "\n".join(lines) + "\n"
