"""C4.5-style decision tree over categorical attributes.

Multiway splits chosen by gain ratio, followed by bottom-up subtree
replacement driven by the pessimistic (upper confidence bound) error estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from scipy.stats import beta as beta_dist

from ..table import DecisionTable


@dataclass(frozen=True)
class C45Params:
    min_leaf: int = 2
    confidence: float = 0.25
    prune: bool = True

    def __post_init__(self):
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence must lie in (0, 1)")


@dataclass
class TreeNode:
    """Leaf when ``attribute`` is None; otherwise one child per observed value."""

    distribution: dict[str, int]
    classes: tuple[str, ...]
    attribute: str | None = None
    children: dict[str, "TreeNode"] = field(default_factory=dict)
    gain: float = 0.0
    gain_ratio: float = 0.0
    estimated_errors: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.attribute is None

    @property
    def n(self) -> int:
        return sum(self.distribution.values())

    @property
    def majority(self) -> str:
        best = max(self.distribution.values())
        return next(c for c in self.classes if self.distribution[c] == best)

    @property
    def errors(self) -> int:
        return self.n - self.distribution[self.majority]

    def leaves(self) -> list["TreeNode"]:
        if self.is_leaf:
            return [self]
        return [leaf for child in self.children.values() for leaf in child.leaves()]

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(c.depth() for c in self.children.values())

    def subtree_estimate(self) -> float:
        return sum(leaf.estimated_errors for leaf in self.leaves())

    def to_text(self) -> str:
        lines: list[str] = []

        def dist(node: TreeNode) -> str:
            return ",".join(f"{c}:{node.distribution[c]}" for c in node.classes)

        def walk(node: TreeNode, indent: int, label: str) -> None:
            pad = "  " * indent
            if node.is_leaf:
                lines.append(f"{pad}{label}-> {node.majority} ({dist(node)})")
            else:
                lines.append(f"{pad}{label}split {node.attribute} ({dist(node)})")
                for value, child in node.children.items():
                    walk(child, indent + 1, f"{node.attribute}={value} ")

        walk(self, 0, "")
        return "\n".join(lines) + "\n"


def entropy(counts: Sequence[int]) -> float:
    total = sum(counts)
    if total == 0:
        return 0.0
    return -sum(c / total * math.log2(c / total) for c in counts if c)


def split_statistics(rows: Sequence[Mapping[str, str]], labels: Sequence[str], attribute: str,
                     classes: Sequence[str]) -> tuple[float, float, float]:
    """(information gain, split information, gain ratio) of splitting on ``attribute``."""
    n = len(rows)
    parts: dict[str, dict[str, int]] = {}
    for row, label in zip(rows, labels):
        parts.setdefault(row[attribute], dict.fromkeys(classes, 0))[label] += 1
    base = entropy([sum(1 for l in labels if l == c) for c in classes])
    remainder = sum(sum(p.values()) / n * entropy(list(p.values())) for p in parts.values())
    gain = base - remainder
    split_info = entropy([sum(p.values()) for p in parts.values()])
    ratio = gain / split_info if split_info > 0 else 0.0
    return gain, split_info, ratio


def pessimistic_errors(n: int, errors: int, confidence: float) -> float:
    """``n`` times the upper ``confidence`` bound on the binomial error rate."""
    if n == 0:
        return 0.0
    if errors >= n:
        return float(n)
    upper = float(beta_dist.ppf(1.0 - confidence, errors + 1, n - errors))
    return n * upper


def _distribution(labels: Sequence[str], classes: Sequence[str]) -> dict[str, int]:
    d = dict.fromkeys(classes, 0)
    for l in labels:
        d[l] += 1
    return d


def _grow(rows, labels, attributes, classes, params: C45Params) -> TreeNode:
    node = TreeNode(_distribution(labels, classes), tuple(classes))
    node.estimated_errors = pessimistic_errors(node.n, node.errors, params.confidence)
    if node.errors == 0 or len(rows) < 2 * params.min_leaf:
        return node

    best = None
    for attr in attributes:
        sizes: dict[str, int] = {}
        for row in rows:
            sizes[row[attr]] = sizes.get(row[attr], 0) + 1
        if len(sizes) < 2 or sum(1 for s in sizes.values() if s >= params.min_leaf) < 2:
            continue
        gain, _, ratio = split_statistics(rows, labels, attr, classes)
        if best is None or ratio > best[2]:
            best = (attr, gain, ratio)
    if best is None:
        return node

    attr, node.gain, node.gain_ratio = best
    node.attribute = attr
    remaining = [a for a in attributes if a != attr]
    values = []
    for row in rows:
        if row[attr] not in values:
            values.append(row[attr])
    for value in values:
        idx = [i for i, row in enumerate(rows) if row[attr] == value]
        node.children[value] = _grow([rows[i] for i in idx], [labels[i] for i in idx], remaining, classes, params)
    return node


def prune(node: TreeNode, confidence: float = 0.25) -> TreeNode:
    """Replace a subtree by a leaf whenever that does not raise the error estimate.

    Works bottom-up and in place; every node's ``estimated_errors`` is refreshed
    for the given ``confidence``.
    """
    node.estimated_errors = pessimistic_errors(node.n, node.errors, confidence)
    if node.is_leaf:
        return node
    for value, child in node.children.items():
        node.children[value] = prune(child, confidence)
    if node.estimated_errors <= node.subtree_estimate() + 1e-12:
        node.attribute = None
        node.children = {}
        node.gain = node.gain_ratio = 0.0
    return node


def fit_c45(table: DecisionTable, params: C45Params = C45Params()) -> TreeNode:
    schema = table.schema
    rows = table.records()
    tree = _grow(rows, list(table.decisions), list(schema.attribute_names), schema.classes, params)
    if params.prune:
        tree = prune(tree, params.confidence)
    return tree


def predict_tree(tree: TreeNode, record) -> str:
    if hasattr(record, "as_record"):
        record = record.as_record()
    node = tree
    while not node.is_leaf:
        if node.attribute not in record:
            raise KeyError(f"record lacks attribute {node.attribute!r}")
        child = node.children.get(record[node.attribute])
        if child is None:
            return node.majority
        node = child
    return node.majority


def rule_count(tree: TreeNode) -> int:
    """Number of leaves, i.e. root-to-leaf rules."""
    return len(tree.leaves())
