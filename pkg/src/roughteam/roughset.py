"""Rough-set machinery: indiscernibility, approximations, discernibility,
reduct search (Johnson greedy, exhaustive, genetic) and rule induction.
"""
from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Literal, Sequence

import numpy as np

from .table import DecisionTable

log = logging.getLogger(__name__)

Pair = tuple[int, int]


@dataclass(frozen=True)
class Partition:
    """Disjoint blocks of object ids covering the universe, ordered by smallest member."""

    blocks: tuple[frozenset[int], ...]

    def block_of(self, obj: int) -> frozenset[int]:
        for b in self.blocks:
            if obj in b:
                return b
        raise KeyError(obj)

    def __len__(self) -> int:
        return len(self.blocks)


@dataclass(frozen=True)
class DiscernibilityMatrix:
    """Sets of attributes discerning object pairs.

    ``entries`` maps an ordered pair ``(i, j)`` with ``i < j`` to the non-empty
    set of condition attributes on which the two objects differ.  Pairs with
    identical condition values but different decisions land in
    ``inconsistent_pairs`` instead.
    """

    attributes: tuple[str, ...]
    entries: dict[Pair, frozenset[str]]
    modulo_decision: bool = True
    inconsistent_pairs: frozenset[Pair] = frozenset()

    @classmethod
    def from_entries(cls, attributes: Sequence[str], entries: Iterable[Iterable[str]]) -> "DiscernibilityMatrix":
        """Build a matrix from bare attribute sets (pairs numbered synthetically)."""
        sets = [frozenset(e) for e in entries]
        attributes = tuple(attributes)
        for s in sets:
            if not s:
                raise ValueError("entries must be non-empty")
            if not s <= set(attributes):
                raise ValueError(f"entry {set(s)} uses unknown attributes")
        return cls(attributes, {(0, k + 1): s for k, s in enumerate(sets)})

    def entry_sets(self) -> list[frozenset[str]]:
        return [self.entries[p] for p in sorted(self.entries)]

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Reduct:
    attributes: tuple[str, ...]
    origin: Literal["johnson", "genetic", "exhaustive"]
    scope: str = "full-table"

    @property
    def attribute_set(self) -> frozenset[str]:
        return frozenset(self.attributes)


@dataclass(frozen=True)
class GAParams:
    """Genetic reduct search settings.  ``mutation_rate=None`` means ``1/|C|``."""

    population_size: int = 64
    generations: int = 100
    mutation_rate: float | None = None
    crossover_rate: float = 0.9
    seed: int = 1729
    parsimony_weight: float = 0.05
    elitism: int = 2
    tournament_size: int = 2

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must be in [0, 1]")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must be in [0, 1]")
        if self.parsimony_weight < 0:
            raise ValueError("parsimony_weight must be non-negative")
        if not 0 <= self.elitism <= self.population_size:
            raise ValueError("elitism out of range")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")


def _check_attrs(table: DecisionTable, attrs: Iterable[str]) -> list[int]:
    attrs = list(attrs)
    if not attrs:
        raise ValueError("attribute subset must be non-empty")
    return [table.schema.index(a) for a in attrs]


def indiscernibility(table: DecisionTable, attrs: Iterable[str]) -> Partition:
    """Group objects agreeing on every attribute in ``attrs``."""
    idx = _check_attrs(table, attrs)
    groups: dict[tuple[str, ...], set[int]] = {}
    for obj in table.object_ids:
        row = table.row(obj)
        groups.setdefault(tuple(row[i] for i in idx), set()).add(obj)
    return Partition(tuple(sorted((frozenset(g) for g in groups.values()), key=min)))


def approximations(table: DecisionTable, attrs: Iterable[str], target_class: str) -> tuple[frozenset[int], frozenset[int]]:
    """Lower and upper approximation of a decision class under ``attrs``."""
    if target_class not in table.schema.classes:
        raise KeyError(f"unknown class {target_class!r}")
    members = {o for o in table.object_ids if table.decision(o) == target_class}
    lower: set[int] = set()
    upper: set[int] = set()
    for block in indiscernibility(table, attrs).blocks:
        if block <= members:
            lower |= block
        if block & members:
            upper |= block
    return frozenset(lower), frozenset(upper)


def _differing(table: DecisionTable, i: int, j: int) -> frozenset[str]:
    names = table.schema.attribute_names
    ri, rj = table.row(i), table.row(j)
    return frozenset(n for n, a, b in zip(names, ri, rj) if a != b)


def _matrix_for_pairs(table: DecisionTable, pairs: Iterable[Pair], modulo_decision: bool) -> DiscernibilityMatrix:
    entries: dict[Pair, frozenset[str]] = {}
    inconsistent = set()
    for i, j in pairs:
        same_class = table.decision(i) == table.decision(j)
        if modulo_decision and same_class:
            continue
        diff = _differing(table, i, j)
        if diff:
            entries[(i, j)] = diff
        elif not same_class:
            inconsistent.add((i, j))
    if inconsistent:
        log.debug("%d inconsistent pairs excluded from discernibility", len(inconsistent))
    return DiscernibilityMatrix(table.schema.attribute_names, entries, modulo_decision, frozenset(inconsistent))


def discernibility_matrix(table: DecisionTable, modulo_decision: bool = True) -> DiscernibilityMatrix:
    pairs = combinations(table.object_ids, 2)
    return _matrix_for_pairs(table, pairs, modulo_decision)


def object_discernibility(table: DecisionTable, obj: int, modulo_decision: bool = True) -> DiscernibilityMatrix:
    """Discernibility entries restricted to pairs involving ``obj``."""
    pairs = ((min(obj, o), max(obj, o)) for o in table.object_ids if o != obj)
    return _matrix_for_pairs(table, pairs, modulo_decision)


# Reduct search works on bitmasks: bit k is matrix.attributes[k].

def _masks(matrix: DiscernibilityMatrix) -> list[int]:
    pos = {a: k for k, a in enumerate(matrix.attributes)}
    return [sum(1 << pos[a] for a in e) for e in matrix.entry_sets()]


def _covers(subset: int, masks: Sequence[int]) -> bool:
    return all(subset & m for m in masks)


def _to_names(subset: int, attributes: Sequence[str]) -> tuple[str, ...]:
    return tuple(a for k, a in enumerate(attributes) if subset >> k & 1)


def _shrink(selected: Sequence[int], masks: Sequence[int]) -> int:
    """Drop attributes (last selected first) while coverage is preserved."""
    subset = sum(1 << k for k in selected)
    for k in reversed(selected):
        trial = subset & ~(1 << k)
        if _covers(trial, masks):
            subset = trial
    return subset


def johnson_reduct(matrix: DiscernibilityMatrix, scope: str = "full-table") -> Reduct:
    """Greedy hitting set over the matrix entries, shrunk to a true reduct.

    At each step the attribute occurring in the most uncovered entries is
    taken; ties go to the attribute earliest in schema order.
    """
    masks = _masks(matrix)
    remaining = list(masks)
    selected: list[int] = []
    n_attr = len(matrix.attributes)
    while remaining:
        counts = [sum(1 for m in remaining if m >> k & 1) for k in range(n_attr)]
        best = max(range(n_attr), key=lambda k: (counts[k], -k))
        selected.append(best)
        remaining = [m for m in remaining if not m >> best & 1]
    subset = _shrink(selected, masks)
    return Reduct(_to_names(subset, matrix.attributes), "johnson", scope)


MAX_EXHAUSTIVE_ATTRIBUTES = 20


def _minimal_hitting_sets(masks: Sequence[int], n_attr: int) -> list[int]:
    found: list[int] = []
    distinct = sorted(set(masks))
    for size in range(n_attr + 1):
        for combo in combinations(range(n_attr), size):
            subset = sum(1 << k for k in combo)
            if any(f & subset == f for f in found):
                continue
            if _covers(subset, distinct):
                found.append(subset)
    return found


def exhaustive_reducts(matrix: DiscernibilityMatrix, scope: str = "full-table") -> set[Reduct]:
    """Every minimal hitting set of the matrix entries."""
    n_attr = len(matrix.attributes)
    if n_attr > MAX_EXHAUSTIVE_ATTRIBUTES:
        raise ValueError(f"exhaustive search limited to {MAX_EXHAUSTIVE_ATTRIBUTES} attributes, got {n_attr}")
    return {
        Reduct(_to_names(s, matrix.attributes), "exhaustive", scope)
        for s in _minimal_hitting_sets(_masks(matrix), n_attr)
    }


def _ga_fitness(pop: np.ndarray, hit_matrix: np.ndarray, weight: float) -> tuple[np.ndarray, np.ndarray]:
    # hit_matrix: entries x attributes, boolean
    hits = (pop.astype(np.int64) @ hit_matrix.T.astype(np.int64)) > 0
    coverage = hits.mean(axis=1) if hit_matrix.shape[0] else np.ones(len(pop))
    fitness = coverage - weight * pop.sum(axis=1) / pop.shape[1]
    return fitness, hits.all(axis=1)


def ga_reducts(matrix: DiscernibilityMatrix, params: GAParams = GAParams(), scope: str = "full-table") -> set[Reduct]:
    """Genetic search for reducts over bitmask individuals.

    Every individual reaching full coverage in any generation is shrunk to a
    minimal hitting set (attributes dropped from the highest schema index
    down) and collected.  Results depend only on the inputs and ``params.seed``.
    """
    n_attr = len(matrix.attributes)
    masks = _masks(matrix)
    if not masks:
        return {Reduct((), "genetic", scope)}

    rng = np.random.default_rng(params.seed)
    hit_matrix = np.array([[m >> k & 1 for k in range(n_attr)] for m in masks], dtype=bool)
    mutation = params.mutation_rate if params.mutation_rate is not None else 1.0 / n_attr
    size = params.population_size
    pop = rng.random((size, n_attr)) < 0.5

    found: set[int] = set()
    seen: set[int] = set()
    weights = 1 << np.arange(n_attr, dtype=np.int64)

    def harvest(pop: np.ndarray, complete: np.ndarray) -> None:
        for bits in (pop[complete].astype(np.int64) @ weights).tolist():
            if bits in seen:
                continue
            seen.add(bits)
            found.add(_shrink([k for k in range(n_attr) if bits >> k & 1], masks))

    for _ in range(params.generations):
        fitness, complete = _ga_fitness(pop, hit_matrix, params.parsimony_weight)
        harvest(pop, complete)

        order = np.argsort(-fitness, kind="stable")
        elite = pop[order[: params.elitism]].copy()

        contenders = rng.integers(0, size, size=(size, params.tournament_size))
        winners = contenders[np.arange(size), np.argmax(fitness[contenders], axis=1)]
        parents = pop[winners]

        children = parents.copy()
        pairs = size // 2
        do_cross = rng.random(pairs) < params.crossover_rate
        swap = rng.random((pairs, n_attr)) < 0.5
        a, b = parents[0 : 2 * pairs : 2], parents[1 : 2 * pairs : 2]
        swap &= do_cross[:, None]
        children[0 : 2 * pairs : 2] = np.where(swap, b, a)
        children[1 : 2 * pairs : 2] = np.where(swap, a, b)

        children ^= rng.random(children.shape) < mutation
        children[: params.elitism] = elite
        pop = children

    _, complete = _ga_fitness(pop, hit_matrix, params.parsimony_weight)
    harvest(pop, complete)
    return {Reduct(_to_names(s, matrix.attributes), "genetic", scope) for s in found}


def manual_discretize(values: Sequence[float], cuts: Sequence[float]) -> list[str]:
    """Map numeric values to interval labels using user-supplied cut points.

    Intervals are half-open ``[lo, hi)``; labels look like ``"[1.5,3)"``.
    Categorical attributes need no discretisation and are used as-is.
    """
    cuts = sorted(cuts)
    bounds = ["-inf"] + [f"{c:g}" for c in cuts] + ["inf"]
    return [f"[{bounds[k]},{bounds[k + 1]})" for k in (bisect.bisect_right(cuts, v) for v in values)]


@dataclass
class InducedRule:
    """Antecedent plus per-class match counts, before wrapping as a model rule."""

    antecedent: tuple[tuple[str, str], ...]
    supports: dict[str, int] = field(default_factory=dict)

    @property
    def lhs_support(self) -> int:
        return sum(self.supports.values())


def _support(table: DecisionTable, antecedent: Sequence[tuple[str, str]]) -> dict[str, int]:
    idx = [(table.schema.index(a), v) for a, v in antecedent]
    counts = dict.fromkeys(table.schema.classes, 0)
    for row, d in zip(table.rows, table.decisions):
        if all(row[i] == v for i, v in idx):
            counts[d] += 1
    return counts


def induce_rules(
    table: DecisionTable,
    scope: Literal["object_related", "full"] = "object_related",
    algorithm: Literal["johnson", "genetic"] = "johnson",
    ga_params: GAParams = GAParams(),
) -> list[InducedRule]:
    """Generate decision rules from reducts of ``table``.

    With ``object_related`` scope each object gets its own modulo-decision
    discernibility function and reduct(s); ``full`` uses reducts of the whole
    table.  Each object emits the rule "its values on the reduct attributes
    => its class"; rules with equal antecedents are merged and their supports
    are recounted over the whole table, so an antecedent matched by objects of
    several classes comes out with several positive class supports.
    Rules are returned in order of first emission.
    """
    names = table.schema.attribute_names
    cache: dict[tuple, list[tuple[str, ...]]] = {}

    def reducts_for(matrix: DiscernibilityMatrix) -> list[tuple[str, ...]]:
        key = tuple(sorted(_masks(matrix)))
        if key not in cache:
            if algorithm == "johnson":
                cache[key] = [johnson_reduct(matrix).attributes]
            elif algorithm == "genetic":
                found = ga_reducts(matrix, ga_params)
                cache[key] = sorted((r.attributes for r in found), key=lambda a: (len(a), [names.index(x) for x in a]))
            else:
                raise ValueError(f"unknown algorithm {algorithm!r}")
        return cache[key]

    if scope == "full":
        shared = reducts_for(discernibility_matrix(table, modulo_decision=True))
    elif scope != "object_related":
        raise ValueError(f"unknown scope {scope!r}")

    rules: dict[tuple[tuple[str, str], ...], InducedRule] = {}
    for obj in table.object_ids:
        attr_sets = shared if scope == "full" else reducts_for(object_discernibility(table, obj))
        for attrs in attr_sets:
            antecedent = tuple((a, table.value(obj, a)) for a in names if a in attrs)
            if antecedent not in rules:
                rules[antecedent] = InducedRule(antecedent, _support(table, antecedent))
    return list(rules.values())
