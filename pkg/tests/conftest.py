import random

import pytest

from roughteam.table import Attribute, AttributeSchema, DecisionTable


def random_schema(rng: random.Random, n_attr: int, n_classes: int = 2) -> AttributeSchema:
    conditions = tuple(
        Attribute(f"a{i}", tuple(f"v{j}" for j in range(rng.choice((2, 2, 3)))))
        for i in range(n_attr)
    )
    decision = Attribute("d", tuple(f"c{j}" for j in range(n_classes)), tuple(range(n_classes)))
    return AttributeSchema(conditions, decision)


def random_table(rng: random.Random, n: int, n_attr: int, n_classes: int = 2) -> DecisionTable:
    schema = random_schema(rng, n_attr, n_classes)
    rows = [tuple(rng.choice(a.values) for a in schema.conditions) for _ in range(n)]
    return DecisionTable(schema, rows, [rng.choice(schema.classes) for _ in range(n)])


def consistent_table(rng: random.Random, n: int, n_attr: int) -> DecisionTable:
    """Random table where equal condition rows always carry equal classes."""
    schema = random_schema(rng, n_attr)
    label: dict = {}
    rows, decisions = [], []
    for _ in range(n):
        row = tuple(rng.choice(a.values) for a in schema.conditions)
        label.setdefault(row, rng.choice(schema.classes))
        rows.append(row)
        decisions.append(label[row])
    return DecisionTable(schema, rows, decisions)


@pytest.fixture
def toy_schema():
    return AttributeSchema(
        (Attribute("a", ("1", "2")), Attribute("b", ("1", "2"))),
        Attribute("d", ("ineffective", "effective"), (0, 1)),
    )


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(results, key=lambda l: int(l.split()[1])):
        terminalreporter.write_line(line)
