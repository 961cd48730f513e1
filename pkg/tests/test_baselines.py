import math
import random
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from roughteam.baselines.c45 import (
    C45Params,
    entropy,
    fit_c45,
    pessimistic_errors,
    predict_tree,
    rule_count,
    split_statistics,
)
from roughteam.baselines.logistic import (
    ConvergenceError,
    LogisticConfig,
    LogisticModel,
    PerfectSeparationWarning,
    design_matrix,
    fit_logistic,
    log_likelihood,
    predict_logistic,
    score,
)
from roughteam.table import Attribute, AttributeSchema, DecisionTable

from conftest import random_table

CLASSES = ("ineffective", "effective")


def one_attr_schema(values=("1", "2")):
    return AttributeSchema((Attribute("x", values),), Attribute("d", CLASSES, (0, 1)))


def counts_table(cells):
    """cells: {(x value, class): count}."""
    rows, decisions = [], []
    for (x, cls), k in cells.items():
        rows += [(x,)] * k
        decisions += [cls] * k
    return DecisionTable(one_attr_schema(), rows, decisions)


def noisy_table(rng, n, n_attr):
    """Random table whose outcome depends on the first attribute, with label noise."""
    t = random_table(rng, n, n_attr)
    neg, pos = t.schema.classes
    first = t.schema.conditions[0].values[0]
    decisions = []
    for row in t.rows:
        if rng.random() < 0.7:
            decisions.append(pos if row[0] == first else neg)
        else:
            decisions.append(rng.choice((neg, pos)))
    return DecisionTable(t.schema, t.rows, decisions)


# logistic regression


def test_symmetric_data_gives_zero_slope():
    m = fit_logistic(counts_table({("1", "ineffective"): 5, ("1", "effective"): 5, ("2", "ineffective"): 5, ("2", "effective"): 5}))
    assert abs(m.coefficients["x"]) < 1e-9 and abs(m.intercept) < 1e-9


def test_two_by_two_closed_form():
    m = fit_logistic(counts_table({("1", "ineffective"): 10, ("1", "effective"): 30, ("2", "ineffective"): 30, ("2", "effective"): 10}))
    slope = math.log((10 / 30) / (30 / 10))
    # logit at x=1 is log(30/10) = b0 + b1
    assert abs(m.coefficients["x"] - slope) < 1e-6
    assert abs(m.intercept - (math.log(3) - slope)) < 1e-6
    assert m.converged and not m.separated


def test_score_matches_finite_differences():
    for seed in range(20):
        rng = random.Random(seed)
        t = random_table(rng, 40, rng.randint(1, 5))
        X, y = design_matrix(t)
        beta = np.array([rng.uniform(-0.5, 0.5) for _ in range(X.shape[1])])
        h = 1e-5
        numeric = np.array([
            (log_likelihood(beta + h * e, X, y) - log_likelihood(beta - h * e, X, y)) / (2 * h)
            for e in np.eye(len(beta))
        ])
        analytic = score(beta, X, y)
        rel = np.linalg.norm(analytic - numeric) / max(np.linalg.norm(numeric), 1e-12)
        assert rel < 1e-4


def test_log_likelihood_is_monotone():
    for seed in range(20):
        rng = random.Random(seed)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PerfectSeparationWarning)
            m = fit_logistic(noisy_table(rng, 60, rng.randint(1, 5)))
        assert all(b >= a - 1e-12 for a, b in zip(m.history, m.history[1:]))


def test_fit_agrees_with_score_root():
    t = noisy_table(random.Random(3), 80, 3)
    m = fit_logistic(t)
    X, y = design_matrix(t)
    beta = np.array([m.intercept, *m.coefficients.values()])
    assert np.max(np.abs(score(beta, X, y))) < 1e-4


def _model(intercept, coefs):
    coefs = dict(coefs)
    enc = {name: {"a": 1, "b": 2} for name in coefs}
    return LogisticModel(intercept, dict(coefs), enc, "effective", "ineffective")


@settings(max_examples=100)
@given(st.floats(-5, 5), st.lists(st.floats(-3, 3), min_size=1, max_size=6), st.data())
def test_predict_formula(intercept, coefs, data):
    names = [f"p{i}" for i in range(len(coefs))]
    m = _model(intercept, zip(names, coefs))
    rec = {n: data.draw(st.sampled_from(("a", "b"))) for n in names}
    eta = intercept + sum(b * (1 if rec[n] == "a" else 2) for n, b in zip(names, coefs))
    _, p = predict_logistic(m, rec)
    assert abs(p - 1 / (1 + math.exp(-eta))) < 1e-12


def test_predict_saturates_and_centres():
    assert predict_logistic(_model(20.0, {"p": 0.0}), {"p": "a"}) == ("effective", pytest.approx(1.0, abs=1e-8))
    cls, p = predict_logistic(_model(0.0, {"p": 0.0}), {"p": "b"})
    assert p == 0.5 and cls == "effective"


def test_predict_monotone_in_predictor():
    m = _model(-1.0, {"p": 0.8})
    assert predict_logistic(m, {"p": "b"})[1] > predict_logistic(m, {"p": "a"})[1]


def test_missing_predictor():
    with pytest.raises(KeyError):
        predict_logistic(_model(0.0, {"p": 1.0}), {})


def test_perfect_separation_warns():
    t = counts_table({("1", "ineffective"): 10, ("2", "effective"): 10})
    with pytest.warns(PerfectSeparationWarning):
        m = fit_logistic(t)
    assert m.separated
    assert predict_logistic(m, {"x": "2"})[0] == "effective"
    assert predict_logistic(m, {"x": "1"})[0] == "ineffective"


def test_non_convergence_raises():
    t = noisy_table(random.Random(1), 60, 3)
    with pytest.raises(ConvergenceError):
        fit_logistic(t, LogisticConfig(max_iterations=1, tolerance=0.0))


def test_too_few_objects():
    t = random_table(random.Random(0), 2, 5)
    with pytest.raises(ValueError):
        fit_logistic(t)


# C4.5


def xor_table():
    schema = AttributeSchema(
        (Attribute("a", ("0", "1")), Attribute("b", ("0", "1"))),
        Attribute("d", CLASSES, (0, 1)),
    )
    rows, decisions = [], []
    for a in "01":
        for b in "01":
            rows += [(a, b)] * 2
            decisions += [CLASSES[int(a != b)]] * 2
    return DecisionTable(schema, rows, decisions)


def test_single_class_gives_single_leaf():
    t = counts_table({("1", "effective"): 4, ("2", "effective"): 3})
    tree = fit_c45(t)
    assert tree.is_leaf and tree.majority == "effective" and rule_count(tree) == 1


def test_xor_grows_full_tree():
    t = xor_table()
    tree = fit_c45(t, C45Params(min_leaf=1, prune=False))
    assert tree.depth() == 2 and rule_count(tree) == 4
    assert all(predict_tree(tree, t.record(o)) == t.decision(o) for o in t.object_ids)


def test_entropy_known_values():
    assert entropy([5, 5]) == pytest.approx(1.0)
    assert entropy([4, 0]) == 0.0
    assert entropy([]) == 0.0
    assert entropy([1, 1, 1, 1]) == pytest.approx(2.0)


def _gain_by_definition(rows, labels, attr, classes):
    def h(ls):
        n = len(ls)
        out = 0.0
        for c in classes:
            p = ls.count(c) / n if n else 0
            if p > 0:
                out -= p * math.log(p, 2)
        return out

    values = sorted({r[attr] for r in rows})
    rem = 0.0
    for v in values:
        sub = [l for r, l in zip(rows, labels) if r[attr] == v]
        rem += len(sub) / len(rows) * h(sub)
    return h(list(labels)) - rem


def _internal_nodes(node):
    if node.is_leaf:
        return []
    return [node] + [n for c in node.children.values() for n in _internal_nodes(c)]


def _node_data(tree, rows, labels, node):
    """Rows reaching ``node`` by walking the tree."""
    out = []
    for r, l in zip(rows, labels):
        cur = tree
        while cur is not node and not cur.is_leaf:
            cur = cur.children.get(r[cur.attribute])
            if cur is None:
                break
        if cur is node:
            out.append((r, l))
    return out


def test_node_gain_matches_definition():
    for seed in range(50):
        rng = random.Random(seed)
        t = random_table(rng, rng.randint(4, 40), rng.randint(1, 5), rng.choice((2, 3)))
        rows, labels = t.records(), list(t.decisions)
        tree = fit_c45(t, C45Params(min_leaf=1, prune=False))
        for node in _internal_nodes(tree):
            data = _node_data(tree, rows, labels, node)
            r, l = [d[0] for d in data], [d[1] for d in data]
            assert len(r) == node.n
            gain, _, _ = split_statistics(r, l, node.attribute, t.schema.classes)
            assert abs(node.gain - _gain_by_definition(r, l, node.attribute, t.schema.classes)) < 1e-9
            assert abs(gain - node.gain) < 1e-12


def test_chosen_split_has_max_gain_ratio():
    for seed in range(30):
        rng = random.Random(seed)
        t = random_table(rng, rng.randint(6, 40), rng.randint(2, 5))
        rows, labels = t.records(), list(t.decisions)
        tree = fit_c45(t, C45Params(min_leaf=1, prune=False))
        if tree.is_leaf:
            continue
        ratios = [split_statistics(rows, labels, a, t.schema.classes)[2]
                  for a in t.schema.attribute_names if len({r[a] for r in rows}) > 1]
        assert tree.gain_ratio == pytest.approx(max(ratios), abs=1e-12)


def test_pruning_never_grows():
    for seed in range(50):
        rng = random.Random(seed)
        t = random_table(rng, rng.randint(4, 60), rng.randint(1, 5))
        unpruned = fit_c45(t, C45Params(prune=False))
        before_leaves, before_est = rule_count(unpruned), unpruned.subtree_estimate()
        pruned = fit_c45(t, C45Params(prune=True))
        assert rule_count(pruned) <= before_leaves
        assert pruned.subtree_estimate() <= before_est + 1e-9


def test_min_leaf_respected():
    for seed in range(30):
        rng = random.Random(seed)
        t = random_table(rng, rng.randint(4, 60), rng.randint(1, 5))
        tree = fit_c45(t, C45Params(min_leaf=3, prune=False))
        for node in _internal_nodes(tree):
            assert node.n >= 6
            assert sum(1 for c in node.children.values() if c.n >= 3) >= 2


def test_pessimistic_errors_properties():
    assert pessimistic_errors(0, 0, 0.25) == 0.0
    assert pessimistic_errors(6, 0, 0.25) == pytest.approx(6 * (1 - 0.25 ** (1 / 6)))
    assert pessimistic_errors(10, 2, 0.25) > 2
    assert pessimistic_errors(10, 2, 0.1) > pessimistic_errors(10, 2, 0.25)


def test_unseen_value_goes_to_node_majority():
    schema = one_attr_schema(("1", "2", "3"))
    t = DecisionTable(schema, [("1",)] * 3 + [("2",)] * 2, ["effective"] * 3 + ["ineffective"] * 2)
    tree = fit_c45(t, C45Params(min_leaf=1, prune=False))
    assert not tree.is_leaf
    assert predict_tree(tree, {"x": "3"}) == tree.majority == "effective"


def _paths(node):
    if node.is_leaf:
        return 1
    return sum(_paths(c) for c in node.children.values())


def test_rule_count_equals_paths():
    for seed in range(50):
        rng = random.Random(seed)
        t = random_table(rng, rng.randint(2, 50), rng.randint(1, 5))
        tree = fit_c45(t, C45Params(min_leaf=1, prune=seed % 2 == 0))
        assert rule_count(tree) == _paths(tree)


def test_tree_text_lists_splits():
    text = fit_c45(xor_table(), C45Params(min_leaf=1, prune=False)).to_text()
    assert text.startswith("split a") and text.count("->") == 4
