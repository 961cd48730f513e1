import random
from collections import Counter
from itertools import permutations

import pytest
from hypothesis import given, strategies as st

from roughteam.evaluation import (
    ConfusionMatrix,
    TechniqueCandidate,
    cross_validate,
    format_report,
    kfold_split,
    metrics,
    parse_kv_report,
    select_technique,
)
from roughteam.table import Attribute, AttributeSchema, DecisionTable

from conftest import random_table

PUBLISHED = [
    TechniqueCandidate("logistic", 67.6, None),
    TechniqueCandidate("c45", 70.48, 8),
    TechniqueCandidate("ga_rules", 75.23, 48),
    TechniqueCandidate("ja_rules", 79.04, 24),
]


def test_kfold_leave_one_out():
    t = random_table(random.Random(0), 10, 2)
    folds = kfold_split(t, 10, seed=1)
    assert sorted(len(f) for f in folds) == [1] * 10
    assert sorted(o for f in folds for o in f) == list(range(1, 11))


def test_kfold_sizes_105():
    t = random_table(random.Random(0), 105, 3)
    assert sorted(len(f) for f in kfold_split(t, 10, seed=5)) == [10] * 5 + [11] * 5


@pytest.mark.parametrize("k", [1, 0, 11])
def test_kfold_bad_k(k):
    with pytest.raises(ValueError):
        kfold_split(random_table(random.Random(0), 10, 2), k, seed=0)


def test_kfold_partition_and_stratification():
    for seed in range(100):
        rng = random.Random(seed)
        n = rng.randint(2, 60)
        t = random_table(rng, n, 2)
        k = rng.randint(2, n)
        folds = kfold_split(t, k, seed=seed)
        assert len(folds) == k
        ids = [o for f in folds for o in f]
        assert sorted(ids) == list(t.object_ids)
        sizes = [len(f) for f in folds]
        assert max(sizes) - min(sizes) <= 1
        total = Counter(t.decisions)
        for f in folds:
            per = Counter(t.decision(o) for o in f)
            for cls, count in total.items():
                expected = count * len(f) / n
                assert abs(per[cls] - expected) <= 1 + 1e-9


def test_kfold_deterministic():
    t = random_table(random.Random(4), 50, 3)
    assert kfold_split(t, 7, seed=9) == kfold_split(t, 7, seed=9)
    assert kfold_split(t, 7, seed=9, stratified=False) == kfold_split(t, 7, seed=9, stratified=False)


def test_metrics_published():
    r = metrics(ConfusionMatrix(tp=23, tn=60, fp=0, fn=22))
    assert r.accuracy == pytest.approx(79.0476, abs=1e-4)
    assert r.precision == 100.0
    assert r.recall == pytest.approx(51.11, abs=0.01)
    assert r.npv == pytest.approx(73.1707, abs=1e-4)
    assert r.f1 == pytest.approx(67.65, abs=0.01)


def test_metrics_undefined():
    r = metrics(ConfusionMatrix(tp=0, tn=5, fp=0, fn=0))
    assert r.precision is None and r.recall is None and r.f1 is None and r.npv == 100.0
    r = metrics(ConfusionMatrix(tp=0, tn=0, fp=3, fn=2))
    assert r.precision == 0.0 and r.recall == 0.0 and r.f1 is None
    with pytest.raises(ValueError):
        metrics(ConfusionMatrix())
    with pytest.raises(ValueError):
        ConfusionMatrix(tp=-1)


@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_f1_identity(tp, tn, fp, fn):
    if tp + tn + fp + fn == 0:
        return
    r = metrics(ConfusionMatrix(tp, tn, fp, fn))
    if r.f1 is not None:
        assert r.f1 == pytest.approx(100 * 2 * tp / (2 * tp + fp + fn))
    assert r.accuracy == pytest.approx(100 * (tp + tn) / (tp + tn + fp + fn))


def test_abstention_counts_as_error():
    m = ConfusionMatrix.from_predictions(["e", "i", "e", "i"], [None, None, "e", "i"], positive="e")
    assert m == ConfusionMatrix(tp=1, tn=1, fp=1, fn=1)


def test_select_published_candidates():
    winner, ranking = select_technique(PUBLISHED, benchmark=70.0)
    assert winner == "ja_rules"
    by_name = {a.candidate.name: a for a in ranking}
    assert by_name["ja_rules"].accepted
    assert not by_name["logistic"].accepted and "below benchmark" in by_name["logistic"].reason
    assert "lower accuracy" in by_name["c45"].reason
    assert ranking[0].candidate.name == "ja_rules"


def test_select_tie_goes_to_fewer_rules():
    winner, ranking = select_technique([TechniqueCandidate("a", 80, 30), TechniqueCandidate("b", 80, 12)])
    assert winner == "b" and "tie" in ranking[0].reason
    winner, _ = select_technique([TechniqueCandidate("a", 80, None), TechniqueCandidate("b", 80, 99)])
    assert winner == "b"


def test_select_none_meet_benchmark():
    winner, ranking = select_technique([TechniqueCandidate("lr", 60.0)])
    assert winner is None and not ranking[0].accepted


def test_select_permutation_invariant():
    for perm in permutations(PUBLISHED):
        assert select_technique(list(perm))[0] == "ja_rules"
    rng = random.Random(0)
    for _ in range(100):
        cands = [TechniqueCandidate(f"t{i}", rng.choice((65.0, 70.0, 75.0, 80.0)), rng.choice((None, 5, 10)))
                 for i in range(rng.randint(1, 5))]
        expected = select_technique(cands)[0]
        shuffled = cands[:]
        rng.shuffle(shuffled)
        assert select_technique(shuffled)[0] == expected


def test_candidate_validation():
    with pytest.raises(ValueError):
        TechniqueCandidate("x", 101.0)
    with pytest.raises(ValueError):
        select_technique([])


def _function_table(n=40):
    schema = AttributeSchema(
        (Attribute("x", ("1", "2")), Attribute("noise", ("1", "2"))),
        Attribute("d", ("neg", "pos"), (0, 1)),
    )
    rng = random.Random(2)
    rows = [(rng.choice("12"), rng.choice("12")) for _ in range(n)]
    return DecisionTable(schema, rows, ["pos" if r[0] == "2" else "neg" for r in rows])


@pytest.mark.parametrize("technique", ["ja_rules", "ga_rules", "c45"])
def test_cross_validate_single_attribute_function(technique):
    report = cross_validate(technique, _function_table(), k=5, seed=3)
    assert report.accuracy == 100.0
    assert report.matrix.total == 40
    assert len(report.per_fold) == 5


def test_cross_validate_deterministic_and_pooled():
    t = random_table(random.Random(8), 30, 3)
    for technique in ("ja_rules", "ga_rules", "c45", "logistic"):
        a = cross_validate(technique, t, k=5, seed=11)
        b = cross_validate(technique, t, k=5, seed=11)
        assert a == b
        assert a.matrix.total == 30
    assert cross_validate("logistic", t, k=5, seed=11).complexity is None


def test_cross_validate_rejects_multiclass():
    with pytest.raises(ValueError):
        cross_validate("c45", random_table(random.Random(0), 12, 2, n_classes=3), k=3)


def test_kv_round_trip():
    r = cross_validate("ja_rules", random_table(random.Random(5), 25, 3), k=5, seed=2)
    text = format_report(r, "kv")
    back = parse_kv_report(text)
    assert back.matrix == r.matrix and back.complexity == r.complexity and back.per_fold == r.per_fold
    assert format_report(back, "kv") == text


def test_kv_rejects_inconsistent_metrics():
    with pytest.raises(ValueError, match="disagrees"):
        parse_kv_report("tp=1\ntn=1\nfp=0\nfn=0\naccuracy=50.0000\n")


def test_text_report_marks_undefined():
    text = format_report(metrics(ConfusionMatrix(tn=4)), "text")
    assert "precision undefined" in text
