import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rumourstance.corpus import LABELS, StanceLabel, class_counts
from rumourstance.evaluation import (
    EvaluationError,
    ablation_to_json,
    confusion,
    evaluate,
    format_ablation,
    grid_params,
    grid_search,
    metrics,
    run_ablation,
    run_balanced,
    train_and_evaluate,
)
from rumourstance.features import CONFIGS
from rumourstance.lexicons import LexiconRegistry
from rumourstance.svm import KernelSpec, TrainParams
from rumourstance.synthetic import make_dataset

S, D, Q, C = LABELS

TEST_MATRIX = np.array([[27, 0, 3, 64], [2, 0, 1, 68], [0, 0, 50, 56], [13, 0, 8, 757]])
BALANCED_MATRIX = np.array([[39, 14, 5, 13], [8, 28, 5, 30], [2, 3, 62, 4], [14, 14, 2, 41]])


def test_reported_matrix_metrics():
    r = metrics(TEST_MATRIX)
    assert r.accuracy == pytest.approx(834 / 1049)
    assert r.precision[C] == pytest.approx(0.801, abs=5e-4)
    assert r.recall[C] == pytest.approx(0.973, abs=5e-4)
    assert r.f1[C] == pytest.approx(0.879, abs=5e-4)
    assert r.macro_recall == pytest.approx(0.433, abs=5e-4)
    # no deny predictions: precision is defined as 0
    assert r.precision[D] == 0.0 and r.f1[D] == 0.0


def test_balanced_matrix_metrics():
    r = metrics(BALANCED_MATRIX)
    assert r.accuracy == pytest.approx(170 / 284)
    assert BALANCED_MATRIX.sum(axis=1).tolist() == [71, 71, 71, 71]


def test_confusion_orientation():
    cm = confusion([S, S, D], [S, C, D])
    assert cm[0, 0] == 1 and cm[0, 3] == 1 and cm[1, 1] == 1 and cm.sum() == 3
    with pytest.raises(EvaluationError):
        confusion([S], [])
    with pytest.raises(EvaluationError):
        confusion([], [])


labels_st = st.lists(st.sampled_from(LABELS), min_size=1, max_size=60)


@given(labels_st, st.randoms(use_true_random=False))
def test_accuracy_is_agreement(gold, rnd):
    pred = [rnd.choice(LABELS) for _ in gold]
    r = evaluate(gold, pred)
    assert r.accuracy == pytest.approx(sum(g == p for g, p in zip(gold, pred)) / len(gold))
    assert 0.0 <= r.macro_f1 <= 1.0


@given(labels_st, st.randoms(use_true_random=False), st.permutations(range(4)))
def test_macro_f1_invariant_to_renaming(gold, rnd, perm):
    pred = [rnd.choice(LABELS) for _ in gold]
    rename = {LABELS[i]: LABELS[perm[i]] for i in range(4)}
    a = evaluate(gold, pred)
    b = evaluate([rename[g] for g in gold], [rename[p] for p in pred])
    assert a.macro_f1 == pytest.approx(b.macro_f1)
    assert a.accuracy == pytest.approx(b.accuracy)


def test_report_json_and_text():
    r = metrics(TEST_MATRIX, config="X")
    d = json.loads(r.to_json(runtime=False))
    assert "runtime" not in d and d["confusion"] == TEST_MATRIX.tolist()
    assert d["labels"] == ["support", "deny", "query", "comment"]
    assert "accuracy 0.7950" in r.format()


@pytest.fixture(scope="module")
def tiny():
    return make_dataset(10, 7, "train"), make_dataset(5, 8, "test", id_offset=500_000)


def test_ablation_rows(tiny, registry):
    train, test = tiny
    rows = run_ablation(train, test, registry)
    assert [r.config for r in rows] == list("ABCDEFGHIJK")
    assert [r.dimension for r in rows] == [6, 3, 24, 11, 9, 30, 17, 33, 20, 41, 44]
    assert all(r.report is not None for r in rows)
    assert len(format_ablation(rows).splitlines()) == 12


def test_ablation_skips_missing_lexicons(tiny):
    train, test = tiny
    rows = run_ablation(train, test, LexiconRegistry())
    done = [r.config for r in rows if r.report is not None]
    assert done == ["A", "B", "E"]
    skipped = [r for r in rows if r.report is None]
    assert all("not loaded" in r.skipped for r in skipped)
    parsed = json.loads(ablation_to_json(rows, runtime=False))
    assert len(parsed) == 11 and parsed[2]["report"] is None


def test_grid_enumeration():
    cands = grid_params(TrainParams(tol=1e-2))
    assert len(cands) == 56
    assert len({(p.C, p.kernel.kind, p.class_weights) for p in cands}) == 56
    assert all(p.tol == 1e-2 for p in cands)
    assert (cands[0].C, cands[0].kernel.kind, cands[0].class_weights) == (0.001, "linear", None)


def test_grid_first_best_wins(tiny, registry):
    train, test = tiny
    same = TrainParams(C=1.0)
    res = grid_search(train, test, registry, CONFIGS["A"], candidates=[same, same, same])
    assert res.best is res.cells[0].params
    assert len(res.cells) == 3


def test_grid_failed_cell_recorded(tiny, registry):
    train, test = tiny
    bad = TrainParams(C=1.0, class_weights={StanceLabel.SUPPORT: 1.0})
    good = TrainParams(C=1.0)
    res = grid_search(train, test, registry, CONFIGS["A"], candidates=[bad, good])
    assert res.cells[0].report is None and "missing" in res.cells[0].error
    assert res.best is good
    assert "failed" in res.format()


def test_grid_single_dev_instance(tiny, registry):
    train, _ = tiny
    dev = make_dataset(1, 9, "dev", replies=(0, 0), id_offset=900_000)
    assert len(dev.instances()) == 1
    res = grid_search(train, dev, registry, CONFIGS["A"],
                      candidates=[TrainParams(C=0.1), TrainParams(C=10.0)])
    assert all(c.report.accuracy in (0.0, 1.0) for c in res.cells)


def test_grid_criterion_validated(tiny, registry):
    with pytest.raises(EvaluationError):
        grid_search(*tiny, registry, CONFIGS["A"], criterion="recall")


def test_balanced_run_deterministic(registry):
    train = make_dataset(40, 3, "train")
    test = make_dataset(20, 4, "test", id_offset=500_000)
    n = min(class_counts(train).values())
    m = min(class_counts(test).values())
    a = run_balanced(train, test, registry, CONFIGS["BEST17"], seed=5, train_per_class=n,
                     test_per_class=m)
    b = run_balanced(train, test, registry, CONFIGS["BEST17"], seed=5, train_per_class=n,
                     test_per_class=m)
    assert np.array_equal(a.confusion, b.confusion)
    assert a.confusion.sum(axis=1).tolist() == [m] * 4
    with pytest.raises(ValueError):
        run_balanced(train, test, registry, CONFIGS["A"], train_per_class=10_000)


def test_train_and_evaluate_beats_majority(splits, registry):
    train, _, test = splits
    r = train_and_evaluate(train, test, registry, CONFIGS["BEST17"],
                           TrainParams(kernel=KernelSpec("rbf")))
    majority = max(class_counts(test).values()) / len(test.instances())
    assert r.accuracy > majority
