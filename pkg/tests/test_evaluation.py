import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nbqe.errors import UsageError
from nbqe.evaluation import (
    agreement,
    build_report,
    check_distribution_sum,
    confusion_matrix,
    format_percent,
    grade_distribution,
    render_tables,
    report_from_counts,
    reports_to_json,
)
from nbqe.grading import Grade

P, A, G, E = Grade.POOR, Grade.AVERAGE, Grade.GOOD, Grade.EXCELLENT

grades_st = st.lists(st.sampled_from(list(Grade)), max_size=50)


def test_distribution():
    assert grade_distribution([]) == {P: 0, A: 0, G: 0, E: 0}
    assert grade_distribution([G, G, P]) == {P: 1, A: 0, G: 2, E: 0}


def test_published_human_column_sums():
    bing = {E: 96, G: 231, A: 956, P: 17}
    assert check_distribution_sum(bing, 1300) is None


@pytest.mark.parametrize("matches, printed", [(771, "59.31"), (756, "58.15"), (711, "54.69")])
def test_published_agreement(matches, printed):
    assert format_percent(matches, 1300) == printed


def test_round_half_up():
    assert format_percent(1, 8) == "12.50"
    assert format_percent(1, 16) == "6.25"
    assert format_percent(1, 1600) == "0.06"
    # 0.125 exactly: half-up, not banker's rounding
    assert format_percent(1, 800) == "0.13"


def test_agreement_identity_and_errors():
    xs = [P, A, G, E, G]
    assert agreement(xs, xs) == (5, 5, 100.0)
    assert format_percent(5, 5) == "100.00"
    with pytest.raises(UsageError):
        agreement([P], [P, A])
    assert agreement([], []) == (0, 0, 0.0)


def test_confusion_examples():
    cm = confusion_matrix([G, A], [G, P])
    assert cm[G, G] == 1 and cm[P, A] == 1 and np.trace(cm) == 1 and cm.sum() == 2
    xs = [P, A, G, E]
    assert np.array_equal(confusion_matrix(xs, xs), np.eye(4, dtype=int))
    assert np.trace(confusion_matrix([A, G, E, P], xs)) == 0
    with pytest.raises(UsageError):
        confusion_matrix([P], [])


@given(grades_st, st.randoms())
def test_report_invariants(gold, rnd):
    pred = list(gold)
    rnd.shuffle(pred)
    r = build_report("e", pred, gold)
    assert r.matches == np.trace(r.confusion)
    assert r.total == r.confusion.sum() == len(gold)
    assert list(r.confusion.sum(axis=1)) == list(r.distribution_gold.values())
    assert list(r.confusion.sum(axis=0)) == list(r.distribution_predicted.values())
    if gold:
        assert r.agreement_percent == pytest.approx(100 * r.matches / r.total)
    assert agreement(pred, gold)[:2] == agreement(gold, pred)[:2]
    assert agreement(gold, gold)[2] == (100.0 if gold else 0.0)


def test_report_from_published_counts_flags_babylon():
    classifier_babylon = {E: 12, G: 200, A: 1025, P: 65}
    human_babylon = {E: 7, G: 234, A: 1006, P: 53}
    r = report_from_counts("Babylon", classifier_babylon, human_babylon, 711, 1300)
    assert len(r.warnings) == 1
    assert "1302" in r.warnings[0]
    assert r.confusion is None
    assert r.to_dict()["agreement_percent"] == 54.69


def test_report_from_counts_rejects_impossible_matches():
    with pytest.raises(UsageError):
        report_from_counts("x", {}, {}, 5, 3)


def test_json_and_text_rendering():
    r1 = build_report("bing", [G, G, P], [G, A, P])
    r2 = report_from_counts("babylon", {E: 12, G: 200, A: 1025, P: 65}, {E: 7, G: 234, A: 1006, P: 53}, 711, 1300)
    doc = json.loads(reports_to_json([r1, r2]))
    assert doc[0] == {
        "engine": "bing",
        "distribution_predicted": {"poor": 1, "average": 0, "good": 2, "excellent": 0},
        "distribution_gold": {"poor": 1, "average": 1, "good": 1, "excellent": 0},
        "confusion": [[1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 1, 0], [0, 0, 0, 0]],
        "matches": 2,
        "total": 3,
        "agreement_percent": 66.67,
        "warnings": [],
    }
    text = render_tables([r1, r2])
    assert "NAIVE BAYES CLASSIFIER RESULTS" in text and "HUMAN EVALUATION RESULTS" in text
    assert "54.69" in text and "66.67" in text
    assert "warning: babylon: predicted grade counts sum to 1302" in text
    # best grade first
    assert text.index("Excellent") < text.index("Poor")
