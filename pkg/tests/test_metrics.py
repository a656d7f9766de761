import numpy as np
import pytest
from hypothesis import given, strategies as st

from noveltyrank.corpus import Corpus, corpus_stats
from noveltyrank.metrics import (
    AgreementReport,
    ClassificationMetrics,
    ConfusionCounts,
    Decision,
    MetricsError,
    classification_metrics,
    confusion,
    domain_breakdown,
    f1_score,
    format_table,
    pairwise_agreement,
    write_report,
)

from conftest import record

# published (accuracy, precision, recall, f1) rows of the binary task table
TABLE_ROWS = [
    ("zero-shot", 0.242, 0.120, 0.986, 0.215),
    ("sft", 0.627, 0.194, 0.632, 0.297),
    ("dpo", 0.612, 0.205, 0.735, 0.321),
    ("encoder", 0.744, 0.187, 0.313, 0.234),
]


@pytest.mark.parametrize("name,acc,p,r,f1", TABLE_ROWS)
def test_f1_matches_published_rows(name, acc, p, r, f1):
    # published values are rounded to 3 decimals; compare after rounding,
    # with an epsilon for the binary representation of the decimals
    assert abs(round(f1_score(p, r), 3) - f1) <= 0.001 + 1e-9


def test_confusion_perfect_predictor():
    preds = {f"p{i}": i % 2 for i in range(10)}
    c = confusion(preds, dict(preds))
    assert c.fp == 0 and c.fn == 0
    m = classification_metrics(c)
    assert (m.accuracy, m.precision, m.recall, m.f1) == (1.0, 1.0, 1.0, 1.0)


def test_confusion_all_positive_predictor():
    labels = {f"p{i}": 1 if i < 3 else 0 for i in range(10)}
    preds = {k: 1 for k in labels}
    c = confusion(preds, labels)
    assert (c.tp, c.fp, c.tn, c.fn) == (3, 7, 0, 0)


def test_confusion_random_brute_force():
    rng = np.random.default_rng(17)
    labels = {f"p{i}": int(rng.integers(2)) for i in range(1000)}
    preds = {k: int(rng.integers(2)) for k in labels}
    c = confusion(preds, labels)
    tp = sum(1 for k in labels if preds[k] == 1 and labels[k] == 1)
    fp = sum(1 for k in labels if preds[k] == 1 and labels[k] == 0)
    tn = sum(1 for k in labels if preds[k] == 0 and labels[k] == 0)
    fn = sum(1 for k in labels if preds[k] == 0 and labels[k] == 1)
    assert (c.tp, c.fp, c.tn, c.fn) == (tp, fp, tn, fn)


def test_confusion_key_mismatch():
    with pytest.raises(MetricsError, match="mismatch"):
        confusion({"a": 1}, {"b": 1})


def test_zero_denominator_conventions():
    m = classification_metrics(ConfusionCounts(tp=0, fp=0, tn=5, fn=0))
    assert m.precision == 0.0 and m.recall == 0.0 and m.f1 == 0.0
    with pytest.raises(MetricsError):
        classification_metrics(ConfusionCounts(tp=0, fp=0, tn=0, fn=0))


@given(st.integers(0, 500), st.integers(0, 500), st.integers(0, 500), st.integers(0, 500))
def test_metric_identities(tp, fp, tn, fn):
    if tp + fp + tn + fn == 0:
        return
    c = ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)
    m = classification_metrics(c)
    assert abs(m.accuracy * c.total - (tp + tn)) < 1e-9
    alt_f1 = 2 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) else 0.0
    assert abs(m.f1 - alt_f1) < 1e-12


def reconstruct_confusion(accuracy, precision, recall, total, positives, tol=0.005):
    """Integer search over tp for a confusion matrix consistent with the
    reported metrics (the oracle for the published-row regression)."""
    for tp in range(positives + 1):
        fn = positives - tp
        if precision > 0:
            fp = round(tp / precision) - tp
        else:
            fp = total - positives
        if fp < 0 or fp > total - positives:
            continue
        tn = total - positives - fp
        c = ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)
        m = classification_metrics(c)
        if (
            abs(m.accuracy - accuracy) <= tol
            and abs(m.precision - precision) <= tol
            and abs(m.recall - recall) <= tol
        ):
            return c
    return None


def test_published_row_confusion_reconstruction():
    c = reconstruct_confusion(accuracy=0.612, precision=0.205, recall=0.735, total=10889, positives=1358)
    assert c is not None
    assert c.total == 10889
    assert c.tp + c.fn == 1358
    m = classification_metrics(c)
    assert abs(m.accuracy - 0.612) <= 0.005
    assert abs(m.precision - 0.205) <= 0.005
    assert abs(m.recall - 0.735) <= 0.005
    # the implied matrix sits near the arithmetic solution
    assert abs(c.tp - 998) <= 15


def test_agreement_seven_of_ten():
    decisions = [Decision(gold="A", predicted="A" if i < 7 else "B") for i in range(10)]
    assert pairwise_agreement(decisions).overall == pytest.approx(0.70)


def test_agreement_all_abstain_is_zero():
    decisions = [Decision(gold="A", predicted=None) for _ in range(5)]
    report = pairwise_agreement(decisions)
    assert report.overall == 0.0
    assert report.inconsistent_count == 5


def test_agreement_empty_rejected():
    with pytest.raises(MetricsError):
        pairwise_agreement([])


def test_agreement_permutation_invariant():
    rng = np.random.default_rng(19)
    decisions = [
        Decision(gold="A" if rng.random() < 0.5 else "B", predicted="A" if rng.random() < 0.5 else "B")
        for _ in range(200)
    ]
    base = pairwise_agreement(decisions)
    shuffled = list(decisions)
    rng.shuffle(shuffled)
    assert pairwise_agreement(shuffled) == base


def test_agreement_per_domain_recount():
    rng = np.random.default_rng(20)
    domains = ["AI", "CV", "Robotics"]
    decisions = [
        Decision(
            gold="A",
            predicted="A" if rng.random() < 0.7 else "B",
            domain=domains[int(rng.integers(3))],
        )
        for _ in range(600)
    ]
    report = pairwise_agreement(decisions)
    assert sum(n for _, n in report.per_domain.values()) == 600
    for domain in domains:
        subset = [d for d in decisions if d.domain == domain]
        expected = sum(d.predicted == d.gold for d in subset) / len(subset)
        agreement, count = report.per_domain[domain]
        assert count == len(subset)
        assert agreement == pytest.approx(expected)


def breakdown_fixture(domains_counts):
    records = []
    i = 0
    for domain, (pos, neg) in domains_counts.items():
        for _ in range(pos):
            records.append(record(f"p{i}", label=1, domain=domain))
            i += 1
        for _ in range(neg):
            records.append(record(f"p{i}", label=0, domain=domain))
            i += 1
    return corpus_stats(Corpus.from_records(records))


def test_breakdown_single_domain_share_one():
    stats = breakdown_fixture({"ML": (3, 7)})
    rows = domain_breakdown([Decision(gold="A", predicted="A", domain="ML")], stats)
    assert len(rows) == 1
    assert rows[0].train_share == 1.0
    assert rows[0].train_positive_share == pytest.approx(0.3)


def test_breakdown_small_domain_can_lead_without_reordering():
    stats = breakdown_fixture({"ML": (10, 90), "Robotics": (2, 8)})
    decisions = [Decision(gold="A", predicted="A", domain="Robotics") for _ in range(42)]
    decisions += [Decision(gold="A", predicted="A" if i < 30 else "B", domain="ML") for i in range(60)]
    rows = domain_breakdown(decisions, stats)
    assert [r.domain for r in rows] == ["ML", "Robotics"]  # sorted, never by value
    by_domain = {r.domain: r for r in rows}
    assert by_domain["Robotics"].agreement > by_domain["ML"].agreement
    assert by_domain["Robotics"].train_share < by_domain["ML"].train_share


def test_breakdown_shares_sum_to_one():
    stats = breakdown_fixture({"AI": (5, 15), "CV": (10, 20)})
    decisions = [Decision(gold="A", predicted="A", domain=d) for d in ("AI", "CV")]
    rows = domain_breakdown(decisions, stats)
    assert sum(r.train_share for r in rows) == pytest.approx(1.0)


def test_breakdown_unknown_domain_grouped_under_other():
    stats = breakdown_fixture({"ML": (1, 1)})
    rows = domain_breakdown([Decision(gold="A", predicted="A", domain=None)], stats)
    assert rows[0].domain == "Other"


def test_report_emission_formats(tmp_path):
    rows = [{"domain": "ML", "agreement": 0.75, "pairs": 4}]
    jsonl = tmp_path / "r.jsonl"
    write_report(rows, jsonl, fmt="jsonl")
    assert jsonl.read_text().count("\n") == 1
    table = tmp_path / "r.txt"
    write_report(rows, table, fmt="table")
    text = table.read_text()
    assert "domain" in text and "0.7500" in text
    with pytest.raises(MetricsError, match="format"):
        write_report(rows, tmp_path / "r.x", fmt="csv")


def test_format_table_alignment():
    text = format_table(
        [{"a": "x", "n": 1}, {"a": "longer", "n": 23}],
        ["a", "n"],
    )
    lines = text.splitlines()
    assert lines[0].startswith("a")
    assert len(lines) == 4
