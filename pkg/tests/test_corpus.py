import datetime as dt
import json

import pytest

from noveltyrank.corpus import (
    Corpus,
    CorpusError,
    corpus_stats,
    load_corpus,
    save_corpus,
    temporal_split,
)
from noveltyrank.synthetic import make_corpus

from conftest import record


def line(paper_id, published="2025-01-01", label=0, domain="ML", **extra):
    obj = {
        "id": paper_id,
        "title": f"Paper {paper_id}",
        "abstract": "Some abstract.",
        "domain": domain,
        "published": published,
        "label": label,
        "categories": ["cs.LG"],
    }
    obj.update(extra)
    return json.dumps(obj)


def test_load_three_valid_lines():
    corpus = load_corpus([line("a"), line("b"), line("c")])
    assert len(corpus) == 3


def test_bad_label_rejected_with_line_number():
    with pytest.raises(CorpusError, match="line 2"):
        load_corpus([line("a"), line("b", label=2)])


def test_invalid_date_rejected():
    with pytest.raises(CorpusError, match="line 1"):
        load_corpus([line("a", published="2025-13-40")])


def test_duplicate_id_rejected():
    with pytest.raises(CorpusError, match="dup"):
        load_corpus([line("dup"), line("dup")])


def test_malformed_json_names_line():
    with pytest.raises(CorpusError, match="line 2"):
        load_corpus([line("a"), "{not json"])


def test_missing_key_named():
    obj = json.loads(line("a"))
    del obj["abstract"]
    with pytest.raises(CorpusError, match="abstract"):
        load_corpus([json.dumps(obj)])


def test_unknown_keys_warn_but_load(caplog):
    corpus = load_corpus([line("a", reviewer_score=9)])
    assert len(corpus) == 1
    assert any("reviewer_score" in r.message for r in caplog.records)


def test_authors_and_venue_accepted_silently(caplog):
    corpus = load_corpus([line("a", authors=["X"], venue="conf")])
    assert len(corpus) == 1
    assert not caplog.records


def test_date_tie_broken_by_id():
    corpus = load_corpus([line("b", "2025-01-02"), line("a", "2025-01-02")])
    assert corpus.ids() == ("a", "b")


def test_ordering_sorted_by_date_then_id():
    corpus = make_corpus(200, seed=3)
    keys = [(corpus.get(i).published, i) for i in corpus.ids()]
    assert keys == sorted(keys)


def test_roundtrip_identical(tmp_path):
    corpus = make_corpus(80, seed=5)
    path = tmp_path / "corpus.jsonl"
    save_corpus(corpus, path)
    reloaded = load_corpus(path)
    assert reloaded.ids() == corpus.ids()
    for pid in corpus.ids():
        assert reloaded.get(pid) == corpus.get(pid)


def test_split_boundary_cutoff_day_is_training():
    corpus = Corpus.from_records([record("x", "2025-03-15"), record("y", "2025-03-16")])
    train, test = temporal_split(corpus, dt.date(2025, 3, 15))
    assert train.ids() == ("x",)
    assert test.ids() == ("y",)


def test_split_empty_corpus():
    train, test = temporal_split(Corpus.from_records([]), dt.date(2025, 3, 15))
    assert len(train) == 0 and len(test) == 0


def test_split_cutoff_below_all_dates():
    corpus = make_corpus(100, seed=9)
    train, test = temporal_split(corpus, dt.date(2000, 1, 1))
    assert len(train) == 0
    assert len(test) == 100
    # every record lands on exactly one side
    assert set(test.ids()) == set(corpus.ids())


@pytest.mark.parametrize("cutoff", ["2024-08-01", "2024-12-31", "2025-03-15"])
def test_split_is_partition(cutoff):
    corpus = make_corpus(150, seed=4)
    train, test = temporal_split(corpus, dt.date.fromisoformat(cutoff))
    assert len(train) + len(test) == len(corpus)
    assert set(train.ids()) & set(test.ids()) == set()
    assert set(train.ids()) | set(test.ids()) == set(corpus.ids())
    assert all(corpus.get(i).published <= dt.date.fromisoformat(cutoff) for i in train.ids())
    assert all(corpus.get(i).published > dt.date.fromisoformat(cutoff) for i in test.ids())


def test_train_after_lower_bound():
    corpus = Corpus.from_records(
        [record("old", "2023-12-31"), record("mid", "2024-06-01"), record("new", "2025-06-01")]
    )
    train, test = temporal_split(corpus, dt.date(2025, 3, 15), train_after=dt.date(2023, 12, 31))
    assert train.ids() == ("mid",)
    assert test.ids() == ("new",)


def test_stats_paper_shape_ratio():
    # test-split shape reported for the real corpus: 10,889 total, 1,358 positive
    records = [record(f"p{i}", label=1 if i < 1358 else 0) for i in range(10889)]
    stats = corpus_stats(Corpus.from_records(records))
    assert stats.total == 10889
    assert stats.positives == 1358
    assert abs(stats.positive_ratio - 0.125) < 0.005


def test_stats_all_negative():
    stats = corpus_stats(Corpus.from_records([record("a"), record("b")]))
    assert stats.positives == 0


def test_stats_per_domain_sums_to_total():
    corpus = make_corpus(300, seed=8)
    stats = corpus_stats(corpus)
    # brute-force recount
    expected: dict[str, list[int]] = {}
    for rec in corpus:
        bucket = expected.setdefault(rec.domain, [0, 0])
        bucket[rec.label == 0] += 1
    assert sum(p + n for p, n in stats.per_domain.values()) == stats.total
    for domain, (p, n) in stats.per_domain.items():
        assert [p, n] == expected[domain]
