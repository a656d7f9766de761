import datetime as dt

import pytest

from noveltyrank.corpus import Corpus, PaperRecord
from noveltyrank.synthetic import make_corpus, make_stores


def record(
    paper_id: str,
    published: str = "2025-01-01",
    label: int = 0,
    domain: str = "ML",
    title: str | None = None,
) -> PaperRecord:
    return PaperRecord(
        id=paper_id,
        title=title or f"Paper {paper_id}",
        abstract=f"Abstract of {paper_id}.",
        domain=domain,
        published=dt.date.fromisoformat(published),
        label=label,
        categories=(f"cs.{domain}",),
    )


@pytest.fixture(scope="session")
def small_corpus() -> Corpus:
    return make_corpus(60, seed=11)


@pytest.fixture(scope="session")
def small_stores(small_corpus):
    return make_stores(small_corpus, dim=16, seed=12)
