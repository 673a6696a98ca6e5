from __future__ import annotations

import json
from datetime import date

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biascorpus.corpus import (
    DateWindow,
    Document,
    FetchStats,
    SourceConfig,
    deduplicate,
    fetch_documents,
    fixture_corpus_path,
    ingest,
    normalize_document,
    normalize_text,
    segment_sentences,
    split_sentences,
)
from biascorpus.errors import SourceUnreachable
from biascorpus.lexicon import match_terms
from tests.conftest import sentence


class TestNormalize:
    def test_lowercase_and_collapse(self):
        doc = Document("d", "t", "Nota", date(2015, 1, 1), "De STROOM  van\tmensen")
        assert normalize_document(doc) == "de stroom van mensen"

    def test_empty(self):
        assert normalize_text("") == ""

    def test_idempotent(self):
        text = "al genormaliseerde tekst zonder rare tekens."
        assert normalize_text(text) == text
        assert normalize_text(normalize_text("Ruwe\t TEKST \n hier")) == normalize_text(
            "Ruwe\t TEKST \n hier"
        )

    def test_control_characters_stripped(self):
        assert normalize_text("a\x00b\x07c") == "abc"

    @given(st.text(max_size=200))
    @settings(max_examples=100, deadline=None)
    def test_idempotence_property(self, text):
        once = normalize_text(text)
        assert normalize_text(once) == once


class TestSegment:
    def test_three_sentences_with_context(self):
        sents = segment_sentences("a b. c d. e f.", "doc-1")
        assert [s.text for s in sents] == ["a b.", "c d.", "e f."]
        assert sents[1].context_before == "a b."
        assert sents[1].context_after == "e f."
        assert [s.index for s in sents] == [0, 1, 2]

    def test_single_sentence_empty_context(self):
        sents = segment_sentences("een enkele zin.", "doc-1")
        assert len(sents) == 1
        assert sents[0].context_before == ""
        assert sents[0].context_after == ""

    def test_abbreviations_do_not_split(self):
        # hand segmentation: the o.a. period is not a boundary
        assert split_sentences("o.a. test zin. tweede zin.") == ["o.a. test zin.", "tweede zin."]
        # bijv. and nr. are exceptions; "4." is an ordinary boundary
        assert split_sentences("zie bijv. artikel nr. 4. volgende zin.") == [
            "zie bijv. artikel nr. 4.",
            "volgende zin.",
        ]

    def test_empty_body(self):
        assert segment_sentences("", "doc-1") == []

    def test_question_and_exclamation(self):
        assert split_sentences("wat nu? dat dus! einde.") == ["wat nu?", "dat dus!", "einde."]

    def test_join_roundtrip(self):
        body = "eerste zin. tweede zin! derde zin? o.a. de vierde zin."
        assert " ".join(split_sentences(body)) == body

    def test_ids_stable(self):
        a = segment_sentences("zin een. zin twee.", "doc-1")
        b = segment_sentences("zin een. zin twee.", "doc-1")
        assert [s.sentence_id for s in a] == [s.sentence_id for s in b]
        c = segment_sentences("zin een. zin twee.", "doc-2")
        assert a[0].sentence_id != c[0].sentence_id


class TestDeduplicate:
    def test_removes_duplicates_keeps_order(self):
        s1 = sentence("zin a", doc_id="d1", index=0)
        s2 = sentence("zin a", doc_id="d2", index=0)
        s3 = sentence("zin b", doc_id="d1", index=1)
        assert deduplicate([s1, s2, s3]) == [s1, s3]

    def test_idempotent(self):
        items = [sentence("x"), sentence("x"), sentence("y", index=1)]
        once = deduplicate(items)
        assert deduplicate(once) == once

    def test_earliest_doc_wins_matches_naive_oracle(self):
        sentences = [
            sentence(f"zin {i % 4}", doc_id=f"d{i}", index=i) for i in range(12)
        ]
        got = deduplicate(sentences)
        seen: dict[str, str] = {}
        for s in sentences:
            seen.setdefault(s.text, s.doc_id)
        assert {s.text: s.doc_id for s in got} == seen


class TestFetchLocal:
    def make_corpus(self, tmp_path, docs):
        path = tmp_path / "docs.jsonl"
        with path.open("w", encoding="utf-8") as fh:
            for d in docs:
                fh.write(json.dumps(d) + "\n")
        return SourceConfig(local_dir=str(tmp_path))

    def test_date_and_keyword_filters(self, tmp_path, tiny_lexicon):
        docs = [
            {"doc_id": "a", "title": "", "doc_type": "Nota", "published": "2009-06-01",
             "body": "de stroom van mensen."},
            {"doc_id": "b", "title": "", "doc_type": "Nota", "published": "2015-06-01",
             "body": "geen enkel trefwoord hier."},
            {"doc_id": "c", "title": "", "doc_type": "Nota", "published": "2015-06-01",
             "body": "veel Migranten in de stad."},
        ]
        cfg = self.make_corpus(tmp_path, docs)
        stats = FetchStats()
        got = fetch_documents([], DateWindow(), cfg, query_lexicon=tiny_lexicon, stats=stats)
        assert [d.doc_id for d in got] == ["c"]
        assert stats.excluded_date == 1
        assert stats.excluded_no_match == 1
        # oracle: the kept document's normalized body really matches
        assert match_terms(normalize_document(got[0]), tiny_lexicon)

    def test_malformed_skipped_not_fatal(self, tmp_path, tiny_lexicon):
        path = tmp_path / "docs.jsonl"
        path.write_text(
            '{"doc_id": "ok", "published": "2015-01-01", "body": "de stroom."}\n'
            '{"doc_id": "bad", "published": "not-a-date", "body": "de stroom."}\n'
            "{broken json\n",
            encoding="utf-8",
        )
        stats = FetchStats()
        got = fetch_documents([], DateWindow(), SourceConfig(local_dir=str(tmp_path)),
                              query_lexicon=tiny_lexicon, stats=stats)
        assert [d.doc_id for d in got] == ["ok"]
        assert stats.skipped_malformed == 2

    def test_txt_with_sidecar(self, tmp_path, tiny_lexicon):
        (tmp_path / "doc1.txt").write_text("Een stroom aan documenten.", encoding="utf-8")
        (tmp_path / "doc1.json").write_text(
            json.dumps({"doc_id": "doc1", "published": "2016-02-02", "doc_type": "Rapport"}),
            encoding="utf-8",
        )
        got = fetch_documents([], DateWindow(), SourceConfig(local_dir=str(tmp_path)),
                              query_lexicon=tiny_lexicon)
        assert [d.doc_id for d in got] == ["doc1"]

    def test_missing_dir_unreachable(self, tiny_lexicon):
        with pytest.raises(SourceUnreachable):
            fetch_documents([], DateWindow(), SourceConfig(local_dir="/nonexistent/nowhere"),
                            query_lexicon=tiny_lexicon)

    def test_deterministic_order_by_doc_id(self, tmp_path, tiny_lexicon):
        docs = [
            {"doc_id": f"doc-{i:02d}", "published": "2015-01-01", "body": "de stroom."}
            for i in (3, 1, 2)
        ]
        cfg = self.make_corpus(tmp_path, docs)
        got = fetch_documents([], DateWindow(), cfg, query_lexicon=tiny_lexicon)
        assert [d.doc_id for d in got] == ["doc-01", "doc-02", "doc-03"]


class _StubResponse:
    def __init__(self, payload, status_code=200):
        self._payload = payload
        self.status_code = status_code

    def json(self):
        return self._payload


class _StubSession:
    """Paginated remote endpoint double; optionally fails first N calls."""

    def __init__(self, pages, fail_first=0):
        self.pages = pages
        self.fail_first = fail_first
        self.calls = []

    def get(self, url, params=None, timeout=None):
        self.calls.append(dict(params))
        if self.fail_first > 0:
            self.fail_first -= 1
            return _StubResponse({}, status_code=503)
        page = int(params.get("page", 1))
        docs = self.pages.get(page, [])
        next_page = page + 1 if (page + 1) in self.pages else None
        return _StubResponse({"documents": docs, "next_page": next_page})


class TestFetchRemote:
    def test_pagination_and_retry(self, tiny_lexicon):
        pages = {
            1: [{"doc_id": "r2", "published": "2015-01-01", "body": "de stroom."}],
            2: [{"doc_id": "r1", "published": "2016-01-01", "body": "veel migranten."}],
        }
        session = _StubSession(pages, fail_first=1)
        cfg = SourceConfig(base_url="https://example.test/search", max_retries=3)
        got = fetch_documents(["stroom"], DateWindow(), cfg, query_lexicon=tiny_lexicon,
                              session=session)
        assert [d.doc_id for d in got] == ["r1", "r2"]
        assert any(c.get("page") == 2 for c in session.calls)

    def test_unreachable_after_retries(self, tiny_lexicon):
        session = _StubSession({}, fail_first=99)
        cfg = SourceConfig(base_url="https://example.test/search", max_retries=2)
        with pytest.raises(SourceUnreachable):
            fetch_documents(["stroom"], DateWindow(), cfg, query_lexicon=tiny_lexicon,
                            session=session)


class TestFixtureCorpus:
    def test_sentences_are_substrings_of_normalized_bodies(self, default_lexicon):
        path = fixture_corpus_path()
        docs = [Document.from_record(json.loads(l)) for l in path.read_text(encoding="utf-8").splitlines()]
        assert 45 <= len(docs) <= 60
        for doc in docs[:10]:
            body = normalize_document(doc)
            for s in segment_sentences(body, doc.doc_id):
                assert s.text in body

    def test_ingest_fixture_is_deterministic(self, default_lexicon):
        path = fixture_corpus_path()
        cfg = SourceConfig(local_dir=str(path.parent))
        window = DateWindow()

        def run():
            docs = fetch_documents(default_lexicon.all_forms(), window, cfg,
                                   query_lexicon=default_lexicon)
            return [s.to_record() for s in ingest(docs)]

        first, second = run(), run()
        assert first == second
        assert all(date.fromisoformat("2010-01-01") <= d.published for d in
                   fetch_documents(default_lexicon.all_forms(), window, cfg,
                                   query_lexicon=default_lexicon))
