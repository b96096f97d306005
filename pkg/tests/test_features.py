import math

import pytest
from hypothesis import given, strategies as st

from curalog.errors import ValidationError
from curalog.features import (
    FeatureConfig,
    NgramVectorizer,
    Vocabulary,
    apply_tfidf,
    extract_ngrams,
    fit_vocabulary,
    tokenize,
    top_terms_by_tfidf,
    vectorize,
)


def cfg(**kw):
    kw.setdefault("stopwords", frozenset())
    return FeatureConfig(**kw)


class TestTokenize:
    def test_alnum_runs_lowercased(self):
        assert tokenize("Ran self-checks; 1QC complete.", cfg()) == [
            "ran", "self", "checks", "1qc", "complete",
        ]

    def test_empty(self):
        assert tokenize("", cfg()) == []

    def test_min_length_filter(self):
        assert tokenize("a b c", cfg()) == []

    def test_lowercase_off(self):
        assert tokenize("QC Done", cfg(lowercase=False)) == ["QC", "Done"]


class TestNgrams:
    def test_unigrams_and_bigrams(self):
        assert extract_ngrams(["fixed", "missing", "values"], 1, 2) == [
            "fixed", "missing", "values", "fixed missing", "missing values",
        ]

    def test_short_input(self):
        assert extract_ngrams(["qc"], 1, 2) == ["qc"]

    def test_empty(self):
        assert extract_ngrams([], 1, 2) == []


class TestVocabulary:
    def test_union_and_df(self):
        vocab = fit_vocabulary(["fixed labels", "fixed values"], cfg())
        assert set(vocab.terms) == {"fixed", "labels", "values", "fixed labels", "fixed values"}
        assert vocab.doc_freq[vocab.index["fixed"]] == 2

    def test_dedup_within_doc(self):
        vocab = fit_vocabulary(["qc qc qc"], cfg(ngram_max=1))
        assert vocab.terms == ("qc",)
        assert vocab.doc_freq == (1,)

    def test_stopwords_removed_before_ngrams(self):
        vocab = fit_vocabulary(["checked the labels"], cfg(stopwords=frozenset({"the"})))
        assert "checked labels" in vocab.terms
        assert not any("the" in t.split() for t in vocab.terms)

    def test_sorted_terms(self):
        vocab = fit_vocabulary(["zebra apple", "mango apple"], cfg(ngram_max=1))
        assert list(vocab.terms) == sorted(vocab.terms)

    def test_all_empty_docs_fatal(self):
        with pytest.raises(ValidationError):
            fit_vocabulary(["", "  "], cfg())

    def test_serialization_roundtrip(self):
        vocab = fit_vocabulary(["fixed labels", "fixed values"], cfg())
        assert Vocabulary.deserialize(vocab.serialize()) == vocab


class TestVectorize:
    def test_counts(self):
        config = cfg()
        vocab = fit_vocabulary(["fixed labels", "fixed values"], config)
        matrix = vectorize(["fixed fixed labels"], vocab, config)
        dense = matrix.to_dense()[0]
        assert dense[vocab.index["fixed"]] == 2
        assert dense[vocab.index["labels"]] == 1
        assert dense[vocab.index["fixed labels"]] == 1

    def test_oov_doc_flagged(self):
        config = cfg()
        vocab = fit_vocabulary(["fixed labels"], config)
        matrix = vectorize(["unrelated tokens"], vocab, config)
        assert matrix.rows[0] == ()
        assert matrix.zero_rows == (0,)

    def test_empty_doc_zero_row(self):
        config = cfg()
        vocab = fit_vocabulary(["fixed labels"], config)
        matrix = vectorize([""], vocab, config)
        assert matrix.rows[0] == ()


class TestTfidf:
    def test_ubiquitous_term_idf_is_one(self):
        config = cfg(ngram_max=1)
        vocab = fit_vocabulary(["qc work", "qc other"], config)
        assert vocab.idf(vocab.index["qc"]) == pytest.approx(math.log(3 / 3) + 1)

    def test_single_doc_single_term_unit_weight(self):
        config = cfg(ngram_max=1)
        vocab = fit_vocabulary(["qc"], config)
        matrix = apply_tfidf(vectorize(["qc"], vocab, config), vocab)
        assert matrix.rows[0][0][1] == pytest.approx(1.0)

    def test_worked_two_doc_example(self):
        # doc1={a:1}, doc2={a:1,b:1}; idf(a)=ln(3/3)+1=1, idf(b)=ln(3/2)+1
        config = cfg(ngram_max=1, min_token_len=2)
        vocab = fit_vocabulary(["aa", "aa bb"], config)
        matrix = apply_tfidf(vectorize(["aa", "aa bb"], vocab, config), vocab)
        idf_b = math.log(3 / 2) + 1
        assert idf_b == pytest.approx(1.405465, abs=1e-6)
        row2 = dict(matrix.rows[1])
        norm = math.sqrt(1 + idf_b**2)
        assert row2[vocab.index["aa"]] == pytest.approx(0.57974, abs=1e-5)
        assert row2[vocab.index["bb"]] == pytest.approx(0.81480, abs=1e-5)
        assert row2[vocab.index["aa"]] == pytest.approx(1 / norm)

    def test_rows_unit_norm(self):
        config = cfg()
        docs = ["fixed missing values", "checked labels", "fixed labels again"]
        vocab = fit_vocabulary(docs, config)
        matrix = apply_tfidf(vectorize(docs, vocab, config), vocab)
        for row in matrix.rows:
            if row:
                assert math.sqrt(sum(w * w for _, w in row)) == pytest.approx(1.0, abs=1e-9)

    def test_monotone_idf(self):
        config = cfg(ngram_max=1)
        vocab = fit_vocabulary(["qc rare", "qc common", "qc common"], config)
        assert vocab.idf(vocab.index["rare"]) > vocab.idf(vocab.index["common"])


class TestTopTerms:
    def _matrix(self):
        config = cfg(ngram_max=1)
        docs = ["study self", "study checks", "study work", "study other"]
        vocab = fit_vocabulary(docs, config)
        return apply_tfidf(vectorize(docs, vocab, config), vocab), vocab

    def test_k_zero(self):
        matrix, vocab = self._matrix()
        assert top_terms_by_tfidf(matrix, vocab, 0) == []

    def test_rare_term_outranks_ubiquitous(self):
        matrix, vocab = self._matrix()
        ranked = [t for t, _ in top_terms_by_tfidf(matrix, vocab, len(vocab))]
        assert ranked.index("self") < ranked.index("study")

    def test_k_equals_n_terms_is_permutation(self):
        matrix, vocab = self._matrix()
        ranked = top_terms_by_tfidf(matrix, vocab, len(vocab))
        assert sorted(t for t, _ in ranked) == sorted(vocab.terms)

    def test_k_above_n_terms_returns_all(self):
        matrix, vocab = self._matrix()
        assert len(top_terms_by_tfidf(matrix, vocab, 999)) == len(vocab)


class TestVectorizerEstimator:
    def test_fit_transform_and_fingerprint_deterministic(self):
        docs = ["fixed missing values", "ran self checks", "fixed labels"]
        v1 = NgramVectorizer(cfg())
        v2 = NgramVectorizer(cfg())
        m1 = v1.fit_transform(docs)
        m2 = v2.fit_transform(docs)
        assert m1 == m2
        assert v1.fingerprint() == v2.fingerprint()
        assert v1.vocabulary_.serialize() == v2.vocabulary_.serialize()

    def test_transform_unfitted_raises(self):
        with pytest.raises(ValidationError):
            NgramVectorizer(cfg()).transform(["x"])

    def test_get_params(self):
        config = cfg()
        assert NgramVectorizer(config).get_params() == {"config": config}


@given(st.lists(st.text(alphabet="abcd ", min_size=1, max_size=30), min_size=1, max_size=8))
def test_no_stopword_in_any_ngram_property(docs):
    stop = frozenset({"ab", "cd"})
    config = FeatureConfig(stopwords=stop)
    try:
        vocab = fit_vocabulary(docs, config)
    except ValidationError:
        return
    for term in vocab.terms:
        assert not (set(term.split()) & stop)
