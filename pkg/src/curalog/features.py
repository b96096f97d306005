"""N-gram feature extraction: tokenization, stopword removal, vocabulary
fitting, sparse count vectorization, and smoothed TF-IDF weighting.

The vectorizer follows the usual estimator idiom (fit / transform /
fit_transform / get_params) so it composes with pipeline-style code.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources

from .errors import ValidationError

__all__ = [
    "FeatureConfig",
    "Vocabulary",
    "DocTermMatrix",
    "NgramVectorizer",
    "tokenize",
    "extract_ngrams",
    "fit_vocabulary",
    "vectorize",
    "apply_tfidf",
    "top_terms_by_tfidf",
    "default_stopwords",
]

_TOKEN = re.compile(r"[0-9A-Za-z]+")


def default_stopwords() -> frozenset[str]:
    text = resources.files("curalog.data").joinpath("stopwords_english.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


@dataclass(frozen=True)
class FeatureConfig:
    ngram_min: int = 1
    ngram_max: int = 2
    lowercase: bool = True
    stopwords: frozenset[str] = field(default_factory=default_stopwords)
    weighting: str = "tfidf"  # "counts" | "tfidf"
    min_token_len: int = 2

    def __post_init__(self):
        if not (1 <= self.ngram_min <= self.ngram_max):
            raise ValidationError(
                f"need 1 <= ngram_min <= ngram_max, got {self.ngram_min}..{self.ngram_max}"
            )
        if self.weighting not in ("counts", "tfidf"):
            raise ValidationError(f"unknown weighting {self.weighting!r}")

    def to_dict(self) -> dict:
        return {
            "ngram_min": self.ngram_min,
            "ngram_max": self.ngram_max,
            "lowercase": self.lowercase,
            "stopwords": sorted(self.stopwords),
            "weighting": self.weighting,
            "min_token_len": self.min_token_len,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureConfig":
        d = dict(d)
        if "stopwords" in d:
            d["stopwords"] = frozenset(d["stopwords"])
        return cls(**d)

    def fingerprint(self) -> str:
        payload = json.dumps(
            {
                "ngram_min": self.ngram_min,
                "ngram_max": self.ngram_max,
                "lowercase": self.lowercase,
                "stopwords": sorted(self.stopwords),
                "weighting": self.weighting,
                "min_token_len": self.min_token_len,
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]  # lexicographically sorted, index = position
    doc_freq: tuple[int, ...]
    n_docs: int

    def __post_init__(self):
        if list(self.terms) != sorted(self.terms):
            raise ValidationError("vocabulary terms must be sorted")
        if len(set(self.terms)) != len(self.terms):
            raise ValidationError("vocabulary terms must be unique")

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.terms)}

    def idf(self, term_index: int) -> float:
        # Smoothed: ln((1 + N) / (1 + df)) + 1
        return math.log((1 + self.n_docs) / (1 + self.doc_freq[term_index])) + 1.0

    def serialize(self) -> str:
        lines = [f"#n_docs\t{self.n_docs}"]
        lines += [f"{t}\t{i}\t{df}" for i, (t, df) in enumerate(zip(self.terms, self.doc_freq))]
        return "\n".join(lines) + "\n"

    @classmethod
    def deserialize(cls, text: str) -> "Vocabulary":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("#n_docs\t"):
            raise ValidationError("vocabulary file missing #n_docs header")
        n_docs = int(lines[0].split("\t")[1])
        terms, dfs = [], []
        for ln in lines[1:]:
            term, _idx, df = ln.split("\t")
            terms.append(term)
            dfs.append(int(df))
        return cls(terms=tuple(terms), doc_freq=tuple(dfs), n_docs=n_docs)


@dataclass(frozen=True)
class DocTermMatrix:
    rows: tuple[tuple[tuple[int, float], ...], ...]
    n_docs: int
    n_terms: int
    weighting: str
    zero_rows: tuple[int, ...] = ()  # docs with no in-vocabulary terms

    def to_dense(self):
        import numpy as np

        dense = np.zeros((self.n_docs, self.n_terms))
        for d, row in enumerate(self.rows):
            for i, w in row:
                dense[d, i] = w
        return dense

    def serialize(self, doc_ids: list[str] | None = None) -> str:
        lines = [f"#matrix\t{self.n_docs}\t{self.n_terms}\t{self.weighting}"]
        for d, row in enumerate(self.rows):
            doc_id = doc_ids[d] if doc_ids else str(d)
            cells = " ".join(f"{i}:{w:.12g}" for i, w in row)
            lines.append(f"{doc_id}\t{cells}")
        return "\n".join(lines) + "\n"


def tokenize(text: str, config: FeatureConfig) -> list[str]:
    tokens = _TOKEN.findall(text)
    if config.lowercase:
        tokens = [t.lower() for t in tokens]
    return [t for t in tokens if len(t) >= config.min_token_len]


def extract_ngrams(tokens: list[str], ngram_min: int, ngram_max: int) -> list[str]:
    grams: list[str] = []
    for n in range(ngram_min, ngram_max + 1):
        grams.extend(" ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
    return grams


def _doc_ngrams(text: str, config: FeatureConfig) -> list[str]:
    tokens = [t for t in tokenize(text, config) if t not in config.stopwords]
    return extract_ngrams(tokens, config.ngram_min, config.ngram_max)


def fit_vocabulary(docs: list[str], config: FeatureConfig) -> Vocabulary:
    if not docs:
        raise ValidationError("cannot fit vocabulary on zero documents")
    df: dict[str, int] = {}
    for doc in docs:
        for term in set(_doc_ngrams(doc, config)):
            df[term] = df.get(term, 0) + 1
    if not df:
        raise ValidationError("empty vocabulary: no terms survive tokenization")
    terms = tuple(sorted(df))
    return Vocabulary(terms=terms, doc_freq=tuple(df[t] for t in terms), n_docs=len(docs))


def vectorize(docs: list[str], vocab: Vocabulary, config: FeatureConfig) -> DocTermMatrix:
    """Raw occurrence counts per document; unseen terms are ignored."""
    index = vocab.index
    rows: list[tuple[tuple[int, float], ...]] = []
    zero_rows: list[int] = []
    for d, doc in enumerate(docs):
        counts: dict[int, float] = {}
        for term in _doc_ngrams(doc, config):
            i = index.get(term)
            if i is not None:
                counts[i] = counts.get(i, 0.0) + 1.0
        if not counts:
            zero_rows.append(d)
        rows.append(tuple(sorted(counts.items())))
    return DocTermMatrix(
        rows=tuple(rows),
        n_docs=len(docs),
        n_terms=len(vocab),
        weighting="counts",
        zero_rows=tuple(zero_rows),
    )


def apply_tfidf(matrix: DocTermMatrix, vocab: Vocabulary) -> DocTermMatrix:
    """count x idf with idf = ln((1+N)/(1+df)) + 1, then L2 row normalization."""
    if matrix.weighting != "counts":
        raise ValidationError(f"expected counts matrix, got {matrix.weighting}")
    rows: list[tuple[tuple[int, float], ...]] = []
    for row in matrix.rows:
        weighted = [(i, c * vocab.idf(i)) for i, c in row]
        norm = math.sqrt(sum(w * w for _, w in weighted))
        if norm > 0:
            weighted = [(i, w / norm) for i, w in weighted]
        rows.append(tuple(weighted))
    return DocTermMatrix(
        rows=tuple(rows),
        n_docs=matrix.n_docs,
        n_terms=matrix.n_terms,
        weighting="tfidf",
        zero_rows=matrix.zero_rows,
    )


def top_terms_by_tfidf(
    matrix: DocTermMatrix, vocab: Vocabulary, k: int, aggregate: str = "max"
) -> list[tuple[str, float]]:
    """Top-k terms by max (default) or mean TF-IDF weight over documents;
    ties break lexicographically."""
    if matrix.weighting != "tfidf":
        raise ValidationError("top_terms_by_tfidf requires a tfidf matrix")
    best: dict[int, float] = {}
    totals: dict[int, float] = {}
    for row in matrix.rows:
        for i, w in row:
            best[i] = max(best.get(i, 0.0), w)
            totals[i] = totals.get(i, 0.0) + w
    scores: list[tuple[str, float]] = []
    for i in range(matrix.n_terms):
        if aggregate == "max":
            score = best.get(i, 0.0)
        elif aggregate == "mean":
            score = totals.get(i, 0.0) / matrix.n_docs
        else:
            raise ValidationError(f"unknown aggregate {aggregate!r}")
        scores.append((vocab.terms[i], score))
    scores.sort(key=lambda pair: (-pair[1], pair[0]))
    return scores[: max(k, 0)]


class NgramVectorizer:
    """Fit a vocabulary on training docs, then transform docs to a sparse
    document-term matrix with the configured weighting."""

    def __init__(self, config: FeatureConfig | None = None):
        self.config = config or FeatureConfig()
        self.vocabulary_: Vocabulary | None = None

    def get_params(self) -> dict:
        return {"config": self.config}

    def set_params(self, **params) -> "NgramVectorizer":
        for key, value in params.items():
            if not hasattr(self, key):
                raise ValidationError(f"unknown parameter {key!r}")
            setattr(self, key, value)
        return self

    def fit(self, docs: list[str]) -> "NgramVectorizer":
        self.vocabulary_ = fit_vocabulary(docs, self.config)
        return self

    def transform(self, docs: list[str]) -> DocTermMatrix:
        if self.vocabulary_ is None:
            raise ValidationError("vectorizer is not fitted")
        counts = vectorize(docs, self.vocabulary_, self.config)
        if self.config.weighting == "tfidf":
            return apply_tfidf(counts, self.vocabulary_)
        return counts

    def fit_transform(self, docs: list[str]) -> DocTermMatrix:
        return self.fit(docs).transform(docs)

    def fingerprint(self) -> str:
        if self.vocabulary_ is None:
            raise ValidationError("vectorizer is not fitted")
        vocab_digest = hashlib.sha256(
            self.vocabulary_.serialize().encode("utf-8")
        ).hexdigest()[:16]
        return f"{self.config.fingerprint()}:{vocab_digest}"
