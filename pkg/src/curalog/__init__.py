"""curalog: mine curation-action structure out of issue-tracker work logs.

Pipeline: ingest -> deidentify -> segment -> label -> featurize -> train ->
evaluate -> predict -> report, with an HTTP service for human-in-the-loop
annotation and prediction review.
"""

from .annotation import ActionClass, LabeledFragment, LabelSet, import_brat, stratified_split
from .corpus import (
    Corpus,
    PseudonymMap,
    Ticket,
    WorkLogEntry,
    corpus_summary,
    deidentify,
    filter_corpus,
    ingest_tickets,
)
from .evaluation import MetricsReport, compare_models, confusion_matrix, metrics
from .features import DocTermMatrix, FeatureConfig, NgramVectorizer, Vocabulary
from .models import (
    ComplementNaiveBayes,
    LinearSGDClassifier,
    StratifiedDummyClassifier,
    load_model,
    save_model,
)
from .segmenter import Fragment, FragmentSet, segment_corpus, segment_entry

__version__ = "0.1.0"

__all__ = [
    "ActionClass",
    "ComplementNaiveBayes",
    "Corpus",
    "DocTermMatrix",
    "FeatureConfig",
    "Fragment",
    "FragmentSet",
    "LabelSet",
    "LabeledFragment",
    "LinearSGDClassifier",
    "MetricsReport",
    "NgramVectorizer",
    "PseudonymMap",
    "StratifiedDummyClassifier",
    "Ticket",
    "Vocabulary",
    "WorkLogEntry",
    "compare_models",
    "confusion_matrix",
    "corpus_summary",
    "deidentify",
    "filter_corpus",
    "import_brat",
    "ingest_tickets",
    "load_model",
    "metrics",
    "save_model",
    "segment_corpus",
    "segment_entry",
    "stratified_split",
]
