"""Topic signatures for lexicon concepts.

Enriches the senses of a small WordNet-style lexicon with weighted term
lists computed by contrastive weighting over per-sense document
collections, retrieves those collections offline through a query cascade
and a local index, and evaluates signature quality on a word sense
disambiguation task.
"""

from .corpus import (
    Document,
    DocumentCollection,
    SenseTaggedToken,
    TaggedDocument,
    Token,
    collections_from_tags,
    dedup_by_host,
    lemmatize,
    load_plain_documents,
    load_sense_tagged,
    tokenize,
)
from .lexicon import (
    Lexicon,
    Synset,
    WordSense,
    baseline_wordlist,
    load_lexicon,
    monosemous_synonyms,
    save_lexicon,
)
from .retrieval import (
    LocalIndex,
    LocalSearchBackend,
    Query,
    SearchBackend,
    build_query_cascade,
    evaluate_query,
    index_documents,
    retrieve_collection,
)
from .signature import (
    ContingencyStats,
    FrequencyVector,
    TopicSignature,
    build_signatures,
    build_word_signature,
    chi2_weight,
    expected_mean,
    filter_by_word_signature,
    frequency_vector,
    load_signature,
    save_signature,
)
from .wsd import (
    Occurrence,
    WsdDecision,
    WsdReport,
    context_window,
    disambiguate,
    evaluate,
    find_occurrences,
    random_baseline,
    score_by_signature,
    score_by_wordlist,
)

__version__ = "0.1.0"
