"""Contrastive term weighting over per-sense document collections.

A frequency vector counts the open-class lemmas of one collection. To
score how distinctive a term is for a collection, its observed count is
compared with the expected mean under the contingency table formed by
the collection and its contrast set (all other collections):

    expected mean  m = row_total * column_total / grand_total
    weight         0                 when observed <= m
                   (observed - m)^2 / m   ("squared" variant)
                   (observed - m) / m     ("linear" variant)

The squared form is the usual chi-square cell contribution and the
default; the linear form is kept as an alternative weighting. A topic
signature is the list of positively weighted terms of one collection,
heaviest first.

All computation is pure and deterministic: term order inside a signature
is weight descending with lexicographic tie-breaks, and weights are kept
at full precision internally while the file format rounds to two
decimals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import Document, DocumentCollection

VARIANTS = ("squared", "linear")
CONTEXTS = ("document", "sentence")
DEFAULT_CUTOFF = 4.64


class SignatureError(Exception):
    pass


class UndefinedStatisticsError(SignatureError):
    """All collections are empty, so expected means are undefined."""


class ContrastSetError(SignatureError):
    """Fewer than two collections: nothing to contrast against."""


class DegenerateSplitError(SignatureError):
    """A word signature needs documents both with and without the target."""


@dataclass(frozen=True)
class FrequencyVector:
    """Positive term counts for one collection."""

    collection: str
    counts: Mapping[str, int]

    def __post_init__(self) -> None:
        for term, count in self.counts.items():
            if count <= 0:
                raise SignatureError(
                    f"vector {self.collection!r}: non-positive count for {term!r}"
                )

    @property
    def total(self) -> int:
        return sum(self.counts.values())


class ContingencyStats:
    """Row, column, and grand totals over a set of frequency vectors."""

    def __init__(self, vectors: Iterable[FrequencyVector]) -> None:
        self.vectors: dict[str, FrequencyVector] = {}
        for vector in vectors:
            if vector.collection in self.vectors:
                raise SignatureError(f"duplicate collection label {vector.collection!r}")
            self.vectors[vector.collection] = vector
        self.row_totals: dict[str, int] = {
            label: v.total for label, v in self.vectors.items()
        }
        self.col_totals: dict[str, int] = {}
        for vector in self.vectors.values():
            for term, count in vector.counts.items():
                self.col_totals[term] = self.col_totals.get(term, 0) + count
        self.grand_total: int = sum(self.row_totals.values())

    def freq(self, collection: str, term: str) -> int:
        return self.vectors[collection].counts.get(term, 0)


def expected_mean(stats: ContingencyStats, collection: str, term: str) -> float:
    """Expected count of ``term`` in ``collection`` under independence."""
    if stats.grand_total == 0:
        raise UndefinedStatisticsError("all collections are empty")
    return stats.row_totals[collection] * stats.col_totals.get(term, 0) / stats.grand_total


def chi2_weight(
    stats: ContingencyStats, collection: str, term: str, variant: str = "squared"
) -> float:
    """Weight of ``term`` in ``collection`` against its contrast set.

    Exactly zero whenever the observed count does not exceed the expected
    mean, so under-represented terms never score.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    observed = stats.freq(collection, term)
    mean = expected_mean(stats, collection, term)
    if observed <= mean:
        return 0.0
    diff = observed - mean
    return diff * diff / mean if variant == "squared" else diff / mean


def frequency_vector(
    coll: DocumentCollection,
    context: str = "document",
    target: str = "",
    use_surface: bool = False,
) -> FrequencyVector:
    """Count open-class lemmas in a collection.

    ``context="sentence"`` restricts counting to sentences containing the
    target lemma; the target itself is never counted. ``use_surface`` is a
    debugging aid that counts surface forms instead of lemmas.
    """
    if context not in CONTEXTS:
        raise ValueError(f"context must be one of {CONTEXTS}, got {context!r}")
    counts: dict[str, int] = {}
    for doc in coll.documents:
        for sentence in doc.sentences:
            if context == "sentence" and not any(t.lemma == target for t in sentence):
                continue
            for token in sentence:
                if not token.open_class or token.lemma == target:
                    continue
                key = token.surface if use_surface else token.lemma
                counts[key] = counts.get(key, 0) + 1
    return FrequencyVector(coll.label, counts)


@dataclass
class TopicSignature:
    """Weighted term list characterizing one collection.

    ``entries`` are (term, weight) pairs, weight descending with ties
    broken by term; weights are non-negative and terms unique.
    """

    collection: str
    entries: list[tuple[str, float]]
    variant: str = "squared"
    context: str = "document"
    _weights: dict[str, float] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.context not in CONTEXTS:
            raise ValueError(f"context must be one of {CONTEXTS}, got {self.context!r}")
        terms = [t for t, _ in self.entries]
        if len(set(terms)) != len(terms):
            raise ValueError(f"signature {self.collection!r}: duplicate term")
        if any(w < 0 for _, w in self.entries):
            raise ValueError(f"signature {self.collection!r}: negative weight")
        self._weights = dict(self.entries)

    def weight(self, term: str) -> float:
        return self._weights.get(term, 0.0)

    def terms(self) -> list[str]:
        return [t for t, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def build_signatures(
    collections: Mapping[str, DocumentCollection],
    context: str = "document",
    target: str = "",
    variant: str = "squared",
) -> dict[str, TopicSignature]:
    """One signature per collection, each contrasted against all others.

    Requires at least two collections; with a single collection every
    observed count equals its expected mean and no term could score.
    """
    if len(collections) < 2:
        raise ContrastSetError(
            "need at least two collections: a target and its contrast set"
        )
    vectors = []
    for label, coll in collections.items():
        vector = frequency_vector(coll, context, target)
        if vector.collection != label:
            vector = FrequencyVector(label, vector.counts)
        vectors.append(vector)
    stats = ContingencyStats(vectors)
    signatures: dict[str, TopicSignature] = {}
    for label in collections:
        entries = []
        for term in sorted(stats.vectors[label].counts):
            weight = chi2_weight(stats, label, term, variant)
            if weight > 0:
                entries.append((term, weight))
        entries.sort(key=lambda e: (-e[1], e[0]))
        signatures[label] = TopicSignature(label, entries, variant, context)
    return signatures


def build_word_signature(
    all_docs: Iterable[Document], target: str, variant: str = "squared"
) -> TopicSignature:
    """Signature of a word over a reference corpus.

    Documents containing the target form one collection and are
    contrasted against the documents that do not mention it; the result
    scores the terms that co-occur with the word anywhere in the corpus.
    """
    docs = list(all_docs)
    with_target = [d for d in docs if d.contains_lemma(target)]
    without_target = [d for d in docs if not d.contains_lemma(target)]
    if not with_target or not without_target:
        raise DegenerateSplitError(
            f"target {target!r} must occur in some documents and be absent from others"
        )
    collections = {
        target: DocumentCollection(target, with_target),
        f"not-{target}": DocumentCollection(f"not-{target}", without_target),
    }
    return build_signatures(collections, "document", target, variant)[target]


def filter_by_word_signature(
    sig: TopicSignature, word_sig: TopicSignature, cutoff: float = DEFAULT_CUTOFF
) -> TopicSignature:
    """Keep the entries whose term scores strictly above ``cutoff`` in
    ``word_sig``; weights and order are untouched."""
    if cutoff < 0:
        raise ValueError("cutoff must be non-negative")
    entries = [(t, w) for t, w in sig.entries if word_sig.weight(t) > cutoff]
    return TopicSignature(sig.collection, entries, sig.variant, sig.context)


# ---------------------------------------------------------------------------
# file format: TSV with a single header line
#   # signature <collection> variant=<squared|linear> context=<document|sentence>
#   term<TAB>weight


def dump_signature(sig: TopicSignature) -> str:
    if any(ch.isspace() for ch in sig.collection):
        raise ValueError(f"collection label {sig.collection!r} must not contain whitespace")
    lines = [f"# signature {sig.collection} variant={sig.variant} context={sig.context}"]
    lines.extend(f"{term}\t{weight:.2f}" for term, weight in sig.entries)
    return "\n".join(lines) + "\n"


def save_signature(sig: TopicSignature, path: str | Path) -> None:
    Path(path).write_text(dump_signature(sig), encoding="utf-8")


def load_signature(path: str | Path) -> TopicSignature:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("# signature "):
        raise SignatureError(f"{path}: missing signature header")
    head = lines[0][len("# signature "):].split()
    if len(head) != 3:
        raise SignatureError(f"{path}: bad header {lines[0]!r}")
    collection = head[0]
    fields = {}
    for item in head[1:]:
        key, _, value = item.partition("=")
        fields[key] = value
    if set(fields) != {"variant", "context"}:
        raise SignatureError(f"{path}: header must carry variant= and context=")
    entries = []
    for n, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise SignatureError(f"{path}:{n}: expected 'term<TAB>weight'")
        try:
            entries.append((parts[0], float(parts[1])))
        except ValueError:
            raise SignatureError(f"{path}:{n}: bad weight {parts[1]!r}") from None
    return TopicSignature(collection, entries, fields["variant"], fields["context"])
