"""Word sense disambiguation by additive scoring over context windows.

For each occurrence of a target word, the open-class lemmas around it are
collected (a fixed-size window for document-context signatures, the
containing sentence for sentence-context ones) and each candidate sense
scores the sum of its signature weights over those lemmas. Plain word
lists score the same way with uniform weight one per hit. The argmax
sense wins; ties and all-zero score vectors spread the credit as 1/k
over the k tied senses, which makes the whole evaluation deterministic
while keeping the expectation of a random tie-break.

Occurrences are scored independently, so evaluation may be parallelized;
report assembly uses exact summation and is order-independent.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .corpus import Document, TaggedDocument
from .lexicon import Lexicon, WordSense, baseline_wordlist
from .signature import TopicSignature

log = logging.getLogger(__name__)

DEFAULT_WINDOW = 100

Scorer = Callable[["Occurrence", Sequence[WordSense]], Mapping[WordSense, float]]


@dataclass(frozen=True)
class Occurrence:
    """One tagged occurrence of a target word in a tokenized document."""

    document: Document
    position: int
    gold_sense: WordSense
    sentence_index: int

    def __post_init__(self) -> None:
        flat = [t for sent in self.document.sentences for t in sent]
        if not 0 <= self.position < len(flat):
            raise ValueError(f"position {self.position} outside document {self.document.id}")
        if flat[self.position].lemma != self.gold_sense.lemma:
            raise ValueError(
                f"token at position {self.position} is {flat[self.position].lemma!r}, "
                f"not {self.gold_sense.lemma!r}"
            )


def find_occurrences(docs: Iterable[TaggedDocument], lemma: str) -> list[Occurrence]:
    """All tagged occurrences of ``lemma`` across the documents."""
    out: list[Occurrence] = []
    for tagged in docs:
        doc = tagged.to_document()
        position = 0
        for si, sentence in enumerate(tagged.tagged_sentences):
            for st in sentence:
                if st.sense is not None and st.token.lemma == lemma:
                    out.append(Occurrence(doc, position, st.sense, si))
                position += 1
    return out


def context_window(occ: Occurrence, mode: str = "window", size: int = DEFAULT_WINDOW) -> list[str]:
    """Open-class lemmas around the occurrence, target lemma excluded.

    ``window`` takes up to ``size`` lemmas split evenly before and after
    the target, borrowing from the other side at document edges;
    ``sentence`` takes the containing sentence. Document order is kept,
    so phrase matching over the result stays meaningful.
    """
    target = occ.gold_sense.lemma
    if mode == "sentence":
        sent = occ.document.sentences[occ.sentence_index]
        return [t.lemma for t in sent if t.open_class and t.lemma != target]
    if mode != "window":
        raise ValueError(f"mode must be 'window' or 'sentence', got {mode!r}")
    if size < 1:
        raise ValueError("window size must be >= 1")
    flat = [t for sent in occ.document.sentences for t in sent]
    left = [t.lemma for t in flat[: occ.position] if t.open_class and t.lemma != target]
    right = [t.lemma for t in flat[occ.position + 1 :] if t.open_class and t.lemma != target]
    left_take = min(len(left), size // 2)
    right_take = min(len(right), size - size // 2)
    spare = size - left_take - right_take
    extra = min(len(right) - right_take, spare)
    right_take += extra
    spare -= extra
    left_take += min(len(left) - left_take, spare)
    return left[len(left) - left_take :] + right[:right_take]


def score_by_signature(
    context: Iterable[str], signatures: Mapping[WordSense, TopicSignature]
) -> dict[WordSense, float]:
    """Sum each sense's signature weights over the context, with multiplicity."""
    if not signatures:
        raise ValueError("no signatures to score against")
    lemmas = list(context)
    return {
        sense: math.fsum(sig.weight(lemma) for lemma in lemmas)
        for sense, sig in signatures.items()
    }


def score_by_wordlist(
    context: Sequence[str], wordlists: Mapping[WordSense, Iterable[str]]
) -> dict[WordSense, float]:
    """Uniform weight one per hit.

    Multiword entries count once per contiguous run of the context; the
    context preserves document order with closed-class tokens already
    dropped, so such tokens are transparent to phrase matching.
    """
    if not wordlists:
        raise ValueError("no word lists to score against")
    lemmas = [c.lower() for c in context]
    scores: dict[WordSense, float] = {}
    for sense, words in wordlists.items():
        singles: set[str] = set()
        phrases: list[tuple[str, ...]] = []
        for word in words:
            parts = tuple(word.lower().split())
            if len(parts) == 1:
                singles.add(parts[0])
            elif parts:
                phrases.append(parts)
        hits = sum(1 for lemma in lemmas if lemma in singles)
        for phrase in phrases:
            span = len(phrase)
            hits += sum(
                1
                for i in range(len(lemmas) - span + 1)
                if tuple(lemmas[i : i + span]) == phrase
            )
        scores[sense] = float(hits)
    return scores


@dataclass(frozen=True)
class WsdDecision:
    occurrence: Occurrence
    scores: Mapping[WordSense, float]
    chosen: frozenset[WordSense]
    credit: float


def disambiguate(
    occ: Occurrence, scorer: Scorer, candidates: Sequence[WordSense]
) -> WsdDecision:
    """Pick the argmax senses; ties and all-zero scores spread the credit.

    Credit is 1/k when the gold sense is among the k chosen senses, else
    zero. An all-zero score vector counts as a full tie over every
    candidate rather than an abstention.
    """
    if not candidates:
        raise ValueError("no candidate senses")
    scores = {sense: 0.0 for sense in candidates}
    for sense, value in scorer(occ, tuple(candidates)).items():
        if sense in scores:
            scores[sense] = float(value)
    if all(v == 0.0 for v in scores.values()):
        chosen = frozenset(scores)
    else:
        best = max(scores.values())
        chosen = frozenset(s for s, v in scores.items() if v == best)
    credit = 1.0 / len(chosen) if occ.gold_sense in chosen else 0.0
    return WsdDecision(occ, scores, chosen, credit)


def random_baseline(candidates: Sequence[WordSense]) -> float:
    """Expected recall of a uniform random pick; no generator involved."""
    if not candidates:
        raise ValueError("no candidate senses")
    return 1.0 / len(candidates)


def random_scorer(occ: Occurrence, candidates: Sequence[WordSense]) -> dict[WordSense, float]:
    """All-zero scores: a full tie, whose credit equals the random baseline."""
    return {}


def signature_scorer(
    signatures: Mapping[WordSense, TopicSignature],
    mode: str = "window",
    window_size: int = DEFAULT_WINDOW,
) -> Scorer:
    def score(occ: Occurrence, candidates: Sequence[WordSense]) -> Mapping[WordSense, float]:
        return score_by_signature(context_window(occ, mode, window_size), signatures)

    return score


def wordlist_scorer(lex: Lexicon, level: str, window_size: int = DEFAULT_WINDOW) -> Scorer:
    def score(occ: Occurrence, candidates: Sequence[WordSense]) -> Mapping[WordSense, float]:
        lists = {ws: baseline_wordlist(lex, ws, level) for ws in candidates}
        return score_by_wordlist(context_window(occ, "window", window_size), lists)

    return score


# ---------------------------------------------------------------------------
# evaluation reports


@dataclass
class ReportRow:
    word: str
    sense_count: int | None
    occurrence_count: int
    recall: dict[str, float]


@dataclass
class WsdReport:
    """Per-word recall rows plus occurrence-weighted totals."""

    methods: list[str]
    rows: list[ReportRow]
    total: ReportRow
    subset_total: ReportRow | None = None

    def _all_rows(self) -> list[ReportRow]:
        rows = [*self.rows, self.total]
        if self.subset_total is not None:
            rows.append(self.subset_total)
        return rows

    def _cells(self, row: ReportRow) -> list[str]:
        return [
            row.word,
            "" if row.sense_count is None else str(row.sense_count),
            str(row.occurrence_count),
            *(f"{row.recall[m]:.2f}" for m in self.methods),
        ]

    def to_tsv(self) -> str:
        lines = ["\t".join(["word", "#s", "#occ", *self.methods])]
        lines.extend("\t".join(self._cells(row)) for row in self._all_rows())
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        header = ["word", "#s", "#occ", *self.methods]
        body = [self._cells(row) for row in self._all_rows()]
        widths = [
            max(len(header[i]), *(len(row[i]) for row in body))
            for i in range(len(header))
        ]
        def fmt(cells: list[str]) -> str:
            first = cells[0].ljust(widths[0])
            rest = (c.rjust(w) for c, w in zip(cells[1:], widths[1:]))
            return "  ".join([first, *rest]).rstrip()
        return "\n".join([fmt(header), *(fmt(row) for row in body)]) + "\n"


def evaluate(
    occurrences: Sequence[Occurrence],
    methods: Mapping[str, Scorer],
    subset_prefix: str | None = None,
) -> WsdReport:
    """Recall per word and method over sense-tagged occurrences.

    Words are rows, sorted alphabetically; candidates per word are the
    senses attested in the occurrences themselves. The totals row is the
    occurrence-weighted mean; with ``subset_prefix`` an extra totals row
    covers the occurrences whose document id starts with that prefix.
    """
    if not occurrences:
        raise ValueError("no occurrences to evaluate")
    if not methods:
        raise ValueError("no methods to evaluate")
    method_names = list(methods)
    by_word: dict[str, list[Occurrence]] = {}
    for occ in occurrences:
        by_word.setdefault(occ.gold_sense.lemma, []).append(occ)

    rows: list[ReportRow] = []
    credits: dict[str, dict[str, list[float]]] = {}
    for word in sorted(by_word):
        occs = by_word[word]
        candidates = tuple(
            sorted({o.gold_sense for o in occs}, key=lambda ws: ws.sense_number)
        )
        per_method: dict[str, list[float]] = {}
        recall: dict[str, float] = {}
        for name in method_names:
            per_method[name] = [
                disambiguate(occ, methods[name], candidates).credit for occ in occs
            ]
            recall[name] = math.fsum(per_method[name]) / len(occs)
        credits[word] = per_method
        rows.append(ReportRow(word, len(candidates), len(occs), recall))

    def totals(label: str, keep: Callable[[Occurrence], bool]) -> ReportRow | None:
        count = 0
        sums: dict[str, list[float]] = {name: [] for name in method_names}
        for word, occs in by_word.items():
            for k, occ in enumerate(occs):
                if keep(occ):
                    count += 1
                    for name in method_names:
                        sums[name].append(credits[word][name][k])
        if count == 0:
            return None
        return ReportRow(
            label, None, count, {n: math.fsum(sums[n]) / count for n in method_names}
        )

    total = totals("Total", lambda occ: True)
    assert total is not None
    subset_total = None
    if subset_prefix:
        subset_total = totals(
            f"Total {subset_prefix}",
            lambda occ: occ.document.id.startswith(subset_prefix),
        )
        if subset_total is None:
            log.warning("no occurrences match subset prefix %r", subset_prefix)
    return WsdReport(method_names, rows, total, subset_total)
