"""In-memory model and line-oriented file format for a small lexical database.

A lexicon holds synsets (synonym sets with a gloss), a per-lemma sense
index whose order defines sense numbers, and semantic relations between
synsets. Instances are immutable by convention once loaded and safe for
concurrent reads.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

log = logging.getLogger(__name__)

POS_TAGS = ("noun", "verb", "adj", "adv")
RELATION_KINDS = ("hypernym", "hyponym", "meronym", "holonym")
BASELINE_LEVELS = ("syn", "syn_def", "syn_all")
_INVERSE = {"hypernym": "hyponym", "hyponym": "hypernym"}


class LexiconError(Exception):
    pass


class LexiconFormatError(LexiconError):
    """A lexicon file does not match the documented line format."""


class UnknownLemmaError(LexiconError, LookupError):
    pass


class UnknownSenseError(LexiconError, LookupError):
    pass


@dataclass(frozen=True)
class Synset:
    """One lexicalized concept: an id, its synonym lemmas, and a gloss."""

    id: str
    pos: str
    synonyms: tuple[str, ...]
    gloss: str = ""

    def __post_init__(self) -> None:
        if self.pos not in POS_TAGS:
            raise LexiconError(f"synset {self.id}: bad pos {self.pos!r}")
        if not self.synonyms:
            raise LexiconError(f"synset {self.id}: empty synonym list")
        if len(set(self.synonyms)) != len(self.synonyms):
            raise LexiconError(f"synset {self.id}: duplicate lemma in synonym list")


@dataclass(frozen=True)
class WordSense:
    """A (lemma, synset) pair with its 1-based sense number."""

    lemma: str
    synset_id: str
    sense_number: int

    @property
    def label(self) -> str:
        return f"{self.lemma}.{self.sense_number}"

    def __str__(self) -> str:
        return f"{self.lemma}#{self.sense_number}"


class Lexicon:
    """Synsets, the lemma sense index, and relations between synsets.

    Sense numbers follow the order in which synsets mentioning the lemma
    were added, which for loaded files is file order. Hypernym/hyponym
    pairs are kept symmetric: adding one direction adds the inverse.
    """

    def __init__(self) -> None:
        self._synsets: dict[str, Synset] = {}
        self.sense_index: dict[str, list[str]] = {}
        self.relations: set[tuple[str, str, str]] = set()

    # -- construction

    def add_synset(self, synset: Synset) -> None:
        if synset.id in self._synsets:
            raise LexiconError(f"duplicate synset id {synset.id!r}")
        self._synsets[synset.id] = synset
        for lemma in synset.synonyms:
            ids = self.sense_index.setdefault(lemma, [])
            if synset.id not in ids:
                ids.append(synset.id)

    def add_relation(self, kind: str, source: str, target: str) -> None:
        if kind not in RELATION_KINDS:
            raise LexiconError(f"unknown relation kind {kind!r}")
        for endpoint in (source, target):
            if endpoint not in self._synsets:
                raise LexiconError(f"dangling relation target {endpoint!r}")
        self.relations.add((source, kind, target))
        inverse = _INVERSE.get(kind)
        if inverse:
            self.relations.add((target, inverse, source))

    # -- queries

    @property
    def synsets(self) -> list[Synset]:
        return list(self._synsets.values())

    def __contains__(self, lemma: str) -> bool:
        return lemma in self.sense_index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Lexicon):
            return NotImplemented
        return (
            self._synsets == other._synsets
            and self.sense_index == other.sense_index
            and self.relations == other.relations
        )

    def synset(self, synset_id: str) -> Synset:
        try:
            return self._synsets[synset_id]
        except KeyError:
            raise UnknownSenseError(f"no synset with id {synset_id!r}") from None

    def senses(self, lemma: str) -> list[WordSense]:
        if lemma not in self.sense_index:
            raise UnknownLemmaError(f"lemma not in lexicon: {lemma!r}")
        return [
            WordSense(lemma, sid, n)
            for n, sid in enumerate(self.sense_index[lemma], 1)
        ]

    def sense(self, lemma: str, sense_number: int) -> WordSense:
        ids = self.sense_index.get(lemma)
        if not ids or not 1 <= sense_number <= len(ids):
            raise UnknownSenseError(f"unknown sense {lemma}#{sense_number}")
        return WordSense(lemma, ids[sense_number - 1], sense_number)

    def check_sense(self, sense: WordSense) -> None:
        ids = self.sense_index.get(sense.lemma)
        if (
            not ids
            or not 1 <= sense.sense_number <= len(ids)
            or ids[sense.sense_number - 1] != sense.synset_id
        ):
            raise UnknownSenseError(f"unknown sense {sense}")

    def synset_for(self, sense: WordSense) -> Synset:
        self.check_sense(sense)
        return self._synsets[sense.synset_id]

    def related(self, synset_id: str, kinds: tuple[str, ...]) -> list[str]:
        """Target synset ids one relation step away, sorted."""
        return sorted(
            target
            for source, kind, target in self.relations
            if source == synset_id and kind in kinds
        )


# ---------------------------------------------------------------------------
# file format: one record per line, '#' comments
#   SYNSET <id> <pos> | syn1; syn2; ... | gloss text
#   REL <kind> <source-id> <target-id>


def load_lexicon(path: str | Path) -> Lexicon:
    lex = Lexicon()
    pending: list[tuple[int, str, str, str]] = []
    for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("SYNSET"):
            parts = line.split("|")
            if len(parts) != 3:
                raise LexiconFormatError(
                    f"{path}:{n}: expected 'SYNSET <id> <pos> | synonyms | gloss'"
                )
            head = parts[0].split()
            if len(head) != 3:
                raise LexiconFormatError(f"{path}:{n}: bad SYNSET header {parts[0]!r}")
            _, synset_id, pos = head
            synonyms = tuple(s.strip() for s in parts[1].split(";"))
            if any(not s for s in synonyms):
                raise LexiconFormatError(f"{path}:{n}: empty synonym")
            gloss = parts[2].strip()
            try:
                synset = Synset(synset_id, pos, synonyms, gloss)
                lex.add_synset(synset)
            except LexiconError as exc:
                raise LexiconFormatError(f"{path}:{n}: {exc}") from None
            if not gloss:
                log.warning("%s:%d: synset %s has an empty gloss", path, n, synset_id)
        elif line.startswith("REL"):
            parts = line.split()
            if len(parts) != 4:
                raise LexiconFormatError(
                    f"{path}:{n}: expected 'REL <kind> <source-id> <target-id>'"
                )
            pending.append((n, parts[1], parts[2], parts[3]))
        else:
            raise LexiconFormatError(f"{path}:{n}: unrecognized record {line.split()[0]!r}")
    for n, kind, source, target in pending:
        try:
            lex.add_relation(kind, source, target)
        except LexiconError as exc:
            raise LexiconFormatError(f"{path}:{n}: {exc}") from None
    return lex


def dump_lexicon(lex: Lexicon) -> str:
    """Canonical text form: synsets in insertion order, relations sorted.

    Dumping, loading, and dumping again is byte-stable, including the
    normalized hypernym/hyponym pairs.
    """
    lines = []
    for s in lex.synsets:
        lines.append(f"SYNSET {s.id} {s.pos} | {'; '.join(s.synonyms)} | {s.gloss}".rstrip())
    for source, kind, target in sorted(lex.relations):
        lines.append(f"REL {kind} {source} {target}")
    return "\n".join(lines) + "\n" if lines else ""


def save_lexicon(lex: Lexicon, path: str | Path) -> None:
    Path(path).write_text(dump_lexicon(lex), encoding="utf-8")


# ---------------------------------------------------------------------------
# derived word lists


def monosemous_synonyms(lex: Lexicon, sense: WordSense) -> list[str]:
    """Synonyms of the sense's synset that have exactly one sense overall.

    The target lemma itself is excluded; synset order is preserved.
    """
    synset = lex.synset_for(sense)
    return [
        s
        for s in synset.synonyms
        if s != sense.lemma and len(lex.sense_index.get(s, ())) == 1
    ]


def baseline_wordlist(lex: Lexicon, sense: WordSense, level: str) -> set[str]:
    """Related-word list for a sense at increasing levels of looseness.

    ``syn`` is the synset's synonyms; ``syn_def`` adds the open-class
    lemmas of the gloss; ``syn_all`` adds the synonyms of directly related
    hyponym, hypernym, and meronym synsets. The target lemma is excluded
    at every level, so the levels are cumulative by construction.
    """
    if level not in BASELINE_LEVELS:
        raise ValueError(f"level must be one of {BASELINE_LEVELS}, got {level!r}")
    synset = lex.synset_for(sense)
    words = set(synset.synonyms)
    if level in ("syn_def", "syn_all") and synset.gloss:
        from .corpus import open_class_lemmas

        words.update(open_class_lemmas(synset.gloss))
    if level == "syn_all":
        for target in lex.related(synset.id, ("hyponym", "hypernym", "meronym")):
            words.update(lex.synset(target).synonyms)
    words.discard(sense.lemma)
    return words
