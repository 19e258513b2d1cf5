"""Tokenization, lemmatization, and document collections.

Text handling is deliberately small and deterministic: a scanner-based
sentence splitter with an abbreviation guard, lowercase alphanumeric
tokens, and a rule-plus-exception-table lemmatizer. The abbreviation
list, the closed-class list, and the exception table ship as editable
data files next to this module.

Everything here is a pure function over immutable inputs, so documents
may be processed concurrently as long as output order follows input
order.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Iterator

if TYPE_CHECKING:
    from .lexicon import Lexicon, WordSense

log = logging.getLogger(__name__)

_DATA = Path(__file__).parent / "data"
_TOKEN_RE = re.compile(r"[^\W_]+")
_SENTENCE_END = ".!?"
_MIN_STEM = 3
_UNDOUBLE = frozenset("bdgmnprt")


class CorpusFormatError(ValueError):
    """A corpus file does not match its documented format."""


def _read_words(name: str) -> frozenset[str]:
    words: set[str] = set()
    for line in (_DATA / name).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0]
        words.update(w.lower() for w in line.split())
    return frozenset(words)


def _read_exceptions(name: str) -> dict[str, str]:
    table: dict[str, str] = {}
    for n, line in enumerate(
        (_DATA / name).read_text(encoding="utf-8").splitlines(), 1
    ):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise CorpusFormatError(f"{name}:{n}: expected 'surface lemma'")
        table[parts[0].lower()] = parts[1].lower()
    return table


CLOSED_CLASS = _read_words("closed_class.txt")
ABBREVIATIONS = _read_words("abbreviations.txt")
LEMMA_EXCEPTIONS = _read_exceptions("lemma_exceptions.txt")


# ---------------------------------------------------------------------------
# lemmatization


def _undouble(stem: str) -> str:
    if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] in _UNDOUBLE:
        return stem[:-1]
    return stem


def _strip_suffix(w: str) -> str:
    n = len(w)
    if w.endswith("ies") and n - 2 >= _MIN_STEM:
        return w[:-3] + "y"
    if w.endswith("es") and w[:-2].endswith(("ss", "x", "z", "ch", "sh")) and n - 2 >= _MIN_STEM:
        return w[:-2]
    if w.endswith("s") and not w.endswith(("ss", "us", "is")) and n - 1 >= _MIN_STEM:
        return w[:-1]
    if w.endswith("ing") and n - 3 >= _MIN_STEM:
        return _undouble(w[:-3])
    if w.endswith("ied") and n - 2 >= _MIN_STEM:
        return w[:-3] + "y"
    if w.endswith("ed") and n - 2 >= _MIN_STEM:
        return _undouble(w[:-2])
    if w.endswith("est") and n - 3 >= _MIN_STEM:
        return _undouble(w[:-3])
    if w.endswith("er") and n - 2 >= _MIN_STEM:
        return _undouble(w[:-2])
    return w


def lemmatize(token: str) -> tuple[str, bool]:
    """Map a lowercase token to ``(lemma, open_class)``.

    The exception table wins over the suffix rules; closed-class words are
    returned untouched with the flag down. Rules never leave a stem
    shorter than three characters, so short words pass through.
    """
    if token in CLOSED_CLASS:
        return token, False
    lemma = LEMMA_EXCEPTIONS.get(token)
    if lemma is None:
        lemma = _strip_suffix(token)
    return lemma, lemma not in CLOSED_CLASS


# ---------------------------------------------------------------------------
# tokenization


def strip_markup(text: str) -> str:
    """Drop angle-bracket spans, replacing each with a single space.

    An unterminated ``<`` swallows the rest of the text. No other markup
    handling is attempted.
    """
    out: list[str] = []
    i, n = 0, len(text)
    while i < n:
        if text[i] == "<":
            j = text.find(">", i + 1)
            if j == -1:
                break
            out.append(" ")
            i = j + 1
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def _previous_word(text: str, i: int) -> str:
    j = i
    while j > 0 and text[j - 1].isalnum():
        j -= 1
    return text[j:i]


def _split_sentences(text: str) -> list[str]:
    chunks: list[str] = []
    start, n = 0, len(text)
    for i, c in enumerate(text):
        if c not in _SENTENCE_END:
            continue
        j = i + 1
        while j < n and text[j].isspace():
            j += 1
        if j < n and (j == i + 1 or not text[j].isupper()):
            continue
        if c == "." and _previous_word(text, i).lower() in ABBREVIATIONS:
            continue
        chunks.append(text[start : i + 1])
        start = i + 1
    if start < n:
        chunks.append(text[start:])
    return [c for c in chunks if c.strip()]


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    open_class: bool


def tokenize(text: str) -> list[list[Token]]:
    """Split text into sentences of lowercase tokens.

    A sentence ends at ``.``, ``!`` or ``?`` followed by whitespace and a
    capital letter, or at end of text; a period after a known abbreviation
    never ends a sentence. Tokens are maximal alphanumeric runs, so
    numerals survive as tokens. Angle-bracket spans are dropped first.
    """
    sentences: list[list[Token]] = []
    for chunk in _split_sentences(strip_markup(text)):
        tokens: list[Token] = []
        for surface in _TOKEN_RE.findall(chunk.lower()):
            lemma, open_class = lemmatize(surface)
            tokens.append(Token(surface, lemma, open_class))
        if tokens:
            sentences.append(tokens)
    return sentences


# ---------------------------------------------------------------------------
# documents


@dataclass
class Document:
    """One text with its tokenized sentences.

    ``source_host`` is empty when the origin is unknown; it drives
    :func:`dedup_by_host`.
    """

    id: str
    source_host: str = ""
    text: str = ""
    sentences: list[list[Token]] = field(default_factory=list)

    @classmethod
    def from_text(cls, doc_id: str, text: str, source_host: str = "") -> "Document":
        return cls(doc_id, source_host, text, tokenize(text))

    def tokens(self) -> Iterator[Token]:
        for sentence in self.sentences:
            yield from sentence

    def contains_lemma(self, lemma: str) -> bool:
        return any(t.lemma == lemma for t in self.tokens())


@dataclass(frozen=True)
class SenseTaggedToken:
    token: Token
    sense: "WordSense | None" = None

    def __post_init__(self) -> None:
        if self.sense is not None and self.sense.lemma != self.token.lemma:
            raise ValueError(
                f"sense tag {self.sense} does not match token lemma {self.token.lemma!r}"
            )


@dataclass
class TaggedDocument:
    """A document whose tokens may carry word-sense tags."""

    id: str
    source_host: str = ""
    tagged_sentences: list[list[SenseTaggedToken]] = field(default_factory=list)

    def to_document(self) -> Document:
        sentences = [[st.token for st in sent] for sent in self.tagged_sentences]
        text = "\n".join(
            " ".join(t.surface for t in sent) for sent in sentences
        )
        return Document(self.id, self.source_host, text, sentences)


@dataclass
class DocumentCollection:
    """A labelled group of documents, e.g. one per word sense."""

    label: str
    documents: list[Document] = field(default_factory=list)

    def __post_init__(self) -> None:
        ids = [d.id for d in self.documents]
        if len(set(ids)) != len(ids):
            raise ValueError(f"collection {self.label!r}: duplicate document ids")

    def __len__(self) -> int:
        return len(self.documents)


# ---------------------------------------------------------------------------
# sense-tagged corpus format


def load_sense_tagged(path: str | Path, lex: "Lexicon") -> list[TaggedDocument]:
    """Read a sense-tagged corpus and resolve every tag against ``lex``.

    Format: ``DOC <id> [host=<host>]`` starts a document, token lines are
    ``surface|lemma[|sense_number]``, and a lone ``.`` forces a sentence
    break. Unresolvable tags and malformed lines raise
    :class:`CorpusFormatError` with the offending line number.
    """
    docs: list[TaggedDocument] = []
    current: TaggedDocument | None = None
    sentence: list[SenseTaggedToken] = []

    def close_sentence() -> None:
        nonlocal sentence
        if sentence and current is not None:
            current.tagged_sentences.append(sentence)
            sentence = []

    for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("DOC "):
            close_sentence()
            parts = line.split()
            if len(parts) < 2:
                raise CorpusFormatError(f"line {n}: DOC header needs an id")
            host = ""
            for extra in parts[2:]:
                if extra.startswith("host="):
                    host = extra[len("host="):]
                else:
                    raise CorpusFormatError(f"line {n}: unrecognized DOC field {extra!r}")
            current = TaggedDocument(parts[1], host)
            docs.append(current)
            continue
        if current is None:
            raise CorpusFormatError(f"line {n}: token line before any DOC header")
        if line == ".":
            close_sentence()
            continue
        parts = line.split("|")
        if len(parts) not in (2, 3):
            raise CorpusFormatError(
                f"line {n}: expected 'surface|lemma[|sense_number]', got {line!r}"
            )
        surface = parts[0].strip()
        lemma = parts[1].strip().lower()
        if not surface or not lemma:
            raise CorpusFormatError(f"line {n}: empty surface or lemma")
        sense = None
        if len(parts) == 3:
            try:
                number = int(parts[2])
            except ValueError:
                raise CorpusFormatError(
                    f"line {n}: sense number must be an integer, got {parts[2]!r}"
                ) from None
            try:
                sense = lex.sense(lemma, number)
            except LookupError as exc:
                raise CorpusFormatError(
                    f"line {n}: unresolvable sense tag {lemma}#{number}: {exc}"
                ) from None
        token = Token(surface, lemma, lemma not in CLOSED_CLASS)
        sentence.append(SenseTaggedToken(token, sense))
    close_sentence()
    return docs


def collections_from_tags(
    docs: Iterable[TaggedDocument],
    lemma: str,
    granularity: str = "document",
) -> dict["WordSense", DocumentCollection]:
    """Group tagged documents into one collection per sense of ``lemma``.

    With ``granularity="document"`` a document joins the collection of
    every sense it tags ``lemma`` with; with ``"sentence"`` only the
    containing sentences are taken, each wrapped as a one-sentence
    document. Returns an empty map (with a warning) when the lemma is
    never tagged.
    """
    if granularity not in ("document", "sentence"):
        raise ValueError(f"granularity must be 'document' or 'sentence', got {granularity!r}")
    per_sense: dict["WordSense", list[Document]] = {}
    for doc in docs:
        sense_sentences: dict["WordSense", set[int]] = {}
        for si, sent in enumerate(doc.tagged_sentences):
            for st in sent:
                if st.sense is not None and st.token.lemma == lemma:
                    sense_sentences.setdefault(st.sense, set()).add(si)
        if not sense_sentences:
            continue
        if granularity == "document":
            plain = doc.to_document()
            for ws in sense_sentences:
                per_sense.setdefault(ws, []).append(plain)
        else:
            for ws, indices in sense_sentences.items():
                for si in sorted(indices):
                    tokens = [st.token for st in doc.tagged_sentences[si]]
                    snippet = Document(
                        f"{doc.id}#s{si}",
                        doc.source_host,
                        " ".join(t.surface for t in tokens),
                        [tokens],
                    )
                    per_sense.setdefault(ws, []).append(snippet)
    if not per_sense:
        log.warning("lemma %r is never tagged in the given documents", lemma)
        return {}
    ordered = sorted(per_sense, key=lambda ws: ws.sense_number)
    return {ws: DocumentCollection(ws.label, per_sense[ws]) for ws in ordered}


def dedup_by_host(coll: DocumentCollection) -> DocumentCollection:
    """Keep the first document per source host; blank hosts all pass."""
    seen: set[str] = set()
    kept: list[Document] = []
    for doc in coll.documents:
        if doc.source_host:
            if doc.source_host in seen:
                continue
            seen.add(doc.source_host)
        kept.append(doc)
    return DocumentCollection(coll.label, kept)


# ---------------------------------------------------------------------------
# plain-document format


def load_plain_document(path: str | Path, root: str | Path | None = None) -> Document:
    """Load one document from a text file.

    A sidecar ``<file>.meta`` containing ``host=<host>`` supplies the
    source host. The id is the path relative to ``root`` when given,
    otherwise the file name.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    host = ""
    meta = path.with_name(path.name + ".meta")
    if meta.exists():
        for line in meta.read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if line.startswith("host="):
                host = line[len("host="):]
    doc_id = path.relative_to(root).as_posix() if root is not None else path.name
    return Document.from_text(doc_id, text, host)


def load_plain_documents(root: str | Path) -> list[Document]:
    """Load every non-sidecar file under ``root``, sorted by path."""
    root = Path(root)
    paths = sorted(
        p for p in root.rglob("*") if p.is_file() and not p.name.endswith(".meta")
    )
    return [load_plain_document(p, root) for p in paths]


def load_collection_dir(directory: str | Path, label: str | None = None) -> DocumentCollection:
    """Load a directory of plain documents as one collection."""
    directory = Path(directory)
    return DocumentCollection(label or directory.name, load_plain_documents(directory))


def open_class_lemmas(text: str) -> list[str]:
    """Unique open-class lemmas of ``text`` in first-appearance order."""
    seen: set[str] = set()
    out: list[str] = []
    for sent in tokenize(text):
        for tok in sent:
            if tok.open_class and tok.lemma not in seen:
                seen.add(tok.lemma)
                out.append(tok.lemma)
    return out
