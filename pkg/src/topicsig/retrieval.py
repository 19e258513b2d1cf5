"""Per-sense query construction and pluggable search backends.

Queries are small boolean trees over term atoms. For each word sense a
cascade of up to four queries is built from the lexicon, strongest cue
first:

  1. any monosemous synonym, as a phrase;
  2. all open-class gloss lemmas together;
  3. the remaining synonyms plus each gloss lemma near the target lemma;
  4. all synonyms and gloss lemmas together.

A later stage runs only when every earlier stage found nothing. The
bundled backend evaluates queries against a local inverted index so the
whole pipeline works offline; an external-command backend hooks in any
out-of-process fetcher.
"""

from __future__ import annotations

import logging
import shlex
import subprocess
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .corpus import Document, DocumentCollection, load_plain_document, open_class_lemmas, tokenize
from .lexicon import Lexicon, WordSense, monosemous_synonyms

log = logging.getLogger(__name__)

DEFAULT_LIMIT = 150
DEFAULT_NEAR_WINDOW = 10


class RetrievalError(Exception):
    pass


class BackendError(RetrievalError):
    pass


class DuplicateDocumentError(RetrievalError):
    pass


# ---------------------------------------------------------------------------
# query trees


@dataclass(frozen=True)
class Term:
    """A single lemma, or a phrase matched as a contiguous lemma run."""

    lemmas: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.lemmas:
            raise ValueError("a term needs at least one lemma")

    @classmethod
    def of(cls, phrase: str) -> "Term":
        lemmas = tuple(t.lemma for sent in tokenize(phrase) for t in sent)
        if not lemmas:
            raise ValueError(f"phrase {phrase!r} contains no tokens")
        return cls(lemmas)

    def __str__(self) -> str:
        return '"' + " ".join(self.lemmas) + '"'


@dataclass(frozen=True)
class And:
    children: tuple["Node", ...]

    def __post_init__(self) -> None:
        if not self.children:
            raise ValueError("AND needs at least one child")

    def __str__(self) -> str:
        return "AND(" + ", ".join(str(c) for c in self.children) + ")"


@dataclass(frozen=True)
class Or:
    children: tuple["Node", ...]

    def __post_init__(self) -> None:
        if not self.children:
            raise ValueError("OR needs at least one child")

    def __str__(self) -> str:
        return "OR(" + ", ".join(str(c) for c in self.children) + ")"


@dataclass(frozen=True)
class Near:
    """Both terms within ``window`` token positions of each other."""

    a: Term
    b: Term
    window: int = DEFAULT_NEAR_WINDOW

    def __post_init__(self) -> None:
        if not isinstance(self.a, Term) or not isinstance(self.b, Term):
            raise ValueError("NEAR only accepts term atoms")
        if self.window < 1:
            raise ValueError("NEAR window must be >= 1")

    def __str__(self) -> str:
        return f"NEAR({self.a}, {self.b}, {self.window})"


Node = Union[Term, And, Or, Near]


@dataclass(frozen=True)
class Query:
    root: Node
    procedure: int

    def __str__(self) -> str:
        return str(self.root)


def _term_atoms(node: Node) -> Iterator[Term]:
    if isinstance(node, Term):
        yield node
    elif isinstance(node, Near):
        yield node.a
        yield node.b
    else:
        for child in node.children:
            yield from _term_atoms(child)


def _combine(kind, atoms: list[Node]) -> Node:
    return atoms[0] if len(atoms) == 1 else kind(tuple(atoms))


def _unique(atoms: Iterable[Node]) -> list[Node]:
    seen: set[Node] = set()
    out: list[Node] = []
    for atom in atoms:
        if atom not in seen:
            seen.add(atom)
            out.append(atom)
    return out


def build_query_cascade(
    lex: Lexicon, sense: WordSense, near_window: int = DEFAULT_NEAR_WINDOW
) -> list[Query]:
    """Queries for one word sense, strongest cue first.

    Stages with no usable atoms are left out; an empty gloss skips stages
    2 to 4 with a warning. The result may therefore be empty.
    """
    synset = lex.synset_for(sense)
    queries: list[Query] = []

    mono = monosemous_synonyms(lex, sense)
    if mono:
        atoms: list[Node] = [Term.of(s) for s in mono]
        queries.append(Query(_combine(Or, atoms), 1))

    if not synset.gloss:
        log.warning("sense %s has an empty gloss; query stages 2-4 skipped", sense)
        if not queries:
            log.warning("no usable query for sense %s", sense)
        return queries

    gloss_lemmas = open_class_lemmas(synset.gloss)
    if gloss_lemmas:
        gloss_terms: list[Node] = [Term.of(w) for w in gloss_lemmas]
        queries.append(Query(_combine(And, gloss_terms), 2))

        target = Term.of(sense.lemma)
        others: list[Node] = [Term.of(s) for s in synset.synonyms if s != sense.lemma]
        nears: list[Node] = [Near(target, Term.of(w), near_window) for w in gloss_lemmas]
        queries.append(Query(_combine(And, others + nears), 3))

        synonyms: list[Node] = [Term.of(s) for s in synset.synonyms]
        queries.append(Query(_combine(And, _unique(synonyms + gloss_terms)), 4))

    if not queries:
        log.warning("no usable query for sense %s", sense)
    return queries


# ---------------------------------------------------------------------------
# local inverted index


@dataclass
class LocalIndex:
    """Lemma postings with absolute token positions, plus the documents."""

    postings: dict[str, dict[str, list[int]]] = field(default_factory=dict)
    store: dict[str, Document] = field(default_factory=dict)


def index_documents(docs: Iterable[Document]) -> LocalIndex:
    """Index tokenized documents; positions run over the flat token stream."""
    index = LocalIndex()
    for doc in docs:
        if doc.id in index.store:
            raise DuplicateDocumentError(f"duplicate document id {doc.id!r}")
        index.store[doc.id] = doc
        position = 0
        for sentence in doc.sentences:
            for token in sentence:
                index.postings.setdefault(token.lemma, {}).setdefault(doc.id, []).append(position)
                position += 1
    return index


def _term_positions(index: LocalIndex, doc_id: str, term: Term) -> list[int]:
    """Start positions of the term's lemma run inside the document."""
    position_sets = []
    for lemma in term.lemmas:
        positions = index.postings.get(lemma, {}).get(doc_id)
        if not positions:
            return []
        position_sets.append(set(positions))
    return sorted(
        p
        for p in position_sets[0]
        if all(p + k in position_sets[k] for k in range(1, len(position_sets)))
    )


def _match_ids(index: LocalIndex, node: Node) -> set[str]:
    if isinstance(node, Term):
        candidates = index.postings.get(node.lemmas[0], {})
        return {d for d in candidates if _term_positions(index, d, node)}
    if isinstance(node, Near):
        out = set()
        for doc_id in _match_ids(index, node.a) & _match_ids(index, node.b):
            pa = _term_positions(index, doc_id, node.a)
            pb = _term_positions(index, doc_id, node.b)
            if any(abs(x - y) <= node.window for x in pa for y in pb):
                out.add(doc_id)
        return out
    child_sets = [_match_ids(index, child) for child in node.children]
    if isinstance(node, And):
        return set.intersection(*child_sets)
    return set.union(*child_sets)


def evaluate_query(index: LocalIndex, query: Query, limit: int | None = None) -> list[Document]:
    """Match the query tree and rank the hits.

    Ranking is by number of term atoms present in the document, then by
    document id ascending, so identical inputs always give identical
    output.
    """
    ids = _match_ids(index, query.root)
    atoms = list(_term_atoms(query.root))

    def rank(doc_id: str) -> tuple[int, str]:
        matched = sum(1 for t in atoms if _term_positions(index, doc_id, t))
        return (-matched, doc_id)

    ranked = sorted(ids, key=rank)
    if limit is not None:
        ranked = ranked[:limit]
    return [index.store[i] for i in ranked]


# ---------------------------------------------------------------------------
# backends


class SearchBackend(ABC):
    """Contract: at most ``limit`` ranked documents, source_host filled in."""

    @abstractmethod
    def search(self, query: Query, limit: int) -> list[Document]:
        raise NotImplementedError


class LocalSearchBackend(SearchBackend):
    def __init__(self, index: LocalIndex) -> None:
        self.index = index

    def search(self, query: Query, limit: int) -> list[Document]:
        return evaluate_query(self.index, query, limit)


class ExternalCommandBackend(SearchBackend):
    """Shells out to a user-supplied program.

    The serialized query goes to the program's standard input; the program
    answers with one document path per line. Each path is loaded as a
    plain document (with its optional ``.meta`` sidecar for the host).
    """

    def __init__(self, command: str) -> None:
        if not command.strip():
            raise ValueError("external backend needs a command")
        self.command = command

    def search(self, query: Query, limit: int) -> list[Document]:
        try:
            proc = subprocess.run(
                shlex.split(self.command),
                input=str(query) + "\n",
                capture_output=True,
                text=True,
                check=False,
            )
        except OSError as exc:
            raise BackendError(f"cannot run {self.command!r} for query {query}: {exc}") from exc
        if proc.returncode != 0:
            raise BackendError(
                f"backend exited {proc.returncode} for query {query}: {proc.stderr.strip()}"
            )
        docs: list[Document] = []
        for line in proc.stdout.splitlines():
            path = line.strip()
            if not path:
                continue
            try:
                docs.append(load_plain_document(path))
            except OSError as exc:
                raise BackendError(f"backend returned unreadable path {path!r}: {exc}") from exc
            if len(docs) >= limit:
                break
        return docs


def retrieve_collection(
    backend: SearchBackend,
    cascade: list[Query],
    limit: int = DEFAULT_LIMIT,
    label: str = "retrieved",
) -> tuple[DocumentCollection, int]:
    """Run cascade stages in order; the first stage with any hit wins.

    Returns the (possibly empty) collection and the procedure number of
    the winning stage, 0 when every stage came back empty.
    """
    if not cascade:
        raise ValueError("empty query cascade")
    if limit < 1:
        raise ValueError("limit must be >= 1")
    for query in cascade:
        try:
            docs = backend.search(query, limit)
        except BackendError:
            raise
        except Exception as exc:
            raise BackendError(f"backend failed for query {query}: {exc}") from exc
        if docs:
            return DocumentCollection(label, list(docs)[:limit]), query.procedure
    return DocumentCollection(label, []), 0
