import sys

import pytest

from topicsig.corpus import Document, DocumentCollection
from topicsig.retrieval import (
    And,
    BackendError,
    DuplicateDocumentError,
    ExternalCommandBackend,
    LocalSearchBackend,
    Near,
    Or,
    Query,
    SearchBackend,
    Term,
    build_query_cascade,
    evaluate_query,
    index_documents,
    retrieve_collection,
)


def index_of(*texts):
    docs = [Document.from_text(f"d{i}", text) for i, text in enumerate(texts, 1)]
    return index_documents(docs)


def ids(docs):
    return [d.id for d in docs]


class TestQueryTypes:
    def test_empty_or_rejected_at_construction(self):
        with pytest.raises(ValueError):
            Or(())

    def test_empty_and_rejected(self):
        with pytest.raises(ValueError):
            And(())

    def test_empty_term_rejected(self):
        with pytest.raises(ValueError):
            Term(())
        with pytest.raises(ValueError):
            Term.of("...")

    def test_near_only_over_terms(self):
        with pytest.raises(ValueError):
            Near(Term(("a",)), And((Term(("b",)),)))  # type: ignore[arg-type]

    def test_near_window_positive(self):
        with pytest.raises(ValueError):
            Near(Term(("a",)), Term(("b",)), 0)

    def test_term_normalizes_to_lemmas(self):
        assert Term.of("Christian churches").lemmas == ("christian", "church")

    def test_string_form(self):
        q = Query(And((Term(("group",)), Near(Term(("church",)), Term(("worship",)), 10))), 2)
        assert str(q) == 'AND("group", NEAR("church", "worship", 10))'


class TestCascade:
    def test_monosemous_synonym_single_term(self, church_lex):
        cascade = build_query_cascade(church_lex, church_lex.sense("waiter", 1))
        assert cascade[0].procedure == 1
        assert cascade[0].root == Term(("server",))

    def test_procedures_strictly_increasing(self, church_lex):
        for lemma in ("church", "waiter"):
            for sense in church_lex.senses(lemma):
                procedures = [q.procedure for q in build_query_cascade(church_lex, sense)]
                assert procedures == sorted(set(procedures))

    def test_gloss_conjunction(self, church_lex):
        cascade = build_query_cascade(church_lex, church_lex.sense("church", 1))
        by_procedure = {q.procedure: q for q in cascade}
        assert by_procedure[2].root == And(
            (Term(("group",)), Term(("christian",)), Term(("profess",)),
             Term(("doctrine",)), Term(("belief",)))
        )

    def test_near_stage_binds_gloss_words_to_target(self, church_lex):
        cascade = build_query_cascade(church_lex, church_lex.sense("church", 1))
        root = {q.procedure: q for q in cascade}[3].root
        assert isinstance(root, And)
        terms = [c for c in root.children if isinstance(c, Term)]
        nears = [c for c in root.children if isinstance(c, Near)]
        assert Term(("christian", "church")) in terms
        assert Term(("christianity",)) in terms
        assert all(n.a == Term(("church",)) for n in nears)
        assert {n.b.lemmas[0] for n in nears} == {"group", "christian", "profess", "doctrine", "belief"}

    def test_final_stage_joins_synonyms_and_gloss(self, church_lex):
        cascade = build_query_cascade(church_lex, church_lex.sense("church", 3))
        root = {q.procedure: q for q in cascade}[4].root
        assert isinstance(root, And)
        # "church" appears both as a synonym and in the gloss; atoms are unique
        assert len(root.children) == len(set(root.children))

    def test_empty_gloss_skips_later_stages(self, church_lex, caplog):
        with caplog.at_level("WARNING"):
            cascade = build_query_cascade(church_lex, church_lex.sense("lonely", 1))
        assert cascade == []
        assert "empty gloss" in caplog.text

    def test_no_cues_at_all_warns(self, church_lex, caplog):
        with caplog.at_level("WARNING"):
            assert build_query_cascade(church_lex, church_lex.sense("lonely", 1)) == []
        assert "no usable query" in caplog.text


class TestIndex:
    def test_postings_over_lemmas(self):
        index = index_of("the waiter left")
        assert set(index.postings) == {"the", "waiter", "leave"}
        assert index.postings["leave"] == {"d1": [2]}

    def test_positions_are_token_absolute(self):
        index = index_of("The waiter smiled. He left.")
        assert index.postings["leave"] == {"d1": [4]}

    def test_empty(self):
        index = index_documents([])
        assert index.postings == {} and index.store == {}

    def test_duplicate_id(self):
        doc = Document.from_text("same", "alpha")
        with pytest.raises(DuplicateDocumentError):
            index_documents([doc, Document.from_text("same", "beta")])


class TestEvaluateQuery:
    def test_and_is_document_intersection(self):
        index = index_of("alpha beta", "beta gamma", "alpha gamma")
        got = evaluate_query(index, Query(And((Term(("alpha",)), Term(("beta",)))), 4))
        assert ids(got) == ["d1"]

    def test_or_is_union_ranked_by_matched_atoms(self):
        index = index_of("alpha beta", "beta gamma", "alpha delta")
        got = evaluate_query(index, Query(Or((Term(("alpha",)), Term(("beta",)))), 1))
        assert ids(got) == ["d1", "d2", "d3"]

    def test_tie_broken_by_document_id(self):
        index = index_of("alpha", "alpha")
        got = evaluate_query(index, Query(Term(("alpha",)), 1))
        assert ids(got) == ["d1", "d2"]

    def test_phrase_requires_contiguity(self):
        index = index_of("the christian church stood", "the christian old church stood")
        got = evaluate_query(index, Query(Term(("christian", "church")), 1))
        assert ids(got) == ["d1"]

    def test_near_within_window(self):
        index = index_of("waiter a b c tip")
        q = Query(Near(Term(("waiter",)), Term(("tip",)), 10), 3)
        assert ids(evaluate_query(index, q)) == ["d1"]

    def test_near_distance_eleven_fails_window_ten(self):
        filler = " ".join(f"pad{i}" for i in range(10))
        index = index_of(f"waiter {filler} tip")
        positions = index.postings
        assert positions["waiter"]["d1"] == [0] and positions["tip"]["d1"] == [11]
        q = Query(Near(Term(("waiter",)), Term(("tip",)), 10), 3)
        assert evaluate_query(index, q) == []

    def test_near_exact_window_boundary_matches(self):
        filler = " ".join(f"pad{i}" for i in range(9))
        index = index_of(f"waiter {filler} tip")
        assert index.postings["tip"]["d1"] == [10]
        q = Query(Near(Term(("waiter",)), Term(("tip",)), 10), 3)
        assert ids(evaluate_query(index, q)) == ["d1"]

    def test_single_atom_and_equals_term(self):
        index = index_of("alpha beta", "beta gamma", "alpha")
        as_and = evaluate_query(index, Query(And((Term(("alpha",)),)), 4))
        as_term = evaluate_query(index, Query(Term(("alpha",)), 1))
        assert ids(as_and) == ids(as_term)

    def test_limit(self):
        index = index_of(*["alpha"] * 7)
        got = evaluate_query(index, Query(Term(("alpha",)), 1), limit=3)
        assert len(got) == 3

    def test_deterministic(self):
        index = index_of("alpha beta gamma", "beta gamma", "alpha gamma", "gamma")
        q = Query(Or((Term(("alpha",)), Term(("beta",)), Term(("gamma",)))), 1)
        assert ids(evaluate_query(index, q)) == ids(evaluate_query(index, q))


class ScriptedBackend(SearchBackend):
    """Returns a preset number of hits per procedure and records calls."""

    def __init__(self, hits_by_procedure):
        self.hits_by_procedure = hits_by_procedure
        self.queried: list[int] = []

    def search(self, query, limit):
        self.queried.append(query.procedure)
        count = self.hits_by_procedure.get(query.procedure, 0)
        docs = [Document(f"p{query.procedure}-{i}", "", "", []) for i in range(count)]
        return docs[:limit]


def scripted_cascade():
    return [Query(Term((f"cue{p}",)), p) for p in (1, 2, 3, 4)]


class TestRetrieveCollection:
    def test_first_hit_wins(self):
        backend = ScriptedBackend({1: 0, 2: 3})
        coll, procedure = retrieve_collection(backend, scripted_cascade(), limit=150)
        assert procedure == 2 and len(coll) == 3
        assert backend.queried == [1, 2]

    def test_later_stage_runs_only_after_all_earlier_miss(self):
        backend = ScriptedBackend({4: 1})
        coll, procedure = retrieve_collection(backend, scripted_cascade(), limit=150)
        assert procedure == 4
        assert backend.queried == [1, 2, 3, 4]

    def test_immediate_hit_stops_cascade(self):
        backend = ScriptedBackend({1: 2, 2: 50})
        _, procedure = retrieve_collection(backend, scripted_cascade(), limit=150)
        assert procedure == 1
        assert backend.queried == [1]

    def test_truncates_to_limit(self):
        backend = ScriptedBackend({1: 200})
        coll, _ = retrieve_collection(backend, scripted_cascade(), limit=150)
        assert len(coll) == 150

    def test_all_stages_empty(self):
        backend = ScriptedBackend({})
        coll, procedure = retrieve_collection(backend, scripted_cascade(), limit=150)
        assert procedure == 0 and len(coll) == 0
        assert backend.queried == [1, 2, 3, 4]

    def test_empty_cascade_rejected(self):
        with pytest.raises(ValueError):
            retrieve_collection(ScriptedBackend({}), [], limit=10)

    def test_bad_limit_rejected(self):
        with pytest.raises(ValueError):
            retrieve_collection(ScriptedBackend({}), scripted_cascade(), limit=0)

    def test_backend_failure_names_the_query(self):
        class Exploding(SearchBackend):
            def search(self, query, limit):
                raise OSError("socket down")

        with pytest.raises(BackendError, match="cue1"):
            retrieve_collection(Exploding(), scripted_cascade(), limit=10)

    def test_local_backend_end_to_end(self, workspace):
        from topicsig.corpus import load_plain_documents

        index = index_documents(load_plain_documents(workspace["web"]))
        backend = LocalSearchBackend(index)
        cascade = [Query(Term(("church", "building")), 1)]
        coll, procedure = retrieve_collection(backend, cascade, limit=150, label="church.2")
        assert procedure == 1
        assert ids(coll.documents) == ["c3.txt", "c4.txt"]
        assert coll.documents[0].source_host == "build.example.net"


class TestExternalCommandBackend:
    def make_script(self, tmp_path, body):
        script = tmp_path / "backend.py"
        script.write_text(body, encoding="utf-8")
        return f'"{sys.executable}" "{script}"'

    def test_paths_from_stdout(self, tmp_path, workspace):
        c1 = workspace["web"] / "c1.txt"
        c3 = workspace["web"] / "c3.txt"
        body = f"import sys\nsys.stdin.read()\nprint({str(c1)!r})\nprint({str(c3)!r})\n"
        backend = ExternalCommandBackend(self.make_script(tmp_path, body))
        docs = backend.search(Query(Term(("church",)), 1), limit=10)
        assert ids(docs) == ["c1.txt", "c3.txt"]
        assert docs[0].source_host == "faith.example.org"

    def test_limit_truncates(self, tmp_path, workspace):
        paths = "\n".join(str(workspace["web"] / name) for name in ("c1.txt", "c3.txt", "c5.txt"))
        body = f"import sys\nsys.stdin.read()\nprint({paths!r})\n"
        backend = ExternalCommandBackend(self.make_script(tmp_path, body))
        assert len(backend.search(Query(Term(("church",)), 1), limit=2)) == 2

    def test_nonzero_exit_raises(self, tmp_path):
        backend = ExternalCommandBackend(self.make_script(tmp_path, "raise SystemExit(3)\n"))
        with pytest.raises(BackendError, match="exited 3"):
            backend.search(Query(Term(("church",)), 1), limit=10)

    def test_unreadable_path_raises(self, tmp_path):
        body = "import sys\nsys.stdin.read()\nprint('/nonexistent/doc.txt')\n"
        backend = ExternalCommandBackend(self.make_script(tmp_path, body))
        with pytest.raises(BackendError, match="unreadable"):
            backend.search(Query(Term(("church",)), 1), limit=10)

    def test_blank_command_rejected(self):
        with pytest.raises(ValueError):
            ExternalCommandBackend("   ")


class TestCollectionsViaDocuments:
    def test_collection_keeps_backend_order(self):
        index = index_of("alpha beta", "alpha", "beta")
        backend = LocalSearchBackend(index)
        q = Query(Or((Term(("alpha",)), Term(("beta",)))), 1)
        coll, _ = retrieve_collection(backend, [q], limit=2, label="c")
        assert isinstance(coll, DocumentCollection)
        assert ids(coll.documents) == ["d1", "d2"]
