"""Shared fixtures: a small church/waiter lexicon, a sense-tagged corpus,
a reference corpus, and an offline document pool for retrieval."""

from __future__ import annotations

from pathlib import Path

import pytest

from topicsig import lexicon as lexmod

CHURCH_LEXICON = """\
# toy lexicon for tests
SYNSET church.n.1 noun | church; Christian church; Christianity | a group of Christians; any group professing Christian doctrine or belief
SYNSET church.n.2 noun | church; church building | a place for public (especially Christian) worship
SYNSET church.n.3 noun | church service; church | a service conducted in a house of worship
SYNSET building.n.1 noun | building; edifice | a structure that has a roof and walls
SYNSET religion.n.1 noun | religion; faith | a strong belief in a supernatural power
SYNSET altar.n.1 noun | altar | a raised structure where rites are performed
SYNSET waiter.n.1 noun | waiter; server | a person whose occupation is to serve at table
SYNSET waiter.n.2 noun | waiter | a person who waits or awaits something
SYNSET service.n.1 noun | service | work done for another person or group
SYNSET lonely.n.1 adj | lonely |
REL hypernym church.n.1 religion.n.1
REL hypernym church.n.2 building.n.1
REL meronym church.n.2 altar.n.1
"""


def _doc(doc_id: str, host: str, *sentences: str) -> list[str]:
    lines = [f"DOC {doc_id}" + (f" host={host}" if host else "")]
    for sentence in sentences:
        lines.extend(item.replace("/", "|") for item in sentence.split())
        lines.append(".")
    return lines


TAGGED_CORPUS = "\n".join(
    [
        *_doc(
            "br-doctrine-1",
            "brown.example.org",
            "the/the old/old church/church/1 taught/teach christian/christian doctrine/doctrine",
            "the/the faithful/faithful congregation/congregation professed/profess a/a shared/share belief/belief in/in the/the gospel/gospel",
        ),
        *_doc(
            "br-doctrine-2",
            "brown.example.org",
            "members/member of/of the/the church/church/1 studied/study christian/christian belief/belief and/and doctrine/doctrine",
        ),
        *_doc(
            "wsj-building-1",
            "wsj.example.com",
            "masons/mason erected/erect the/the church/church/2 beside/beside the/the road/road",
            "the/the stone/stone building/building had/have a/a tall/tall steeple/steeple",
        ),
        *_doc(
            "wsj-building-2",
            "wsj.example.com",
            "the/the old/old church/church/2 building/building needed/need a/a new/new roof/roof and/and stone/stone walls/wall",
        ),
        *_doc(
            "wsj-service-1",
            "wsj.example.com",
            "we/we attended/attend church/church/3 on/on sunday/sunday",
            "the/the service/service included/include singing/sing and/and a/a sermon/sermon",
        ),
        *_doc(
            "wsj-service-2",
            "wsj.example.com",
            "the/the pastor/pastor led/lead church/church/3 at/at dawn/dawn",
            "worshippers/worshipper sang/sing hymns/hymn during/during the/the service/service",
        ),
        *_doc(
            "br-waiter-1",
            "brown.example.org",
            "the/the waiter/waiter/1 served/serve dinner/dinner at/at the/the restaurant/restaurant",
            "the/the waiter/waiter/1 brought/bring a/a menu/menu",
        ),
        *_doc(
            "br-waiter-2",
            "brown.example.org",
            "she/she waited/wait for/for the/the waiter/waiter/2 at/at the/the station/station",
        ),
    ]
) + "\n"

REFERENCE_DOCS = {
    "r-church-1.txt": "The church taught doctrine and belief. Members professed belief in the gospel at church.",
    "r-church-2.txt": "The church building had stone walls and a steeple.",
    "r-church-3.txt": "We attended church service on Sunday. The church service included a sermon.",
    "r-plain-1.txt": "The old road wound past the new houses.",
    "r-plain-2.txt": "Dinner at the restaurant included soup and bread.",
    "r-plain-3.txt": "The morning train left the station at dawn.",
}

WEB_DOCS = {
    "c1.txt": ("faith.example.org", "Christianity teaches doctrine and belief. The gospel draws the faithful to church."),
    "c2.txt": ("mission.example.org", "The Christian church professed its doctrine openly."),
    "c3.txt": ("build.example.net", "The church building rose beside the road with stone walls."),
    "c4.txt": ("slate.example.net", "A new church building needs a roof of slate."),
    "c5.txt": ("parish.example.org", "The church service began with a hymn."),
    "c6.txt": ("sunday.example.org", "Sunday church service included a sermon and singing."),
}

CONFIG_TEMPLATE = """\
lexicon = lexicon.lex
tagged_corpus = corpus.tags
reference_corpus = ref
plain_docs = web
out = out
"""


def write_workspace(root: Path) -> dict[str, Path]:
    """Materialize the fixture corpus under ``root``."""
    root.mkdir(parents=True, exist_ok=True)
    lexicon_path = root / "lexicon.lex"
    lexicon_path.write_text(CHURCH_LEXICON, encoding="utf-8")
    tags_path = root / "corpus.tags"
    tags_path.write_text(TAGGED_CORPUS, encoding="utf-8")
    ref = root / "ref"
    ref.mkdir(exist_ok=True)
    for name, text in REFERENCE_DOCS.items():
        (ref / name).write_text(text, encoding="utf-8")
    web = root / "web"
    web.mkdir(exist_ok=True)
    for name, (host, text) in WEB_DOCS.items():
        (web / name).write_text(text, encoding="utf-8")
        (web / f"{name}.meta").write_text(f"host={host}\n", encoding="utf-8")
    config = root / "config.cfg"
    config.write_text(CONFIG_TEMPLATE, encoding="utf-8")
    return {
        "root": root,
        "lexicon": lexicon_path,
        "tags": tags_path,
        "ref": ref,
        "web": web,
        "config": config,
        "out": root / "out",
    }


@pytest.fixture
def workspace(tmp_path) -> dict[str, Path]:
    return write_workspace(tmp_path / "ws")


@pytest.fixture
def church_lex(workspace) -> lexmod.Lexicon:
    return lexmod.load_lexicon(workspace["lexicon"])
