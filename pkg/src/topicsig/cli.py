"""Pipeline driver: query, build, filter, eval, index.

Configuration comes from a flat key=value file plus command-line
overrides (flags win). Every subcommand is reproducible: the same config
and inputs give byte-identical output files. Exit codes: 0 success,
1 runtime error, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from . import corpus, retrieval, wsd
from . import lexicon as lexmod
from . import signature as sigmod

log = logging.getLogger("topicsig")

_BOOLS = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}
_CONFIG_KEYS = (
    "lexicon", "tagged_corpus", "reference_corpus", "plain_docs",
    "backend", "external_command", "out", "limit", "context", "variant",
    "cutoff", "window", "dedup_host", "keep_intermediate",
)
_BASELINES = {
    "ran": "Ran",
    "syn": "Syn",
    "s+def": "S+def",
    "s+all": "S+all",
}


class ConfigError(Exception):
    pass


@dataclass
class PipelineConfig:
    lexicon: Path | None = None
    tagged_corpus: Path | None = None
    reference_corpus: Path | None = None
    plain_docs: Path | None = None
    backend: str = "local"
    external_command: str = ""
    out: Path = Path("out")
    limit: int = retrieval.DEFAULT_LIMIT
    context: str = "document"
    variant: str = "squared"
    cutoff: float = sigmod.DEFAULT_CUTOFF
    window: int = wsd.DEFAULT_WINDOW
    dedup_host: bool = False
    keep_intermediate: bool = False

    @classmethod
    def from_file(cls, path: Path) -> "PipelineConfig":
        cfg = cls()
        base = path.parent
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or key not in _CONFIG_KEYS:
                raise ConfigError(f"{path}:{n}: unknown config line {raw.strip()!r}")
            try:
                if key in ("lexicon", "tagged_corpus", "reference_corpus", "plain_docs", "out"):
                    setattr(cfg, key, base / value)
                elif key in ("limit", "window"):
                    setattr(cfg, key, int(value))
                elif key == "cutoff":
                    cfg.cutoff = float(value)
                elif key in ("dedup_host", "keep_intermediate"):
                    setattr(cfg, key, _BOOLS[value.lower()])
                else:
                    setattr(cfg, key, value)
            except (ValueError, KeyError):
                raise ConfigError(f"{path}:{n}: bad value for {key}: {value!r}") from None
        return cfg

    def validate(self) -> None:
        if self.limit < 1:
            raise ConfigError("limit must be >= 1")
        if self.window < 1:
            raise ConfigError("window must be >= 1")
        if self.cutoff < 0:
            raise ConfigError("cutoff must be >= 0")
        if self.context not in sigmod.CONTEXTS:
            raise ConfigError(f"context must be one of {sigmod.CONTEXTS}")
        if self.variant not in sigmod.VARIANTS:
            raise ConfigError(f"variant must be one of {sigmod.VARIANTS}")
        if self.backend not in ("local", "external-command"):
            raise ConfigError("backend must be 'local' or 'external-command'")
        for name in ("lexicon", "tagged_corpus", "reference_corpus", "plain_docs"):
            value = getattr(self, name)
            if value is not None and not Path(value).exists():
                raise ConfigError(f"{name} path does not exist: {value}")

    def require(self, name: str) -> Path:
        value = getattr(self, name)
        if value is None:
            raise ConfigError(f"config value {name!r} is required for this command")
        return Path(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topicsig",
        description="Build and evaluate topic signatures for lexicon concepts.",
    )
    parser.add_argument("--config", type=Path, help="flat key=value config file")
    parser.add_argument("--lexicon", type=Path)
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--variant", choices=sigmod.VARIANTS)
    parser.add_argument("--context", choices=sigmod.CONTEXTS)
    parser.add_argument("--cutoff", type=float)
    parser.add_argument("--limit", type=int)
    parser.add_argument("--window", type=int)
    parser.add_argument("--dedup-host", action="store_true", default=None)
    parser.add_argument("--keep-intermediate", action="store_true", default=None)

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("query", help="print the query cascade for every sense of a lemma")
    p.add_argument("lemma")

    p = sub.add_parser("build", help="build one signature file per sense")
    p.add_argument("lemma")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--from-tags", type=Path, metavar="CORPUS",
                        help="sense-tagged corpus to draw collections from")
    source.add_argument("--from-retrieval", action="store_true",
                        help="retrieve collections through the configured backend")

    p = sub.add_parser("filter", help="filter signatures with a reference-corpus word signature")
    p.add_argument("lemma")

    p = sub.add_parser("eval", help="evaluate disambiguation recall on the tagged corpus")
    p.add_argument("lemmas", nargs="+")
    p.add_argument("--tags", type=Path, help="override the configured tagged corpus")
    p.add_argument("--subset", help="extra totals row for document ids with this prefix")
    p.add_argument("--sig", action="append", default=[], metavar="NAME=DIR[:SUFFIX]",
                   help="signature method column; SUFFIX defaults to 'sig'")
    p.add_argument("--baselines", default="ran,syn,s+def,s+all",
                   help="comma list from: ran, syn, s+def, s+all")

    p = sub.add_parser("index", help="build a local index from a document directory")
    p.add_argument("docs", type=Path, nargs="?", help="document directory (default: plain_docs)")
    p.add_argument("--save", type=Path, help="write postings as TSV for inspection")

    return parser


def _load_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    for name in ("lexicon", "out", "variant", "context", "cutoff", "limit", "window"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if getattr(args, "dedup_host", None):
        cfg.dedup_host = True
    if getattr(args, "keep_intermediate", None):
        cfg.keep_intermediate = True
    if getattr(args, "tags", None) is not None:
        cfg.tagged_corpus = args.tags
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# subcommands


def cmd_query(cfg: PipelineConfig, args: argparse.Namespace) -> int:
    lex = lexmod.load_lexicon(cfg.require("lexicon"))
    for sense in lex.senses(args.lemma):
        print(f"{sense}:")
        cascade = retrieval.build_query_cascade(lex, sense)
        if not cascade:
            print("  (no usable query)")
        for query in cascade:
            print(f"  procedure {query.procedure}: {query}")
    return 0


def _make_backend(cfg: PipelineConfig) -> retrieval.SearchBackend:
    if cfg.backend == "external-command":
        if not cfg.external_command:
            raise ConfigError("backend 'external-command' needs external_command")
        return retrieval.ExternalCommandBackend(cfg.external_command)
    docs = corpus.load_plain_documents(cfg.require("plain_docs"))
    return retrieval.LocalSearchBackend(retrieval.index_documents(docs))


def _dump_intermediates(out: Path, collections: dict[str, corpus.DocumentCollection],
                        cfg: PipelineConfig, lemma: str) -> None:
    inter = out / "intermediate"
    inter.mkdir(parents=True, exist_ok=True)
    for label, coll in collections.items():
        (inter / f"{label}.docs.txt").write_text(
            "".join(f"{d.id}\n" for d in coll.documents), encoding="utf-8"
        )
        vector = sigmod.frequency_vector(coll, cfg.context, lemma)
        rows = "".join(f"{t}\t{c}\n" for t, c in sorted(vector.counts.items()))
        (inter / f"{label}.vector.tsv").write_text(rows, encoding="utf-8")


def cmd_build(cfg: PipelineConfig, args: argparse.Namespace) -> int:
    lex = lexmod.load_lexicon(cfg.require("lexicon"))
    senses = lex.senses(args.lemma)
    out = cfg.out
    out.mkdir(parents=True, exist_ok=True)

    collections: dict[str, corpus.DocumentCollection] = {}
    if args.from_tags:
        if not args.from_tags.exists():
            raise ConfigError(f"tagged corpus does not exist: {args.from_tags}")
        tagged = corpus.load_sense_tagged(args.from_tags, lex)
        granularity = "sentence" if cfg.context == "sentence" else "document"
        for ws, coll in corpus.collections_from_tags(tagged, args.lemma, granularity).items():
            if cfg.dedup_host:
                coll = corpus.dedup_by_host(coll)
            collections[ws.label] = coll
            print(f"{ws}: {len(coll)} documents (from tags)")
    else:
        backend = _make_backend(cfg)
        for ws in senses:
            cascade = retrieval.build_query_cascade(lex, ws)
            if not cascade:
                print(f"{ws}: no usable query")
                continue
            coll, procedure = retrieval.retrieve_collection(
                backend, cascade, cfg.limit, label=ws.label
            )
            if cfg.dedup_host:
                coll = corpus.dedup_by_host(coll)
            print(f"{ws}: {len(coll)} documents (procedure {procedure})")
            if coll.documents:
                collections[ws.label] = coll

    collections = {k: v for k, v in collections.items() if v.documents}
    signatures = sigmod.build_signatures(collections, cfg.context, args.lemma, cfg.variant)
    for label in sorted(signatures):
        path = out / f"{label}.sig"
        sigmod.save_signature(signatures[label], path)
        print(f"wrote {path} ({len(signatures[label])} terms)")
    if cfg.keep_intermediate:
        _dump_intermediates(out, collections, cfg, args.lemma)
    return 0


def cmd_filter(cfg: PipelineConfig, args: argparse.Namespace) -> int:
    reference = cfg.require("reference_corpus")
    sig_paths = [
        p for p in sorted(cfg.out.glob(f"{args.lemma}.*.sig"))
        if not p.name.endswith(".filtered.sig")
    ]
    if not sig_paths:
        raise ConfigError(f"no signature files for {args.lemma!r} in {cfg.out}")
    docs = corpus.load_plain_documents(reference)
    word_sig = sigmod.build_word_signature(docs, args.lemma, cfg.variant)
    print(f"word signature for {args.lemma!r}: {len(word_sig)} terms, cutoff {cfg.cutoff}")
    for path in sig_paths:
        sig = sigmod.load_signature(path)
        filtered = sigmod.filter_by_word_signature(sig, word_sig, cfg.cutoff)
        out_path = path.with_name(f"{path.stem}.filtered.sig")
        sigmod.save_signature(filtered, out_path)
        print(f"wrote {out_path} ({len(filtered)}/{len(sig)} terms kept)")
    return 0


def _parse_sig_spec(spec: str) -> tuple[str, Path, str]:
    name, sep, rest = spec.partition("=")
    if not sep or not name or not rest:
        raise ConfigError(f"--sig expects NAME=DIR[:SUFFIX], got {spec!r}")
    directory, sep, suffix = rest.partition(":")
    return name, Path(directory), (suffix if sep and suffix else "sig")


def _signature_method(cfg: PipelineConfig, directory: Path, suffix: str) -> wsd.Scorer:
    cache: dict[lexmod.WordSense, sigmod.TopicSignature | None] = {}

    def load(ws: lexmod.WordSense) -> sigmod.TopicSignature | None:
        path = directory / f"{ws.lemma}.{ws.sense_number}.{suffix}"
        if not path.exists():
            log.warning("missing signature %s; that sense scores 0", path)
            return None
        return sigmod.load_signature(path)

    def score(occ, candidates):
        signatures = {}
        for ws in candidates:
            if ws not in cache:
                cache[ws] = load(ws)
            if cache[ws] is not None:
                signatures[ws] = cache[ws]
        if not signatures:
            return {}
        contexts = {s.context for s in signatures.values()}
        if len(contexts) > 1:
            log.warning("mixed signature contexts under %s; using 'document'", directory)
        mode = "sentence" if contexts == {"sentence"} else "window"
        return wsd.score_by_signature(wsd.context_window(occ, mode, cfg.window), signatures)

    return score


def cmd_eval(cfg: PipelineConfig, args: argparse.Namespace) -> int:
    lex = lexmod.load_lexicon(cfg.require("lexicon"))
    tagged = corpus.load_sense_tagged(cfg.require("tagged_corpus"), lex)

    methods: dict[str, wsd.Scorer] = {}
    for name in (s.strip().lower() for s in args.baselines.split(",") if s.strip()):
        if name not in _BASELINES:
            raise ConfigError(f"unknown baseline {name!r}")
        column = _BASELINES[name]
        if name == "ran":
            methods[column] = wsd.random_scorer
        else:
            level = {"syn": "syn", "s+def": "syn_def", "s+all": "syn_all"}[name]
            methods[column] = wsd.wordlist_scorer(lex, level, cfg.window)
    for spec in args.sig:
        name, directory, suffix = _parse_sig_spec(spec)
        methods[name] = _signature_method(cfg, directory, suffix)
    if not methods:
        raise ConfigError("no methods selected")

    occurrences: list[wsd.Occurrence] = []
    for lemma in args.lemmas:
        found = wsd.find_occurrences(tagged, lemma)
        if not found:
            log.warning("no tagged occurrences of %r; row skipped", lemma)
            continue
        occurrences.extend(found)
    if not occurrences:
        raise RuntimeError("no tagged occurrences of any requested lemma")

    report = wsd.evaluate(occurrences, methods, args.subset)
    cfg.out.mkdir(parents=True, exist_ok=True)
    (cfg.out / "report.tsv").write_text(report.to_tsv(), encoding="utf-8")
    (cfg.out / "report.txt").write_text(report.to_text(), encoding="utf-8")
    print(report.to_text(), end="")
    return 0


def cmd_index(cfg: PipelineConfig, args: argparse.Namespace) -> int:
    root = args.docs if args.docs is not None else cfg.require("plain_docs")
    if not Path(root).exists():
        raise ConfigError(f"document directory does not exist: {root}")
    index = retrieval.index_documents(corpus.load_plain_documents(root))
    print(f"indexed {len(index.store)} documents, {len(index.postings)} distinct lemmas")
    if args.save:
        lines = []
        for lemma in sorted(index.postings):
            for doc_id in sorted(index.postings[lemma]):
                positions = ",".join(map(str, index.postings[lemma][doc_id]))
                lines.append(f"{lemma}\t{doc_id}\t{positions}\n")
        Path(args.save).write_text("".join(lines), encoding="utf-8")
        print(f"wrote {args.save}")
    return 0


_COMMANDS = {
    "query": cmd_query,
    "build": cmd_build,
    "filter": cmd_filter,
    "eval": cmd_eval,
    "index": cmd_index,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except lexmod.UnknownLemmaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
