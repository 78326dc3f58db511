"""Operator command line: ingest, annotate, index, serve, query, eval.

Corpus files between stages are gzipped BioC JSON collections, so every
intermediate artifact stays inspectable with standard tools.  Commands
exit 0 on success and print one structured ``error: ...`` line otherwise.
"""

from __future__ import annotations

import gzip
import json
import sys
from pathlib import Path

import click

from . import fixtures, index as index_mod
from .annotator import AnnotatedCorpus, PipelineStats, load_rules, run_pipeline
from .bioc import BiocFormat, parse_bioc, parse_bioc_collection, serialize_bioc
from .docmodel import RelationType, canonical_pair
from .errors import BiolitError
from .lexicon import load_lexicon
from .querylang import parse_query
from .ranker import execute
from .ragent import orchestrate, verify_citations
from .mockllm import QUESTION_PLANS, mock_for


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _read_text(path: str) -> str:
    p = Path(path)
    if not p.exists():
        _fail(f"input file not found: {path}")
    return p.read_text(encoding="utf-8")


def _detect_format(path: str, text: str) -> BiocFormat:
    if path.endswith((".xml", ".biocxml")) or text.lstrip().startswith("<"):
        return BiocFormat.XML
    return BiocFormat.JSON


def _write_corpus(path: str, corpus: AnnotatedCorpus) -> None:
    payload = serialize_bioc(
        list(corpus.documents),
        BiocFormat.JSON,
        {d.pmid: corpus.relations_for(d.pmid) for d in corpus.documents},
    )
    with gzip.open(path, "wt", encoding="utf-8") as fh:
        fh.write(payload)


def _read_corpus(path: str) -> AnnotatedCorpus:
    p = Path(path)
    if not p.exists():
        _fail(f"input file not found: {path}")
    with gzip.open(path, "rt", encoding="utf-8") as fh:
        parsed = parse_bioc_collection(fh.read(), BiocFormat.JSON)
    documents = tuple(doc for doc, _ in parsed)
    relations = tuple(r for _, rels in parsed for r in rels)
    stats = PipelineStats(
        documents=len(documents),
        annotations=sum(len(d.all_annotations()) for d in documents),
        relations=len(relations),
    )
    return AnnotatedCorpus(documents=documents, relations=relations, stats=stats)


@click.group()
def main():
    """Entity- and relation-aware literature search toolkit."""


@main.command()
@click.argument("inputs", nargs=-1, required=True)
@click.option("-o", "--output", required=True, help="Corpus file to write.")
def ingest(inputs, output):
    """Parse BioC XML/JSON files into one corpus file."""
    docs = []
    for path in inputs:
        text = _read_text(path)
        try:
            docs.extend(parse_bioc(text, _detect_format(path, text)))
        except BiolitError as exc:
            _fail(f"{path}: {exc}")
    _write_corpus(output, AnnotatedCorpus(documents=tuple(docs)))
    click.echo(f"ingested {len(docs)} documents -> {output}")


@main.command()
@click.argument("corpus_file")
@click.option("--lexicon", "lexicon_path", default=None, help="Lexicon TSV (default: packaged fixture).")
@click.option("--rules", "rules_path", default=None, help="Trigger rules TSV (default: packaged fixture).")
@click.option("-o", "--output", required=True, help="Annotated corpus file to write.")
def annotate(corpus_file, lexicon_path, rules_path, output):
    """Run abbreviation detection, tagging, and relation extraction."""
    corpus = _read_corpus(corpus_file)
    lex = load_lexicon(lexicon_path) if lexicon_path else fixtures.fixture_lexicon()
    rules = load_rules(rules_path) if rules_path else fixtures.fixture_rules()
    try:
        annotated = run_pipeline(list(corpus.documents), lex, rules)
    except BiolitError as exc:
        _fail(str(exc))
    _write_corpus(output, annotated)
    s = annotated.stats
    click.echo(
        f"annotated {s.documents} documents ({s.failed} failed): "
        f"{s.abbreviations} abbreviations, {s.annotations} annotations, "
        f"{s.relations} relations -> {output}"
    )
    for pmid, message in annotated.errors:
        click.echo(f"  skipped {pmid}: {message}", err=True)


@main.command(name="index")
@click.argument("annotated_file")
@click.option("--lexicon", "lexicon_path", default=None, help="Lexicon TSV for the autocomplete dictionary.")
@click.option("--bulk-dir", default=None, help="Also write entities.tsv/relations.tsv here.")
@click.option("-o", "--output", required=True, help="Snapshot file to write.")
def build(annotated_file, lexicon_path, bulk_dir, output):
    """Build a searchable snapshot from an annotated corpus."""
    corpus = _read_corpus(annotated_file)
    lex = load_lexicon(lexicon_path) if lexicon_path else fixtures.fixture_lexicon()
    try:
        snapshot = index_mod.build_index(corpus, lex)
        index_mod.persist(snapshot, output)
    except BiolitError as exc:
        _fail(str(exc))
    if bulk_dir:
        out = Path(bulk_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "entities.tsv").write_text(index_mod.entities_tsv(snapshot), encoding="utf-8")
        (out / "relations.tsv").write_text(index_mod.relations_tsv(snapshot), encoding="utf-8")
    s = snapshot.stats
    click.echo(
        f"indexed {s.documents} documents: {s.annotations} annotations "
        f"({s.unique_identifiers} unique identifiers), {s.relations} relations "
        f"({s.unique_pairs} unique pairs) -> {output}"
    )


@main.command()
@click.argument("snapshot_file")
@click.option("--config", "config_path", default=None, help="key=value config file.")
def serve(snapshot_file, config_path):
    """Serve the HTTP API over a snapshot (hot-swaps on file change)."""
    import uvicorn

    from .service import SnapshotProvider, create_app, load_config

    try:
        config = load_config(config_path)
        config.snapshot_path = snapshot_file
        provider = SnapshotProvider(path=snapshot_file)
    except (BiolitError, OSError, ValueError) as exc:
        _fail(str(exc))
    app = create_app(provider, config)
    uvicorn.run(app, host=config.listen_host, port=config.listen_port, log_level="warning")


@main.command()
@click.argument("snapshot_file")
@click.argument("query_text")
@click.option("--limit", default=10, show_default=True)
def query(snapshot_file, query_text, limit):
    """Run one query against a snapshot and print ranked hits."""
    try:
        snapshot = index_mod.load(snapshot_file)
        ast = parse_query(query_text)
        result = execute(ast, snapshot, page=(0, limit))
    except (BiolitError, OSError) as exc:
        _fail(str(exc))
    click.echo(f"total {result.total}")
    for hit in result.hits:
        meta = snapshot.docs[hit.pmid]
        click.echo(
            f"{hit.pmid}\ttier={hit.tier}\tscore={hit.score:.4f}\t{meta.title}"
        )
        click.echo(f"\t{hit.snippet.text}")
    for note in result.diagnostics:
        click.echo(f"note: {note}", err=True)


def _judge_relevant(snapshot, pmid: int, e1: str, e2: str) -> bool:
    """An article is relevant when it mentions both entities and backs a
    relationship: a stored relation, or the pair sharing one sentence."""
    from .ragent import _share_sentence

    if pmid in snapshot.has_relation_between(e1, e2):
        return True
    a, b = canonical_pair(e1, e2)
    return _share_sentence(snapshot, pmid, a, b)


@main.command(name="eval-retrieval")
@click.argument("snapshot_file")
@click.argument("pairs_file")
def eval_retrieval(snapshot_file, pairs_file):
    """Top-20 relevance report for entity-pair queries."""
    try:
        snapshot = index_mod.load(snapshot_file)
    except (BiolitError, OSError) as exc:
        _fail(str(exc))
    pairs_path = Path(pairs_file)
    if not pairs_path.exists():
        _fail(f"input file not found: {pairs_file}")
    click.echo("pair\t#\tTop20")
    for line in pairs_path.read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        e1, e2 = line.split("\t")
        ast = parse_query(f"{e1} AND {e2}")
        result = execute(ast, snapshot, page=(0, 100))
        top = result.hits[:20]
        relevant = sum(1 for h in top if _judge_relevant(snapshot, h.pmid, e1, e2))
        click.echo(f"{e1} + {e2}\t{result.total}\t{relevant}/{len(top)}")


@main.command(name="eval-rag")
@click.argument("snapshot_file")
@click.argument("questions_file")
@click.option("--llm", "llm_mode", default="mock", type=click.Choice(["mock"]), show_default=True)
def eval_rag(snapshot_file, questions_file, llm_mode):
    """Citation-precision report per question and answering strategy."""
    try:
        snapshot = index_mod.load(snapshot_file)
    except (BiolitError, OSError) as exc:
        _fail(str(exc))
    questions_path = Path(questions_file)
    if not questions_path.exists():
        _fail(f"input file not found: {questions_file}")
    questions = []
    for line in questions_path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            qid, text = line.split("\t", 1)
            questions.append((qid, text))
    modes = ("no-tool", "search-only", "grounded")
    click.echo("qid\t" + "\t".join(modes))
    totals = {mode: [0, 0] for mode in modes}
    for qid, text in questions:
        if qid not in QUESTION_PLANS:
            _fail(f"no mock script for question id {qid!r}")
        cells = []
        for mode in modes:
            answer = orchestrate(text, mock_for(mode, qid, snapshot), snapshot)
            report = verify_citations(answer, snapshot)
            totals[mode][0] += report.supported
            totals[mode][1] += report.total
            cells.append(report.as_fraction())
        click.echo(qid + "\t" + "\t".join(cells))
    click.echo(
        "all\t" + "\t".join(f"{sup} / {tot}" for sup, tot in (totals[m] for m in modes))
    )


if __name__ == "__main__":
    main()
