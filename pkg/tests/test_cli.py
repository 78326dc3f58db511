"""End-to-end CLI flows over the fixture corpus."""

import glob

import pytest
from click.testing import CliRunner

from biolit.cli import main
from biolit.fixtures import toy10_path


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """ingest -> annotate -> index once; commands below reuse the files."""
    root = tmp_path_factory.mktemp("cli")
    runner = CliRunner()
    inputs = sorted(glob.glob(toy10_path("d01.biocjson").replace("d01", "d*")))
    r = runner.invoke(main, ["ingest", *inputs, "-o", str(root / "corpus.bin")])
    assert r.exit_code == 0, r.output
    r = runner.invoke(
        main, ["annotate", str(root / "corpus.bin"), "-o", str(root / "annotated.bin")]
    )
    assert r.exit_code == 0, r.output
    assert "11 relations" in r.output
    r = runner.invoke(
        main,
        [
            "index",
            str(root / "annotated.bin"),
            "-o",
            str(root / "snapshot.idx"),
            "--bulk-dir",
            str(root / "bulk"),
        ],
    )
    assert r.exit_code == 0, r.output
    return root


def test_index_reports_stats(workdir):
    assert (workdir / "snapshot.idx").exists()
    assert (workdir / "bulk" / "entities.tsv").exists()
    assert (workdir / "bulk" / "relations.tsv").exists()


def test_query_prints_tiers(workdir):
    runner = CliRunner()
    r = runner.invoke(
        main,
        ["query", str(workdir / "snapshot.idx"), "@DISEASE_COVID_19 AND @GENE_PON1"],
    )
    assert r.exit_code == 0, r.output
    lines = r.output.splitlines()
    assert lines[0] == "total 3"
    assert lines[1].startswith("1004\ttier=3")
    assert lines[3].startswith("1002\ttier=2")
    assert lines[5].startswith("1003\ttier=1")


def test_eval_retrieval_report_shape(workdir, pairs):
    import importlib.resources as res

    runner = CliRunner()
    pairs_path = str(res.files("biolit.fixtures").joinpath("pairs.tsv"))
    r = runner.invoke(
        main, ["eval-retrieval", str(workdir / "snapshot.idx"), pairs_path]
    )
    assert r.exit_code == 0, r.output
    lines = r.output.splitlines()
    assert lines[0] == "pair\t#\tTop20"
    assert len(lines) == 1 + len(pairs)
    first = lines[1].split("\t")
    assert first[0] == "@DISEASE_COVID_19 + @GENE_PON1"
    assert first[1] == "3"
    assert first[2] == "2/3"


def test_eval_rag_report_shape(workdir):
    import importlib.resources as res

    runner = CliRunner()
    questions_path = str(res.files("biolit.fixtures").joinpath("questions.tsv"))
    r = runner.invoke(
        main, ["eval-rag", str(workdir / "snapshot.idx"), questions_path, "--llm", "mock"]
    )
    assert r.exit_code == 0, r.output
    lines = r.output.splitlines()
    assert lines[0] == "qid\tno-tool\tsearch-only\tgrounded"
    assert len(lines) == 1 + 8 + 1
    assert lines[-1].startswith("all\t")
    # every cell is an "x / y" fraction
    for line in lines[1:]:
        for cell in line.split("\t")[1:]:
            supported, _, total = cell.partition(" / ")
            assert supported.isdigit() and total.isdigit()


def test_missing_input_file_names_path():
    runner = CliRunner()
    r = runner.invoke(main, ["query", "no-such-snapshot.idx", "x"])
    assert r.exit_code != 0
    assert "no-such-snapshot.idx" in r.output


def test_annotate_missing_corpus():
    runner = CliRunner()
    r = runner.invoke(main, ["annotate", "missing.bin", "-o", "out.bin"])
    assert r.exit_code != 0
    assert "missing.bin" in r.output


def test_ingest_rejects_bad_bioc(tmp_path):
    bad = tmp_path / "bad.biocjson"
    bad.write_text("{broken")
    runner = CliRunner()
    r = runner.invoke(main, ["ingest", str(bad), "-o", str(tmp_path / "c.bin")])
    assert r.exit_code != 0
    assert "bad.biocjson" in r.output
