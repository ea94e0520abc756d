import json
import subprocess
import sys

import pytest

from citenorm.cli import run


@pytest.fixture
def three_pubs(tmp_path):
    path = tmp_path / "pubs.jsonl"
    path.write_text("".join(
        json.dumps({"id": f"p{i}", "year": 2010, "code": "25", "citations": c}) + "\n"
        for i, c in enumerate([0, 5, 10])
    ))
    return path


def test_scheme_check_builtin(capsys):
    assert run(["scheme-check", "ca_sections.scheme"]) == 0
    assert capsys.readouterr().out.strip() == "5 headings, 80 sections"


def test_scheme_check_bad_file(tmp_path, capsys):
    bad = tmp_path / "bad.scheme"
    bad.write_text("ORG\tO\theading\t\n25\tx\tsection\tORG2\n")
    assert run(["scheme-check", str(bad)]) == 2
    assert "line 2: unknown parent ORG2" in capsys.readouterr().err


def test_missing_file_is_io_error(tmp_path, capsys):
    assert run(["scheme-check", str(tmp_path / "nope.scheme")]) == 3
    assert "nope.scheme" in capsys.readouterr().err


def test_usage_errors(capsys):
    assert run(["score", "--bogus"]) == 1
    assert run(["frobnicate"]) == 1
    assert run([]) == 1


def test_score_three_pubs(tmp_path, three_pubs):
    out = tmp_path / "out"
    code = run(["score", "--scheme", "ca_sections", "--pubs", str(three_pubs), "--min-size", "2", "--outdir", str(out)])
    assert code == 0
    lines = (out / "indicators.tsv").read_text().splitlines()
    assert len(lines) == 4
    assert lines[0].split("\t")[0] == "pub_id"
    diag = json.loads((out / "diagnostics.json").read_text())
    assert diag["run"]["grouping"] == "classification"
    assert diag["run"]["min_size"] == 2


def test_score_bad_thresholds(tmp_path, three_pubs, capsys):
    code = run(["score", "--scheme", "ca_sections", "--pubs", str(three_pubs), "--thresholds", "90,50",
                "--outdir", str(tmp_path / "o")])
    assert code == 1
    assert "thresholds must be strictly increasing" in capsys.readouterr().err


def test_score_is_idempotent(tmp_path, three_pubs):
    args = ["score", "--scheme", "ca_sections", "--pubs", str(three_pubs), "--min-size", "2"]
    before = three_pubs.read_bytes()
    assert run(args + ["--outdir", str(tmp_path / "a")]) == 0
    assert run(args + ["--outdir", str(tmp_path / "b"), "--threads", "3"]) == 0
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()
    assert three_pubs.read_bytes() == before


def test_malformed_publication_is_data_error(tmp_path, capsys):
    pubs = tmp_path / "p.jsonl"
    pubs.write_text('{"id": "a", "year": 2010}\n{"id": "b"}\n')
    assert run(["ingest", "--scheme", "ca_sections", "--pubs", str(pubs)]) == 2
    assert "publications line 2" in capsys.readouterr().err


def test_ingest_report(tmp_path, capsys):
    pubs = tmp_path / "p.jsonl"
    pubs.write_text('{"id": "a", "year": 2010, "code": "99"}\n{"id": "b", "year": 2010, "code": "25"}\n')
    edges = tmp_path / "e.tsv"
    edges.write_text("a\tb\nghost\tb\n")
    assert run(["ingest", "--scheme", "ca_sections", "--pubs", str(pubs), "--edges", str(edges)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["accepted"] == 2
    assert rep["unclassifiable"] == {"count": 1, "first": ["a"]}
    assert rep["dangling_edges"]["count"] == 1


def test_refsets_summary(tmp_path, three_pubs):
    out = tmp_path / "sets.json"
    assert run(["refsets", "--scheme", "ca_sections", "--pubs", str(three_pubs), "--min-size", "2",
                "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["sets"] == [{"code": "25", "year": 2010, "size": 3, "resolved_level": "section",
                            "fallback_applied": False, "fallback_exhausted": False}]
    assert doc["exclusions"]["unclassifiable"]["count"] == 0


def test_report_with_units(tmp_path, three_pubs):
    units = tmp_path / "units.tsv"
    units.write_text("U1\tp1\tp2\n")
    out = tmp_path / "out"
    assert run(["report", "--scheme", "ca_sections", "--pubs", str(three_pubs), "--units", str(units),
                "--min-size", "2", "--outdir", str(out)]) == 0
    doc = json.loads((out / "units.jsonl").read_text())
    assert doc["unit_id"] == "U1" and doc["n_scored"] == 2
    assert doc["mean_percentile"] == pytest.approx(200 / 3)
    assert doc["grouping"] == "classification"


def test_report_unknown_unit_member(tmp_path, three_pubs, capsys):
    units = tmp_path / "units.tsv"
    units.write_text("U1\tp1\tzz\n")
    assert run(["report", "--scheme", "ca_sections", "--pubs", str(three_pubs), "--units", str(units),
                "--outdir", str(tmp_path / "o")]) == 2
    assert "unknown publication id zz" in capsys.readouterr().err


def test_synth_roundtrip(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"seed": 4, "fields": [
        {"code": "25", "year": 2010, "n_pubs": 60, "family": "constant", "params": {"c": 2}}]}))
    assert run(["synth", str(spec), "--outdir", str(tmp_path / "syn")]) == 0
    assert run(["score", "--scheme", "ca_sections", "--pubs", str(tmp_path / "syn" / "publications.jsonl"),
                "--outdir", str(tmp_path / "out")]) == 0
    rows = (tmp_path / "out" / "indicators.tsv").read_text().splitlines()[1:]
    assert len(rows) == 60
    assert {r.split("\t")[7] for r in rows} == {"50.0"}


def test_synth_bad_spec(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text('{"seed": 1, "fields": [{"code": "25", "year": 2010, "n_pubs": 5, "family": "pareto"}]}')
    assert run(["synth", str(spec), "--outdir", str(tmp_path / "x")]) == 2
    assert "unknown distribution family" in capsys.readouterr().err


def test_warnings_on_stderr(tmp_path, capsys):
    pubs = tmp_path / "p.jsonl"
    pubs.write_text('{"id": "a", "year": 2010, "code": "99"}\n{"id": "b", "year": 2010, "code": "25"}\n')
    assert run(["score", "--scheme", "ca_sections", "--pubs", str(pubs), "--outdir", str(tmp_path / "o")]) == 0
    captured = capsys.readouterr()
    assert "1 unclassifiable" in captured.err
    assert captured.out == ""


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "citenorm", "scheme-check", "ca_sections"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "5 headings, 80 sections"
