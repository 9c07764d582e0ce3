"""CLI contract: exit codes, determinism, caching, report merging."""

import json
import os

import pytest

from omod.cli import main
from omod.report import SCHEMA, merge_documents
from omod.errors import SchemaMismatch


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_tower_q3_m2_degrees(capsys):
    code, out, _ = run_cli(capsys, "tower", "--q", "3", "--m", "2")
    assert code == 0
    assert "[2, 6]" in out


def test_tower_q2_m1_degree_one(capsys):
    code, out, _ = run_cli(capsys, "tower", "--q", "2", "--m", "1")
    assert code == 0
    assert "[1]" in out


def test_tower_cm_q2_n2_m2_degrees(capsys):
    code, out, _ = run_cli(capsys, "tower", "--q", "2", "--n", "2", "--m", "2", "--cm")
    assert code == 0
    assert "[3, 12]" in out


def test_verify_valuations_passes(capsys):
    code, out, _ = run_cli(capsys, "verify", "--q", "2", "--n", "2", "--m", "1",
                           "--which", "valuations")
    assert code == 0
    assert "PASS" in out and "1/3" in out


def test_verify_exit_code_counts_failures(capsys, monkeypatch):
    import omod.cli as cli_mod

    def broken(cfg):
        from omod.report import CheckResult

        return [CheckResult("h0", "claim", {}, 1, 2, "fail", witness="forced")]

    monkeypatch.setitem(cli_mod.RUNNERS, "h0", broken)
    code, out, _ = run_cli(capsys, "verify", "--q", "2", "--m", "1",
                           "--which", "h0")
    assert code == 1


def test_config_errors_exit_2(capsys):
    code, _, err = run_cli(capsys, "verify", "--q", "2", "--n", "2", "--m", "9")
    assert code == 2 and "degree cap" in err
    code, _, err = run_cli(capsys, "verify", "--q", "2", "--m", "1", "--prec", "4")
    assert code == 2 and "precision" in err
    code, _, err = run_cli(capsys, "verify", "--q", "12", "--m", "1")
    assert code == 2
    code, _, err = run_cli(capsys, "verify", "--q", "2", "--m", "1",
                           "--which", "nonsense")
    assert code == 2


def test_json_reports_are_byte_identical(capsys):
    args = ("verify", "--q", "3", "--m", "2", "--which", "character,h0",
            "--output", "json", "--seed", "7")
    code1, out1, _ = run_cli(capsys, *args)
    code2, out2, _ = run_cli(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    doc = json.loads(out1)
    assert doc["schema"] == SCHEMA
    assert doc["config"]["seed"] == 7
    assert all("elapsed" not in r for r in doc["results"])


def test_csv_output(capsys):
    code, out, _ = run_cli(capsys, "verify", "--q", "2", "--m", "1",
                           "--which", "h0", "--output", "csv")
    assert code == 0
    assert out.splitlines()[0].startswith("check,claim,parameters")


def test_cached_tower_reports_identical(capsys, tmp_path):
    cache = str(tmp_path / "towers")
    args = ("tower", "--q", "3", "--m", "2", "--output", "json",
            "--cache-dir", cache)
    code1, cold, _ = run_cli(capsys, *args)
    assert code1 == 0
    names = os.listdir(cache)
    assert any(name.startswith("tower_p3_f1_q3_n1_m2") for name in names)
    code2, warm, _ = run_cli(capsys, *args)
    assert code2 == 0
    cold_doc = json.loads(cold)
    warm_doc = json.loads(warm)
    assert warm_doc["from_cache"] is True
    cold_doc.pop("from_cache")
    warm_doc.pop("from_cache")
    assert cold_doc == warm_doc


def test_cache_env_var(capsys, tmp_path, monkeypatch):
    cache = str(tmp_path / "envtowers")
    monkeypatch.setenv("OMOD_CACHE_DIR", cache)
    code, out, _ = run_cli(capsys, "tower", "--q", "3", "--m", "1")
    assert code == 0
    assert os.listdir(cache)


def test_report_merge_union(capsys, tmp_path):
    f1 = tmp_path / "a.json"
    f2 = tmp_path / "b.json"
    run = lambda which, path: main(["verify", "--q", "2", "--n", "2", "--m", "1",
                                    "--which", which, "--output", "json"])
    code = main(["verify", "--q", "2", "--n", "2", "--m", "1",
                 "--which", "h0", "--output", "json"])
    out = capsys.readouterr().out
    f1.write_text(out)
    main(["verify", "--q", "2", "--n", "2", "--m", "1",
          "--which", "level-count", "--output", "json"])
    out = capsys.readouterr().out
    f2.write_text(out)
    code, out, _ = run_cli(capsys, "report", str(f1), str(f2))
    assert code == 0
    assert "coverage matrix" in out
    assert "h0" in out and "level-count" in out


def test_report_conflicting_duplicates_rejected():
    rec = {"check": "x", "claim": "c", "parameters": {"q": 2},
           "computed": 1, "expected": 1, "status": "pass", "source": "s"}
    doc1 = {"schema": SCHEMA, "config": {}, "results": [rec], "failures": 0}
    rec_bad = dict(rec, status="fail", computed=0)
    doc2 = {"schema": SCHEMA, "config": {}, "results": [rec_bad], "failures": 1}
    with pytest.raises(SchemaMismatch):
        merge_documents([doc1, doc2])
    # identical duplicates collapse fine
    merged = merge_documents([doc1, doc1])
    assert len(merged["results"]) == 1


def test_report_unknown_schema_rejected():
    with pytest.raises(SchemaMismatch):
        merge_documents([{"schema": "bogus/9", "results": []}])
