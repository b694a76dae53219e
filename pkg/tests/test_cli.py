from __future__ import annotations

import csv
import json
import subprocess
import sys
import time

import jsonschema
import pytest

from doeimpact.cli import main
from doeimpact.history import ingest_repository
from doeimpact.report import load_schema, manifest_for, settings_from_manifest, simulate_report
from doeimpact.scenario import run_sweep
from doeimpact.truck_factor import ExpertThresholds
from conftest import GOLDEN, LINKS


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def validate(name, data):
    jsonschema.validate(data, load_schema(name))


# -- analyze ----------------------------------------------------------------------


def test_analyze_writes_reports(repos, tmp_path, capsys):
    code, out, _ = run(capsys, "analyze", "--repo", repos["synthetic3"], "--out-dir", tmp_path)
    assert code == 0
    # five files touched by two developers, seven by one
    assert json.loads(out)["pairs"] == 17
    ledger = json.loads((tmp_path / "ledger.json").read_text())
    matrix = json.loads((tmp_path / "matrix.json").read_text())
    validate("ledger", ledger)
    validate("matrix", matrix)
    for name in ("ledger.csv", "matrix.csv"):
        rows = list(csv.reader((tmp_path / name).open()))
        assert len(rows) - 1 == len(ledger["pairs"])


def test_analyze_is_byte_identical_across_runs(repos, tmp_path, capsys):
    for sub in ("a", "b"):
        assert run(capsys, "analyze", "--repo", repos["synthetic3"], "--out-dir", tmp_path / sub)[0] == 0
    for name in ("ledger.json", "ledger.csv", "matrix.json", "matrix.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_analyze_missing_repository(tmp_path, capsys):
    code, _, err = run(capsys, "analyze", "--repo", tmp_path / "nowhere", "--out-dir", tmp_path)
    assert code == 1
    assert json.loads(err)["error"] == "NotARepository"


# -- truck-factor -----------------------------------------------------------------


def test_truck_factor_report(repos, tmp_path, capsys):
    code, out, _ = run(capsys, "truck-factor", "--repo", repos["synthetic3"], "--out-dir", tmp_path)
    assert code == 0
    report = json.loads(out)
    validate("truck_factor", report)
    assert report["tf"] == 2
    assert report["thresholds"] == {"normalized_min": 0.75, "absolute_min": 0.0}
    assert report == json.loads((tmp_path / "truck_factor.json").read_text())


def test_truck_factor_on_single_developer(repos, tmp_path, capsys):
    code, out, _ = run(capsys, "truck-factor", "--repo", repos["single"], "--out-dir", tmp_path)
    assert (code, json.loads(out)["tf"]) == (0, 1)


def test_truck_factor_thresholds_and_csv(repos, tmp_path, capsys):
    code, out, _ = run(
        capsys, "truck-factor", "--repo", repos["synthetic3"], "--out-dir", tmp_path,
        "--normalized-min", "1.0", "--absolute-min", "100", "--format", "csv",
    )
    assert code == 0
    assert out.splitlines() == ["repository,TF", "synthetic3,0"]


def test_truck_factor_rejects_bad_threshold(repos, tmp_path, capsys):
    code, _, err = run(capsys, "truck-factor", "--repo", repos["single"], "--out-dir", tmp_path, "--normalized-min", "0")
    assert code == 2
    assert "normalized_min" in err


# -- simulate ----------------------------------------------------------------------


def test_simulate_reproduces_golden_report(repos, tmp_path, capsys):
    start = time.perf_counter()
    code, _, _ = run(capsys, "simulate", "--repo", repos["synthetic3"], "--seed", 7, "--out", tmp_path / "sim.json")
    elapsed = time.perf_counter() - start
    assert code == 0
    assert (tmp_path / "sim.json").read_bytes() == (GOLDEN / "simulate_seed7.json").read_bytes()
    assert elapsed < 10


def test_golden_report_validates():
    validate("simulate", json.loads((GOLDEN / "simulate_seed7.json").read_text()))


def test_report_regenerates_from_its_manifest(repos):
    golden = json.loads((GOLDEN / "simulate_seed7.json").read_text())
    settings = settings_from_manifest(golden["manifest"])
    ledger = ingest_repository(repos["synthetic3"])
    base, scenarios = run_sweep(
        ledger, settings.fractions, settings.copy_rate, settings.seed,
        ExpertThresholds(settings.normalized_min, settings.absolute_min), settings.coverage, settings.floor_days,
    )
    extra = {k: golden["manifest"]["full_config"][k] for k in ("repository", "scenario_seeds")}
    manifest = manifest_for("simulate", settings, extra, ledger.reference_ts)
    assert simulate_report(manifest, base, scenarios, len(ledger.file_sizes)) == golden


def test_simulate_zero_fraction_row_equals_baseline(repos, tmp_path, capsys):
    code, out, _ = run(capsys, "simulate", "--repo", repos["synthetic3"], "--fractions", "0", "--copy-rate", "0.9",
                       "--out-dir", tmp_path)
    assert code == 0
    assert json.loads(out)["summary"] == {"TF": 2, "TF_0": 2}


def test_simulate_empty_fractions_is_a_usage_error(repos, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--repo", str(repos["single"]), "--fractions", ""])
    assert exc.value.code == 2


def test_simulate_several_repositories_in_parallel(repos, tmp_path, capsys):
    code, out, _ = run(
        capsys, "simulate", "--repo", repos["two_dev"], "--repo", repos["synthetic3"],
        "--jobs", 2, "--fractions", "0.5", "--out-dir", tmp_path,
    )
    assert code == 0
    assert [r["summary"]["TF"] for r in json.loads(out)] == [2, 2]
    assert (tmp_path / "two_dev" / "simulate.json").exists()
    assert (tmp_path / "summary.csv").read_text().splitlines() == [
        "repository,TF,TF_50", "two_dev,2,2", "synthetic3,2,2",
    ]


def test_config_file_and_flag_precedence(repos, tmp_path, capsys):
    config = tmp_path / "run.ini"
    config.write_text("[doeimpact]\nseed = 7\nfractions = 0.2\ncopy_rate = 0.5\n")
    code, out, _ = run(capsys, "simulate", "--repo", repos["synthetic3"], "--config", config,
                       "--copy-rate", "0.1", "--out-dir", tmp_path)
    assert code == 0
    full = json.loads(out)["manifest"]["full_config"]
    assert (full["seed"], full["fractions"], full["copy_rate"]) == (7, [0.2], 0.1)


def test_broken_config_file(repos, tmp_path, capsys):
    config = tmp_path / "bad.ini"
    config.write_text("[doeimpact]\nseed = many\n")
    code, _, _ = run(capsys, "simulate", "--repo", repos["single"], "--config", config)
    assert code == 2


# -- mine ----------------------------------------------------------------------------


def test_mine_fixture_corpus(tmp_path, capsys):
    code, out, _ = run(capsys, "mine", "--fixtures", LINKS / "pairs", "--out-dir", tmp_path)
    assert code == 0
    summary = json.loads(out)
    validate("mine", summary)
    assert summary["pairs_retained"] == 6
    stats = summary["copy_percentage"]
    assert stats["q1"] == pytest.approx(0.2625, abs=1e-9)
    assert stats["q2"] == pytest.approx(0.4, abs=1e-9)
    assert stats["q3"] == pytest.approx(0.6875, abs=1e-9)
    assert stats["mean"] == pytest.approx(2.8 / 6, abs=1e-9)
    assert len((tmp_path / "matches.csv").read_text().splitlines()) == 9


def test_mine_corpus_without_links(repos, tmp_path, capsys):
    code, _, err = run(capsys, "mine", "--corpus", repos["synthetic3"], "--pages", LINKS / "pairs", "--out-dir", tmp_path)
    assert code == 1
    assert "zero records" in json.loads(err)["message"]


def test_mine_only_disabled_links(tmp_path, capsys):
    code, _, err = run(capsys, "mine", "--fixtures", LINKS / "disabled_only", "--out-dir", tmp_path)
    assert code == 1
    assert "disabled" in json.loads(err)["message"]


def test_mine_missing_directory(tmp_path, capsys):
    code, _, _ = run(capsys, "mine", "--fixtures", tmp_path / "none")
    assert code == 2


# -- stats --------------------------------------------------------------------------


def test_stats_on_a_csv_column(tmp_path, capsys):
    data = tmp_path / "v.csv"
    data.write_text("name,value\n" + "".join(f"r{i},{i}\n" for i in range(1, 9)))
    code, out, _ = run(capsys, "stats", "--csv", data, "--column", "value")
    assert code == 0
    result = json.loads(out)
    validate("stats", result)
    assert (result["q1"], result["q2"], result["q3"]) == (2.75, 4.5, 6.25)


def test_stats_unknown_column(tmp_path, capsys):
    data = tmp_path / "v.csv"
    data.write_text("a\n1\n")
    assert run(capsys, "stats", "--csv", data, "--column", "b")[0] == 2


def test_console_script_exit_codes(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "doeimpact.cli", "analyze", "--repo", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    assert json.loads(proc.stderr)["error"] == "NotARepository"
    proc = subprocess.run([sys.executable, "-m", "doeimpact.cli", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 2
