import csv
import io
import json
import subprocess
import sys

import pytest

from negdim.cli import ConfigError, main, parse_range
from negdim.exact import parse
from negdim.reference import quartic_tilde_reference
from negdim.series import series_generate


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _csv(text):
    body = "".join(l + "\n" for l in text.splitlines() if not l.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def test_parse_range():
    assert parse_range("4") == [1, 2, 3, 4]
    assert parse_range("10..12") == [10, 11, 12]
    assert parse_range("5:7,9") == [5, 6, 7, 9]
    with pytest.raises(ConfigError):
        parse_range("9..3")
    with pytest.raises(ConfigError):
        parse_range("a..b")


def test_spectral_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "spectral", "--two-j", "0:3", "--method", "all", "--out", str(out))
    assert code == 0
    obj = json.loads(out.read_text())
    assert obj["header"]["command"] == "spectral"
    ref = quartic_tilde_reference()
    for entry in obj["polynomials"]:
        assert parse(json.dumps(entry["poly"])) == ref[entry["two_j"]]


def test_perturb_jsonl_and_check(tmp_path, capsys):
    out = tmp_path / "s.jsonl"
    code, text, _ = run(capsys, "perturb", "--K", "8", "--check", "--at", "-4", "--out", str(out))
    assert code == 0 and "PASS" in text
    lines = out.read_text().splitlines()
    assert "header" in json.loads(lines[0])
    t = series_generate(K=8)
    assert [parse(json.dumps(json.loads(l)["E"])) for l in lines[1:]] == t.terms
    rows = _csv(text.split("series checks")[0])
    assert rows[6]["E(D=-4)"] == "3003/8"


def test_roots_from_series_file(tmp_path, capsys):
    s = tmp_path / "s.jsonl"
    assert run(capsys, "perturb", "--K", "11", "--out", str(s))[0] == 0
    code, text, _ = run(capsys, "roots", "--orders", "10..11", "--series", str(s), "--no-timestamp",
                        "--scatter", "11", "--scatter-prefix", str(tmp_path / "sc"))
    assert code == 0
    assert text.startswith("# negdim:")
    rows = _csv(text)
    cl = {r["k"]: r["re"] for r in rows if r["label"] == "cluster(-4)"}
    assert cl["10"].startswith("-3.957684071") and cl["11"].startswith("-4.012312654")
    assert sum(r["label"] == "stable-zero" for r in rows) == 4
    assert (tmp_path / "sc.dat").exists() and "plot" in (tmp_path / "sc.gp").read_text()


def test_roots_deterministic_and_parallel_identical(capsys):
    a = run(capsys, "roots", "--orders", "12..14", "--no-timestamp")[1]
    b = run(capsys, "roots", "--orders", "12..14", "--no-timestamp", "--jobs", "2")[1]
    assert a == b
    assert "generated" not in a


def test_config_hash_tracks_parameters(capsys):
    h = lambda *a: [l for l in run(capsys, "roots", "--no-timestamp", *a)[1].splitlines()
                    if "config_hash" in l][0]
    assert h("--orders", "6") == h("--orders", "6", "--jobs", "2")
    assert h("--orders", "6") != h("--orders", "7")


@pytest.mark.parametrize("argv", [
    ["roots", "--orders", "x"],
    ["roots", "--bits", "12"],
    ["roots", "--series", "/nonexistent/s.jsonl", "--orders", "5"],
    ["perturb", "--potential", "nosuch"],
    ["hill", "--Dcal-range", "1:0:0.1"],
])
def test_config_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "config error" in err


def test_numeric_failure_exit_3(capsys, monkeypatch):
    monkeypatch.setenv("NEGDIM_MAX_BITS", "64")
    code, _, err = run(capsys, "roots", "--orders", "6")
    assert code == 3 and "non-convergence" in err


def test_asym_offset_report(capsys):
    code, text, _ = run(capsys, "asym", "--M", "2", "--orders", "11..11", "--no-timestamp")
    assert code == 0
    row = _csv(text)[0]
    assert abs(float(row["ratio"]) - 1.0641) < 1e-3


def test_hill_csv_and_plot(tmp_path, capsys):
    plot = tmp_path / "t.gp"
    code, text, _ = run(capsys, "hill", "--Dcal-range", "-4.5:-3.5:0.5", "--levels", "2",
                        "--no-timestamp", "--plot", str(plot))
    assert code == 0
    rows = _csv(text)
    assert sorted({float(r["Dcal"]) for r in rows}) == [-4.5, -4.0, -3.5]
    alg = [r for r in rows if r["source"] == "algebraic"]
    assert alg and abs(float(alg[0]["E"]) - 3.04275941360914) < 1e-10
    assert plot.exists()


def test_verify_combinatorics(capsys):
    code, text, _ = run(capsys, "verify", "combinatorics", "--max-M", "6")
    assert code == 0 and "M" in text


def test_console_script_version():
    out = subprocess.run([sys.executable, "-m", "negdim.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("negdim")
