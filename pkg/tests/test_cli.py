import json
import subprocess
import sys

import pytest

from chevlab import cli
from chevlab import engine as eng
from chevlab import theorems as th


@pytest.fixture(autouse=True)
def _isolated(monkeypatch, tmp_path):
    monkeypatch.delenv("CHEVLAB_CACHE", raising=False)
    th.clear_labs()
    yield
    th.clear_labs()


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def strip_millis(text):
    rows = [json.loads(l) for l in text.splitlines()]
    for r in rows:
        r.pop("millis")
    return rows


def test_constants_tsv(capsys):
    code, out, _ = run(capsys, "constants", "--phi", "G2")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "alpha\tbeta\ti\tj\tN"
    assert all(len(l.split("\t")) == 5 for l in lines)
    assert any(l.split("\t")[4] in ("3", "-3") for l in lines[1:])


def test_relations_json(capsys):
    code, out, _ = run(capsys, "relations", "--phi", "C2", "--ring", "Z/4")
    d = json.loads(out)
    assert code == 0 and d["verdict"] == "holds" and d["claim"] == "RELATIONS"


def test_gens_json(capsys):
    code, out, _ = run(capsys, "gens", "--set", "Y", "--phi", "A2", "--ring", "Z/4",
                       "--ideal-i", "2", "--ideal-j", "2")
    d = json.loads(out)
    assert code == 0 and d["count"] == len(d["elements"]) > 0
    assert len(d["elements"][0]["matrix"]) == 3
    code, _, err = run(capsys, "gens", "--set", "X", "--phi", "A2", "--ring", "Z/4", "--ideal-i", "2")
    assert code == 2 and "--ideal-j" in err


def test_verify_single_case_formats(capsys):
    base = ["verify", "--claim", "T3", "--phi", "A2", "--ring", "Z/8", "--ideal-i", "2", "--ideal-j", "2"]
    code, out, _ = run(capsys, *base)
    assert code == 0 and json.loads(out)["verdict"] == "holds"
    code, out, _ = run(capsys, *base, "--format", "tsv")
    lines = out.splitlines()
    assert lines[0].split("\t") == list(cli.TSV_COLUMNS)
    assert lines[1].split("\t")[5] == "holds"
    code, out, _ = run(capsys, *base[:2], "T4", *base[3:], "--format", "human")
    assert "HOLDS" in out and "[E(R,I),E(R,J)]" in out


@pytest.mark.parametrize("argv", [
    ["verify", "--claim", "T9", "--phi", "A2", "--ring", "Z/4", "--ideal-i", "2"],
])
def test_bad_claim_is_usage_error(capsys, argv):
    with pytest.raises(SystemExit) as e:
        cli.main(argv)
    assert e.value.code == 2


@pytest.mark.parametrize("argv", [
    ["verify", "--claim", "T1", "--phi", "A2", "--ring", "Z/0", "--ideal-i", "2"],
    ["verify", "--claim", "T1", "--phi", "A2", "--ring", "Z/8", "--ideal-i", "t"],
    ["verify", "--claim", "T2", "--phi", "A2", "--ring", "Z/8", "--ideal-i", "2"],
    ["verify", "--claim", "T1", "--phi", "A2", "--ring", "Z/8", "--ideal-i", "2", "--budget", "999"],
    ["verify", "--claim", "T1", "--phi", "A2", "--ring", "Z/8"],
    ["verify", "--suite", "default", "--claim", "T1", "--ring", "Z/1000"],
])
def test_config_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and err.startswith("chevlab: error:")


def test_exploratory_exit_codes(capsys):
    base = ["verify", "--claim", "T2", "--phi", "C2", "--ring", "Z/4", "--ideal-i", "2", "--ideal-j", "2"]
    code, out, _ = run(capsys, *base)
    assert code == 0 and json.loads(out)["verdict"] == "skipped"
    code, _, _ = run(capsys, *base, "--strict")
    assert code == 1


def test_exit_1_on_fail(capsys, monkeypatch):
    def broken(lab, i):
        r = th._report("T1", lab, i)
        return r.fail({"note": "injected"})
    monkeypatch.setitem(th.VERIFIERS, "T1", broken)
    code, out, _ = run(capsys, "verify", "--claim", "T1", "--phi", "A2", "--ring", "Z/4", "--ideal-i", "2")
    assert code == 1 and json.loads(out)["witness"] == {"note": "injected"}


def test_suite_filter_and_determinism(capsys):
    argv = ["verify", "--suite", "default", "--claim", "T1", "--phi", "A2"]
    code, out1, _ = run(capsys, *argv)
    assert code == 0
    th.clear_labs()
    _, out2, _ = run(capsys, *argv)
    assert strip_millis(out1) == strip_millis(out2)
    rows = strip_millis(out1)
    assert {r["claim"] for r in rows} == {"T1"} and {r["phi"] for r in rows} == {"A2"}
    expected = [c for c in th.DEFAULT_SUITE if c.claim == "T1" and c.phi == "A2"]
    assert [(r["ring"], r["i"]) for r in rows] == [(c.ring, c.i) for c in expected]


def test_jobs_preserve_order(capsys, tmp_path):
    suite = tmp_path / "s.tsv"
    suite.write_text("T1 A2 Z/8 2\nT1 C2 Z/3 0\nT1 A2 Z/4 2\nL5 C2 Z/3 1\n")
    _, serial, _ = run(capsys, "verify", "--suite-file", str(suite))
    _, par, _ = run(capsys, "verify", "--suite-file", str(suite), "--jobs", "2")
    assert strip_millis(serial) == strip_millis(par)
    assert [r["ring"] for r in strip_millis(par)] == ["Z/8", "Z/3", "Z/4", "Z/3"]


def test_cache_dir_and_cache_commands(capsys, tmp_path, monkeypatch):
    d = tmp_path / "cache"
    base = ["verify", "--claim", "T1", "--phi", "A2", "--ring", "Z/4", "--ideal-i", "2"]
    assert run(capsys, *base, "--cache-dir", str(d))[0] == 0
    files = sorted(d.glob("*.chvl"))
    assert files
    code, out, _ = run(capsys, "cache", "ls", "--cache-dir", str(d))
    assert code == 0 and len(out.splitlines()) == len(files)
    raw = bytearray(files[0].read_bytes())
    raw[-5] ^= 0xFF
    files[0].write_bytes(bytes(raw))
    code, out, _ = run(capsys, "cache", "check", "--cache-dir", str(d))
    assert code == 1 and "CORRUPT" in out
    # a corrupt file is rebuilt, not trusted
    th.clear_labs()
    assert run(capsys, *base, "--cache-dir", str(d))[0] == 0
    assert run(capsys, "cache", "check", "--cache-dir", str(d))[0] == 0
    monkeypatch.setenv("CHEVLAB_CACHE", str(d))
    assert eng.cache_dir() == d
    assert run(capsys, "cache", "clear")[0] == 0
    assert not list(d.glob("*.chvl"))


def test_no_cache_flag(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("CHEVLAB_CACHE", str(tmp_path))
    run(capsys, "verify", "--claim", "T1", "--phi", "A2", "--ring", "Z/4", "--ideal-i", "2", "--no-cache")
    assert not list(tmp_path.glob("*.chvl"))


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "chevlab", "constants", "--phi", "A2"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout.startswith("alpha\tbeta")
