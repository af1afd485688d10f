import io
import json
import shutil
import subprocess
import sys

import pytest

from bpwmc import catalog
from bpwmc.cli import EXIT_CERT, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    return code, [json.loads(line) for line in text.splitlines() if line.strip()]


def test_pw_fig1():
    code, (out,) = run_json("pw", "fixtures/fig1.txt")
    assert code == EXIT_OK and out == {"pathwidth": 3}


def test_recognize_c5():
    code, (out,) = run_json("recognize", "fixtures/c5.txt")
    assert code == EXIT_OK and out["claw_free"] is True and out["bpw_bound"] == 2


def test_verify_canonical_small():
    code, (out,) = run_json("verify", "--suite", "canonical", "--max-n", "5")
    assert code == EXIT_OK and out["pass"]


def test_usage_errors():
    assert run("pw", "fig1", "--bogus")[0] == EXIT_USAGE
    assert run()[0] == EXIT_USAGE
    assert run("nonsense")[0] == EXIT_USAGE


def test_domain_errors():
    assert run("mixing-bound", "fig1", "--lambda", "1")[0] == EXIT_DOMAIN
    assert run("pw", "no_such_graph_file.txt")[0] == EXIT_DOMAIN


def test_certification_failure_exit():
    # with p = -1 the bound is 2e(1 + max(lam, 1/lam)), below the cube's congestion
    assert run("congestion", "q3", "--p", "-1")[0] == EXIT_CERT


def test_parse_error_exit(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("3\n0 1\n0 1\n")
    assert run("info", str(bad))[0] == EXIT_DOMAIN


def test_tsv_format():
    code, text = run("bpw", "c5", "--format", "tsv")
    assert code == EXIT_OK
    rows = dict(line.split("\t", 1) for line in text.splitlines())
    assert rows["bipartite_pathwidth"] == "1"


def test_path_command_matches_fig1_length():
    code, (out,) = run_json("path", "fig1", "--x", "a,d,e,h,i", "--y", "b,c,f,g,j")
    assert code == EXIT_OK and out["length"] == 10 and all(s["decodes"] for s in out["steps"])


def test_sample_output_and_seed():
    _, (a,) = run_json("sample", "c6", "--seed", "4", "--steps", "500")
    _, (b,) = run_json("sample", "c6", "--seed", "4", "--steps", "500")
    assert a == b and {"seed", "steps", "lambda"} <= set(a)
    assert sum(a["size_histogram"]) == 500


def test_sample_size_oracle():
    code, lines = run_json("sample-size", "lk4", "--m", "2", "--lambda-start", "1/12", "--count", "3")
    head, samples = lines[0], lines[1:]
    assert code == EXIT_OK and head["success"] and len(samples) == 3
    assert all(len(s["sample"]) == 2 for s in samples)


def test_manifest_replay(tmp_path):
    man = tmp_path / "run.json"
    code, first = run("sample", "c7", "--seed", "9", "--steps", "300", "--manifest", str(man))
    assert code == EXIT_OK
    data = json.loads(man.read_text())
    assert data["seed"] == 9 and "--manifest" not in data["arguments"]
    assert list(data["fixture_hashes"].values())[0]
    code, again = run("--replay", str(man))
    assert code == EXIT_OK and again == first


def test_fixture_dir_override(tmp_path, monkeypatch):
    shutil.copy(catalog.fixture_dir() / "c5.txt", tmp_path / "mine.txt")
    monkeypatch.setenv("BPW_FIXTURES", str(tmp_path))
    code, (out,) = run_json("pw", "mine")
    assert code == EXIT_OK and out == {"pathwidth": 2}


@pytest.mark.parametrize("name", sorted(catalog.named_fixtures()))
def test_fixture_files_match_generators(name):
    g = catalog.named_fixtures()[name]
    f = catalog.fixture(name).graph
    assert f == g and f.labels == g.labels


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bpwmc.cli", "pw", "fig1"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout) == {"pathwidth": 3}
