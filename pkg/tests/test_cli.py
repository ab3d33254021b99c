from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from rainbow_forge.cli import main, threshold_scan
from rainbow_forge.graph import loads_graph
from rainbow_forge.rainbow import is_rainbow_cycle


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def records(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def strip_timing(text):
    out = []
    for rec in records(text):
        rec.pop("timing")
        out.append(rec)
    return out


@pytest.fixture
def q4(tmp_path, capsys):
    path = tmp_path / "q4.txt"
    assert main(["construct", "hypercube", "--m", "4", "--output", str(path)]) == 0
    capsys.readouterr()
    return path


@pytest.fixture
def k8(tmp_path, capsys):
    path = tmp_path / "k8.txt"
    assert main(["construct", "k1f", "--n", "8", "--output", str(path)]) == 0
    capsys.readouterr()
    return path


def test_hypercube_find_is_negative(q4, capsys):
    code, out = run(capsys, "rainbow", "find", "--input", str(q4))
    assert code == 1
    (rec,) = records(out)
    assert rec["result"]["verdict"] == "no rainbow cycle (exhaustive, max_len = C)"
    assert rec["schema_version"] == 1 and rec["command"] == "rainbow find"
    assert "version" in rec and "seconds" in rec["timing"]


def test_complete_graph_find_is_positive(k8, capsys):
    code, out = run(capsys, "rainbow", "find", "--input", str(k8), "--max-len", "3")
    assert code == 0
    G = loads_graph(k8.read_text())
    assert is_rainbow_cycle(G, records(out)[0]["result"]["cycle"])


def test_bounded_search_labelled(q4, capsys):
    code, out = run(capsys, "rainbow", "find", "--input", str(q4), "--max-len", "3")
    assert code == 1
    assert records(out)[0]["result"]["verdict"] == "no rainbow cycle (bounded, max_len = 3)"


def test_group_dimension(capsys):
    code, out = run(capsys, "group", "dimension", "--group", "S3", "--set", "(01),(12),(02)")
    assert code == 0 and records(out)[0]["result"]["dimension"] == 3


def test_group_dissociated_exit_codes(capsys):
    assert run(capsys, "group", "dissociated", "--group", "S3", "--set", "(01),(12),(02)")[0] == 0
    code, out = run(capsys, "group", "dissociated", "--group", "Z2^2", "--set", "(1,0),(0,1),(1,1)")
    assert code == 1
    assert records(out)[0]["result"]["witness"]["elements"] == ["(0,1)", "(1,0)", "(1,1)"]


def test_dim_transpositions_cli(capsys):
    code, out = run(capsys, "group", "dim-transpositions", "--k", "4")
    assert code == 0 and records(out)[0]["result"]["dimension"] == 5


def test_build_graph_cli(tmp_path, capsys):
    path = tmp_path / "b.txt"
    code, _ = run(capsys, "group", "build-graph", "--group", "S3", "--set", "(01),(12),(02)",
                  "--output", str(path))
    assert code == 0
    G = loads_graph(path.read_text())
    assert G.n == 12 and G.m == 18
    code, _ = run(capsys, "group", "build-graph", "--group", "Z6", "--set", "2", "--kind", "cayley")
    assert code == 2


def test_lemma_grid_cli(capsys):
    code, out = run(capsys, "process", "lemma42-grid", "--T-max", "50")
    assert code == 0 and records(out)[0]["result"]["verdict"] == "all inequalities hold"


def test_usage_errors(capsys, tmp_path):
    assert main(["nonsense"]) == 2
    assert main(["rainbow", "find"]) == 2
    assert main(["rainbow", "find", "--input", str(tmp_path / "missing.txt")]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("3 3 2\n0 1 0\n1 2 0\n0 2 1\n")
    assert main(["rainbow", "find", "--input", str(bad)]) == 2
    assert main(["rainbow", "find", "--input", str(bad), "--max-len", "x"]) == 2
    assert main(["group", "dimension", "--group", "Q8", "--set", "1"]) == 2
    assert main(["experiment", "threshold-scan", "--family", "petersen", "--n", "8"]) == 2
    assert "rainbow-forge" in capsys.readouterr().err


def test_budget_abort_exit_codes(capsys, k8):
    assert main(["construct", "regular-girth", "--n", "10", "--d", "3", "--g", "7", "--max-retries", "50"]) == 3
    code, out = run(capsys, "rainbow", "split", "--input", str(k8), "--trials", "2", "--state-budget", "1")
    assert code == 3
    assert records(out)[-1]["result"]["aborted"] == 2


def test_split_and_trials_are_deterministic(k8, capsys, monkeypatch):
    argv = ["process", "trial", "--input", str(k8), "--trials", "6", "--seed", "11"]
    _, first = run(capsys, *argv)
    _, second = run(capsys, *argv)
    assert strip_timing(first) == strip_timing(second)
    monkeypatch.setenv("RAINBOW_FORGE_JOBS", "2")
    _, parallel = run(capsys, *argv)
    a, b = strip_timing(first), strip_timing(parallel)
    assert [r["result"] for r in a] == [r["result"] for r in b]
    trials = [r for r in a if r["kind"] == "trial"]
    assert [t["result"]["seed"] for t in trials] == list(range(11, 17))


def test_jobs_env_overrides_flag(monkeypatch):
    from rainbow_forge.cli import UsageError, resolve_jobs
    monkeypatch.setenv("RAINBOW_FORGE_JOBS", "3")
    assert resolve_jobs(1) == 3
    monkeypatch.setenv("RAINBOW_FORGE_JOBS", "zero")
    with pytest.raises(UsageError):
        resolve_jobs(1)
    monkeypatch.delenv("RAINBOW_FORGE_JOBS")
    assert resolve_jobs(2) == 2


def test_split_witnesses_validate(k8, capsys):
    code, out = run(capsys, "rainbow", "split", "--input", str(k8), "--trials", "10", "--seed", "5")
    G = loads_graph(k8.read_text())
    recs = records(out)
    assert code == 0 and recs[-1]["kind"] == "summary"
    for rec in recs[:-1]:
        if rec["result"]["cycle"] is not None:
            assert is_rainbow_cycle(G, rec["result"]["cycle"])


def test_expander_commands(tmp_path, capsys):
    path = tmp_path / "k3.txt"
    path.write_text("3 3 3\n0 1 0\n1 2 1\n0 2 2\n")
    code, out = run(capsys, "expander", "extract", "--input", str(path), "--save", str(tmp_path / "h.txt"))
    assert code == 0
    assert records(out)[0]["result"]["certificate"]["vertices"] == [0, 1]
    assert loads_graph((tmp_path / "h.txt").read_text()).m == 1
    assert run(capsys, "expander", "verify", "--input", str(path))[0] in (0, 1)
    star = tmp_path / "star.txt"
    star.write_text("101 100 100\n" + "".join(f"0 {i} {i - 1}\n" for i in range(1, 101)))
    assert main(["expander", "verify", "--input", str(star)]) == 2
    code, out = run(capsys, "expander", "verify", "--input", str(star), "--mode", "sampled")
    assert code == 1 and records(out)[0]["result"]["counterexample"] is not None


def test_almost_commands(tmp_path, capsys, k8):
    code, out = run(capsys, "almost", "find", "--input", str(k8), "--r", "2")
    assert code == 0 and len(records(out)[0]["result"]["cycle"]) >= 3
    path = tmp_path / "lb.txt"
    assert main(["almost", "construct", "--d", "2", "--r", "2", "--n", "16", "--output", str(path)]) == 0
    capsys.readouterr()
    text = path.read_text()
    assert text.startswith("# almost-rainbow lower bound")
    code, out = run(capsys, "almost", "find", "--input", str(path), "--r", "2", "--d", "1")
    assert code == 1


def test_components_command(tmp_path, capsys):
    path = tmp_path / "q6.txt"
    main(["construct", "hypercube", "--m", "6", "--output", str(path)])
    capsys.readouterr()
    code, out = run(capsys, "process", "components", "--input", str(path), "--trials", "20")
    assert code == 0
    summary = records(out)[-1]["result"]
    assert 0 < summary["median_largest_fraction"] <= 1


def test_output_file_receives_records(tmp_path, k8, capsys):
    target = tmp_path / "out.jsonl"
    assert main(["rainbow", "find", "--input", str(k8), "--output", str(target)]) == 0
    assert capsys.readouterr().out == ""
    assert records(target.read_text())[0]["result"]["verdict"] == "rainbow cycle found"


def test_threshold_scan_families():
    rows = threshold_scan("complete", [4, 6, 8], [], 3, 0)
    assert all(r["frequency"] == 1.0 for r in rows)
    rows = threshold_scan("hypercube", [8, 16, 32], [], 2, 0)
    assert all(r["frequency"] == 0.0 for r in rows)
    rows = threshold_scan("k1f-sub", [12], [2, 3, 5, 8], 10, 0)
    freqs = [r["frequency"] for r in rows]
    assert freqs[-1] == 1.0
    violations = sum(r["monotone_flag"] for r in rows)
    assert violations <= 1
    rows = threshold_scan("random", [10], [2, 6], 5, 0)
    assert len(rows) == 2
    with pytest.raises(ValueError):
        threshold_scan("hypercube", [12], [], 1, 0)


def test_threshold_scan_csv(capsys):
    code, out = run(capsys, "experiment", "threshold-scan", "--family", "k1f-sub", "--n", "10",
                    "--degrees", "2,4", "--trials", "4")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["degree"] for r in rows] == ["2", "4"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "rainbow_forge", "group", "dim-transpositions", "--k", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["dimension"] == 3
