import json
import subprocess
import sys

import jsonschema
import pytest

from stategraph.cli import load_schema, main

from .conftest import CORPUS

RUNNING = str(CORPUS / "running.pbes")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_guards(capsys):
    code, out, _ = run(capsys, "guards", RUNNING)
    assert code == 0
    assert "X[1]: i == 1 && j == 1" in out and "Z[1]: j == 2" in out


def test_unicity(capsys):
    code, out, _ = run(capsys, "unicity", RUNNING)
    data = json.loads(out)
    assert code == 0
    assert {"eq": "X", "pvi": 1, "param": 2, "kind": "source", "value": "1"} in data["constraint"]


def test_cfp(capsys):
    code, out, _ = run(capsys, "cfp", RUNNING)
    data = json.loads(out)
    assert code == 0
    assert [c["name"] for c in data["classes"]] == ["i", "j"]


def test_stategraph_global_writes_dot_and_labels(capsys, tmp_path):
    dot = tmp_path / "graph.dot"
    code, out, _ = run(capsys, "stategraph", "--mode", "global", RUNNING, "--dot", str(dot), "--out-dir", str(tmp_path))
    assert code == 0
    text = dot.read_text()
    assert text.count("[label=") - text.count("->") == 7
    assert json.loads(out)["Z"]["(1,2)"] == ["l"]
    assert (tmp_path / "running.global.labels.json").exists()


def test_stategraph_local(capsys, tmp_path):
    code, out, _ = run(capsys, "stategraph", "--mode=local", RUNNING, "--out-dir", str(tmp_path))
    assert code == 0
    assert "(X,1,1)" in json.loads(out)
    assert "cluster_1" in (tmp_path / "running.local.dot").read_text()


def test_reset_with_plan(capsys, tmp_path):
    code, out, _ = run(capsys, "reset", "--mode", "global", "--reduced-guard", "--emit-plan", RUNNING, "--out-dir", str(tmp_path))
    assert code == 0
    assert "Z(1, 2, 1, k)" in out
    plan = json.loads((tmp_path / "running.plan.json").read_text())
    assert plan["reduced_guard"] is True
    assert (tmp_path / "running.reset.pbes").read_text() == out


def test_solve_exit_codes(capsys, tmp_path):
    true_file = tmp_path / "t.pbes"
    true_file.write_text("nu X() = X(); init X();")
    false_file = tmp_path / "f.pbes"
    false_file.write_text("mu X() = X(); init X();")
    assert run(capsys, "solve", str(true_file))[0] == 0
    code, out, _ = run(capsys, "solve", str(false_file))
    assert code == 1 and out.strip() == "false"
    assert run(capsys, "solve", "--limit", "100", RUNNING)[0] == 3


def test_errors_exit_2_with_spans(capsys, tmp_path):
    bad = tmp_path / "bad.pbes"
    bad.write_text("nu X() =\n  && ; init X();")
    code, _, err = run(capsys, "guards", str(bad))
    assert code == 2 and f"{bad}:2:3" in err
    unbound = tmp_path / "unbound.pbes"
    unbound.write_text("nu X(i: Nat2) = Y(i); init X(1);")
    code, _, err = run(capsys, "solve", str(unbound))
    assert code == 2 and "Y" in err
    assert run(capsys, "solve", str(tmp_path / "missing.pbes"))[0] == 2
    assert run(capsys, "solve", "--limit", "0", RUNNING)[0] == 2


@pytest.mark.parametrize("mode", ["global", "local"])
def test_pipeline_report(capsys, tmp_path, mode):
    code, out, _ = run(capsys, "pipeline", f"--mode={mode}", RUNNING, "--out-dir", str(tmp_path))
    report = json.loads(out)
    assert code == 0
    jsonschema.validate(report, load_schema())
    assert report["original"]["diverged"] is True
    assert report["reduced"]["bes_equations"] == 7
    assert report["verdict"] is True
    assert report["reduction"] is None
    assert json.loads((tmp_path / f"running.{mode}.report.json").read_text()) == report


def test_local_labels_never_smaller_than_global(capsys, tmp_path):
    glob = json.loads(run(capsys, "pipeline", "--mode=global", RUNNING, "--out-dir", str(tmp_path))[1])
    loc = json.loads(run(capsys, "pipeline", "--mode=local", RUNNING, "--out-dir", str(tmp_path))[1])
    for eq, table in glob["labelling"].items():
        for loc_key, labels in table.items():
            assert set(labels) <= set(loc["labelling"][eq][loc_key])


def test_reduction_is_reported_when_both_terminate(capsys, tmp_path):
    f = tmp_path / "small.pbes"
    f.write_text(
        "nu X(c: Nat2, d: Nat3) = (c != 0 || X(1, d + 1)) && (c != 1 || X(0, d)); init X(0, 0);"
    )
    report = json.loads(run(capsys, "pipeline", str(f), "--out-dir", str(tmp_path))[1])
    assert report["original"]["bes_equations"] == 5
    assert report["reduced"]["bes_equations"] == 2
    assert report["reduction"] == pytest.approx(60.0)


def test_seed_is_recorded(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("STATEGRAPH_SEED", "99")
    report = json.loads(run(capsys, "pipeline", RUNNING, "--out-dir", str(tmp_path))[1])
    assert report["seed"] == 99


def test_module_entry_point():
    done = subprocess.run(
        [sys.executable, "-m", "stategraph", "guards", RUNNING], capture_output=True, text=True
    )
    assert done.returncode == 0 and "X[2]: true" in done.stdout
