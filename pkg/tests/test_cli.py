import json
import subprocess
import sys

import pytest

from almosttwin import __version__
from almosttwin.cli import main


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sievefn_writes_csv_and_json(tmp_path, capsys):
    csv_path, json_path = tmp_path / "s.csv", tmp_path / "s.json"
    code, _, err = run(["sievefn", "--s-max", "5", "--step", "1e-4", "--csv", str(csv_path),
                        "--json", str(json_path)], capsys)
    assert code == 0 and "sievefn:" in err
    doc = json.loads(json_path.read_text())
    assert doc["meta"]["version"] == __version__
    assert doc["result"]["chen_constant"] > 0
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("# ") and lines[1] == "s,F,f"


def test_bad_eta_names_precondition(capsys):
    code, _, err = run(["bohr", "--N", "12", "--omega", "1", "--eta", "0.9"], capsys)
    assert code == 1 and "eta must lie in (0, 1/2]" in err


def test_usage_errors(capsys):
    assert run(["nope"], capsys)[0] == 1
    assert run([], capsys)[0] == 1
    assert run(["bohr", "--N", "12"], capsys)[0] == 1


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sieve settings\nhi = 30\nconstraint = chen\n")
    code, out, _ = run(["sieve", "--config", str(cfg), "--csv", "-", "--json", str(tmp_path / "j")], capsys)
    assert code == 0 and out.splitlines()[-1].startswith("29,")
    code, out, _ = run(["sieve", "--config", str(cfg), "--hi", "12", "--csv", "-",
                        "--json", str(tmp_path / "j")], capsys)
    assert out.splitlines()[-1].startswith("11,")
    cfg.write_text("bogus = 1\n")
    assert run(["sieve", "--config", str(cfg), "--hi", "5"], capsys)[0] == 1


def test_outputs_byte_identical(tmp_path, capsys):
    paths = []
    for i in range(2):
        c, j = tmp_path / f"g{i}.csv", tmp_path / f"g{i}.json"
        args = ["goldbach", "--lo", "9", "--hi", "3000", "--constraint", "chen", "--count",
                "--csv", str(c), "--json", str(j), "--workers", str(1 + 2 * i), "--seed", "5"]
        assert run(args, capsys)[0] == 0
        paths.append((c, j))
    assert paths[0][0].read_bytes() == paths[1][0].read_bytes()
    # the worker count is not echoed, so the JSON matches too
    assert paths[0][1].read_bytes() == paths[1][1].read_bytes()


@pytest.mark.parametrize("args", [
    ["singular", "--forms", "1,0;1,2", "--cutoff", "10000"],
    ["expsum", "--lemma", "B1", "--x", "1000", "--alpha", "1e-4", "--Q", "3", "--c", "1"],
    ["expsum", "--lemma", "B2", "--x", "1000", "--alpha", "0.5", "--a", "1", "--q", "2", "--Q", "3"],
    ["expsum", "--lemma", "B5", "--x", "4096", "--alpha", "0.618", "--M", "64"],
    ["expsum", "--lemma", "typeI", "--x", "10000", "--alpha", "0.142858", "--Q", "4", "--M", "3"],
    ["expsum", "--lemma", "primeAP", "--x", "10000", "--alpha", "0.3333333333", "--Q", "3", "--arc", "major"],
    ["transfer", "--N", "1000", "--f1", "window:0.25,0.5", "--f2", "window:0.25,0.5", "--f3", "window:0.25,0.5"],
    ["transfer", "--N", "600", "--f1", "primes:6,5", "--f2", "primes:6,1", "--f3", "primes:6,1"],
    ["bohr", "--N", "12", "--omega", "1", "--eta", "0.1666666666666667"],
])
def test_subcommands_run(args, capsys):
    code, out, _ = run(args + ["--quiet"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["meta"]["command"] == args[0]


def test_transfer_window_count(capsys):
    code, out, _ = run(["transfer", "--N", "1000", "--f1", "window:0.25,0.5", "--f2", "window:0.25,0.5",
                        "--f3", "window:0.25,0.5", "--quiet"], capsys)
    assert json.loads(out)["result"]["lhs"] == pytest.approx(31623 / 10 ** 6)


def test_verify_all_quick_subset(capsys):
    code, out, err = run(["verify-all", "--quick", "--only", "2,8"], capsys)
    assert code == 0
    assert err.count("[PASS]") == 2
    assert json.loads(out)["result"]["passed"]


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "almosttwin", "--version"], capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout.strip() == __version__
