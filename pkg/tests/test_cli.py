import csv
import io
import json
import math
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from wgsim.circuit import cnot_netlist, serialize_netlist
from wgsim.cli import main, parse_grid, UsageError

GOLDEN = Path(__file__).parent / "golden"
DEFAULT_RUNS = {
    "hom-scan": [],
    "hom-scan-sampled": ["--sample", "--seed", "3"],
    "visibility-curve": ["--delta-eta", "0.034", "--epsilon", "0.052"],
    "truth-table": ["--delta-eta", "0.034", "--epsilon", "0.052"],
    "noon": [],
    "compile": ["--check-cnot"],
}


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def assert_close(a, b, path="$"):
    if isinstance(a, dict):
        assert a.keys() == b.keys(), path
        for k in a:
            assert_close(a[k], b[k], f"{path}.{k}")
    elif isinstance(a, list):
        assert len(a) == len(b), path
        for i, (x, y) in enumerate(zip(a, b)):
            assert_close(x, y, f"{path}[{i}]")
    elif isinstance(a, float) and isinstance(b, (int, float)):
        assert b == pytest.approx(a, rel=1e-9, abs=1e-12), path
    else:
        assert a == b, path


@pytest.mark.parametrize("name", sorted(DEFAULT_RUNS))
@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_golden(name, fmt, capsys):
    command = name.split("-sampled")[0]
    code, out, _ = run([command, "--format", fmt, *DEFAULT_RUNS[name]], capsys)
    assert code == 0
    path = GOLDEN / f"{name}.{fmt}"
    if os.environ.get("WGSIM_REGEN_GOLDEN"):
        path.parent.mkdir(exist_ok=True)
        path.write_bytes(out.encode())
    expected = path.read_bytes().decode()
    if fmt == "json":
        assert_close(json.loads(expected), json.loads(out))
    else:
        exp_rows = list(csv.reader(io.StringIO(expected)))
        got_rows = list(csv.reader(io.StringIO(out)))
        assert exp_rows[0] == got_rows[0]
        for er, gr in zip(exp_rows[1:], got_rows[1:], strict=True):
            for e, g in zip(er, gr, strict=True):
                try:
                    assert float(g) == pytest.approx(float(e), rel=1e-9, abs=1e-12, nan_ok=True)
                except ValueError:
                    assert e == g


def test_json_schema_and_determinism(capsys):
    outs = [run(["noon", "--seed", "11"], capsys)[1] for _ in range(2)]
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    assert doc["schema_version"] == 1
    assert doc["command"] == "noon"
    assert doc["parameters"]["seed"] == 11


def test_seed_changes_samples(capsys):
    a = run(["noon", "--seed", "1"], capsys)[1]
    b = run(["noon", "--seed", "2"], capsys)[1]
    assert json.loads(a)["count_record"] != json.loads(b)["count_record"]


def test_csv_layout(capsys):
    _, out, _ = run(["truth-table", "--format", "csv"], capsys)
    lines = out.split("\r\n")
    assert lines[0] == "input,p00,p01,p10,p11,success_probability"
    assert lines[1].startswith("00,1.0,")
    assert out.endswith("\r\n")


def test_ideal_truth_table(capsys):
    doc = json.loads(run(["truth-table"], capsys)[1])
    assert np.allclose(doc["probabilities"], np.eye(4)[[0, 1, 3, 2]], atol=1e-12)
    assert np.allclose(doc["success_probabilities"], 1 / 9)
    assert doc["logical_basis_fidelity"] == pytest.approx(1.0)


def test_truth_table_sweep(capsys):
    _, out, _ = run(["truth-table", "--sweep", "0.45,0.5", "--format", "csv"], capsys)
    assert out.splitlines()[0] == "eta_half,fidelity"
    assert float(out.splitlines()[2].split(",")[1]) == pytest.approx(1.0)


def test_truth_table_from_netlist(tmp_path, capsys):
    path = tmp_path / "cnot.wgn"
    path.write_text(serialize_netlist(cnot_netlist()))
    doc = json.loads(run(["truth-table", "--netlist", str(path)], capsys)[1])
    assert doc["logical_basis_fidelity"] == pytest.approx(1.0)


def test_hom_visibility(capsys):
    doc = json.loads(run(["hom-scan", "--eta", "0.466", "--delta-eta", "0.034", "--epsilon", "0.052"], capsys)[1])
    assert doc["visibility"] == pytest.approx(0.948, abs=1e-12)
    assert doc["realized_eta"] == pytest.approx(0.5)


def test_noiseless_noon(capsys):
    doc = json.loads(run(["noon", "--noiseless"], capsys)[1])
    assert doc["fidelity_bound"] == pytest.approx(1.0, abs=1e-9)


def test_compile_check(capsys):
    doc = json.loads(run(["compile", "--check-cnot"], capsys)[1])
    assert doc["cnot_equivalence"]["equivalent"] is True
    assert doc["unitarity_error"] < 1e-12


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out, _ = run(["compile", "--circuit", "mzi", "-o", str(target)], capsys)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["mode_count"] == 2


def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# fabricated device\ndelta_eta = 0.034\nepsilon = 0.052\n")
    doc = json.loads(run(["truth-table", "--config", str(cfg)], capsys)[1])
    assert doc["parameters"]["delta_eta"] == 0.034
    doc = json.loads(run(["truth-table", "--config", str(cfg), "--delta-eta", "0.01"], capsys)[1])
    assert doc["parameters"]["delta_eta"] == 0.01
    assert doc["parameters"]["epsilon"] == 0.052


@pytest.mark.parametrize("text", ["bogus = 1\n", "no separator\n", "epsilon = abc\n"])
def test_bad_config(tmp_path, capsys, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    code, _, err = run(["noon", "--config", str(cfg)], capsys)
    assert code == 2 and err


def test_missing_config(capsys):
    assert run(["noon", "--config", "/nonexistent/x.cfg"], capsys)[0] == 2


def test_bad_netlist_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.wgn"
    path.write_text("modes 2\ndc 0 5 eta=0.5\n")
    code, _, err = run(["compile", "--netlist", str(path)], capsys)
    assert code == 2
    assert "line 2" in err


def test_missing_netlist(capsys):
    assert run(["compile", "--netlist", "/nonexistent.wgn"], capsys)[0] == 2


def test_runtime_error_exit_code(capsys):
    code, _, err = run(["noon", "--epsilon", "1.5"], capsys)
    assert code == 1 and "epsilon" in err


def test_bad_grid(capsys):
    assert run(["hom-scan", "--delays", "1:2"], capsys)[0] == 2


def test_argparse_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["truth-table", "--circuit", "nope"])
    assert exc.value.code == 2


def test_parse_grid():
    assert parse_grid("0:1:3") == [0.0, 0.5, 1.0]
    assert parse_grid("0.1, 0.2") == [0.1, 0.2]
    with pytest.raises(UsageError):
        parse_grid("0:1:0")


def test_visibility_curve_nan(capsys):
    _, out, _ = run(["visibility-curve", "--half-etas", "0.98", "--delta-eta", "0.034", "--format", "csv"], capsys)
    assert "1/2,0.98,nan" in out
    doc = json.loads(run(["visibility-curve", "--half-etas", "0.98", "--delta-eta", "0.034"], capsys)[1])
    assert doc["rows"][0][2] is None


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "wgsim", "compile", "--circuit", "coupler", "--format", "csv"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.startswith("row,col,re,im")
    assert math.isclose(float(res.stdout.splitlines()[1].split(",")[2]), math.sqrt(0.5))


def test_default_scan_has_zero_dip(capsys):
    doc = json.loads(run(["hom-scan"], capsys)[1])
    probs = [r[1] for r in doc["rows"]]
    assert min(probs) < 1e-15 and probs.index(min(probs)) == len(probs) // 2


def test_offset_coupler_visibility(capsys):
    doc = json.loads(run(["hom-scan", "--eta", "0.534", "--epsilon", "0.018"], capsys)[1])
    assert doc["visibility"] == pytest.approx(2 * 0.534 * 0.466 * 0.982 / (0.534**2 + 0.466**2), abs=1e-12)


def test_visibility_curve_defaults_and_grid(capsys):
    doc = json.loads(run(["visibility-curve"], capsys)[1])
    half = {e: v for f, e, v in doc["rows"] if f == "1/2"}
    assert len(half) == 21 and max(half, key=half.get) == pytest.approx(0.5)
    assert half[max(half, key=half.get)] == pytest.approx(1.0)
    doc = json.loads(run(["visibility-curve", "--half-etas", "0.45,0.55", "--third-etas", "0.3"], capsys)[1])
    assert [r[1] for r in doc["rows"]] == [0.45, 0.55, 0.3]


def test_both_hadamards_cli(capsys):
    doc = json.loads(run(["truth-table", "--circuit", "cnot-hh"], capsys)[1])
    assert np.allclose(doc["probabilities"], 0.25)
    assert doc["logical_basis_fidelity"] == pytest.approx(1.0)


def test_seeded_output_file_is_bit_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["noon", "--seed", "5", "-o", str(a)], capsys)
    run(["noon", "--seed", "5", "-o", str(b)], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_empty_netlist_compiles_to_identity(tmp_path, capsys):
    path = tmp_path / "empty.wgn"
    path.write_text("modes 3\n")
    doc = json.loads(run(["compile", "--netlist", str(path)], capsys)[1])
    mat = np.array(doc["unitary"])[..., 0]
    assert np.allclose(mat, np.eye(3))
