from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np
import pytest

from mpo_qet import cli
from mpo_qet.circuit import circuit_from_dict, circuit_unitary

SPECS = Path(__file__).resolve().parent.parent / "scripts" / "specs"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize("name", ["ising_L3.json", "heisenberg_L3.json", "pauli_product_shifted_L3.json"])
def test_verify_passes(capsys, name):
    code, out, _ = run(capsys, "verify", "--model", SPECS / name)
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "PASS"
    assert rep["max_abs_error"] <= 1e-10


def test_verify_report_file(capsys, tmp_path):
    out = tmp_path / "rep.json"
    code, stdout, _ = run(capsys, "verify", "--model", SPECS / "ising_L3.json", "--out", out)
    assert code == 0 and stdout.startswith("PASS")
    rep = json.loads(out.read_text())
    assert rep["D"] == 2 and rep["n_wires"] == 3 + 3 + 2


def test_verify_fails_below_error(capsys):
    code, out, _ = run(capsys, "verify", "--model", SPECS / "ising_L3.json", "--tol", "1e-30")
    assert code == 1 and json.loads(out)["status"] == "FAIL"


def custom_spec(inner_chi: int) -> dict:
    op = [[1, 0], [0, 1]]
    return {
        "model": "custom",
        "sites": [[[op, op]], [[op] * inner_chi] * 2],
        "R": [1],
        "C": [1] * inner_chi,
    }


def test_verify_custom_spec(capsys, tmp_path):
    p = tmp_path / "ok.json"
    p.write_text(json.dumps(custom_spec(1)))
    code, out, _ = run(capsys, "verify", "--model", p)
    assert code == 0


@pytest.mark.parametrize(
    "payload",
    [
        custom_spec(2) | {"sites": [[[[[1, 0], [0, 1]]] * 2], [[[[1, 0], [0, 1]]]] * 3], "C": [1]},
        {"model": "ising", "L": 3, "J": 1.0},
        {"model": "heisenberg", "L": 3, "JX": 1, "JY": 1, "JZ": 1, "zeta": 0.5},
        {"model": "nope", "L": 3},
        [1, 2],
    ],
)
def test_invalid_specs_exit_2(capsys, tmp_path, payload):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(payload))
    code, _, err = run(capsys, "verify", "--model", p)
    assert code == 2 and err.startswith("error:")


def test_missing_file_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "verify", "--model", tmp_path / "absent.json")
    assert code == 2 and "not found" in err


def test_filter_identity_polynomial(capsys):
    code, out, _ = run(capsys, "filter", "--model", SPECS / "ising_L3.json", "--phases", SPECS / "identity_phase.json")
    rows = read_csv(out)
    assert code == 0 and len(rows) == 8
    assert list(rows[0]) == list(cli.FILTER_COLUMNS)
    for r in rows:
        assert float(r["transformed"]) == pytest.approx(float(r["normalized"]), abs=1e-10)
        assert r["target"] == "" and r["warning"] == "0"


def test_filter_fit_shifted_pauli_product(capsys, tmp_path):
    out = tmp_path / "f.csv"
    code, _, _ = run(capsys, "filter", "--model", SPECS / "pauli_product_shifted_L3.json", "--degree", 30, "--gap", 0.1, "--out", out)
    rows = read_csv(out.read_text())
    assert code == 0 and len(rows) == 8
    for r in rows:
        assert float(r["transformed"]) == pytest.approx(float(r["target"]), abs=1e-6)
        assert r["warning"] == "0"
    near_zero = min(rows, key=lambda r: abs(float(r["normalized"])))
    assert abs(float(near_zero["normalized"])) < 0.04
    assert float(near_zero["transformed"]) > 0.7
    outside = [abs(float(r["transformed"])) for r in rows if abs(float(r["normalized"])) >= 0.1]
    assert len(outside) == 7 and max(outside) < 0.01


@pytest.mark.filterwarnings("ignore::mpo_qet.qet.FitWarning")
def test_filter_underfit_sets_warning(capsys):
    code, out, _ = run(
        capsys, "filter", "--model", SPECS / "ising_L3.json", "--degree", 4, "--gap", 0.3, "--qsp-degree", 4
    )
    rows = read_csv(out)
    assert code == 1
    assert all(r["warning"] == "1" for r in rows)


def test_filter_needs_phases(capsys):
    code, _, err = run(capsys, "filter", "--model", SPECS / "ising_L3.json")
    assert code == 2 and "--phases" in err
    code, _, _ = run(capsys, "filter", "--model", SPECS / "ising_L3.json", "--degree", 3)
    assert code == 2


def test_cost_sweeps(capsys):
    code, out, _ = run(capsys, "cost", "--L", *range(2, 9), "--chi", 4)
    mpo = [r for r in read_csv(out) if r["method"] == "mpo"]
    units = [int(r["be_units"]) for r in mpo]
    assert code == 0 and units == [L * 4**4 for L in range(2, 9)]
    code, out, _ = run(capsys, "cost", "--L", 3, "--chi", 2, 4, 8)
    units = [int(r["be_units"]) for r in read_csv(out) if r["method"] == "mpo"]
    assert units[1] == 4 * units[0] and units[2] == 4 * units[1]
    pp = {r["method"]: int(r["ancillas"]) for r in read_csv(out)}
    assert pp["lcu_pauli_product_shifted"] == 7 and pp["mpo_pauli_product_shifted"] == 4


def test_cost_bytes_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "cost", "--L", 3, 4, "--M", 5, "--degree", 2, "--out", a)
    run(capsys, "cost", "--L", 3, 4, "--M", 5, "--degree", 2, "--out", b)
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.filterwarnings("ignore::mpo_qet.qet.FitWarning")
def test_phases_fit(capsys, tmp_path):
    out = tmp_path / "ph.json"
    code, _, err = run(capsys, "phases-fit", "--degree", 3, "--gap", 0.3, "--out", out, "--seed", 1)
    data = json.loads(out.read_text())
    assert code == 0 and err.startswith("PASS")
    assert data["degree"] == 6 and data["parity"] == "even"
    code, _, err = run(capsys, "phases-fit", "--degree", 3, "--gap", 0.3, "--qsp-degree", 2)
    assert code == 1 and err.startswith("FAIL")


def test_dump_circuit_round_trip(capsys, tmp_path):
    out = tmp_path / "c.json"
    code, _, _ = run(capsys, "dump-circuit", "--model", SPECS / "ising_L3.json", "--out", out)
    c = circuit_from_dict(json.loads(out.read_text()))
    assert code == 0 and c.n_wires == 8
    u = circuit_unitary(c)
    assert np.allclose(u @ u.conj().T, np.eye(256), atol=1e-12)
    out2 = tmp_path / "c2.json"
    run(capsys, "dump-circuit", "--model", SPECS / "ising_L3.json", "--out", out2)
    assert out.read_bytes() == out2.read_bytes()
    code, stdout, _ = run(
        capsys, "dump-circuit", "--model", SPECS / "ising_L3.json", "--phases", SPECS / "identity_phase.json"
    )
    assert code == 0 and circuit_from_dict(json.loads(stdout)).count("mcrz") > 0


def test_module_entry_point():
    import subprocess
    import sys

    r = subprocess.run([sys.executable, "-m", "mpo_qet", "cost", "--L", "2"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("method,")
