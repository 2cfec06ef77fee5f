import json
import subprocess
import sys

import pytest

from adjoint_invariants.cli import main
from adjoint_invariants.classical_lie import BASIS_CONVENTION


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_algebra_info_text(capsys):
    code, out, _ = run(capsys, "algebra", "--family", "A", "--rank", "2", "info")
    assert code == 0
    assert "dim_v=3" in out and "dim_g=8" in out


def test_algebra_info_exponents(capsys):
    code, out, _ = run(capsys, "algebra", "--family", "B", "--rank", "2", "info", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["results"][0]["exponents"] == [1, 3]
    assert doc["results"][0]["killing_ratio"] == "3"


def test_invalid_rank_exit_2(capsys):
    code, _, err = run(capsys, "algebra", "--family", "D", "--rank", "2", "info")
    assert code == 2 and "rank >= 3 required" in err


def test_verify_theorem_a1(capsys):
    code, out, _ = run(capsys, "verify", "theorem", "--algebra", "A_1", "--degree-max", "4")
    doc = json.loads(out)
    assert code == 0
    assert [r["kernel_dim"] for r in doc["results"]] == [0, 1, 1, 3]
    assert all(r["agreement"] for r in doc["results"])
    cfg = doc["config"]
    assert cfg["basis_convention"] == BASIS_CONVENTION
    assert cfg["primes"] == [2147483647, 2147483629]
    assert doc["tool_version"]


def test_verify_theorem_without_epsilon_is_a_finding(capsys):
    code, out, _ = run(capsys, "verify", "theorem", "--algebra", "D_3", "--degree-min", "3",
                       "--degree-max", "3", "--no-epsilon-chains")
    assert code == 1
    assert json.loads(out)["results"][0]["agreement"] is False


@pytest.mark.parametrize("argv", [
    ["verify", "theorem", "--algebra", "A_1", "--degree-min", "3", "--degree-max", "2"],
    ["verify", "theorem", "--algebra", "A_1", "--primes", "4,7"],
    ["verify", "theorem"],
    ["verify", "theorem", "--family", "A"],
    ["table", "dims", "--algebra", "D_4", "--degree-max", "5"],
    ["verify", "theorem", "--algebra", "A_1", "--budget-entries", "0"],
])
def test_configuration_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_table_dims_csv(capsys):
    code, out, _ = run(capsys, "table", "dims", "--algebra", "A_1", "--degree-max", "4")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "family,rank,degree,kernel_dim,span_rank,generator_count"
    assert len(lines) == 5 and lines[-1] == "A,1,4,3,3,24"


def test_table_dims_b2(capsys):
    _, out, _ = run(capsys, "table", "dims", "--family", "B", "--rank", "2", "--degree-max", "3")
    assert out.splitlines()[1:] == ["B,2,1,0,0,1", "B,2,2,1,1,2", "B,2,3,1,1,6"]


def test_allow_long_raises_budget(capsys):
    code, _, _ = run(capsys, "table", "dims", "--algebra", "D_4", "--degree-min", "3",
                     "--degree-max", "3", "--budget-entries", "1000")
    assert code == 2
    code, out, _ = run(capsys, "table", "dims", "--algebra", "D_4", "--degree-min", "3",
                       "--degree-max", "3", "--allow-long")
    assert code == 0 and out.splitlines()[1] == "D,4,3,1,1,6"


def test_verify_identities(capsys):
    code, out, _ = run(capsys, "verify", "identities", "--algebra", "A_1", "--algebra", "D_3")
    doc = json.loads(out)
    assert code == 0
    names = [(r["name"], r["spec"]) for r in doc["results"]]
    assert ("pfaffian_correspondence", "D_3") in names
    assert ("form_swap", "A_1") not in names
    assert all(r["passed"] and r["max_abs_defect"] == "0" for r in doc["results"])


def test_identities_csv(capsys):
    code, out, _ = run(capsys, "verify", "identities", "--algebra", "C_2", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "name,spec,passed,max_abs_defect,normalization_scalar"


def test_out_file_and_determinism(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["verify", "theorem", "--algebra", "B_2", "--degree-max", "3", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_timings_flag(capsys):
    _, out, _ = run(capsys, "verify", "theorem", "--algebra", "A_1", "--degree-max", "2", "--timings")
    assert "timings" in json.loads(out)["results"][0]


def test_env_primes(capsys, monkeypatch):
    monkeypatch.setenv("ADJINV_PRIMES", "1000003,998244353")
    _, out, _ = run(capsys, "verify", "theorem", "--algebra", "A_1", "--degree-max", "2")
    assert json.loads(out)["config"]["primes"] == [1000003, 998244353]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "adjoint_invariants", "algebra", "--algebra", "C_3",
                           "info"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "dim_g=21" in proc.stdout
