import json
import math

import pytest

from isorec import DistinctReal, exact_error
from isorec.cli import main
from isorec.geometry import body_from_dict
from isorec.io import read_nodes_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _error_json(err: str) -> dict:
    rec = json.loads(err.strip().splitlines()[-1])
    assert set(rec) == {"error", "message"}
    return rec


# ---- kernel / extremal ------------------------------------------------------------

def test_kernel_d2(capsys, tmp_path):
    code, out, _ = run(capsys, "kernel", "--p", "0", "--q", "0", "--t-max", "1", "--steps", "2",
                       "--out", str(tmp_path))
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [r["t"] for r in rows] == [0.0, 0.5, 1.0]
    assert rows[-1]["G"] == 0.5
    assert (tmp_path / "kernel.csv").read_text().splitlines()[0] == "t,g,g_prime,G"
    assert (tmp_path / "kernel.svg").read_text().startswith("<?xml")


def test_kernel_sinh_column(capsys, tmp_path):
    code, out, _ = run(capsys, "kernel", "--q", "-1", "--steps", "10", "--out", str(tmp_path))
    assert code == 0
    for r in json.loads(out)["rows"]:
        assert r["g"] == pytest.approx(math.sinh(r["t"]), rel=1e-14, abs=1e-300)


def test_kernel_rejects_nan(capsys, tmp_path):
    code, _, err = run(capsys, "kernel", "--q", "nan", "--out", str(tmp_path))
    assert code == 2
    assert _error_json(err)["error"] == "invalid-coefficients"


def test_extremal_values(capsys):
    code, out, _ = run(capsys, "extremal", "--p", "0", "--q", "0", "--a", "1")
    rec = json.loads(out)
    assert code == 0
    assert rec["ext1"] == pytest.approx(0.5, abs=1e-15)
    assert rec["ext2"] == pytest.approx(0.25, abs=1e-15)
    assert rec["t0"] == pytest.approx(0.5, abs=1e-14)


def test_extremal_d2_minus_one_value(capsys):
    _, out, _ = run(capsys, "extremal", "--q", "-1", "--a", "1")
    c = math.cosh(1.0)
    assert json.loads(out)["ext2"] == pytest.approx(1 + c - math.sqrt(c * c + 3), abs=1e-12)


def test_extremal_out_of_range(capsys):
    code, _, err = run(capsys, "extremal", "--q", "1", "--a", "2")
    assert code == 3
    rec = _error_json(err)
    assert rec["error"] == "out-of-range"
    assert "1.5707963" in rec["message"]


def test_extremal_conservative_delta(capsys):
    _, out, _ = run(capsys, "extremal", "--p", "1", "--q", "1", "--a", "0.3", "--conservative-delta")
    rec = json.loads(out)
    assert rec["delta_conservative"] <= rec["delta"]


# ---- usage and configuration errors ---------------------------------------------------

def test_usage_errors(capsys):
    assert run(capsys, "nonsense")[0] == 2
    code, _, err = run(capsys, "extremal", "--a", "x")
    assert code == 2 and _error_json(err)["error"] == "usage"
    code, _, err = run(capsys, "extremal")
    assert code == 2 and "--a" in _error_json(err)["message"]


def test_bad_formats(capsys, tmp_path):
    code, _, err = run(capsys, "kernel", "--formats", "json,png", "--out", str(tmp_path))
    assert code == 2 and "formats" in _error_json(err)["message"]


def test_config_merge_flags_win(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"q": -1, "a": 0.5}))
    _, out, _ = run(capsys, "extremal", "--config", str(cfg))
    assert json.loads(out)["operator"]["q"] == -1
    _, out, _ = run(capsys, "extremal", "--config", str(cfg), "--q", "0")
    rec = json.loads(out)
    assert rec["ext2"] == pytest.approx(0.0625, abs=1e-15) and rec["a"] == 0.5


def test_config_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "extremal", "--config", str(bad))[0] == 2
    unknown = tmp_path / "u.json"
    unknown.write_text(json.dumps({"zeta": 1}))
    code, _, err = run(capsys, "extremal", "--config", str(unknown))
    assert code == 2 and "zeta" in _error_json(err)["message"]
    assert run(capsys, "extremal", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_out_directory_from_environment(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("ISOREC_OUT", str(tmp_path / "env"))
    assert run(capsys, "kernel", "--steps", "3", "--formats", "csv")[0] == 0
    assert (tmp_path / "env" / "kernel.csv").exists()
    assert not (tmp_path / "env" / "kernel.json").exists()


def test_invalid_body(capsys, tmp_path):
    code, _, err = run(capsys, "nodes", "--n", "64", "--body", '{"type": "box", "lo": [0, 0], "hi": [0, 1]}',
                       "--out", str(tmp_path))
    assert code == 2
    assert _error_json(err)["error"] == "invalid-body"


def test_bad_node_file(capsys, tmp_path):
    f = tmp_path / "n.csv"
    f.write_text("a,b\n0.1,0.2\n")
    code, _, err = run(capsys, "error", "--nodes", str(f), "--out", str(tmp_path))
    assert code == 2 and "header" in _error_json(err)["message"]
    assert run(capsys, "error", "--nodes", str(tmp_path / "none.csv"), "--out", str(tmp_path))[0] == 4


# ---- nodes / error round trip and determinism -----------------------------------------

@pytest.fixture(scope="module")
def node_runs(tmp_path_factory):
    dirs = [tmp_path_factory.mktemp(f"run{i}") for i in range(2)]
    for d in dirs:
        assert main(["nodes", "--n", "64", "--theta", "0.65", "--seed", "1", "--out", str(d)]) == 0
    return dirs


def test_nodes_outputs_byte_identical(node_runs):
    a, b = node_runs
    for name in ("nodes.csv", "nodes.json", "nodes.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_nodes_report_contents(node_runs):
    rec = json.loads((node_runs[0] / "nodes.json").read_text())
    assert rec["theta"] == 0.65 and rec["seed"] == 1
    assert 0 < rec["k_n"] < 64
    assert len(read_nodes_csv(node_runs[0] / "nodes.csv")) == 64


def test_error_round_trip(capsys, node_runs, tmp_path):
    csv_path = node_runs[0] / "nodes.csv"
    outs = []
    for i in range(2):
        d = tmp_path / f"e{i}"
        code, out, _ = run(capsys, "error", "--nodes", str(csv_path), "--q", "-1", "--out", str(d))
        assert code == 0
        outs.append(out)
        assert (d / "error.json").read_bytes() == (tmp_path / "e0" / "error.json").read_bytes()
        assert (d / "error.csv").read_bytes() == (tmp_path / "e0" / "error.csv").read_bytes()
    assert outs[0] == outs[1]
    rec = json.loads(outs[0])
    # the CSV carries full precision, so the library sees the same nodes
    rep = exact_error(DistinctReal(-1.0, 1.0), body_from_dict(rec["body"]),
                      read_nodes_csv(csv_path), rec["resolution"])
    assert rec["upper"] == rep.upper and rec["lower"] == rep.lower
    assert rec["witness"]["scale"] == 1.0


def test_error_half_factor_and_p_nonzero(capsys, node_runs, tmp_path):
    csv_path = str(node_runs[0] / "nodes.csv")
    _, full, _ = run(capsys, "error", "--nodes", csv_path, "--out", str(tmp_path))
    _, half, _ = run(capsys, "error", "--nodes", csv_path, "--half-factor", "--out", str(tmp_path))
    assert json.loads(half)["upper"] == pytest.approx(json.loads(full)["upper"] / 2, rel=1e-15)
    code, out, _ = run(capsys, "error", "--nodes", csv_path, "--p", "1", "--out", str(tmp_path))
    assert code == 0
    rec = json.loads(out)
    assert rec["lower"] is None and "witness" not in rec


def test_study_small(capsys, tmp_path):
    code, out, _ = run(capsys, "study", "--n", "64", "--theta", "0.65", "--out", str(tmp_path))
    assert code == 0
    rec = json.loads(out)
    assert rec["asymptotic_constant"] == pytest.approx(1 / (2 * math.sqrt(27)), rel=1e-13)
    assert rec["rows"][0]["n"] == 64
    assert (tmp_path / "study.csv").read_text().splitlines()[0].startswith("n,k_n,e_omega")
    assert "<polyline" in (tmp_path / "study.svg").read_text()


def test_study_rejects_bad_list(capsys, tmp_path):
    code, _, err = run(capsys, "study", "--n", "64,x", "--out", str(tmp_path))
    assert code == 2 and _error_json(err)["error"] == "parameter"


# ---- verify -------------------------------------------------------------------------

def test_verify_full_suite(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--out", str(tmp_path))
    rec = json.loads(out)
    assert code == 0, rec["failures"]
    assert rec["failed"] == 0 and rec["passed"] > 0
    report = json.loads((tmp_path / "verify.json").read_text())
    skipped = [c for c in report["checks"] if c["status"] == "skipped"]
    assert skipped and all(c["reason"] for c in skipped)


def test_verify_injected_half_factor_fails(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--inject-half-factor", "--fooling", "--quick",
                       "--out", str(tmp_path))
    assert code == 1
    assert all(name.startswith("sandwich") for name in json.loads(out)["failures"])


def test_verify_single_operator_skips_with_reason(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--operator", "p=1,q=0", "--fooling", "--out", str(tmp_path))
    assert code == 0
    assert json.loads(out)["skipped"] == 2
    checks = json.loads((tmp_path / "verify.json").read_text())["checks"]
    assert all("p = 0" in c["reason"] or "p=0" in c["reason"] for c in checks)


def test_verify_bad_operator(capsys, tmp_path):
    code, _, err = run(capsys, "verify", "--operator", "p=1;q", "--out", str(tmp_path))
    assert code == 2


def test_infinite_delta_serialized_as_string(capsys):
    _, out, _ = run(capsys, "extremal", "--q", "-1", "--a", "0.5")
    assert json.loads(out)["delta"] == "inf"
