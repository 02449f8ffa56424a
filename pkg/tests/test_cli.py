import json
import subprocess
import sys

import pytest

from dysl2.cli import CHECKS, ConfigError, SuiteConfig, config_from_dict, main, validate

FAST = ["--check", "hh", "--check", "pairing", "--emax", "2", "--modes", "1"]


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_catalog_lists_every_check(capsys):
    code, out, _ = run(["catalog"], capsys)
    assert code == 0
    ids = [line.split()[0] for line in out.splitlines()]
    assert ids == list(CHECKS)


def test_verify_pass_report(capsys):
    code, out, err = run(["verify", *FAST], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == 1 and rep["status"] == "pass"
    assert [r["check"] for r in rep["checks"]] == ["hh", "pairing"]
    assert all("wall_time" not in r for r in rep["checks"])
    assert "PASS" in err


def test_timings_flag_adds_wall_time(capsys):
    code, out, _ = run(["verify", "--check", "pairing", "--timings"], capsys)
    assert code == 0
    assert "wall_time" in json.loads(out)["checks"][0]


def test_failing_check_exits_one(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"backend": "numeric", "checks": ["universal-r"],
                               "numeric": {"N_product": 50, "t_samples": [1.3]}}))
    code, out, _ = run(["verify", "--config", str(cfg)], capsys)
    assert code == 1
    assert json.loads(out)["status"] == "fail"


def test_unknown_check_is_config_error(capsys):
    code, out, err = run(["verify", "--check", "zz"], capsys)
    assert code == 2 and out == ""
    assert "config error: checks[0]: unknown check id 'zz'" in err


def test_empty_check_list_passes(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"checks": []}))
    code, out, _ = run(["verify", "--config", str(cfg)], capsys)
    assert code == 0 and json.loads(out)["checks"] == []


def test_numeric_params_need_numeric_backend(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"backend": "exact", "numeric": {"z": 0.3}}))
    code, _, err = run(["verify", "--config", str(cfg)], capsys)
    assert code == 2 and "numeric" in err


def test_backend_mismatch_is_skipped(capsys):
    code, out, _ = run(["verify", "--check", "rho-anchor"], capsys)
    assert code == 0
    assert json.loads(out)["checks"][0]["status"] == "skipped"


def test_numeric_anchor(capsys):
    code, out, _ = run(["verify", "--backend", "numeric", "--check", "rho-anchor"], capsys)
    assert code == 0 and json.loads(out)["checks"][0]["max_residual"] < 1e-12


@pytest.mark.parametrize("data, path", [
    ({"cutoffs": {"e_max": -1}}, "cutoffs.e_max"),
    ({"cutoffs": {"e_max": "4"}}, "cutoffs.e_max"),
    ({"cutoffs": {"m_window": [3, 1]}}, "cutoffs.m_window"),
    ({"cutoffs": {"bogus": 1}}, "cutoffs.bogus"),
    ({"frobnicate": 1}, "frobnicate"),
    ({"backend": "quantum"}, "backend"),
    ({"jobs": 0}, "jobs"),
])
def test_config_errors_name_the_field(data, path):
    with pytest.raises(ConfigError) as info:
        validate(config_from_dict(data), "numeric" in data)
    assert info.value.path == path


def test_default_checks_follow_backend():
    cfg = validate(SuiteConfig(backend="numeric"))
    assert set(cfg.checks) == {c for c, s in CHECKS.items() if s.backend == "numeric"}


def test_report_is_byte_deterministic(tmp_path):
    paths = []
    for i in range(2):
        p = tmp_path / f"r{i}.json"
        assert main(["verify", *FAST, "--out", str(p)]) == 0
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_parallel_jobs_match_serial(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", *FAST, "--out", str(a)]) == 0
    assert main(["verify", *FAST, "--jobs", "2", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_dump_basis_json_and_csv(capsys):
    code, out, _ = run(["dump", "basis", "--emax", "1", "--sector", "0"], capsys)
    data = json.loads(out)
    assert code == 0 and data["states"][0] == {"m": -4, "partition": [], "sector": 0}
    code, out, _ = run(["dump", "basis", "--emax", "1", "--format", "csv"], capsys)
    lines = out.splitlines()
    assert lines[0] == "m,partition" and len(lines) == 1 + len(data["states"])


def test_dump_series(capsys):
    code, out, _ = run(["dump", "series", "--family", "e", "--emax", "1", "--window", "-2", "1"], capsys)
    data = json.loads(out)
    rows = {(r["power"], r["state"]["m"], tuple(r["state"]["partition"])) for r in data["coefficients"]}
    # u^0 carries e_{-1}, u^1 carries e_{-2}
    assert (0, 2, ()) in rows and (1, 2, (1,)) in rows
    code, out, _ = run(["dump", "series", "--family", "f", "--format", "csv"], capsys)
    assert out.startswith("power,m,partition,coeff")


def test_dump_matrix(capsys):
    code, out, _ = run(["dump", "matrix", "--name", "rbar", "--at", "0"], capsys)
    entries = json.loads(out)["entries"]
    assert entries[1][2] == "1" and entries[1][1] == "0"
    code, out, _ = run(["dump", "matrix", "--name", "universal-r"], capsys)
    assert code == 2


def test_dump_pairing_table(capsys):
    code, out, _ = run(["dump", "pairing-table", "--K", "1"], capsys)
    data = json.loads(out)
    assert ["e0", "f-1", "(-1)/(hbar)"] in data["modes"]
    code, out, _ = run(["dump", "pairing-table", "--format", "csv"], capsys)
    assert out.splitlines()[0] == "upper,lower,value"


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dysl2.cli", "catalog"], capture_output=True, text=True)
    assert proc.returncode == 0 and "intertwiner" in proc.stdout
