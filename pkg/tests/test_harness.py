"""CLI commands, reports, exit codes, reproducibility."""

import json

import pytest

from qx2src import cli, harness


def run_cli(*argv):
    return cli.main(list(argv))


# --------------------------------------------------------------------------
# extract


def test_extract_zero_files_multibit(tmp_path):
    x = tmp_path / "x.bin"
    y = tmp_path / "y.bin"
    out = tmp_path / "out.bin"
    x.write_bytes(bytes(2))
    y.write_bytes(bytes(2))
    code, report = harness.run_extract({
        "x_path": str(x), "y_path": str(y), "out_path": str(out),
        "n": 16, "m": 8, "extractor": "multibit",
        "k1": 16, "k2": 16, "eps": 0.5,
    })
    assert out.read_bytes() == b"\x00"
    assert code == 0
    assert report.passed


def test_extract_deterministic(tmp_path):
    x = tmp_path / "x.bin"
    y = tmp_path / "y.bin"
    x.write_bytes(bytes([0xDE, 0xAD, 0xBE, 0xEF]))
    y.write_bytes(bytes([0x01, 0x23, 0x45, 0x67]))
    outs = []
    for name in ("o1.bin", "o2.bin"):
        out = tmp_path / name
        code, _ = harness.run_extract({
            "x_path": str(x), "y_path": str(y), "out_path": str(out),
            "n": 32, "m": 16, "extractor": "multibit",
            "k1": 32, "k2": 32, "eps": 0.5,
        })
        assert code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_extract_infeasible_warning_exit_2(tmp_path):
    x = tmp_path / "x.bin"
    y = tmp_path / "y.bin"
    out = tmp_path / "out.bin"
    x.write_bytes(bytes(4))
    y.write_bytes(bytes(4))
    code, report = harness.run_extract({
        "x_path": str(x), "y_path": str(y), "out_path": str(out),
        "n": 32, "m": 16, "extractor": "multibit",
        "k1": 8, "k2": 8, "eps": 2.0 ** -10,
    })
    assert code == 2
    assert not report.passed
    assert out.exists()  # output still produced, flagged


def test_extract_short_input_exit_1(tmp_path):
    x = tmp_path / "x.bin"
    y = tmp_path / "y.bin"
    x.write_bytes(bytes(1))
    y.write_bytes(bytes(4))
    code = run_cli("extract", "--x", str(x), "--y", str(y),
                   "--n", "32", "--m", "4")
    assert code == 1


def test_extract_hex_roundtrip(tmp_path):
    x = tmp_path / "x.hex"
    y = tmp_path / "y.hex"
    out = tmp_path / "out.hex"
    x.write_text("deadbeef\n")
    y.write_text("01234567\n")
    code = run_cli("extract", "--x", str(x), "--y", str(y),
                   "--output", str(out), "--format", "hex",
                   "--n", "32", "--m", "8", "--k1", "32", "--k2", "32",
                   "--eps", "0.25", "--out", str(tmp_path / "rep.json"))
    assert code == 0
    assert len(bytes.fromhex(out.read_text().strip())) == 1


def test_extract_composed_cli(tmp_path):
    x = tmp_path / "x.bin"
    y = tmp_path / "y.bin"
    out = tmp_path / "out.bin"
    x.write_bytes(bytes(range(8)))
    y.write_bytes(bytes(range(8, 16)))
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "n": 64, "m": 3, "extractor": "composed", "which": "X",
        "seeded": {"kind": "trevisan", "t": 8},
        "k1": 64, "k2": 64, "eps": 2.0 ** -2, "c_poly": 0.01,
    }))
    code = run_cli("extract", "--x", str(x), "--y", str(y),
                   "--output", str(out), "--config", str(cfg),
                   "--out", str(tmp_path / "rep.json"))
    assert code == 0
    assert len(out.read_bytes()) == 1


def test_extract_ip_one_bit(tmp_path):
    x = tmp_path / "x.bin"
    y = tmp_path / "y.bin"
    x.write_bytes(b"\xff")
    y.write_bytes(b"\x01")
    code, report = harness.run_extract({
        "x_path": str(x), "y_path": str(y),
        "n": 8, "m": 1, "extractor": "ip", "k1": 8, "k2": 8, "eps": 0.25,
    })
    assert code == 0


# --------------------------------------------------------------------------
# verify / attack smoke runs with small budgets


def test_verify_suite_smoke(tmp_path):
    rep = harness.run_verify("xor", seed=7, trials=12, equality_trials=6)
    assert rep.passed
    rep = harness.run_verify("reduction", seed=7, trials=10)
    assert rep.passed
    rep = harness.run_verify("normbound", seed=7, trials=10)
    assert rep.passed
    rep = harness.run_verify("matrices", seed=7, exhaustive_max_n=5,
                             random_ns=(16,), random_trials=50)
    assert rep.passed
    rep = harness.run_verify("security", seed=7, instances=4)
    assert rep.passed


def test_verify_unknown_suite():
    with pytest.raises(Exception):
        harness.run_verify("nonesuch")


def test_attack_reports_pass():
    assert harness.run_smp_attack(ns=(2,)).passed
    assert harness.run_superdense_attack(max_n=4).passed
    assert harness.run_knowledge_attack(3).passed
    assert harness.run_tightness_attack(4, 4, 4, 4, 4, "non-entangled").passed


def test_cli_verify_exit_codes(tmp_path):
    out = tmp_path / "rep.json"
    code = run_cli("verify", "matrices", "--seed", "3", "--out", str(out),
                   "--config", str(_write_config(tmp_path, {
                       "exhaustive_max_n": 4, "random_ns": [8],
                       "random_trials": 20})))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] is True
    assert doc["config"]["seed"] == 3
    assert "wall_clock_s" in doc


def _write_config(tmp_path, payload):
    p = tmp_path / "config.json"
    p.write_text(json.dumps(payload))
    return p


def test_cli_attack_tightness(tmp_path):
    out = tmp_path / "attack.json"
    code = run_cli("attack", "tightness", "--n", "4", "--k1", "4", "--k2", "4",
                   "--b1", "4", "--b2", "4", "--setting", "non-entangled",
                   "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["records"][0]["measured"] == pytest.approx(0.5, abs=1e-9)


def test_cli_attack_missing_params():
    assert run_cli("attack", "tightness", "--n", "4") == 1


def test_cli_exit_3_on_verification_failure(monkeypatch, tmp_path):
    def failing_suite(seed=0, **kwargs):
        rep = harness.Report("verify:demo", {"seed": seed})
        rep.add("always fails", 1.0, 0.0, False)
        return rep

    monkeypatch.setitem(harness.VERIFY_SUITES, "demo", failing_suite)
    out = tmp_path / "rep.json"
    assert run_cli("verify", "demo", "--out", str(out)) == 3
    assert json.loads(out.read_text())["passed"] is False


def test_cli_bounds_table(tmp_path):
    out = tmp_path / "bounds.json"
    code = run_cli("bounds", "--n", "100", "--k1", "80", "--k2", "80",
                   "--b1", "20", "--b2", "20", "--eps", str(2.0 ** -11),
                   "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    row = doc["rows"][0]
    assert row["one-bit_weak-min_entangled"]["value"] == 2.0 ** -11
    assert row["one-bit_weak-min_entangled"]["satisfied"] is True


def test_bounds_table_sweep_and_empty():
    table = harness.bounds_table({"n": 64, "k1": 60, "k2": 60,
                                  "sweep": {"b2": [0, 1, 2]}})
    assert len(table["rows"]) == 3
    empty = harness.bounds_table({"n": 64, "k1": 60, "k2": 60,
                                  "sweep": {"b2": []}})
    assert empty["rows"] == []


def test_bounds_single_point_echoes_calculator():
    table = harness.bounds_table({"n": 100, "k1": 100, "k2": 100,
                                  "eps": 2.0 ** -10})
    assert table["rows"][0]["strong_m_X_entangled"] == 41


# --------------------------------------------------------------------------
# reproducibility


def test_reports_reproducible_excluding_wall_clock():
    a = harness.run_verify("xor", seed=11, trials=20, equality_trials=5)
    b = harness.run_verify("xor", seed=11, trials=20, equality_trials=5)
    assert a.to_json(include_wall_clock=False) == b.to_json(include_wall_clock=False)
    c = harness.run_tightness_attack(4, 4, 4, 4, 4, "entangled", seed=11)
    d = harness.run_tightness_attack(4, 4, 4, 4, 4, "entangled", seed=11)
    assert c.to_json(include_wall_clock=False) == d.to_json(include_wall_clock=False)


def test_report_pass_flag_consistency():
    rep = harness.Report("demo", {"seed": 1})
    rep.add("ok", 1.0, 1.0, True)
    assert rep.passed
    rep.add("bad", 2.0, 1.0, False)
    assert not rep.passed
