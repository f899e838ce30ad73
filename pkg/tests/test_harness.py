import json
import os
import subprocess
import sys

import numpy as np
import pytest

from ncsimo.cli import main
from ncsimo.errors import ConfigError, ProfileParseError
from ncsimo.harness import (BerRecord, SimConfig, config_from_dict, design_report, emit_outputs,
                            kl_table, load_config, parse_profiles, replay, run_ber_sweep)
from ncsimo.harness.engine import bits_per_block, simulate_batch, wilson_interval
from ncsimo.harness.outputs import CSV_COLUMNS, read_csv, records_from_manifest, records_to_csv

SMALL = dict(K=2, M_list=(8, 16), trials=3000, batch_size=500, error_target=None, seed=3)


def test_config_defaults():
    cfg = SimConfig()
    assert cfg.scheme == "proposed" and cfg.K == 2 and cfg.radius_m == 1000.0
    assert cfg.powers == pytest.approx([0.31622776601683794] * 2)
    fixed = SimConfig(distance_m=300.0)
    assert fixed.radius_m is None and fixed.placement.distance == 300.0


@pytest.mark.parametrize("changes,key", [
    ({"trials": 0}, "trials"),
    ({"scheme": "qam"}, "scheme"),
    ({"M_list": ()}, "M_list"),
    ({"M_list": (16, 0)}, "M_list"),
    ({"K": 0}, "K"),
    ({"radius_m": 50.0}, "radius_m"),
    ({"P_dBm": (20.0, 21.0, 22.0)}, "P_dBm"),
    ({"error_target": 0}, "error_target"),
    ({"seed": -1}, "seed"),
])
def test_config_errors_name_the_key(changes, key):
    with pytest.raises(ConfigError, match=f"'{key}'"):
        SimConfig(**changes)


def test_config_from_dict_and_file(tmp_path):
    cfg = config_from_dict({"scheme": "med", "M_list": [4, 8], "P_dBm": [20, 23], "radio": {"F0": 0}})
    assert cfg.M_list == (4, 8) and cfg.radio.F0 == 0 and cfg.powers[1] == pytest.approx(0.19952623)
    with pytest.raises(ConfigError, match="'bogus'"):
        config_from_dict({"bogus": 1})
    with pytest.raises(ConfigError, match="'radio.foo'"):
        config_from_dict({"radio": {"foo": 1}})
    good = tmp_path / "c.json"
    good.write_text(json.dumps(cfg.to_dict()))
    assert load_config(good) == cfg
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "K": 2,\n  "trials" 5\n}\n')
    with pytest.raises(ConfigError, match="line 3"):
        load_config(bad)


def test_bits_accounting():
    assert [bits_per_block(s, 3) for s in ("proposed", "med", "zf-train")] == [6, 3, 18]
    n, errors, bits = simulate_batch(SimConfig(**SMALL), 8, 6)  # past the cap
    assert (n, errors, bits) == (0, 0, 0)


def test_high_budget_single_user_ber():
    cfg = SimConfig(K=1, M_list=(64,), distance_m=100.0, trials=10_000, error_target=None)
    rec, = run_ber_sweep(cfg)
    assert rec.trials == 10_000
    assert rec.ber < 1e-3
    assert rec.placement == "fixed" and rec.radius_m == 100.0


def test_record_invariants():
    for scheme in ("proposed", "med", "zf-train"):
        K = 3 if scheme == "zf-train" else 2
        for rec in run_ber_sweep(SimConfig(**{**SMALL, "scheme": scheme, "K": K})):
            assert 0 <= rec.ber <= 1
            assert rec.ber == rec.bit_errors / (rec.trials * bits_per_block(scheme, K))
            lo, hi = rec.wilson_ci_95
            assert lo <= rec.ber <= hi


def test_early_stop_uses_trials_run():
    cfg = SimConfig(K=2, M_list=(8,), trials=20_000, batch_size=500, error_target=50, seed=1)
    rec, = run_ber_sweep(cfg)
    assert rec.bit_errors >= 50 and rec.trials < 20_000 and rec.trials % 500 == 0


def test_workers_do_not_change_results():
    cfg = SimConfig(**{**SMALL, "error_target": 40})
    assert run_ber_sweep(cfg, workers=1) == run_ber_sweep(cfg, workers=8)


def test_common_random_numbers_across_schemes():
    # with the same seed both schemes see the same large-scale draws and fading
    from ncsimo.harness.engine import _large_scale
    a = _large_scale(SimConfig(seed=4), 16, 2, 10)
    b = _large_scale(SimConfig(seed=4, scheme="med"), 16, 2, 10)
    np.testing.assert_array_equal(a.beta, b.beta)
    np.testing.assert_array_equal(a.G, b.G)


def test_wilson_interval_coverage():
    rng = np.random.default_rng(0)
    n, hits, runs = 2000, 0, 1000
    for p in (0.002, 0.02, 0.2):
        for k in rng.binomial(n, p, runs):
            lo, hi = wilson_interval(k, n)
            hits += lo <= p <= hi
    assert hits / (3 * runs) >= 0.93
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_emit_outputs_and_replay(tmp_path):
    cfg = SimConfig(**{**SMALL, "M_list": (4, 8, 16)})
    records = run_ber_sweep(cfg)
    csv_path, manifest_path, plot_path = emit_outputs(records, tmp_path / "run", configs=[cfg])
    rows = read_csv(csv_path)
    with open(csv_path) as fh:
        assert fh.readline().strip() == ",".join(CSV_COLUMNS)
    assert len(rows) == 3 and [int(r["M"]) for r in rows] == [4, 8, 16]
    assert records_from_manifest(manifest_path) == records
    again = replay(manifest_path)
    assert again == records
    emit_outputs(again, tmp_path / "rerun", configs=[cfg])
    with open(csv_path, "rb") as a, open(tmp_path / "rerun" / "ber.csv", "rb") as b:
        assert a.read() == b.read()
    compile(open(plot_path).read(), plot_path, "exec")
    with pytest.raises(ValueError):
        emit_outputs([], tmp_path / "empty")


def test_emit_outputs_unwritable(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    rec = BerRecord("proposed", 1, 4, "disk", 1000.0, 1, 0, 0.0, (0.0, 1.0), 0, 1.0)
    with pytest.raises(OSError):
        emit_outputs([rec], blocker / "sub")


def test_plot_script_runs(tmp_path):
    pytest.importorskip("matplotlib")
    records = run_ber_sweep(SimConfig(**SMALL))
    _, _, plot_path = emit_outputs(records, tmp_path, configs=[])
    subprocess.run([sys.executable, plot_path], check=True, capture_output=True)
    assert (tmp_path / "ber.png").exists()


TWO_USER = "# P_dBm beta_dB\n0 0\n0 3.0102999566398120\n"


def test_parse_profiles():
    profs = parse_profiles(TWO_USER)
    assert [u.P for u in profs] == pytest.approx([1e-3, 1e-3])
    assert profs[1].beta == pytest.approx(2.0)
    assert len(parse_profiles("1, 2\n\n3 4  # trailing\n")) == 2


@pytest.mark.parametrize("text,line", [
    ("1 2\n3\n", 2),
    ("1 2\n3 abc\n", 2),
    ("nan 2\n", 1),
    ("# nothing\n", 0),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ProfileParseError) as info:
        parse_profiles(text)
    assert info.value.lineno == line


def test_design_report_two_user(tmp_path):
    path = tmp_path / "two.txt"
    # P*beta = (1, 2) in watts: 30 dBm with 0 dB and 3.0103 dB gains
    path.write_text("30 0\n30 3.0102999566398120\n")
    text, design = design_report(str(path), sigma2=0.5)
    assert design.d == pytest.approx(1.414214, abs=1e-6)
    np.testing.assert_allclose(design.p, [1.0, 0.5], rtol=1e-12)
    assert "d = 1.41421" in text and "p = (1, 0.5)" in text and "min KL" in text


def test_design_report_single_user():
    profs = parse_profiles("25 -100\n")
    _, design = design_report(profs, sigma2=1e-13)
    assert design.p[0] == pytest.approx(1.0 / (profs[0].P * profs[0].beta), rel=1e-12)


def test_design_report_unsorted_mapping():
    text, _ = design_report(parse_profiles("30 3\n30 0\n"), sigma2=0.5, M=64)
    assert "user 2 -> rank 1" in text and "user 1 -> rank 2" in text
    assert "64 antennas" in text


def test_kl_table():
    text = kl_table(parse_profiles("30 0\n30 3.0103\n"), sigma2=0.5, M=4, limit=5)
    lines = text.splitlines()
    assert len(lines) == 6
    kl = [float(line.split()[-2]) for line in lines[1:]]
    assert kl == sorted(kl)


def test_cli_commands(tmp_path, capsys):
    prof = tmp_path / "p.txt"
    prof.write_text("25 -100\n25 -103\n")
    assert main(["design", str(prof)]) == 0
    assert "min KL" in capsys.readouterr().out
    assert main(["kl", str(prof), "--limit", "3"]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 4
    assert main(["ber", "--users", "1", "--m-list", "8", "--trials", "500", "--batch-size", "250",
                 "--seed", "2"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == ",".join(CSV_COLUMNS) and len(out.splitlines()) == 2
    out_dir = tmp_path / "out"
    assert main(["baseline", "--scheme", "zf-train", "--users", "3", "--distance-m", "1000",
                 "--m-list", "16", "--trials", "400", "--batch-size", "200", "--out", str(out_dir)]) == 0
    assert sorted(os.listdir(out_dir)) == ["ber.csv", "manifest.json", "plot_ber.py"]
    assert read_csv(out_dir / "ber.csv")[0]["bits_per_slot_per_user"] == "1.5"


def test_cli_config_file_and_errors(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"K": 1, "M_list": [8], "trials": 300, "batch_size": 300}))
    assert main(["ber", "--config", str(cfg)]) == 0
    assert capsys.readouterr().out.count("\n") == 2
    assert main(["ber", "--trials", "0"]) == 2
    assert "'trials'" in capsys.readouterr().err
    assert main(["baseline", "--scheme", "proposed"]) == 2
    assert main(["design", str(tmp_path / "missing.txt")]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2\noops\n")
    assert main(["design", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_records_to_csv_stable_repr():
    rec = BerRecord("med", 2, 64, "disk", 1000.0, 10, 3, 0.15, (0.05, 0.36), 7, 1.0)
    line = records_to_csv([rec]).splitlines()[1]
    assert line == "med,2,64,disk,1000.0,10,3,0.15,0.05,0.36,7,1.0"
