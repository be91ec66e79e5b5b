import csv
import io
import json

import numpy as np
import pytest

from qspoof.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_link_columns_and_format(capsys):
    code, out, _ = run(capsys, "link", "--points", "5")
    assert code == 0
    table = rows(out)
    assert list(table[0]) == ["range_m", "tau", "xi", "xi_prime", "N0", "N1"]
    assert len(table) == 5
    assert float(table[0]["range_m"]) == 300.0 and float(table[-1]["range_m"]) == 100e3
    # 17 significant digits round-trip exactly
    tau = table[2]["tau"]
    assert repr(float(tau)) == repr(float(format(float(tau), ".17g")))
    assert len(tau.split("e")[0].replace(".", "").lstrip("0")) >= 15


def test_link_ten_bit_anchor_and_crossing(capsys):
    code, out, _ = run(capsys, "link", "--bits", "10", "--range-start", "500",
                       "--range-stop", "1e6", "--points", "400")
    assert code == 0
    table = rows(out)
    r = np.array([float(t["range_m"]) for t in table])
    xi = np.array([float(t["xi"]) for t in table])
    assert np.interp(np.log(1e3), np.log(r), np.log(xi)) == pytest.approx(np.log(9e4), abs=0.1)
    # log-log interpolation of the unit crossing
    crossing = np.exp(np.interp(0.0, np.log(xi[::-1]), np.log(r[::-1])))
    assert crossing == pytest.approx(17e3, rel=0.1)


def test_detect_default_bits(capsys):
    code, out, _ = run(capsys, "detect", "--points", "30")
    assert code == 0
    table = rows(out)
    assert list(table[0]) == ["range_m", "bits", "p_opt_minus_half", "p_het_minus_half", "mu_opt"]
    assert {t["bits"] for t in table} == {"32", "inf"}
    for t in table:
        assert 0 <= float(t["p_het_minus_half"]) <= float(t["p_opt_minus_half"]) * (1 + 1e-9)
    b32 = [float(t["p_het_minus_half"]) for t in table if t["bits"] == "32"]
    binf = [float(t["p_het_minus_half"]) for t in table if t["bits"] == "inf"]
    # at short range the spoofer's quantization noise widens the gap and helps detection
    assert b32[0] > binf[0]
    assert b32[-1] == pytest.approx(binf[-1], rel=1e-3)


def test_bayes_reports_crossing_and_warning(capsys):
    code, out, err = run(capsys, "bayes")
    assert code == 0
    table = rows(out)
    assert list(table[0]) == ["M", "mean_diff_formula"]
    assert float(table[0]["mean_diff_formula"]) == 0.0
    assert "M = 60267" in err
    assert "WARNING" in err and "6e+05" in err


def test_bayes_with_monte_carlo(capsys):
    code, out, err = run(capsys, "bayes", "--m-max", "50000", "--points", "6", "--mc", "200",
                         "--seed", "1")
    assert code == 0
    table = rows(out)
    assert "mean_diff_montecarlo" in table[0]
    for t in table[1:]:
        diff = float(t["mean_diff_montecarlo"]) - float(t["mean_diff_formula"])
        assert abs(diff) < 0.05
    assert "WARNING" in err


def test_bayes_no_warning_off_reference(capsys):
    code, _, err = run(capsys, "bayes", "--range", "2000")
    assert code == 0 and "WARNING" not in err


def test_dwell(capsys):
    code, out, _ = run(capsys, "dwell", "--range-start", "1000", "--range-stop", "2000",
                       "--points", "3")
    assert code == 0
    table = rows(out)
    assert list(table[0]) == ["range_m", "M_required", "dwell_s"]
    assert float(table[0]["dwell_s"]) == pytest.approx(0.097, abs=1e-3)
    assert int(table[0]["M_required"]) == pytest.approx(48437, abs=10)
    _, out2, _ = run(capsys, "dwell", "--range-start", "1000", "--range-stop", "2000",
                     "--points", "3", "--prf", "1e6")
    faster = rows(out2)
    for a, b in zip(table, faster):
        assert float(b["dwell_s"]) == pytest.approx(float(a["dwell_s"]) / 2, rel=1e-12)


def test_dwell_infinite_resolution(capsys):
    code, out, _ = run(capsys, "dwell", "--bits", "inf", "--points", "4")
    assert code == 0
    assert all(float(t["dwell_s"]) > 0 for t in rows(out))


def test_simulate_is_reproducible(capsys, tmp_path):
    args = ["simulate", "--truth", "random", "--pulses", "200", "--trials", "8", "--seed", "42"]
    code, a, _ = run(capsys, *args)
    assert code == 0
    _, b, _ = run(capsys, *args, "--workers", "2")
    assert a == b
    report = json.loads(a)
    assert report["config"]["seed"] == 42
    assert len(report["trials"]["certainty"]) == 8
    out = tmp_path / "r.json"
    assert main([*args, "--output", str(out), "--summary", "--trajectory"]) == 0
    summary = json.loads(out.read_text())
    assert "trials" not in summary and len(summary["trajectory"]) == 200


def test_simulate_exponential_near_target(capsys):
    code, out, _ = run(capsys, "simulate", "--truth", "H1", "--pulses", "48437", "--trials", "20",
                       "--update", "exponential", "--summary")
    assert code == 0
    assert json.loads(out)["mean_certainty"]["value"] == pytest.approx(0.9, abs=0.02)


def test_missing_truth_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate"])
    assert exc.value.code == 2


@pytest.mark.parametrize("argv", [
    ["link", "--range-start", "5000", "--range-stop", "5000"],
    ["link", "--points", "1"],
    ["bayes", "--m-max", "0"],
    ["link", "--config", "/nonexistent/scenario.json"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_bad_bits_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["link", "--bits", "zero"])
    assert exc.value.code == 2


def test_config_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"range_m": 1000, "antenna_gain": 4}')
    code, _, err = run(capsys, "link", "--config", str(bad))
    assert code == 2 and "antenna_gain" in err
    broken = tmp_path / "broken.json"
    broken.write_text('{\n"range_m": ,\n}')
    code, _, err = run(capsys, "link", "--config", str(broken))
    assert code == 2 and "line 2" in err


def test_config_file_applies(capsys, tmp_path):
    cfg = tmp_path / "sc.json"
    cfg.write_text(json.dumps({"n_t_prime": 10.0}))
    code, out, _ = run(capsys, "link", "--config", str(cfg), "--points", "2")
    assert code == 0
    assert float(rows(out)[-1]["N0"]) == pytest.approx(10.0, abs=1e-3)


def test_out_of_model(capsys):
    code, _, err = run(capsys, "link", "--range-start", "0.01", "--range-stop", "1")
    assert code == 3 and "error" in err
